use std::collections::HashMap;

use rayon::prelude::*;

use super::{initial_state, Observable, RhoIn, ScanConfig, ScanRecord};
use crate::entanglement::tripartite_negativity;
use crate::error::{Error, Result};
use crate::manybody::{build_hamiltonian, ChainGeometry, SystemHamiltonian};
use crate::milburn::{DensityMatrix, MilburnPropagator};
use crate::pendular::{escalated_jmax, solve_qubit, PendularQubit};
use crate::teleport::teleport_fidelity;

const BOUND_SLACK: f64 = 1e-9;

struct Point {
    gamma: f64,
    w: f64,
    omega: f64,
}

impl Point {
    fn wrap(&self, e: Error) -> Error {
        Error::GridPoint {
            gamma: self.gamma,
            w: self.w,
            omega: self.omega,
            source: Box::new(e),
        }
    }
}

struct Prepared {
    points: Vec<Point>,
    propagators: Vec<Result<MilburnPropagator>>,
    rho0: DensityMatrix,
}

fn prepare(config: &ScanConfig) -> Result<Prepared> {
    config.validate()?;
    let rho0 = initial_state(&config.initial, config.n)?;
    let points: Vec<Point> = config
        .grid_points()
        .into_iter()
        .map(|(gamma, w, omega)| Point { gamma, w, omega })
        .collect();

    // one qubit solve per distinct w, one Hamiltonian per distinct (w, omega)
    let mut ws: Vec<f64> = points.iter().map(|p| p.w).collect();
    ws.sort_by(f64::total_cmp);
    ws.dedup();
    let qubits: HashMap<u64, Result<PendularQubit>> = ws
        .par_iter()
        .map(|&w| (w.to_bits(), qubit_for(w, config.jmax)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let mut pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.w, p.omega)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs.dedup();
    let hamiltonians: HashMap<(u64, u64), Result<SystemHamiltonian>> = pairs
        .par_iter()
        .map(|&(w, omega)| {
            let h = match &qubits[&w.to_bits()] {
                Ok(q) => ChainGeometry::new(config.n, omega, config.alpha)
                    .and_then(|g| build_hamiltonian(q, &g)),
                Err(e) => Err(clone_error(e)),
            };
            ((w.to_bits(), omega.to_bits()), h)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let propagators = points
        .iter()
        .map(
            |p| match &hamiltonians[&(p.w.to_bits(), p.omega.to_bits())] {
                Ok(h) => MilburnPropagator::new(h, p.gamma),
                Err(e) => Err(clone_error(e)),
            },
        )
        .collect();
    Ok(Prepared {
        points,
        propagators,
        rho0,
    })
}

fn qubit_for(w: f64, jmax: usize) -> Result<PendularQubit> {
    solve_qubit(w, escalated_jmax(w, jmax)?)
}

// Errors are shared between grid points with the same w; the variants that
// can arise before evolution carry plain data.
fn clone_error(e: &Error) -> Error {
    match e {
        Error::NoConvergence { w, limit } => Error::NoConvergence {
            w: *w,
            limit: *limit,
        },
        Error::InvalidArgument(s) => Error::InvalidArgument(s.clone()),
        Error::Config(s) => Error::Config(s.clone()),
        other => Error::InvalidArgument(other.to_string()),
    }
}

fn observe(
    config: &ScanConfig,
    rho0: &DensityMatrix,
    rho: &DensityMatrix,
) -> Result<Vec<(String, f64)>> {
    let name = config.observable.name().to_string();
    let values = match config.observable {
        Observable::Negativity3 => vec![(name, tripartite_negativity(rho)?)],
        Observable::Purity => vec![(name, rho.purity())],
        Observable::Fidelity => {
            let rho_in = match config.rho_in.unwrap_or_default() {
                RhoIn::Initial => rho0.clone(),
                RhoIn::Bell(b) => b.density(),
                RhoIn::Evolved => rho.clone(),
            };
            vec![(name, teleport_fidelity(rho, &rho_in)?)]
        }
        Observable::Populations => {
            let n = config.n;
            rho.populations()
                .into_iter()
                .enumerate()
                .map(|(k, p)| (format!("population_{k:0n$b}"), p))
                .collect()
        }
    };
    for (label, v) in &values {
        let bounded = config.observable.is_bounded();
        if !v.is_finite() || (bounded && !(0.0..=1.0 + BOUND_SLACK).contains(v)) {
            return Err(Error::InvalidState(format!(
                "{label} = {v} is out of range"
            )));
        }
    }
    Ok(values)
}

fn records(config: &ScanConfig, p: &Point, t: f64, values: Vec<(String, f64)>) -> Vec<ScanRecord> {
    let initial = config.initial.label();
    values
        .into_iter()
        .map(|(observable, value)| ScanRecord {
            initial: initial.clone(),
            gamma: p.gamma,
            w: p.w,
            omega: p.omega,
            alpha: config.alpha,
            t,
            observable,
            value,
        })
        .collect()
}

/// Evaluates the observable over the grid. Rows come out with the swept
/// axis outermost and time innermost, independent of thread scheduling.
pub fn run_scan(config: &ScanConfig) -> Result<Vec<ScanRecord>> {
    let prep = prepare(config)?;
    let times = config.t_grid.values();
    let nt = times.len();

    let trajectories: Vec<Result<_>> = prep
        .propagators
        .iter()
        .map(|prop| match prop {
            Ok(prop) => prop.trajectory(&prep.rho0),
            Err(e) => Err(clone_error(e)),
        })
        .collect();

    let rows: Vec<Result<Vec<ScanRecord>>> = (0..prep.points.len() * nt)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nt, k % nt);
            let p = &prep.points[i];
            let eval = || -> Result<Vec<ScanRecord>> {
                let traj = trajectories[i].as_ref().map_err(clone_error)?;
                let rho = traj.at(times[j])?;
                Ok(records(
                    config,
                    p,
                    times[j],
                    observe(config, &prep.rho0, &rho)?,
                ))
            };
            eval().map_err(|e| p.wrap(e))
        })
        .collect();
    flatten_in_order(rows)
}

fn flatten_in_order(rows: Vec<Result<Vec<ScanRecord>>>) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// The `t -> infinity` observable at every point of the swept axis, with
/// `t` recorded as infinity. The time grid is ignored.
pub fn long_time_records(config: &ScanConfig) -> Result<Vec<ScanRecord>> {
    let prep = prepare(config)?;
    if prep.points.iter().any(|p| p.gamma == 0.0) {
        return Err(Error::Config(
            "long-time values need gamma > 0; without decoherence nothing settles".into(),
        ));
    }
    let rows: Vec<Result<Vec<ScanRecord>>> = prep
        .points
        .par_iter()
        .zip(prep.propagators.par_iter())
        .map(|(p, prop)| {
            let eval = || -> Result<Vec<ScanRecord>> {
                let prop = prop.as_ref().map_err(clone_error)?;
                let rho = prop.dephased_limit(&prep.rho0)?;
                Ok(records(
                    config,
                    p,
                    f64::INFINITY,
                    observe(config, &prep.rho0, &rho)?,
                ))
            };
            eval().map_err(|e| p.wrap(e))
        })
        .collect();
    flatten_in_order(rows)
}

/// Single long-time value at fixed parameters.
pub fn long_time_value(config: &ScanConfig) -> Result<f64> {
    if config.gamma.is_range() || config.w.is_range() || config.omega.is_range() {
        return Err(Error::Config(
            "long-time value needs fixed gamma, w and omega".into(),
        ));
    }
    if config.observable == Observable::Populations {
        return Err(Error::Config(
            "populations give several values; use long_time_records".into(),
        ));
    }
    let records = long_time_records(config)?;
    Ok(records[0].value)
}

/// `(swept value, long-time value)` pairs; the axis value is whichever of
/// gamma, w, omega is a range (or gamma when none is).
pub fn long_time_sweep(config: &ScanConfig) -> Result<Vec<(f64, f64)>> {
    if config.observable == Observable::Populations {
        return Err(Error::Config(
            "populations give several values; use long_time_records".into(),
        ));
    }
    let records = long_time_records(config)?;
    Ok(records
        .into_iter()
        .map(|r| {
            let x = if config.w.is_range() {
                r.w
            } else if config.omega.is_range() {
                r.omega
            } else {
                r.gamma
            };
            (x, r.value)
        })
        .collect())
}
