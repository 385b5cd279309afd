//! Parameter sweeps over (gamma, w, omega, t) and their CSV form.

mod csv;
mod engine;

pub use csv::{format_number, render_csv, write_csv, CSV_HEADER, CSV_MAGIC};
pub use engine::{long_time_records, long_time_sweep, long_time_value, run_scan};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::manybody::DEFAULT_ALPHA;
use crate::milburn::DensityMatrix;
use crate::pendular::DEFAULT_JMAX;
use crate::teleport::BellState;

const NORM_TOL: f64 = 1e-12;

/// Starting state of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialStateSpec {
    /// (|000> + |111>)/sqrt(2)
    Ghz,
    /// (|001> + |010> + |100>)/sqrt(3)
    W,
    /// |001>
    Sep001,
    /// a|01> + b|10>
    Amplitudes { a: f64, b: f64 },
}

impl InitialStateSpec {
    pub fn amplitudes(a: f64, b: f64) -> Result<Self> {
        let norm = a * a + b * b;
        if !a.is_finite() || !b.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Config(format!(
                "amplitudes a={a}, b={b} have |a|^2+|b|^2 = {norm}, expected 1"
            )));
        }
        Ok(Self::Amplitudes { a, b })
    }

    /// Number of qubits the state lives on.
    pub fn qubits(&self) -> usize {
        match self {
            Self::Amplitudes { .. } => 2,
            _ => 3,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Ghz => "ghz".into(),
            Self::W => "w".into(),
            Self::Sep001 => "sep001".into(),
            Self::Amplitudes { a, b } => format!("ab:{}:{}", format_number(*a), format_number(*b)),
        }
    }
}

impl fmt::Display for InitialStateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for InitialStateSpec {
    type Err = Error;

    /// `ghz`, `w`, `sep001`, or `a,b` where each amplitude may be written as
    /// a product or quotient of numbers and `sqrt(x)`, e.g. `sqrt(3)/2,1/2`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ghz" => Ok(Self::Ghz),
            "w" => Ok(Self::W),
            "sep001" => Ok(Self::Sep001),
            other => {
                let (a, b) = other.split_once(',').ok_or_else(|| {
                    Error::Config(format!(
                        "unknown initial state '{s}' (ghz, w, sep001 or a,b)"
                    ))
                })?;
                Self::amplitudes(parse_amplitude(a)?, parse_amplitude(b)?)
            }
        }
    }
}

fn parse_amplitude(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse amplitude '{}'", text.trim()));
    let mut s = text.trim();
    let mut sign = 1.0;
    if let Some(rest) = s.strip_prefix('-') {
        sign = -1.0;
        s = rest.trim_start();
    }
    let mut value: Option<f64> = None;
    let mut op = '*';
    loop {
        s = s.trim_start();
        let (factor, rest) = if let Some(inner) = s.strip_prefix("sqrt(") {
            let close = inner.find(')').ok_or_else(bad)?;
            let x: f64 = inner[..close].trim().parse().map_err(|_| bad())?;
            if x < 0.0 {
                return Err(bad());
            }
            (x.sqrt(), &inner[close + 1..])
        } else {
            let end = s.find(['*', '/']).unwrap_or(s.len());
            let x: f64 = s[..end].trim().parse().map_err(|_| bad())?;
            (x, &s[end..])
        };
        value = Some(match (value, op) {
            (None, _) => factor,
            (Some(v), '*') => v * factor,
            (Some(v), _) => v / factor,
        });
        let rest = rest.trim_start();
        match rest.chars().next() {
            None => break,
            Some(c @ ('*' | '/')) => {
                op = c;
                s = &rest[1..];
            }
            Some(_) => return Err(bad()),
        }
    }
    let v = sign * value.ok_or_else(bad)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Pure-state density matrix for `spec` on `n` qubits.
pub fn initial_state(spec: &InitialStateSpec, n: usize) -> Result<DensityMatrix> {
    if spec.qubits() != n {
        return Err(Error::Config(format!(
            "initial state {spec} is defined on {} qubits, not {n}",
            spec.qubits()
        )));
    }
    let dim = 1 << n;
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    let mut set = |indices: &[usize], amp: f64| {
        for &i in indices {
            psi[i] = C64::new(amp, 0.0);
        }
    };
    match *spec {
        InitialStateSpec::Ghz => set(&[0, 7], std::f64::consts::FRAC_1_SQRT_2),
        InitialStateSpec::W => set(&[1, 2, 4], 1.0 / 3f64.sqrt()),
        InitialStateSpec::Sep001 => set(&[1], 1.0),
        InitialStateSpec::Amplitudes { a, b } => {
            set(&[1], a);
            set(&[2], b);
        }
    }
    DensityMatrix::pure(&psi)
}

/// A scan axis: one value, or `count` evenly spaced points from `lo` to `hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    Fixed(f64),
    Range { lo: f64, hi: f64, count: usize },
}

impl Axis {
    pub fn range(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = Self::Range { lo, hi, count };
        axis.validate("axis")?;
        Ok(axis)
    }

    pub fn is_range(&self) -> bool {
        matches!(self, Self::Range { .. })
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            Self::Fixed(v) => vec![v],
            Self::Range { lo, hi, count } => linspace(lo, hi, count),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match *self {
            Self::Fixed(v) if !v.is_finite() => {
                Err(Error::Config(format!("{name} must be finite")))
            }
            Self::Range { lo, hi, count } => {
                if !lo.is_finite() || !hi.is_finite() {
                    Err(Error::Config(format!("{name} range must be finite")))
                } else if count < 2 {
                    Err(Error::Config(format!(
                        "{name} range needs at least 2 points"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn min(&self) -> f64 {
        match *self {
            Self::Fixed(v) => v,
            Self::Range { lo, hi, .. } => lo.min(hi),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `v` or `lo:hi:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse '{p}' in '{s}'")))
        };
        match parts.as_slice() {
            [v] => Ok(Self::Fixed(num(v)?)),
            [lo, hi, count] => {
                let count = count
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad point count in '{s}'")))?;
                Self::range(num(lo)?, num(hi)?, count)
            }
            _ => Err(Error::Config(format!(
                "expected 'v' or 'lo:hi:count', got '{s}'"
            ))),
        }
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|k| {
            if k + 1 == count {
                hi
            } else {
                lo + step * k as f64
            }
        })
        .collect()
}

/// Sample times `start..=stop`, `count >= 1` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let grid = Self { start, stop, count };
        grid.validate()?;
        Ok(grid)
    }

    pub fn single(t: f64) -> Result<Self> {
        Self::new(t, t, 1)
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }

    fn validate(&self) -> Result<()> {
        if !self.start.is_finite()
            || !self.stop.is_finite()
            || self.start < 0.0
            || self.stop < self.start
        {
            return Err(Error::Config(format!(
                "time grid {}..{} must satisfy 0 <= start <= stop",
                self.start, self.stop
            )));
        }
        if self.count == 0 {
            return Err(Error::Config("time grid needs at least one point".into()));
        }
        if self.count == 1 && self.stop != self.start {
            return Err(Error::Config(
                "a one-point time grid needs start == stop".into(),
            ));
        }
        Ok(())
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 20.0,
            count: 400,
        }
    }
}

impl FromStr for TimeGrid {
    type Err = Error;

    /// `t` or `lo:hi:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse '{p}' in '{s}'")))
        };
        match parts.as_slice() {
            [t] => Self::single(num(t)?),
            [lo, hi, count] => {
                let count = count
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad point count in '{s}'")))?;
                Self::new(num(lo)?, num(hi)?, count)
            }
            _ => Err(Error::Config(format!(
                "expected 't' or 'lo:hi:count', got '{s}'"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// Tripartite negativity, three qubits only.
    Negativity3,
    /// Teleportation fidelity with the state as channel, two qubits only.
    Fidelity,
    Purity,
    /// One record per product-basis population.
    Populations,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Negativity3 => "negativity3",
            Self::Fidelity => "fidelity",
            Self::Purity => "purity",
            Self::Populations => "populations",
        }
    }

    fn is_bounded(&self) -> bool {
        matches!(self, Self::Negativity3 | Self::Fidelity)
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "negativity3" => Ok(Self::Negativity3),
            "fidelity" => Ok(Self::Fidelity),
            "purity" => Ok(Self::Purity),
            "populations" => Ok(Self::Populations),
            _ => Err(Error::Config(format!(
                "unknown observable '{s}' (negativity3, fidelity, purity, populations)"
            ))),
        }
    }
}

/// Which state is teleported through the evolved channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RhoIn {
    /// The initial pure state of the scan.
    #[default]
    Initial,
    Bell(BellState),
    /// The evolved state itself, i.e. the same state as the channel.
    Evolved,
}

impl FromStr for RhoIn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "initial" => Ok(Self::Initial),
            "evolved" => Ok(Self::Evolved),
            "psi-" => Ok(Self::Bell(BellState::PsiMinus)),
            "psi+" => Ok(Self::Bell(BellState::PsiPlus)),
            "phi-" => Ok(Self::Bell(BellState::PhiMinus)),
            "phi+" => Ok(Self::Bell(BellState::PhiPlus)),
            _ => Err(Error::Config(format!(
                "unknown input state '{s}' (initial, evolved, psi-, psi+, phi-, phi+)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub n: usize,
    pub initial: InitialStateSpec,
    pub gamma: Axis,
    pub w: Axis,
    pub omega: Axis,
    pub alpha: f64,
    pub t_grid: TimeGrid,
    pub observable: Observable,
    pub jmax: usize,
    pub rho_in: Option<RhoIn>,
}

impl ScanConfig {
    /// Fixed-parameter config with default alpha, time grid and jmax.
    pub fn new(
        initial: InitialStateSpec,
        observable: Observable,
        gamma: f64,
        w: f64,
        omega: f64,
    ) -> Self {
        Self {
            n: initial.qubits(),
            initial,
            gamma: Axis::Fixed(gamma),
            w: Axis::Fixed(w),
            omega: Axis::Fixed(omega),
            alpha: DEFAULT_ALPHA,
            t_grid: TimeGrid::default(),
            observable,
            jmax: DEFAULT_JMAX,
            rho_in: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 && self.n != 3 {
            return Err(Error::Config(format!("n must be 2 or 3, got {}", self.n)));
        }
        if self.initial.qubits() != self.n {
            return Err(Error::Config(format!(
                "initial state {} does not fit n = {}",
                self.initial, self.n
            )));
        }
        match (self.observable, self.n) {
            (Observable::Negativity3, 2) => {
                return Err(Error::Config("negativity3 needs n = 3".into()));
            }
            (Observable::Fidelity, 3) => {
                return Err(Error::Config("fidelity needs n = 2".into()));
            }
            _ => {}
        }
        if self.rho_in.is_some() && self.observable != Observable::Fidelity {
            return Err(Error::Config(
                "an input state only applies to the fidelity observable".into(),
            ));
        }
        for (name, axis) in [
            ("gamma", &self.gamma),
            ("w", &self.w),
            ("omega", &self.omega),
        ] {
            axis.validate(name)?;
        }
        let ranges = [self.gamma, self.w, self.omega]
            .iter()
            .filter(|a| a.is_range())
            .count();
        if ranges > 1 {
            return Err(Error::Config(
                "at most one of gamma, w, omega may be a range".into(),
            ));
        }
        if self.gamma.min() < 0.0 {
            return Err(Error::Config("gamma must be non-negative".into()));
        }
        if self.w.min() < 0.0 {
            return Err(Error::Config("w must be non-negative".into()));
        }
        if self.omega.min() < 0.0 {
            return Err(Error::Config("omega must be non-negative".into()));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must lie in [0, pi], got {}",
                self.alpha
            )));
        }
        if self.jmax < 2 {
            return Err(Error::Config(format!(
                "jmax must be at least 2, got {}",
                self.jmax
            )));
        }
        self.t_grid.validate()
    }

    /// `(gamma, w, omega)` for every point of the swept axis, in order.
    pub fn grid_points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &g in &self.gamma.values() {
            for &w in &self.w.values() {
                for &o in &self.omega.values() {
                    out.push((g, w, o));
                }
            }
        }
        out
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub initial: String,
    pub gamma: f64,
    pub w: f64,
    pub omega: f64,
    pub alpha: f64,
    /// `f64::INFINITY` for long-time values.
    pub t: f64,
    pub observable: String,
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_examples() {
        let ghz = initial_state(&InitialStateSpec::Ghz, 3).unwrap();
        for (r, c) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((ghz.matrix()[(r, c)].re - 0.5).abs() < 1e-15);
        }
        assert!(
            (ghz.matrix()
                .as_slice()
                .iter()
                .map(|z| z.norm())
                .sum::<f64>()
                - 2.0)
                .abs()
                < 1e-15
        );

        let w = initial_state(&InitialStateSpec::W, 3).unwrap();
        for i in [1, 2, 4] {
            for j in [1, 2, 4] {
                assert!((w.matrix()[(i, j)].re - 1.0 / 3.0).abs() < 1e-15);
            }
        }

        let ab = initial_state(&InitialStateSpec::amplitudes(1.0, 0.0).unwrap(), 2).unwrap();
        assert_eq!(ab.populations(), vec![0.0, 1.0, 0.0, 0.0]);

        assert!(initial_state(&InitialStateSpec::Ghz, 2).is_err());
        assert!(initial_state(&InitialStateSpec::amplitudes(0.6, 0.8).unwrap(), 3).is_err());
    }

    #[test]
    fn parse_initial() {
        assert_eq!(
            "GHZ".parse::<InitialStateSpec>().unwrap(),
            InitialStateSpec::Ghz
        );
        assert_eq!(
            "sep001".parse::<InitialStateSpec>().unwrap(),
            InitialStateSpec::Sep001
        );
        let InitialStateSpec::Amplitudes { a, b } = "sqrt(3)/2, 1/2".parse().unwrap() else {
            panic!("expected amplitudes");
        };
        assert!((a - 3f64.sqrt() / 2.0).abs() < 1e-15 && b == 0.5);
        let InitialStateSpec::Amplitudes { a, b } = "1/sqrt(2),-sqrt(2)/2".parse().unwrap() else {
            panic!("expected amplitudes");
        };
        assert!((a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!("0.6,0.6".parse::<InitialStateSpec>().is_err());
        assert!("bell".parse::<InitialStateSpec>().is_err());
        assert!("sqrt(3,1".parse::<InitialStateSpec>().is_err());
        assert!("1,0x".parse::<InitialStateSpec>().is_err());
        assert!("sqrt(-1),0".parse::<InitialStateSpec>().is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(InitialStateSpec::W.label(), "w");
        let s: InitialStateSpec = "0.6,0.8".parse().unwrap();
        assert_eq!(s.label(), "ab:0.6:0.8");
    }

    #[test]
    fn axes_and_grids() {
        assert_eq!("0.5".parse::<Axis>().unwrap(), Axis::Fixed(0.5));
        let r: Axis = "0:1:5".parse().unwrap();
        assert_eq!(r.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("0:1:1".parse::<Axis>().is_err());
        assert!("0:inf:3".parse::<Axis>().is_err());
        assert!("0:1".parse::<Axis>().is_err());
        assert!("x".parse::<Axis>().is_err());

        assert_eq!("0".parse::<TimeGrid>().unwrap().values(), vec![0.0]);
        assert_eq!("0:0:1".parse::<TimeGrid>().unwrap().values(), vec![0.0]);
        assert_eq!(TimeGrid::default().values().len(), 400);
        assert_eq!(*TimeGrid::default().values().last().unwrap(), 20.0);
        assert!(TimeGrid::new(-1.0, 2.0, 3).is_err());
        assert!(TimeGrid::new(2.0, 1.0, 3).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn config_validation() {
        let ok = ScanConfig::new(InitialStateSpec::W, Observable::Negativity3, 0.5, 6.0, 0.5);
        assert!(ok.validate().is_ok());

        let mut two_ranges = ok.clone();
        two_ranges.gamma = Axis::range(0.0, 1.0, 3).unwrap();
        two_ranges.w = Axis::range(1.0, 2.0, 3).unwrap();
        assert!(two_ranges.validate().unwrap_err().is_config_error());

        let mut mixed = ok.clone();
        mixed.observable = Observable::Fidelity;
        assert!(mixed.validate().is_err());

        let ab = InitialStateSpec::amplitudes(0.6, 0.8).unwrap();
        let mut neg2 = ScanConfig::new(ab, Observable::Negativity3, 0.5, 6.0, 0.5);
        assert!(neg2.validate().is_err());
        neg2.observable = Observable::Fidelity;
        neg2.rho_in = Some(RhoIn::Bell(BellState::PsiMinus));
        assert!(neg2.validate().is_ok());

        let mut stray = ok.clone();
        stray.rho_in = Some(RhoIn::Initial);
        assert!(stray.validate().is_err());

        let mut neg_gamma = ok.clone();
        neg_gamma.gamma = Axis::Fixed(-0.1);
        assert!(neg_gamma.validate().is_err());

        let mut neg_omega = ok.clone();
        neg_omega.omega = Axis::range(-1.0, 1.0, 3).unwrap();
        assert!(neg_omega.validate().is_err());

        let mut bad_alpha = ok.clone();
        bad_alpha.alpha = 4.0;
        assert!(bad_alpha.validate().is_err());

        let mut n4 = ok;
        n4.n = 4;
        assert!(n4.validate().is_err());
    }

    #[test]
    fn grid_point_order() {
        let mut cfg = ScanConfig::new(InitialStateSpec::W, Observable::Purity, 0.5, 6.0, 0.5);
        cfg.omega = Axis::range(0.0, 1.0, 3).unwrap();
        assert_eq!(
            cfg.grid_points(),
            vec![(0.5, 6.0, 0.0), (0.5, 6.0, 0.5), (0.5, 6.0, 1.0)]
        );
    }

    #[test]
    fn parse_observable_and_rho_in() {
        assert_eq!(
            "Fidelity".parse::<Observable>().unwrap(),
            Observable::Fidelity
        );
        assert!("entropy".parse::<Observable>().is_err());
        assert_eq!(
            "phi+".parse::<RhoIn>().unwrap(),
            RhoIn::Bell(BellState::PhiPlus)
        );
        assert_eq!("evolved".parse::<RhoIn>().unwrap(), RhoIn::Evolved);
        assert!("bell".parse::<RhoIn>().is_err());
    }
}
