use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pendular_sim::manybody::DEFAULT_ALPHA;
use pendular_sim::pendular::{escalated_jmax, solve_qubit, DEFAULT_JMAX};
use pendular_sim::scan::{
    format_number, long_time_records, run_scan, write_csv, Axis, InitialStateSpec, Observable,
    RhoIn, ScanConfig, TimeGrid,
};
use pendular_sim::Error;

#[derive(Parser)]
#[command(
    name = "pendular-sim",
    version,
    about = "Pendular-state molecular qubits with intrinsic decoherence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two lowest pendular levels and their dipole matrix elements
    Stark {
        /// Field strength mu*eps/B
        #[arg(long, allow_hyphen_values = true)]
        w: f64,
        /// Basis truncation; by default 40, raised as needed for w > 10
        #[arg(long)]
        jmax: Option<usize>,
    },
    /// Time-resolved sweep written as CSV
    Scan {
        #[command(flatten)]
        params: Params,
        /// Sample times as lo:hi:count (or a single t)
        #[arg(long, default_value = "0:20:400")]
        t: TimeGrid,
        #[arg(long)]
        out: PathBuf,
    },
    /// Long-time (fully dephased) value at fixed parameters
    Limit {
        #[command(flatten)]
        params: Params,
        /// Also write the value(s) as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Params {
    /// Number of molecules (2 or 3)
    #[arg(long)]
    n: usize,
    /// negativity3, fidelity, purity or populations
    #[arg(long)]
    observable: Observable,
    /// ghz, w, sep001, or amplitudes a,b of a|01> + b|10>
    #[arg(long, allow_hyphen_values = true)]
    initial: InitialStateSpec,
    /// Decoherence factor, value or lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    gamma: Axis,
    /// Field strength mu*eps/B, value or lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    w: Axis,
    /// Dipole coupling Omega/B, value or lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    omega: Axis,
    /// Angle between the intermolecular axis and the field, radians
    #[arg(long, default_value_t = DEFAULT_ALPHA, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_JMAX)]
    jmax: usize,
    /// State sent through the channel: initial, evolved, psi-, psi+, phi-, phi+
    #[arg(long = "rho-in")]
    rho_in: Option<RhoIn>,
}

impl Params {
    fn config(&self, t_grid: TimeGrid) -> ScanConfig {
        ScanConfig {
            n: self.n,
            initial: self.initial,
            gamma: self.gamma,
            w: self.w,
            omega: self.omega,
            alpha: self.alpha,
            t_grid,
            observable: self.observable,
            jmax: self.jmax,
            rho_in: self.rho_in,
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Stark { w, jmax } => {
            let jmax = match jmax {
                Some(j) => j,
                None => escalated_jmax(w, DEFAULT_JMAX)?,
            };
            let q = solve_qubit(w, jmax)?;
            for (name, v) in [
                ("E0", q.e0),
                ("E1", q.e1),
                ("C0", q.c0),
                ("C1", q.c1),
                ("Ct", q.ct),
            ] {
                println!("{name} {}", format_number(v));
            }
        }
        Command::Scan { params, t, out } => {
            let records = run_scan(&params.config(t))?;
            write_csv(&records, &out)?;
            eprintln!("wrote {} rows to {}", records.len(), out.display());
        }
        Command::Limit { params, out } => {
            let config = params.config(TimeGrid::default());
            if config.gamma.is_range() || config.w.is_range() || config.omega.is_range() {
                return Err(Error::Config("limit takes fixed gamma, w and omega".into()));
            }
            let records = long_time_records(&config)?;
            for r in &records {
                println!("{} {}", r.observable, format_number(r.value));
            }
            if let Some(path) = out {
                write_csv(&records, &path)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_convergence_failure() {
                ExitCode::from(3)
            } else if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
