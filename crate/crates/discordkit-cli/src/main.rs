//! Command-line front end: per-state correlation reports, the extremal
//! state families, boundary-curve tracing, Monte Carlo surveys and
//! histogram export.
//!
//! Entropic quantities are in bits; state files use the JSON schema
//! `{"matrix": [[[re, im]; 4]; 4]}` over the basis |00>, |01>, |10>, |11>.
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use discordkit::correlations::{
    self, CorrelationRecord, OptimizerSettings,
};
use discordkit::mcstats::{
    self, fraction_delta_exceeds_j, run_survey, Quantity, SurveyConfig, YQuantity,
};
use discordkit::mdms::{self, R2Params, R3Params};
use discordkit::randstate::Ensemble;
use discordkit::statefile;
use discordkit::{Subsystem, TwoQubitState};
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "discordkit",
    about = "Two-qubit correlation toolkit: discord, classical correlations, concurrence",
    long_about = "Computes quantum discord, classical correlations, mutual information \
                  (all in bits) and Wootters concurrence for two-qubit states. The basis \
                  ordering is |00>, |01>, |10>, |11>; measured=B means B is measured to \
                  learn about A.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasuredArg {
    A,
    B,
}

impl From<MeasuredArg> for Subsystem {
    fn from(m: MeasuredArg) -> Subsystem {
        match m {
            MeasuredArg::A => Subsystem::A,
            MeasuredArg::B => Subsystem::B,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    /// Ginibre-induced (Hilbert-Schmidt at rank 4)
    Ginibre,
    /// Haar eigenvectors with uniform-simplex eigenvalues
    HaarSimplex,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Ensemble {
        match e {
            EnsembleArg::Ginibre => Ensemble::Ginibre,
            EnsembleArg::HaarSimplex => Ensemble::HaarSimplex,
        }
    }
}

#[derive(Args, Clone)]
struct OptimizerArgs {
    /// Coarse grid resolution per angle for the measurement search
    #[arg(long, default_value_t = 48)]
    grid: usize,
    /// Convergence tolerance of the simplex refinement
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl OptimizerArgs {
    fn settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            grid: self.grid,
            f_tol: self.tol,
            ..OptimizerSettings::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Correlation record (and optional POVM discord) of a state file
    Discord {
        /// JSON state file
        #[arg(long)]
        state: PathBuf,
        /// Which qubit is measured (quantities delta_{A:B}, J use B)
        #[arg(long, value_enum, default_value_t = MeasuredArg::B)]
        measured: MeasuredArg,
        /// Also minimize over rank-1 POVMs with up to N elements (2..=4)
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        povm: Option<u8>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Correlation record of a built-in family state
    Family {
        /// Asymmetric rank-2 family (needs --epsilon and --p)
        #[arg(long, conflicts_with_all = ["r3", "symmetric", "cusp"])]
        r2: bool,
        /// Rank-3 family (needs --epsilon and --m)
        #[arg(long, conflicts_with_all = ["symmetric", "cusp"])]
        r3: bool,
        /// Symmetric rank-2 family (needs --epsilon)
        #[arg(long, conflicts_with = "cusp")]
        symmetric: bool,
        /// The equal-weight rank-3 junction state
        #[arg(long)]
        cusp: bool,
        /// Bell-component weight
        #[arg(long)]
        epsilon: Option<f64>,
        /// Bell asymmetry of the rank-2 family
        #[arg(long)]
        p: Option<f64>,
        /// Parity-sector weight of the rank-3 family
        #[arg(long)]
        m: Option<f64>,
        /// Also write the state as a JSON file
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Trace the discord boundary curve and write it as CSV
    Trace {
        /// Samples per branch
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value = "curve.csv")]
        out: PathBuf,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Monte Carlo survey of random states at fixed rank
    Survey {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        rank: u8,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Worker threads (0 = all cores); DISCORDKIT_THREADS overrides
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = EnsembleArg::HaarSimplex)]
        ensemble: EnsembleArg,
        /// Records CSV output path
        #[arg(long, default_value = "records.csv")]
        out: PathBuf,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Histogram or 2-D density grid from a records CSV
    Hist {
        /// Records CSV produced by `survey`
        #[arg(long)]
        records: PathBuf,
        /// 1-D histogram quantity
        #[arg(long, value_enum, conflicts_with = "grid_y")]
        quantity: Option<QuantityArg>,
        /// 2-D grid y-axis quantity (x axis is J)
        #[arg(long, value_enum)]
        grid_y: Option<YQuantityArg>,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        /// Output CSV path (defaults to hist.csv or grid.csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    #[value(name = "delta")]
    Delta,
    #[value(name = "J", alias = "j")]
    J,
    #[value(name = "E", alias = "e")]
    E,
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "purity")]
    Purity,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Quantity {
        match q {
            QuantityArg::Delta => Quantity::Delta,
            QuantityArg::J => Quantity::J,
            QuantityArg::E => Quantity::E,
            QuantityArg::I => Quantity::I,
            QuantityArg::Purity => Quantity::Purity,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum YQuantityArg {
    #[value(name = "delta")]
    Delta,
    #[value(name = "E", alias = "e")]
    E,
}

impl From<YQuantityArg> for YQuantity {
    fn from(y: YQuantityArg) -> YQuantity {
        match y {
            YQuantityArg::Delta => YQuantity::Delta,
            YQuantityArg::E => YQuantity::E,
        }
    }
}

fn record_report(r: &CorrelationRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "delta_ab = {:.6}", r.delta_ab);
    let _ = writeln!(s, "delta_ba = {:.6}", r.delta_ba);
    let _ = writeln!(s, "J        = {:.6}", r.classical_j);
    let _ = writeln!(s, "I        = {:.6}", r.mutual_i);
    let _ = writeln!(s, "E        = {:.6}", r.concurrence);
    let _ = writeln!(s, "purity   = {:.6}", r.purity);
    let _ = write!(s, "rank     = {}", r.rank);
    s
}

fn workers_override(cli_workers: usize) -> usize {
    match std::env::var("DISCORDKIT_THREADS") {
        Ok(v) => v.parse().unwrap_or(cli_workers),
        Err(_) => cli_workers,
    }
}

fn run() -> Result<(), String> {
    match Cli::parse().command {
        Command::Discord {
            state,
            measured,
            povm,
            opt,
        } => {
            let st = statefile::read_state_file(&state).map_err(|e| e.to_string())?;
            let settings = opt.settings();
            let record =
                correlations::correlation_record_with(&st, &settings).map_err(|e| e.to_string())?;
            println!("{}", record_report(&record));
            if let Some(n) = povm {
                let side: Subsystem = measured.into();
                let d = correlations::discord_povm_with(&st, side, n as usize, &settings)
                    .map_err(|e| e.to_string())?;
                println!("delta_povm = {:.6}  (measured {}, up to {} elements)", d, side, n);
            }
            Ok(())
        }
        Command::Family {
            r2,
            r3,
            symmetric,
            cusp,
            epsilon,
            p,
            m,
            out,
            opt,
        } => {
            let need = |name: &str, v: Option<f64>| -> Result<f64, String> {
                v.ok_or_else(|| format!("this family needs --{name}"))
            };
            let state: TwoQubitState = if cusp {
                mdms::cusp_state()
            } else if r3 {
                mdms::r3_state(R3Params {
                    epsilon: need("epsilon", epsilon)?,
                    m: need("m", m)?,
                })
                .map_err(|e| e.to_string())?
            } else if symmetric {
                mdms::symmetric_r2_state(need("epsilon", epsilon)?).map_err(|e| e.to_string())?
            } else if r2 {
                mdms::r2_state(R2Params {
                    epsilon: need("epsilon", epsilon)?,
                    p: need("p", p)?,
                })
                .map_err(|e| e.to_string())?
            } else {
                return Err("pick a family: --r2, --r3, --symmetric or --cusp".into());
            };
            let record = correlations::correlation_record_with(&state, &opt.settings())
                .map_err(|e| e.to_string())?;
            println!("{}", record_report(&record));
            if let Some(path) = out {
                statefile::write_state_file(&path, &state).map_err(|e| e.to_string())?;
                println!("state written to {}", path.display());
            }
            Ok(())
        }
        Command::Trace { points, out, opt } => {
            let settings = opt.settings();
            let curve =
                mdms::trace_mdms_curve_with(points, &settings).map_err(|e| e.to_string())?;
            let junction =
                mdms::locate_branch_junction(&settings).map_err(|e| e.to_string())?;
            let f = File::create(&out).map_err(|e| e.to_string())?;
            mdms::write_curve_csv(BufWriter::new(f), &curve).map_err(|e| e.to_string())?;
            println!(
                "traced {} points; middle branch ends at epsilon = {:.6}, rank-2 branch starts at epsilon = {:.6} (J = {:.6})",
                curve.len(),
                junction.epsilon_middle,
                junction.epsilon_rank2,
                junction.classical_j
            );
            println!("curve written to {}", out.display());
            Ok(())
        }
        Command::Survey {
            rank,
            samples,
            seed,
            workers,
            ensemble,
            out,
            opt,
        } => {
            let config = SurveyConfig {
                rank,
                n_samples: samples,
                master_seed: seed,
                workers: workers_override(workers),
                ensemble: ensemble.into(),
                optimizer: opt.settings(),
            };
            let survey = run_survey(&config).map_err(|e| e.to_string())?;
            let f = File::create(&out).map_err(|e| e.to_string())?;
            mcstats::write_records_csv(BufWriter::new(f), &survey.records, &config.echo())
                .map_err(|e| e.to_string())?;
            let frac = fraction_delta_exceeds_j(&survey.records).map_err(|e| e.to_string())?;
            println!("# {}", config.echo());
            println!("fraction delta>J = {:.6} +/- {:.6}", frac.value, frac.std_error);
            println!("failed samples   = {}", survey.failed_samples);
            println!("records written to {}", out.display());
            Ok(())
        }
        Command::Hist {
            records,
            quantity,
            grid_y,
            bins,
            out,
        } => {
            let f = File::open(&records).map_err(|e| e.to_string())?;
            let recs = mcstats::read_records_csv(f).map_err(|e| e.to_string())?;
            let frac = fraction_delta_exceeds_j(&recs).map_err(|e| e.to_string())?;
            println!("records          = {}", recs.len());
            println!("fraction delta>J = {:.6} +/- {:.6}", frac.value, frac.std_error);
            match (quantity, grid_y) {
                (Some(q), None) => {
                    let q: Quantity = q.into();
                    let h = mcstats::histogram(&recs, q, bins).map_err(|e| e.to_string())?;
                    let path = out.unwrap_or_else(|| PathBuf::from("hist.csv"));
                    let f = File::create(&path).map_err(|e| e.to_string())?;
                    mcstats::write_histogram_csv(
                        BufWriter::new(f),
                        &h,
                        &format!("quantity={} bins={} records={}", q, bins, recs.len()),
                    )
                    .map_err(|e| e.to_string())?;
                    println!("histogram written to {}", path.display());
                }
                (None, Some(y)) => {
                    let y: YQuantity = y.into();
                    let g = mcstats::density_grid(&recs, y, bins).map_err(|e| e.to_string())?;
                    let path = out.unwrap_or_else(|| PathBuf::from("grid.csv"));
                    let f = File::create(&path).map_err(|e| e.to_string())?;
                    mcstats::write_grid_csv(
                        BufWriter::new(f),
                        &g,
                        &format!("x=J y={} bins={} records={}", y, bins, recs.len()),
                    )
                    .map_err(|e| e.to_string())?;
                    println!("grid written to {}", path.display());
                }
                (None, None) => {}
                (Some(_), Some(_)) => unreachable!("clap conflict"),
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
