use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nonlocal::boxes::CorrelationBox;
use nonlocal::report::{
    cmd_bounds, cmd_box, cmd_reproduce, cmd_verify_rti, BoxOp, Format, FunctionalSource, RunConfig, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(name = "nonlocal", version, about = "Deterministic content of Bell boxes and the reverse triangle inequality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, env = "NONLOCAL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Replace a row tolerance, e.g. `--tol f_mu0=1e-3`.
    #[arg(long = "tol", value_parser = parse_override)]
    tolerances: Vec<(String, f64)>,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute every quoted constant.
    Reproduce {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Randomized reverse-triangle-inequality campaigns.
    VerifyRti {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        l: Vec<usize>,
    },
    /// Analyse a box file.
    Box {
        path: PathBuf,
        /// Bell functional file for `bell`, or `chsh` for the built-in one.
        functional: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "ns,fod,cf")]
        ops: Vec<BoxOp>,
        #[arg(long = "functional", conflicts_with = "functional")]
        functional_flag: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Universal lower bound on the fraction of determinism.
    Bounds {
        k: usize,
        l1: usize,
        l2: usize,
        #[arg(long, default_value_t = 4.0)]
        beta_alg: f64,
        #[arg(long, default_value_t = 2.0)]
        beta_det: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value: f64 = value.parse().map_err(|e| format!("{e}"))?;
    Ok((name.to_string(), value))
}

fn config(common: Common, trials: usize, dims: Vec<usize>, ls: Vec<usize>) -> RunConfig {
    RunConfig {
        seed: common.seed,
        trials,
        dims,
        ls,
        tolerance_overrides: common.tolerances.into_iter().collect(),
        output: common.out,
        format: common.format,
    }
}

fn run(cli: Cli) -> nonlocal::Result<i32> {
    let defaults = RunConfig::default();
    let (report, cfg) = match cli.command {
        Command::Reproduce { common, trials } => {
            let cfg = config(common, trials, defaults.dims, defaults.ls);
            (cmd_reproduce(&cfg)?, cfg)
        }
        Command::VerifyRti { common, trials, dims, l } => {
            let cfg = config(common, trials, dims, l);
            (cmd_verify_rti(&cfg)?, cfg)
        }
        Command::Box {
            path,
            functional,
            ops,
            functional_flag,
            common,
        } => {
            let cfg = config(common, 1, defaults.dims, defaults.ls);
            let source = functional.or(functional_flag).map(|f| {
                if f == "chsh" {
                    FunctionalSource::Chsh
                } else {
                    FunctionalSource::File(f.into())
                }
            });
            let p = CorrelationBox::load(&path)?;
            (cmd_box(&p, &ops, source.as_ref(), &cfg)?, cfg)
        }
        Command::Bounds {
            k,
            l1,
            l2,
            beta_alg,
            beta_det,
            common,
        } => {
            let cfg = config(common, 1, defaults.dims, defaults.ls);
            (cmd_bounds(k, l1, l2, beta_alg, beta_det, &cfg)?, cfg)
        }
    };
    report.emit(&cfg)?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
