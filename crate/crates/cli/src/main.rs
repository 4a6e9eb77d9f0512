use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use topolattice::harness::{
    emit_csv, emit_gnuplot, run_experiment, ExperimentConfig, ExperimentKind, Preset, RunRecord,
};
use topolattice::momentum::{winding_integral, DEFAULT_NK};
use topolattice::{Error, Result};

#[derive(Parser)]
#[command(name = "topolattice", version, about = "SSH waveguide-lattice dynamics: winding numbers and transition signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; a `.summary.json` sidecar is written next to it.
    /// Without it the CSV goes to stdout and the summary to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the config's disorder seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Brillouin-zone points for the momentum-space oracle columns.
    #[arg(long)]
    nk: Option<usize>,
    /// Also write a gnuplot-ready `.dat` file next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// PPDC z-sweep (`ppdc-sweep` or `single-run` config).
    Ppdc(Common),
    /// Transition-signal sweep (`tpts-sweep` config).
    Tpts(Common),
    /// Disorder ensemble of transition sweeps (`disorder-ensemble` config).
    Ensemble(Common),
    /// Momentum-space winding number of a gapped chain.
    Winding {
        #[command(flatten)]
        common: Common,
        #[arg(long, requires = "j2", conflicts_with = "config")]
        j1: Option<f64>,
        #[arg(long, requires = "j1")]
        j2: Option<f64>,
    },
    /// Run a built-in figure preset.
    Preset {
        #[command(flatten)]
        common: Common,
        /// fig1|fig2a|fig2b|fig2c|fig2d|fig3b|fig4d
        #[arg(long)]
        name: String,
        /// Dimerization parameter for fig1.
        #[arg(long)]
        w: Option<f64>,
    },
}

fn load_config(common: &Common, accepted: &[ExperimentKind]) -> Result<ExperimentConfig> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::Config {
            path: "--config".into(),
            message: "this subcommand needs a config file".into(),
        })?;
    let cfg = ExperimentConfig::load(path)?;
    if !accepted.contains(&cfg.experiment) {
        return Err(Error::Config {
            path: "experiment".into(),
            message: format!("{:?} cannot be run by this subcommand (expected one of {accepted:?})", cfg.experiment),
        });
    }
    Ok(cfg)
}

fn apply_overrides(mut cfg: ExperimentConfig, common: &Common) -> Result<ExperimentConfig> {
    if let Some(nk) = common.nk {
        cfg.oracle_nk = nk;
    }
    if let Some(seed) = common.seed {
        match cfg.disorder.as_mut() {
            Some(d) => d.seeds = vec![seed],
            None => {
                return Err(Error::Config {
                    path: "--seed".into(),
                    message: "config has no disorder section".into(),
                })
            }
        }
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn write_outputs(record: &RunRecord, out: Option<&Path>, gnuplot: bool) -> Result<()> {
    match out {
        Some(path) => {
            emit_csv(record, path)?;
            if gnuplot {
                emit_gnuplot(record, path)?;
            }
            eprintln!("{}", record.summary_json());
        }
        None => {
            if gnuplot {
                return Err(Error::Config {
                    path: "--gnuplot".into(),
                    message: "needs --out".into(),
                });
            }
            print!("{}", record.to_csv());
            eprintln!("{}", record.summary_json());
        }
    }
    if !record.light_cone_ok {
        eprintln!("warning: intensity reached the chain boundary; bulk estimates may be biased");
    }
    Ok(())
}

fn run_and_write(cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let record = run_experiment(&cfg)?;
    write_outputs(&record, cfg.output.as_deref(), common.gnuplot)
}

fn winding(common: &Common, j1: Option<f64>, j2: Option<f64>) -> Result<()> {
    let (j1, j2, nk) = match (j1, j2) {
        (Some(j1), Some(j2)) => (j1, j2, common.nk.unwrap_or(DEFAULT_NK)),
        _ => {
            let cfg = load_config(common, &[ExperimentKind::PpdcSweep, ExperimentKind::SingleRun])?;
            let (j1, j2) = cfg.model.expect("validated").couplings()?;
            (j1, j2, common.nk.unwrap_or(cfg.oracle_nk))
        }
    };
    let w = winding_integral(j1, j2, nk)?;
    let json = serde_json::json!({ "j1": j1, "j2": j2, "n_k": nk, "nu_raw": w.raw, "nu": w.rounded });
    let text = serde_json::to_string_pretty(&json).expect("json serializes");
    match &common.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ppdc(common) => {
            let cfg = load_config(&common, &[ExperimentKind::PpdcSweep, ExperimentKind::SingleRun])?;
            run_and_write(apply_overrides(cfg, &common)?, &common)
        }
        Command::Tpts(common) => {
            let cfg = load_config(&common, &[ExperimentKind::TptsSweep])?;
            run_and_write(apply_overrides(cfg, &common)?, &common)
        }
        Command::Ensemble(common) => {
            let cfg = load_config(&common, &[ExperimentKind::DisorderEnsemble])?;
            run_and_write(apply_overrides(cfg, &common)?, &common)
        }
        Command::Winding { common, j1, j2 } => winding(&common, j1, j2),
        Command::Preset { common, name, w } => {
            if common.config.is_some() {
                return Err(Error::Config {
                    path: "--config".into(),
                    message: "presets are self-contained".into(),
                });
            }
            let preset: Preset = name.parse()?;
            let cfg = preset.config(w, common.seed)?;
            let cfg = apply_overrides(cfg, &Common { seed: None, ..common.clone() })?;
            run_and_write(cfg, &common)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
