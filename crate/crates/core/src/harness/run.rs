use std::path::Path;

use rayon::prelude::*;

use super::config::{DisorderConfig, ExperimentConfig, ExperimentKind, SweepConfig};
use super::record::{PpdcRow, Rows, RunRecord, SeedSummary, Summary, TptsRow};
use crate::error::Result;
use crate::lattice::{build_lattice, classify_phase, CouplingModel, Phase, Sublattice};
use crate::momentum::{analytic_ppdc, analytic_tpts};
use crate::observables::{tpts_sweep, winding_from_dynamics, Excitation, SweepPoint, TptsSweep};

/// Loads, validates and runs a JSON config.
pub fn run_config(path: impl AsRef<Path>) -> Result<RunRecord> {
    run_experiment(&ExperimentConfig::load(path)?)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::PpdcSweep | ExperimentKind::SingleRun => run_ppdc(cfg),
        ExperimentKind::TptsSweep => run_tpts(cfg),
        ExperimentKind::DisorderEnsemble => run_ensemble(cfg),
    }
}

fn single_seed(disorder: &Option<DisorderConfig>) -> Option<u64> {
    disorder.as_ref().map(|d| d.seeds[0])
}

fn run_ppdc(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let model = cfg.model.expect("validated");
    let seed = single_seed(&cfg.disorder);
    let disorder = cfg.disorder.as_ref().map(|d| d.spec(d.seeds[0]));
    let lattice = build_lattice(&model, cfg.cells, disorder.as_ref())?;
    let excitation = cfg
        .excitation
        .map(Excitation::from)
        .unwrap_or_else(|| Excitation::edge_center(cfg.cells));
    let zs = cfg.z_grid()?;
    let run = winding_from_dynamics(&lattice, &zs, excitation)?;

    let (j1, j2) = model.couplings()?;
    let oracle_applies =
        excitation.sublattice == Sublattice::A && classify_phase(j1, j2)? != Phase::Critical;
    let oracle: Vec<Option<f64>> = if oracle_applies {
        zs.par_iter()
            .map(|&z| analytic_ppdc(j1, j2, z, cfg.oracle_nk).map(Some))
            .collect::<Result<_>>()?
    } else {
        vec![None; zs.len()]
    };

    let rows = zs
        .iter()
        .zip(run.series.values())
        .zip(&run.edge_intensity)
        .zip(oracle)
        .map(|(((&z_mm, &ppdc), &edge_intensity), ppdc_oracle)| PpdcRow {
            z_mm,
            ppdc,
            ppdc_oracle,
            edge_intensity,
        })
        .collect();
    let est = run.estimate;
    Ok(RunRecord {
        config_hash: cfg.hash(),
        seed,
        rows: Rows::Ppdc(rows),
        summary: Summary::Winding {
            nu_raw: est.nu_raw,
            nu_rounded: est.nu_rounded,
            center: est.center,
            spread: est.spread,
        },
        light_cone_ok: est.light_cone_ok,
    })
}

/// Lattices of a sweep, with an optional disorder seed.
pub fn sweep_points(
    sweep: &SweepConfig,
    cells: usize,
    disorder: Option<(&DisorderConfig, u64)>,
) -> Result<Vec<SweepPoint>> {
    match sweep {
        SweepConfig::Geometric {
            delta_d_um,
            lattice_constant_um,
            calibration,
        } => delta_d_um
            .iter()
            .map(|&dd| {
                let model = CouplingModel::Geometric {
                    d1_um: lattice_constant_um - dd,
                    d2_um: lattice_constant_um + dd,
                    calibration: *calibration,
                };
                let spec = disorder.map(|(d, seed)| d.spec(seed));
                let (j1, j2) = model.couplings()?;
                Ok(SweepPoint {
                    lattice: build_lattice(&model, cells, spec.as_ref())?,
                    j1,
                    j2,
                    delta_d_um: Some(dd),
                })
            })
            .collect(),
        SweepConfig::Direct { pairs } => pairs
            .iter()
            .map(|&[j1, j2]| {
                Ok(SweepPoint {
                    lattice: build_lattice(&CouplingModel::Direct { j1, j2 }, cells, None)?,
                    j1,
                    j2,
                    delta_d_um: None,
                })
            })
            .collect(),
    }
}

fn tpts_excitation(cfg: &ExperimentConfig) -> Excitation {
    cfg.excitation
        .map(Excitation::from)
        .unwrap_or_else(Excitation::bulk_center)
}

fn sweep_rows(sweep: &TptsSweep, seed: Option<u64>) -> Vec<TptsRow> {
    sweep
        .samples
        .iter()
        .map(|s| TptsRow {
            j1_per_mm: s.j1,
            j2_per_mm: s.j2,
            ratio: s.ratio,
            delta_d_um: s.delta_d_um,
            seed,
            s_t: s.s_t,
            s_t_closed_form: analytic_tpts(s.j1, s.j2),
            edge_intensity: s.edge_intensity,
        })
        .collect()
}

fn sweep_light_cone_ok(sweep: &TptsSweep) -> bool {
    sweep.samples.iter().all(|s| s.light_cone_ok)
}

fn run_tpts(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let sweep_cfg = cfg.sweep.as_ref().expect("validated");
    let seed = single_seed(&cfg.disorder);
    let disorder = cfg.disorder.as_ref().map(|d| (d, d.seeds[0]));
    let points = sweep_points(sweep_cfg, cfg.cells, disorder)?;
    let sweep = tpts_sweep(&points, cfg.z.expect("validated"), tpts_excitation(cfg))?;
    Ok(RunRecord {
        config_hash: cfg.hash(),
        seed,
        rows: Rows::Tpts(sweep_rows(&sweep, seed)),
        summary: Summary::Transition {
            argmax_index: sweep.argmax,
            argmax_ratio: sweep.argmax_ratio(),
        },
        light_cone_ok: sweep_light_cone_ok(&sweep),
    })
}

fn run_ensemble(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let sweep_cfg = cfg.sweep.as_ref().expect("validated");
    let disorder = cfg.disorder.as_ref().expect("validated");
    let z = cfg.z.expect("validated");
    let excitation = tpts_excitation(cfg);
    let sweeps = disorder
        .seeds
        .par_iter()
        .map(|&seed| {
            let points = sweep_points(sweep_cfg, cfg.cells, Some((disorder, seed)))?;
            Ok((seed, tpts_sweep(&points, z, excitation)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut runs = Vec::with_capacity(sweeps.len());
    for (seed, sweep) in &sweeps {
        rows.extend(sweep_rows(sweep, Some(*seed)));
        runs.push(SeedSummary {
            seed: *seed,
            argmax_index: sweep.argmax,
            argmax_ratio: sweep.argmax_ratio(),
        });
    }
    Ok(RunRecord {
        config_hash: cfg.hash(),
        seed: None,
        rows: Rows::Tpts(rows),
        summary: Summary::Ensemble { runs },
        light_cone_ok: sweeps.iter().all(|(_, s)| sweep_light_cone_ok(s)),
    })
}
