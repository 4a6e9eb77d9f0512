//! Ready-made experiments matching the published figure set.
//!
//! Each preset is an [`ExperimentConfig`], so a preset run and the same
//! config loaded from JSON are the same run (same hash, same bytes).

use std::str::FromStr;

use super::config::{DisorderConfig, ExcitationConfig, ExperimentConfig, ExperimentKind, SweepConfig, SCHEMA_VERSION};
use super::record::RunRecord;
use super::run::run_experiment;
use crate::error::{Error, Result};
use crate::lattice::{parametric_couplings, CouplingCalibration, CouplingModel, Sublattice};
use crate::momentum::DEFAULT_NK;

/// Mean coupling `g` (mm⁻¹) of the parametric PPDC lattices.
pub const DEFAULT_G: f64 = 0.4;

/// Dimerizations of the eleven transition-sweep lattices, in μm.
pub const FIG4_DELTA_D_UM: [f64; 11] = [-2.0, -1.5, -1.0, -0.5, -0.2, 0.0, 0.2, 0.5, 1.0, 1.5, 2.0];
pub const FIG4_CELLS: usize = 21;
pub const FIG4_Z_MM: f64 = 18.0;
pub const FIG4_DISORDER_UM: f64 = 0.1;
pub const FIG4_LATTICE_CONSTANT_UM: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

fn ppdc_config(model: CouplingModel, cells: usize, grid: ZGrid, cell: i64) -> ExperimentConfig {
    ExperimentConfig {
        schema: SCHEMA_VERSION,
        experiment: ExperimentKind::PpdcSweep,
        cells,
        model: Some(model),
        sweep: None,
        z_min: Some(grid.min),
        z_max: Some(grid.max),
        z_step: Some(grid.step),
        z: None,
        excitation: Some(ExcitationConfig {
            cell,
            sublattice: Sublattice::A,
        }),
        disorder: None,
        oracle_nk: DEFAULT_NK,
        output: None,
    }
}

pub fn fig1_config(w: f64, t: f64, cells: usize, grid: ZGrid) -> ExperimentConfig {
    ppdc_config(
        CouplingModel::Parametric { g: DEFAULT_G, t, w },
        cells,
        grid,
        cells.div_ceil(2) as i64,
    )
}

/// Simulated PPDC trace of a parametric lattice.
pub fn preset_fig1(w: f64, t: f64, cells: usize, grid: ZGrid) -> Result<RunRecord> {
    run_experiment(&fig1_config(w, t, cells, grid))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig2Variant {
    /// 10 waveguides, `t = 1.0`, z from 20 to 30 mm.
    TenSite,
    /// 18 waveguides, `t = 0.5`, z from 7 to 16 mm.
    EighteenSite,
}

pub fn fig2_config(variant: Fig2Variant, w: f64) -> ExperimentConfig {
    match variant {
        Fig2Variant::TenSite => fig1_config(w, 1.0, 5, ZGrid { min: 20.0, max: 30.0, step: 0.2 }),
        Fig2Variant::EighteenSite => fig1_config(w, 0.5, 9, ZGrid { min: 7.0, max: 16.0, step: 0.2 }),
    }
}

pub fn preset_fig2(variant: Fig2Variant, w: f64) -> Result<RunRecord> {
    run_experiment(&fig2_config(variant, w))
}

/// `S_t` across the transition at fixed `J1 + J2`, on a chain long enough
/// to stay in the bulk.
pub fn fig3b_config() -> ExperimentConfig {
    let pairs = (1..=19)
        .rev()
        .map(|i| {
            let (j1, j2) = parametric_couplings(0.1, 0.5, 0.05 * i as f64).expect("valid parameters");
            [j1, j2]
        })
        .collect();
    ExperimentConfig {
        schema: SCHEMA_VERSION,
        experiment: ExperimentKind::TptsSweep,
        cells: 101,
        model: None,
        sweep: Some(SweepConfig::Direct { pairs }),
        z_min: None,
        z_max: None,
        z_step: None,
        z: Some(100.0),
        excitation: None,
        disorder: None,
        oracle_nk: DEFAULT_NK,
        output: None,
    }
}

pub fn preset_fig3b() -> Result<RunRecord> {
    run_experiment(&fig3b_config())
}

/// Geometric transition sweep on 21-cell chains. With `disorder`, one seed
/// gives a single disordered sweep and several seeds an ensemble.
pub fn fig4_config(delta_d_um: &[f64], z: f64, disorder: Option<DisorderConfig>) -> ExperimentConfig {
    let experiment = match &disorder {
        Some(d) if d.seeds.len() > 1 => ExperimentKind::DisorderEnsemble,
        _ => ExperimentKind::TptsSweep,
    };
    ExperimentConfig {
        schema: SCHEMA_VERSION,
        experiment,
        cells: FIG4_CELLS,
        model: None,
        sweep: Some(SweepConfig::Geometric {
            delta_d_um: delta_d_um.to_vec(),
            lattice_constant_um: FIG4_LATTICE_CONSTANT_UM,
            calibration: CouplingCalibration::default(),
        }),
        z_min: None,
        z_max: None,
        z_step: None,
        z: Some(z),
        excitation: None,
        disorder,
        oracle_nk: DEFAULT_NK,
        output: None,
    }
}

pub fn preset_fig4(delta_d_um: &[f64], z: f64, disorder: Option<DisorderConfig>) -> Result<RunRecord> {
    run_experiment(&fig4_config(delta_d_um, z, disorder))
}

/// Preset names accepted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3b,
    Fig4d,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig1" => Preset::Fig1,
            "fig2a" => Preset::Fig2a,
            "fig2b" => Preset::Fig2b,
            "fig2c" => Preset::Fig2c,
            "fig2d" => Preset::Fig2d,
            "fig3b" => Preset::Fig3b,
            "fig4d" => Preset::Fig4d,
            other => {
                return Err(Error::config(
                    "name",
                    format!("unknown preset `{other}` (fig1|fig2a|fig2b|fig2c|fig2d|fig3b|fig4d)"),
                ))
            }
        })
    }
}

impl Preset {
    /// Config for the preset. `w` overrides the dimerization of `fig1`
    /// (default 0.9); `seed` adds `±0.1 μm` disorder to `fig4d`.
    pub fn config(self, w: Option<f64>, seed: Option<u64>) -> Result<ExperimentConfig> {
        if w.is_some() && self != Preset::Fig1 {
            return Err(Error::config("w", "only the fig1 preset takes a w override"));
        }
        if seed.is_some() && self != Preset::Fig4d {
            return Err(Error::config("seed", "only the fig4d preset is disordered"));
        }
        Ok(match self {
            Preset::Fig1 => fig1_config(w.unwrap_or(0.9), 1.0, 5, ZGrid { min: 0.0, max: 30.0, step: 0.1 }),
            Preset::Fig2a => fig2_config(Fig2Variant::TenSite, 0.1),
            Preset::Fig2b => fig2_config(Fig2Variant::TenSite, 0.9),
            Preset::Fig2c => fig2_config(Fig2Variant::EighteenSite, 0.1),
            Preset::Fig2d => fig2_config(Fig2Variant::EighteenSite, 0.9),
            Preset::Fig3b => fig3b_config(),
            Preset::Fig4d => fig4_config(
                &FIG4_DELTA_D_UM,
                FIG4_Z_MM,
                seed.map(|s| DisorderConfig {
                    amplitude_um: FIG4_DISORDER_UM,
                    seeds: vec![s],
                }),
            ),
        })
    }
}
