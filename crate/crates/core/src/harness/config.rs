use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{
    cell_position, CouplingCalibration, CouplingModel, DisorderSpec, IndexingConvention, Sublattice,
};
use crate::momentum::{DEFAULT_NK, MIN_NK};
use crate::observables::Excitation;

pub const SCHEMA_VERSION: u32 = 1;

/// Upper bound on z-grid length; guards against a mistyped `z_step`.
const MAX_Z_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PpdcSweep,
    TptsSweep,
    DisorderEnsemble,
    SingleRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationConfig {
    pub cell: i64,
    #[serde(default = "default_sublattice")]
    pub sublattice: Sublattice,
}

fn default_sublattice() -> Sublattice {
    Sublattice::A
}

impl From<ExcitationConfig> for Excitation {
    fn from(c: ExcitationConfig) -> Self {
        Excitation {
            cell: c.cell,
            sublattice: c.sublattice,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    pub amplitude_um: f64,
    pub seeds: Vec<u64>,
}

impl DisorderConfig {
    pub fn spec(&self, seed: u64) -> DisorderSpec {
        DisorderSpec {
            amplitude_um: self.amplitude_um,
            seed,
        }
    }
}

/// Lattices of a transition sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SweepConfig {
    /// `d1 = d - Δd`, `d2 = d + Δd` around the lattice constant `d`.
    Geometric {
        delta_d_um: Vec<f64>,
        #[serde(default = "default_lattice_constant")]
        lattice_constant_um: f64,
        #[serde(default)]
        calibration: CouplingCalibration,
    },
    /// Explicit `[J1, J2]` pairs in mm⁻¹.
    Direct { pairs: Vec<[f64; 2]> },
}

fn default_lattice_constant() -> f64 {
    20.0
}

fn default_nk() -> usize {
    DEFAULT_NK
}

/// A run description as read from JSON. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub experiment: ExperimentKind,
    pub cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<CouplingModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excitation: Option<ExcitationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderConfig>,
    #[serde(default = "default_nk")]
    pub oracle_nk: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn require<T: Copy>(field: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::config(field, "required for this experiment"))
}

fn forbid<T>(field: &str, v: &Option<T>, kind: ExperimentKind) -> Result<()> {
    if v.is_some() {
        return Err(Error::config(field, format!("not used by {kind:?} experiments")));
    }
    Ok(())
}

fn prefix(path: &str, e: Error) -> Error {
    match e {
        Error::Domain { field, reason } => Error::config(format!("{path}.{field}"), reason),
        other => other,
    }
}

impl ExperimentConfig {
    /// Parses and validates; the error path names the offending field.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON form, excluding the output path.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig {
            output: None,
            ..self.clone()
        };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        if self.schema != SCHEMA_VERSION {
            return Err(Error::config(
                "schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema),
            ));
        }
        if self.cells < 2 {
            return Err(Error::config("cells", "need at least 2 cells"));
        }
        if self.oracle_nk < MIN_NK {
            return Err(Error::config("oracle_nk", format!("must be >= {MIN_NK}")));
        }

        match self.experiment {
            PpdcSweep | SingleRun => {
                let model = self
                    .model
                    .ok_or_else(|| Error::config("model", "required for this experiment"))?;
                model.couplings().map_err(|e| prefix("model", e))?;
                forbid("sweep", &self.sweep, self.experiment)?;
                if self.experiment == PpdcSweep {
                    forbid("z", &self.z, self.experiment)?;
                    self.z_grid()?;
                } else {
                    for f in [("z_min", self.z_min), ("z_max", self.z_max), ("z_step", self.z_step)] {
                        forbid(f.0, &f.1, self.experiment)?;
                    }
                    let z = require("z", self.z)?;
                    if !(z.is_finite() && z >= 0.0) {
                        return Err(Error::config("z", "must be finite and >= 0"));
                    }
                }
                if let Some(d) = &self.disorder {
                    if !matches!(model, CouplingModel::Geometric { .. }) {
                        return Err(Error::config("disorder", "disorder needs a geometric model"));
                    }
                    self.check_disorder(d, true)?;
                }
                if let Some(ex) = self.excitation {
                    cell_position(self.cells, ex.cell, IndexingConvention::EdgeBased)
                        .map_err(|e| prefix("excitation", e))?;
                }
            }
            TptsSweep | DisorderEnsemble => {
                forbid("model", &self.model, self.experiment)?;
                for f in [("z_min", self.z_min), ("z_max", self.z_max), ("z_step", self.z_step)] {
                    forbid(f.0, &f.1, self.experiment)?;
                }
                let z = require("z", self.z)?;
                if !(z.is_finite() && z > 0.0) {
                    return Err(Error::config("z", "transition signal needs z > 0"));
                }
                if self.cells.is_multiple_of(2) {
                    return Err(Error::config(
                        "cells",
                        "transition sweeps need an odd cell count so a central cell exists",
                    ));
                }
                let sweep = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| Error::config("sweep", "required for this experiment"))?;
                self.check_sweep(sweep)?;
                match (&self.disorder, self.experiment) {
                    (Some(d), _) => {
                        if !matches!(sweep, SweepConfig::Geometric { .. }) {
                            return Err(Error::config("disorder", "disorder needs a geometric sweep"));
                        }
                        self.check_disorder(d, self.experiment == TptsSweep)?;
                    }
                    (None, DisorderEnsemble) => {
                        return Err(Error::config("disorder", "required for this experiment"))
                    }
                    (None, _) => {}
                }
                if let Some(ex) = self.excitation {
                    cell_position(self.cells, ex.cell, IndexingConvention::CenterBased)
                        .map_err(|e| prefix("excitation", e))?;
                }
            }
        }
        Ok(())
    }

    fn check_disorder(&self, d: &DisorderConfig, single_seed: bool) -> Result<()> {
        if !(d.amplitude_um.is_finite() && d.amplitude_um >= 0.0) {
            return Err(Error::config("disorder.amplitude_um", "must be finite and >= 0"));
        }
        if d.seeds.is_empty() {
            return Err(Error::config("disorder.seeds", "list at least one seed"));
        }
        if single_seed && d.seeds.len() != 1 {
            return Err(Error::config(
                "disorder.seeds",
                "single runs take exactly one seed; use disorder-ensemble for several",
            ));
        }
        Ok(())
    }

    fn check_sweep(&self, sweep: &SweepConfig) -> Result<()> {
        match sweep {
            SweepConfig::Geometric {
                delta_d_um,
                lattice_constant_um,
                calibration,
            } => {
                if delta_d_um.is_empty() {
                    return Err(Error::config("sweep.delta_d_um", "empty sweep"));
                }
                calibration.validate().map_err(|e| prefix("sweep.calibration", e))?;
                let max_shift =
                    lattice_constant_um - self.disorder.as_ref().map_or(0.0, |d| d.amplitude_um);
                for (i, dd) in delta_d_um.iter().enumerate() {
                    if !(dd.is_finite() && dd.abs() < max_shift) {
                        return Err(Error::config(
                            format!("sweep.delta_d_um[{i}]"),
                            format!("|Δd| must stay below {max_shift} μm so separations remain positive"),
                        ));
                    }
                }
            }
            SweepConfig::Direct { pairs } => {
                if pairs.is_empty() {
                    return Err(Error::config("sweep.pairs", "empty sweep"));
                }
                for (i, [j1, j2]) in pairs.iter().enumerate() {
                    if !(j1.is_finite() && *j1 >= 0.0 && j2.is_finite() && *j2 > 0.0) {
                        return Err(Error::config(
                            format!("sweep.pairs[{i}]"),
                            "need J1 >= 0 and J2 > 0",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `z_min + i z_step` for `i = 0..=⌊(z_max - z_min)/z_step⌋`, or `[z]`.
    pub fn z_grid(&self) -> Result<Vec<f64>> {
        if let Some(z) = self.z {
            return Ok(vec![z]);
        }
        let z_min = require("z_min", self.z_min)?;
        let z_max = require("z_max", self.z_max)?;
        let z_step = require("z_step", self.z_step)?;
        if !(z_step.is_finite() && z_step > 0.0) {
            return Err(Error::config("z_step", format!("must be > 0, got {z_step}")));
        }
        if !(z_min.is_finite() && z_min >= 0.0) {
            return Err(Error::config("z_min", "must be finite and >= 0"));
        }
        if !(z_max.is_finite() && z_max >= z_min) {
            return Err(Error::config("z_max", "must be finite and >= z_min"));
        }
        let steps = ((z_max - z_min) / z_step + 1e-9).floor();
        if steps >= MAX_Z_POINTS as f64 {
            return Err(Error::config("z_step", "grid would exceed one million points"));
        }
        Ok((0..=steps as usize).map(|i| z_min + i as f64 * z_step).collect())
    }
}
