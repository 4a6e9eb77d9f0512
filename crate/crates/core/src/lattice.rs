//! SSH chain construction.
//!
//! A chain of `N` unit cells has `2N` sites ordered `a_1, b_1, a_2, b_2, ...`
//! and `2N - 1` nearest-neighbour bonds. Bond `i` (0-based) joins sites `i`
//! and `i + 1`; even bonds are intra-cell (`J1`), odd bonds inter-cell (`J2`).
//! Couplings are in mm⁻¹, waveguide separations in μm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which `J1` and `J2` are considered equal.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Exponential coupling-versus-separation law `J(d) = j_ref * exp(-(d - d_ref) / decay_length)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingCalibration {
    pub j_ref_per_mm: f64,
    pub d_ref_um: f64,
    pub decay_length_um: f64,
}

impl Default for CouplingCalibration {
    fn default() -> Self {
        CouplingCalibration {
            j_ref_per_mm: 0.3,
            d_ref_um: 20.0,
            decay_length_um: 2.5,
        }
    }
}

impl CouplingCalibration {
    pub fn validate(&self) -> Result<()> {
        if !(self.j_ref_per_mm.is_finite() && self.j_ref_per_mm > 0.0) {
            return Err(Error::domain("j_ref_per_mm", "must be finite and > 0"));
        }
        if !self.d_ref_um.is_finite() {
            return Err(Error::domain("d_ref_um", "must be finite"));
        }
        if !(self.decay_length_um.is_finite() && self.decay_length_um > 0.0) {
            return Err(Error::domain("decay_length_um", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// How the two alternating bond strengths of a chain are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CouplingModel {
    /// Bond strengths given directly, in mm⁻¹.
    Direct { j1: f64, j2: f64 },
    /// `J1 = g + g t cos(wπ)`, `J2 = g - g t cos(wπ)`.
    Parametric { g: f64, t: f64, w: f64 },
    /// Intra- and inter-cell waveguide separations mapped through a calibration.
    Geometric {
        d1_um: f64,
        d2_um: f64,
        #[serde(default)]
        calibration: CouplingCalibration,
    },
}

impl CouplingModel {
    /// Nominal `(J1, J2)` of the model, ignoring any disorder.
    pub fn couplings(&self) -> Result<(f64, f64)> {
        match *self {
            CouplingModel::Direct { j1, j2 } => {
                check_coupling("j1", j1)?;
                check_coupling("j2", j2)?;
                Ok((j1, j2))
            }
            CouplingModel::Parametric { g, t, w } => parametric_couplings(g, t, w),
            CouplingModel::Geometric {
                d1_um,
                d2_um,
                calibration,
            } => Ok((
                separation_to_coupling_named("d1_um", d1_um, &calibration)?,
                separation_to_coupling_named("d2_um", d2_um, &calibration)?,
            )),
        }
    }
}

/// Uniform, independent perturbation of every waveguide separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    /// Half-width `δ` of the uniform distribution on `[-δ, δ]`, in μm.
    pub amplitude_um: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    fn offset(self) -> usize {
        match self {
            Sublattice::A => 0,
            Sublattice::B => 1,
        }
    }
}

/// Cell labelling: `EdgeBased` counts `1..=N` from the left edge,
/// `CenterBased` counts `-M..=M` from the middle cell (odd `N = 2M + 1` only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexingConvention {
    EdgeBased,
    CenterBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Trivial,
    Nontrivial,
    Critical,
}

impl Phase {
    /// Bulk winding number of the phase; `None` at the gap closing.
    pub fn winding(self) -> Option<i64> {
        match self {
            Phase::Trivial => Some(0),
            Phase::Nontrivial => Some(1),
            Phase::Critical => None,
        }
    }
}

/// An open SSH chain: realized bond strengths, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    num_cells: usize,
    bonds: Vec<f64>,
}

impl LatticeSpec {
    /// Wraps an explicit bond list of length `2N - 1`.
    pub fn from_bonds(bonds: Vec<f64>) -> Result<Self> {
        if bonds.is_empty() || bonds.len().is_multiple_of(2) {
            return Err(Error::domain(
                "bonds",
                format!("an open chain needs an odd bond count 2N-1, got {}", bonds.len()),
            ));
        }
        if let Some((i, b)) = bonds
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b >= 0.0))
        {
            return Err(Error::domain(
                format!("bonds[{i}]"),
                format!("must be finite and >= 0, got {b}"),
            ));
        }
        Ok(LatticeSpec {
            num_cells: bonds.len().div_ceil(2),
            bonds,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn site_count(&self) -> usize {
        2 * self.num_cells
    }

    pub fn bonds(&self) -> &[f64] {
        &self.bonds
    }

    pub fn max_coupling(&self) -> f64 {
        self.bonds.iter().copied().fold(0.0, f64::max)
    }

    /// Flat site index of `(cell, sublattice)` under `convention`.
    pub fn site_index(
        &self,
        cell: i64,
        sublattice: Sublattice,
        convention: IndexingConvention,
    ) -> Result<usize> {
        let pos = cell_position(self.num_cells, cell, convention)?;
        Ok(2 * pos + sublattice.offset())
    }
}

/// 0-based position of a labelled cell.
pub(crate) fn cell_position(
    num_cells: usize,
    cell: i64,
    convention: IndexingConvention,
) -> Result<usize> {
    let n = num_cells as i64;
    let pos = match convention {
        IndexingConvention::EdgeBased => cell - 1,
        IndexingConvention::CenterBased => {
            if num_cells.is_multiple_of(2) {
                return Err(Error::domain(
                    "cells",
                    format!("center-based labels need an odd cell count, got {num_cells}"),
                ));
            }
            cell + (n - 1) / 2
        }
    };
    if !(0..n).contains(&pos) {
        let range = match convention {
            IndexingConvention::EdgeBased => format!("1..={n}"),
            IndexingConvention::CenterBased => format!("{}..={}", -(n - 1) / 2, (n - 1) / 2),
        };
        return Err(Error::domain(
            "cell",
            format!("cell {cell} outside {range} for a {num_cells}-cell chain"),
        ));
    }
    Ok(pos as usize)
}

/// Label of the cell at 0-based position `pos`.
pub(crate) fn cell_label(num_cells: usize, pos: usize, convention: IndexingConvention) -> i64 {
    match convention {
        IndexingConvention::EdgeBased => pos as i64 + 1,
        IndexingConvention::CenterBased => pos as i64 - (num_cells as i64 - 1) / 2,
    }
}

fn check_coupling(field: &str, j: f64) -> Result<()> {
    if j.is_finite() && j >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(field, format!("coupling must be finite and >= 0, got {j}")))
    }
}

pub fn parametric_couplings(g: f64, t: f64, w: f64) -> Result<(f64, f64)> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::domain("g", format!("must be > 0, got {g}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("t", format!("must lie in [0, 1], got {t}")));
    }
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::domain("w", format!("must lie in (0, 1), got {w}")));
    }
    let shift = g * t * (w * std::f64::consts::PI).cos();
    Ok((g + shift, g - shift))
}

pub fn separation_to_coupling(d_um: f64, calib: &CouplingCalibration) -> Result<f64> {
    separation_to_coupling_named("d", d_um, calib)
}

fn separation_to_coupling_named(field: &str, d_um: f64, calib: &CouplingCalibration) -> Result<f64> {
    calib.validate()?;
    if !(d_um.is_finite() && d_um > 0.0) {
        return Err(Error::domain(field, format!("separation must be > 0 μm, got {d_um}")));
    }
    Ok(calib.j_ref_per_mm * (-(d_um - calib.d_ref_um) / calib.decay_length_um).exp())
}

pub fn build_lattice(
    model: &CouplingModel,
    num_cells: usize,
    disorder: Option<&DisorderSpec>,
) -> Result<LatticeSpec> {
    if num_cells < 2 {
        return Err(Error::domain("cells", format!("need at least 2 cells, got {num_cells}")));
    }
    let n_bonds = 2 * num_cells - 1;
    let bonds = match (model, disorder) {
        (
            CouplingModel::Geometric {
                d1_um,
                d2_um,
                calibration,
            },
            Some(dis),
        ) => {
            if !(dis.amplitude_um.is_finite() && dis.amplitude_um >= 0.0) {
                return Err(Error::domain("amplitude_um", "disorder amplitude must be >= 0"));
            }
            // nominal values first, so invalid separations are reported as such
            model.couplings()?;
            let mut rng = ChaCha8Rng::seed_from_u64(dis.seed);
            let delta = dis.amplitude_um;
            (0..n_bonds)
                .map(|i| {
                    let nominal = if i % 2 == 0 { *d1_um } else { *d2_um };
                    let d = if delta > 0.0 {
                        nominal + rng.random_range(-delta..=delta)
                    } else {
                        nominal
                    };
                    separation_to_coupling_named("d_disordered", d, calibration)
                })
                .collect::<Result<Vec<_>>>()?
        }
        (_, Some(_)) => {
            return Err(Error::domain(
                "disorder",
                "disorder perturbs waveguide separations and needs a geometric model",
            ))
        }
        (_, None) => {
            let (j1, j2) = model.couplings()?;
            (0..n_bonds).map(|i| if i % 2 == 0 { j1 } else { j2 }).collect()
        }
    };
    LatticeSpec::from_bonds(bonds)
}

pub fn classify_phase(j1: f64, j2: f64) -> Result<Phase> {
    check_coupling("j1", j1)?;
    check_coupling("j2", j2)?;
    if j1 == 0.0 && j2 == 0.0 {
        return Err(Error::domain("j1, j2", "both couplings are zero"));
    }
    if (j1 - j2).abs() <= CRITICAL_TOLERANCE * j1.max(j2) {
        Ok(Phase::Critical)
    } else if j1 < j2 {
        Ok(Phase::Nontrivial)
    } else {
        Ok(Phase::Trivial)
    }
}
