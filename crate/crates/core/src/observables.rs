//! Dynamical topological diagnostics computed from output intensities.
//!
//! * PPDC `P_d = Σ x (p_{a_x} - p_{b_x})`; twice its distance average is the
//!   winding number.
//! * GPPC `P_c = Σ x² (p_{a_x} + p_{b_x})` with centre-based labels, and the
//!   transition signal `S_t = P_c(z) / z²`, which peaks at `J1 = J2`.

use rayon::prelude::*;

use crate::dynamics::{assemble_hamiltonian, decompose, single_site_excitation, IntensityDistribution};
use crate::error::{Error, Result};
use crate::lattice::{cell_label, IndexingConvention, LatticeSpec, Sublattice};

/// Maximum intensity tolerated in the boundary cells before a run is
/// flagged as having left the bulk.
pub const LIGHT_CONE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    Ppdc,
    Tpts,
}

/// Samples of an observable on a strictly increasing abscissa (z in mm for
/// PPDC, `J1/J2` for TPTS sweeps).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    kind: ObservableKind,
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(kind: ObservableKind, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::domain("values", "grid and values differ in length"));
        }
        check_increasing("grid", &grid)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("values", "observable values must be finite"));
        }
        Ok(ObservableSeries { kind, grid, values })
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population standard deviation.
    pub fn spread(&self) -> f64 {
        let m = self.mean();
        (self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}

fn check_increasing(field: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(field, "grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(field, "grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(field, "grid must be strictly increasing"));
    }
    Ok(())
}

/// Winding number read off the oscillation centre of the PPDC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingEstimate {
    /// Distance-averaged PPDC.
    pub center: f64,
    pub nu_raw: f64,
    pub nu_rounded: i64,
    /// Standard deviation of the PPDC samples.
    pub spread: f64,
    /// Boundary intensity stayed below [`LIGHT_CONE_TOLERANCE`] on the whole grid.
    pub light_cone_ok: bool,
}

impl WindingEstimate {
    pub fn rounding_residual(&self) -> f64 {
        (self.nu_raw - self.nu_rounded as f64).abs()
    }
}

/// Injection site. The cell label is edge-based for PPDC runs and
/// centre-based for TPTS runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Excitation {
    pub cell: i64,
    pub sublattice: Sublattice,
}

impl Excitation {
    pub fn a(cell: i64) -> Self {
        Excitation {
            cell,
            sublattice: Sublattice::A,
        }
    }

    /// Middle cell `⌈N/2⌉` in edge-based labels.
    pub fn edge_center(num_cells: usize) -> Self {
        Excitation::a(num_cells.div_ceil(2) as i64)
    }

    /// Cell `x = 0` in centre-based labels.
    pub fn bulk_center() -> Self {
        Excitation::a(0)
    }
}

fn num_cells_of(dist: &IntensityDistribution) -> Result<usize> {
    let sites = dist.probabilities().len();
    if sites == 0 || sites % 2 == 1 {
        return Err(Error::domain(
            "sites",
            format!("a two-site unit cell needs an even, non-zero site count, got {sites}"),
        ));
    }
    Ok(sites / 2)
}

fn cells(dist: &IntensityDistribution) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
    dist.probabilities()
        .chunks_exact(2)
        .enumerate()
        .map(|(pos, c)| (pos, c[0], c[1]))
}

/// PPDC with edge-based labels `x = 1..=N`.
pub fn ppdc(dist: &IntensityDistribution) -> Result<f64> {
    ppdc_relative(dist, 0)
}

/// PPDC with labels shifted so that `reference_cell` (edge-based) is `x = 0`.
pub fn ppdc_relative(dist: &IntensityDistribution, reference_cell: i64) -> Result<f64> {
    let n = num_cells_of(dist)?;
    Ok(cells(dist)
        .map(|(pos, pa, pb)| {
            let x = cell_label(n, pos, IndexingConvention::EdgeBased) - reference_cell;
            x as f64 * (pa - pb)
        })
        .sum())
}

/// Generalized population center with centre-based labels; odd cell counts only.
pub fn gppc(dist: &IntensityDistribution) -> Result<f64> {
    let n = num_cells_of(dist)?;
    if n % 2 == 0 {
        return Err(Error::domain(
            "cells",
            format!("GPPC needs a central cell; {n} cells is even, use an odd count"),
        ));
    }
    Ok(cells(dist)
        .map(|(pos, pa, pb)| {
            let x = cell_label(n, pos, IndexingConvention::CenterBased) as f64;
            x * x * (pa + pb)
        })
        .sum())
}

/// Intensity in the first and last unit cell.
pub fn edge_intensity(dist: &IntensityDistribution) -> f64 {
    let p = dist.probabilities();
    match p.len() {
        0..=4 => p.iter().sum(),
        n => p[0] + p[1] + p[n - 2] + p[n - 1],
    }
}

/// Output of a PPDC z-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingRun {
    pub series: ObservableSeries,
    pub edge_intensity: Vec<f64>,
    pub estimate: WindingEstimate,
}

/// Evolves a single-site excitation over `z_grid` and averages the PPDC.
///
/// Cell labels are measured from the excited cell, so `P_d(0) = 0` and the
/// distance average converges to `ν/2` for an a-sublattice excitation.
pub fn winding_from_dynamics(
    lattice: &LatticeSpec,
    z_grid: &[f64],
    excitation: Excitation,
) -> Result<WindingRun> {
    check_increasing("z_grid", z_grid)?;
    if z_grid[0] < 0.0 {
        return Err(Error::domain("z_grid", "evolution distances must be >= 0"));
    }
    let psi0 = single_site_excitation(
        lattice,
        excitation.cell,
        excitation.sublattice,
        IndexingConvention::EdgeBased,
    )?;
    let spec = decompose(&assemble_hamiltonian(lattice))?;
    let dists = spec.intensity_trajectory(&psi0, z_grid)?;

    let values = dists
        .iter()
        .map(|d| ppdc_relative(d, excitation.cell))
        .collect::<Result<Vec<_>>>()?;
    let edge: Vec<f64> = dists.iter().map(edge_intensity).collect();
    let series = ObservableSeries::new(ObservableKind::Ppdc, z_grid.to_vec(), values)?;

    let center = series.mean();
    let nu_raw = 2.0 * center;
    let estimate = WindingEstimate {
        center,
        nu_raw,
        nu_rounded: nu_raw.round() as i64,
        spread: series.spread(),
        light_cone_ok: edge.iter().all(|&e| e <= LIGHT_CONE_TOLERANCE),
    };
    Ok(WindingRun {
        series,
        edge_intensity: edge,
        estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TptsPoint {
    /// `P_c(z) / z²`, in cell²·mm⁻².
    pub s_t: f64,
    pub edge_intensity: f64,
    pub light_cone_ok: bool,
}

/// Transition signal at a single evolution distance `z > 0`.
pub fn tpts(lattice: &LatticeSpec, z: f64, excitation: Excitation) -> Result<TptsPoint> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain("z", format!("S_t needs z > 0, got {z}")));
    }
    let psi0 = single_site_excitation(
        lattice,
        excitation.cell,
        excitation.sublattice,
        IndexingConvention::CenterBased,
    )?;
    let spec = decompose(&assemble_hamiltonian(lattice))?;
    let dist = &spec.intensity_trajectory(&psi0, &[z])?[0];
    let edge = edge_intensity(dist);
    Ok(TptsPoint {
        s_t: gppc(dist)? / (z * z),
        edge_intensity: edge,
        light_cone_ok: edge <= LIGHT_CONE_TOLERANCE,
    })
}

/// One lattice of a transition sweep, tagged with its nominal couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub lattice: LatticeSpec,
    pub j1: f64,
    pub j2: f64,
    pub delta_d_um: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TptsSample {
    pub j1: f64,
    pub j2: f64,
    pub ratio: f64,
    pub delta_d_um: Option<f64>,
    pub s_t: f64,
    pub edge_intensity: f64,
    pub light_cone_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TptsSweep {
    pub samples: Vec<TptsSample>,
    /// First index of the largest `S_t`.
    pub argmax: usize,
}

impl TptsSweep {
    pub fn argmax_ratio(&self) -> f64 {
        self.samples[self.argmax].ratio
    }

    /// `S_t` strictly increasing up to the argmax and strictly decreasing after.
    pub fn is_unimodal(&self) -> bool {
        let s: Vec<f64> = self.samples.iter().map(|p| p.s_t).collect();
        s[..=self.argmax].windows(2).all(|w| w[0] < w[1])
            && s[self.argmax..].windows(2).all(|w| w[0] > w[1])
    }

    /// The sweep as a series over `J1/J2`; fails unless ratios increase.
    pub fn series(&self) -> Result<ObservableSeries> {
        ObservableSeries::new(
            ObservableKind::Tpts,
            self.samples.iter().map(|p| p.ratio).collect(),
            self.samples.iter().map(|p| p.s_t).collect(),
        )
    }
}

/// Evaluates `S_t` at distance `z` for every lattice, in parallel; results
/// keep the input order.
pub fn tpts_sweep(points: &[SweepPoint], z: f64, excitation: Excitation) -> Result<TptsSweep> {
    if points.is_empty() {
        return Err(Error::domain("sweep", "no sweep points"));
    }
    let results: Vec<Result<TptsPoint>> = points
        .par_iter()
        .map(|p| tpts(&p.lattice, z, excitation))
        .collect();
    let mut samples = Vec::with_capacity(points.len());
    for (index, (p, r)) in points.iter().zip(results).enumerate() {
        let t = r.map_err(|e| Error::SweepPoint {
            index,
            source: Box::new(e),
        })?;
        samples.push(TptsSample {
            j1: p.j1,
            j2: p.j2,
            ratio: p.j1 / p.j2,
            delta_d_um: p.delta_d_um,
            s_t: t.s_t,
            edge_intensity: t.edge_intensity,
            light_cone_ok: t.light_cone_ok,
        });
    }
    let argmax = samples
        .iter()
        .enumerate()
        .fold(0, |best, (i, s)| if s.s_t > samples[best].s_t { i } else { best });
    Ok(TptsSweep { samples, argmax })
}
