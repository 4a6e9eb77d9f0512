//! Tight-binding propagation `ψ(z) = V e^{-iΛz} Vᵀ ψ(0)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{IndexingConvention, LatticeSpec, Sublattice};

/// Eigenpair residual bound, relative to `‖H‖∞`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Tolerance on `Σ|ψ|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;

const MAX_QL_SWEEPS: usize = 60;

/// Real symmetric tridiagonal matrix. The SSH chain has a zero diagonal; a
/// general diagonal is kept so the solver can be exercised on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl Hamiltonian {
    pub fn tridiagonal(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::domain(
                "off_diagonal",
                format!(
                    "expected {} entries for dimension {}, got {}",
                    diagonal.len().saturating_sub(1),
                    diagonal.len(),
                    off_diagonal.len()
                ),
            ));
        }
        if diagonal.iter().chain(&off_diagonal).any(|v| !v.is_finite()) {
            return Err(Error::domain("hamiltonian", "entries must be finite"));
        }
        Ok(Hamiltonian {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    /// Entry `(i, j)`; symmetric by construction.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diagonal[i],
            1 => self.off_diagonal[i.min(j)],
            _ => 0.0,
        }
    }

    /// `H x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diagonal[i] * x[i];
                if i > 0 {
                    acc += self.off_diagonal[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.off_diagonal[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let mut s = self.diagonal[i].abs();
                if i > 0 {
                    s += self.off_diagonal[i - 1].abs();
                }
                if i < self.off_diagonal.len() {
                    s += self.off_diagonal[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

pub fn assemble_hamiltonian(lattice: &LatticeSpec) -> Hamiltonian {
    Hamiltonian {
        diagonal: vec![0.0; lattice.site_count()],
        off_diagonal: lattice.bonds().to_vec(),
    }
}

/// Eigenvalues in ascending order with an orthonormal eigenvector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Column-major: eigenvector `i` is `vectors[i*n .. (i+1)*n]`.
    vectors: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors[i * n..(i + 1) * n]
    }

    /// Largest `‖H v - λ v‖₂` over all eigenpairs.
    pub fn max_residual(&self, h: &Hamiltonian) -> f64 {
        (0..self.dim())
            .map(|i| {
                let v = self.eigenvector(i);
                let lambda = self.eigenvalues[i];
                h.apply(v)
                    .iter()
                    .zip(v)
                    .map(|(hv, v)| (hv - lambda * v).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|VᵀV - I|`. O(n³); meant for verification.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let vi = self.eigenvector(i);
                (i..n)
                    .map(|j| {
                        let dot: f64 = vi.iter().zip(self.eigenvector(j)).map(|(a, b)| a * b).sum();
                        (dot - if i == j { 1.0 } else { 0.0 }).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    fn check_dim(&self, state: &FieldState) -> Result<()> {
        if state.amplitudes.len() != self.dim() {
            return Err(Error::domain(
                "state",
                format!(
                    "state has {} sites, decomposition has {}",
                    state.amplitudes.len(),
                    self.dim()
                ),
            ));
        }
        Ok(())
    }

    /// Projections `Vᵀ ψ` onto the eigenbasis.
    fn coefficients(&self, state: &FieldState) -> Vec<Complex64> {
        (0..self.dim())
            .map(|i| {
                self.eigenvector(i)
                    .iter()
                    .zip(&state.amplitudes)
                    .map(|(v, a)| a * v)
                    .sum()
            })
            .collect()
    }

    fn synthesize(&self, coefficients: &[Complex64], dz: f64) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, (&lambda, &c)) in self.eigenvalues.iter().zip(coefficients).enumerate() {
            let weight = c * Complex64::from_polar(1.0, -lambda * dz);
            for (o, &v) in out.iter_mut().zip(self.eigenvector(i)) {
                *o += weight * v;
            }
        }
        out
    }

    /// Propagates `state` by a further distance `dz` (mm). Negative `dz`
    /// runs the propagator backwards.
    pub fn evolve(&self, state: &FieldState, dz: f64) -> Result<FieldState> {
        self.check_dim(state)?;
        if !dz.is_finite() {
            return Err(Error::domain("z", "evolution distance must be finite"));
        }
        if dz == 0.0 {
            return Ok(state.clone());
        }
        let c = self.coefficients(state);
        Ok(FieldState {
            amplitudes: self.synthesize(&c, dz),
            z: state.z + dz,
        })
    }

    /// Intensities of `state` propagated to each distance in `zs`, reusing
    /// one eigenbasis projection. Output order follows `zs`.
    pub fn intensity_trajectory(
        &self,
        state: &FieldState,
        zs: &[f64],
    ) -> Result<Vec<IntensityDistribution>> {
        self.check_dim(state)?;
        if let Some(z) = zs.iter().find(|z| !z.is_finite()) {
            return Err(Error::domain("z", format!("evolution distance must be finite, got {z}")));
        }
        let c = self.coefficients(state);
        Ok(zs
            .par_iter()
            .map(|&z| {
                let dz = z - state.z;
                let amplitudes = if dz == 0.0 {
                    state.amplitudes.clone()
                } else {
                    self.synthesize(&c, dz)
                };
                intensity(&FieldState { amplitudes, z })
            })
            .collect())
    }
}

/// Eigendecomposition by implicit-shift QL iteration on the tridiagonal form.
///
/// Fails with [`Error::Numeric`] if an eigenvalue does not converge or the
/// final residual exceeds `RESIDUAL_TOLERANCE · ‖H‖∞`.
pub fn decompose(h: &Hamiltonian) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let mut d = h.diagonal.clone();
    let mut e = h.off_diagonal.clone();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql_implicit(&mut d, &mut e, &mut z, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        vectors.extend_from_slice(&z[i * n..(i + 1) * n]);
    }
    let spec = SpectralDecomposition {
        eigenvalues,
        vectors,
    };

    let bound = RESIDUAL_TOLERANCE * h.norm_inf();
    let residual = spec.max_residual(h);
    if residual > bound {
        return Err(Error::Numeric {
            what: format!("eigenpair residual above {bound:.3e}"),
            residual,
        });
    }
    Ok(spec)
}

/// QL with Wilkinson-style shifts. `e[i]` couples `d[i]` and `d[i+1]`;
/// `e[n-1]` is scratch. Rotations are accumulated into the columns of `z`.
fn tql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Numeric {
                    what: format!("QL iteration did not converge for eigenvalue {l}"),
                    residual: e[l].abs(),
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (left, right) = z.split_at_mut((i + 1) * n);
                let col_i = &mut left[i * n..];
                let col_next = &mut right[..n];
                for (zi, zn) in col_i.iter_mut().zip(col_next.iter_mut()) {
                    let h = *zn;
                    *zn = s * *zi + c * h;
                    *zi = c * *zi - s * h;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Complex site amplitudes at evolution distance `z` (mm).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    amplitudes: Vec<Complex64>,
    z: f64,
}

impl FieldState {
    pub fn new(amplitudes: Vec<Complex64>, z: f64) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain("state", format!("norm {norm} is not 1")));
        }
        Ok(FieldState { amplitudes, z })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn single_site_excitation(
    lattice: &LatticeSpec,
    cell: i64,
    sublattice: Sublattice,
    convention: IndexingConvention,
) -> Result<FieldState> {
    let site = lattice.site_index(cell, sublattice, convention)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); lattice.site_count()];
    amplitudes[site] = Complex64::new(1.0, 0.0);
    Ok(FieldState { amplitudes, z: 0.0 })
}

/// Per-site probabilities `|ψ_i|²` at distance `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityDistribution {
    probabilities: Vec<f64>,
    z: f64,
}

impl IntensityDistribution {
    pub fn from_probabilities(probabilities: Vec<f64>, z: f64) -> Result<Self> {
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::domain("probabilities", format!("entry {p} is not >= 0")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain("probabilities", format!("sum {total} is not 1")));
        }
        Ok(IntensityDistribution { probabilities, z })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

pub fn intensity(state: &FieldState) -> IntensityDistribution {
    IntensityDistribution {
        probabilities: state.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        z: state.z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, CouplingModel};
    use approx::assert_relative_eq;

    fn dimer(j: f64) -> Hamiltonian {
        Hamiltonian::tridiagonal(vec![0.0, 0.0], vec![j]).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let lat = build_lattice(&CouplingModel::Direct { j1: 1.0, j2: 0.0 }, 2, None).unwrap();
        let h = assemble_hamiltonian(&lat);
        assert_eq!(h.off_diagonal(), &[1.0, 0.0, 1.0]);
        assert!(h.diagonal().iter().all(|&d| d == 0.0));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h.get(i, j).to_bits(), h.get(j, i).to_bits());
            }
        }
        assert_eq!(h.get(0, 2), 0.0);

        let lat = build_lattice(&CouplingModel::Parametric { g: 1.0, t: 1.0, w: 0.9 }, 5, None).unwrap();
        let h = assemble_hamiltonian(&lat);
        let j1 = 1.0 + (0.9 * std::f64::consts::PI).cos();
        for (i, &b) in h.off_diagonal().iter().enumerate() {
            let expect = if i % 2 == 0 { j1 } else { 2.0 - j1 };
            assert_relative_eq!(b, expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn two_site_spectrum() {
        let s = decompose(&dimer(0.7)).unwrap();
        assert_relative_eq!(s.eigenvalues()[0], -0.7, max_relative = 1e-15);
        assert_relative_eq!(s.eigenvalues()[1], 0.7, max_relative = 1e-15);
    }

    #[test]
    fn decoupled_dimers_are_degenerate() {
        let lat = build_lattice(&CouplingModel::Direct { j1: 1.0, j2: 0.0 }, 5, None).unwrap();
        let h = assemble_hamiltonian(&lat);
        let s = decompose(&h).unwrap();
        for (i, &l) in s.eigenvalues().iter().enumerate() {
            let expect = if i < 5 { -1.0 } else { 1.0 };
            assert!((l - expect).abs() < 1e-14, "{l}");
        }
        assert!(s.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let h = Hamiltonian::tridiagonal(vec![0.0; 4], vec![0.0; 3]).unwrap();
        let s = decompose(&h).unwrap();
        assert!(s.eigenvalues().iter().all(|&l| l == 0.0));
        assert_eq!(s.max_residual(&h), 0.0);
    }

    #[test]
    fn bad_shapes() {
        assert!(Hamiltonian::tridiagonal(vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(Hamiltonian::tridiagonal(vec![], vec![]).is_err());
        let s = decompose(&dimer(1.0)).unwrap();
        let lat = build_lattice(&CouplingModel::Direct { j1: 1.0, j2: 1.0 }, 2, None).unwrap();
        let psi = single_site_excitation(&lat, 1, Sublattice::A, IndexingConvention::EdgeBased).unwrap();
        assert!(matches!(s.evolve(&psi, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn excitation_examples() {
        let lat = build_lattice(&CouplingModel::Direct { j1: 1.0, j2: 0.5 }, 5, None).unwrap();
        let psi = single_site_excitation(&lat, 3, Sublattice::A, IndexingConvention::EdgeBased).unwrap();
        assert_eq!(psi.amplitudes()[4], Complex64::new(1.0, 0.0));
        assert_eq!(psi.norm_sqr(), 1.0);
        assert_eq!(psi.z(), 0.0);
        assert!(single_site_excitation(&lat, 6, Sublattice::A, IndexingConvention::EdgeBased).is_err());

        let lat = build_lattice(&CouplingModel::Direct { j1: 1.0, j2: 0.5 }, 21, None).unwrap();
        let psi = single_site_excitation(&lat, 0, Sublattice::A, IndexingConvention::CenterBased).unwrap();
        assert_eq!(psi.amplitudes()[20], Complex64::new(1.0, 0.0));
        assert!(single_site_excitation(&lat, 11, Sublattice::B, IndexingConvention::CenterBased).is_err());
    }

    #[test]
    fn rabi_oscillation() {
        let j = 0.37;
        let lat = LatticeSpec::from_bonds(vec![j]).unwrap();
        let s = decompose(&assemble_hamiltonian(&lat)).unwrap();
        let psi = single_site_excitation(&lat, 1, Sublattice::A, IndexingConvention::EdgeBased).unwrap();
        assert_eq!(s.evolve(&psi, 0.0).unwrap(), psi);
        for z in [0.3, 1.7, 5.0, 22.5] {
            let p = intensity(&s.evolve(&psi, z).unwrap());
            assert!((p.probabilities()[0] - (j * z).cos().powi(2)).abs() < 1e-14);
            assert!((p.probabilities()[1] - (j * z).sin().powi(2)).abs() < 1e-14);
            assert_eq!(p.z(), z);
        }
    }

    #[test]
    fn intensity_examples() {
        let lat = LatticeSpec::from_bonds(vec![1.0]).unwrap();
        let psi = single_site_excitation(&lat, 1, Sublattice::B, IndexingConvention::EdgeBased).unwrap();
        assert_eq!(intensity(&psi).probabilities(), &[0.0, 1.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sup = FieldState::new(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)], 0.0).unwrap();
        let p = intensity(&sup);
        assert!((p.probabilities()[0] - 0.5).abs() < 1e-15);
        assert!((p.probabilities()[1] - 0.5).abs() < 1e-15);
        assert!(FieldState::new(vec![Complex64::new(1.0, 1.0)], 0.0).is_err());
    }
}
