//! Test-only oracles, independent of the spectral propagator.
#![allow(dead_code)]

use num_complex::Complex64;
use topolattice::lattice::{
    build_lattice, CouplingCalibration, CouplingModel, DisorderSpec, LatticeSpec,
};

type CMat = Vec<Vec<Complex64>>;

fn matmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// `exp(-i H z)` for a dense real symmetric `H`, by scaling and squaring
/// of a truncated Taylor series.
pub fn expm_propagator(h: &[Vec<f64>], z: f64) -> CMat {
    let n = h.len();
    let norm = h
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * z.abs();
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let scale = z / 2f64.powi(squarings as i32);
    let a: CMat = h
        .iter()
        .map(|row| row.iter().map(|&v| Complex64::new(0.0, -v * scale)).collect())
        .collect();

    let mut result: CMat = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let mut term = result.clone();
    for k in 1..=30 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for (r, t) in result.iter_mut().zip(&term) {
            for (rv, tv) in r.iter_mut().zip(t) {
                *rv += tv;
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

pub fn dense_hamiltonian(lattice: &LatticeSpec) -> Vec<Vec<f64>> {
    let n = lattice.site_count();
    let mut h = vec![vec![0.0; n]; n];
    for (i, &b) in lattice.bonds().iter().enumerate() {
        h[i][i + 1] = b;
        h[i + 1][i] = b;
    }
    h
}

/// Site intensities after propagating a delta at `site` with the oracle.
pub fn oracle_intensities(lattice: &LatticeSpec, site: usize, z: f64) -> Vec<f64> {
    let u = expm_propagator(&dense_hamiltonian(lattice), z);
    u.iter().map(|row| row[site].norm_sqr()).collect()
}

/// Lattices used for the numerical-contract checks.
pub fn lattice_matrix() -> Vec<(String, LatticeSpec)> {
    let mut out = Vec::new();
    for cells in [2, 5, 9, 21, 101] {
        for t in [0.5, 1.0] {
            for w in [0.1, 0.5, 0.9] {
                let m = CouplingModel::Parametric { g: 0.4, t, w };
                out.push((format!("parametric N={cells} t={t} w={w}"), build_lattice(&m, cells, None).unwrap()));
            }
        }
        for (j1, j2) in [(1.0, 0.0), (0.0, 1.0), (0.05, 0.15)] {
            let m = CouplingModel::Direct { j1, j2 };
            out.push((format!("direct N={cells} ({j1},{j2})"), build_lattice(&m, cells, None).unwrap()));
        }
        let geo = CouplingModel::Geometric {
            d1_um: 19.5,
            d2_um: 20.5,
            calibration: CouplingCalibration::default(),
        };
        for seed in [1, 2] {
            let dis = DisorderSpec { amplitude_um: 0.1, seed };
            out.push((
                format!("geometric N={cells} seed={seed}"),
                build_lattice(&geo, cells, Some(&dis)).unwrap(),
            ));
        }
    }
    out.push((
        "direct N=400 (0.15,0.05)".into(),
        build_lattice(&CouplingModel::Direct { j1: 0.15, j2: 0.05 }, 400, None).unwrap(),
    ));
    out
}

pub const Z_MATRIX: [f64; 6] = [0.0, 0.5, 3.0, 17.3, 25.0, 60.0];
