//! Bulk momentum-space formulas for the SSH chain.
//!
//! `h(k) = d_x τ_x + d_y τ_y` with `d_x = J1 + J2 cos k`, `d_y = J2 sin k`,
//! `E = |d|`, `n = d / E`. Every integral over the Brillouin zone is a
//! periodic trapezoid rule on `k_j = -π + 2πj / n_k`, i.e. a plain mean.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::CRITICAL_TOLERANCE;

pub const DEFAULT_NK: usize = 2048;
pub const MIN_NK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub k: f64,
    pub d_x: f64,
    pub d_y: f64,
    pub energy: f64,
    /// Unit vector `d / E`; `None` where the gap closes.
    pub n: Option<(f64, f64)>,
}

pub fn bloch_point(j1: f64, j2: f64, k: f64) -> BlochPoint {
    let d_x = j1 + j2 * k.cos();
    let d_y = j2 * k.sin();
    let energy = d_x.hypot(d_y);
    let n = (energy > 0.0).then(|| (d_x / energy, d_y / energy));
    BlochPoint {
        k,
        d_x,
        d_y,
        energy,
        n,
    }
}

/// Upper band energy `E(k) = sqrt(J1² + J2² + 2 J1 J2 cos k)`.
///
/// Evaluated as `|d(k)|` so that `E(π) = |J1 - J2|` holds without cancellation.
pub fn dispersion(j1: f64, j2: f64, k: f64) -> f64 {
    (j1 + j2 * k.cos()).hypot(j2 * k.sin())
}

fn energy_sqr(j1: f64, j2: f64, k: f64) -> f64 {
    let d_x = j1 + j2 * k.cos();
    let d_y = j2 * k.sin();
    d_x * d_x + d_y * d_y
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingIntegral {
    pub raw: f64,
    pub rounded: i64,
}

fn k_grid(nk: usize) -> impl Iterator<Item = f64> {
    (0..nk).map(move |j| -PI + 2.0 * PI * j as f64 / nk as f64)
}

fn check_nk(nk: usize) -> Result<()> {
    if nk < MIN_NK {
        return Err(Error::domain("n_k", format!("need at least {MIN_NK} k-points, got {nk}")));
    }
    Ok(())
}

fn check_couplings(j1: f64, j2: f64) -> Result<()> {
    for (field, j) in [("j1", j1), ("j2", j2)] {
        if !(j.is_finite() && j >= 0.0) {
            return Err(Error::domain(field, format!("must be finite and >= 0, got {j}")));
        }
    }
    Ok(())
}

fn check_gapped(j1: f64, j2: f64) -> Result<()> {
    check_couplings(j1, j2)?;
    if (j1 - j2).abs() <= CRITICAL_TOLERANCE * j1.max(j2) {
        return Err(Error::domain("j1, j2", "gap closed, winding undefined"));
    }
    Ok(())
}

/// `n × ∂_k n = (d_x ∂d_y - d_y ∂d_x) / E² = (J1 J2 cos k + J2²) / E²`.
fn winding_density(j1: f64, j2: f64, k: f64) -> f64 {
    (j1 * j2 * k.cos() + j2 * j2) / energy_sqr(j1, j2, k)
}

/// Winding number `(1/2π) ∮ n × ∂_k n dk`.
pub fn winding_integral(j1: f64, j2: f64, nk: usize) -> Result<WindingIntegral> {
    check_gapped(j1, j2)?;
    check_nk(nk)?;
    let raw = k_grid(nk).map(|k| winding_density(j1, j2, k)).sum::<f64>() / nk as f64;
    Ok(WindingIntegral {
        raw,
        rounded: raw.round() as i64,
    })
}

/// Bulk population-difference center for an a-sublattice excitation, with
/// cells labelled from the excited one:
/// `P̄_d(z) = ν/2 - (1/4π) ∫ cos(2Ez) n × ∂_k n dk`.
pub fn analytic_ppdc(j1: f64, j2: f64, z: f64, nk: usize) -> Result<f64> {
    check_gapped(j1, j2)?;
    check_nk(nk)?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::domain("z", format!("must be finite and >= 0, got {z}")));
    }
    // both terms folded into one sum so z = 0 gives exactly 0
    let sum: f64 = k_grid(nk)
        .map(|k| {
            let e = dispersion(j1, j2, k);
            (1.0 - (2.0 * e * z).cos()) * winding_density(j1, j2, k)
        })
        .sum();
    Ok(0.5 * sum / nk as f64)
}

/// Long-distance limit of `P̄_c(z) / z²`: `min(J1, J2)² / 2`.
pub fn analytic_tpts(j1: f64, j2: f64) -> f64 {
    let m = j1.min(j2);
    0.5 * m * m
}

/// `(1/2π) ∫ (∂_k E)² dk` with `∂_k E = -J1 J2 sin k / E`.
pub fn tpts_integral(j1: f64, j2: f64, nk: usize) -> Result<f64> {
    check_couplings(j1, j2)?;
    check_nk(nk)?;
    let sum: f64 = k_grid(nk)
        .map(|k| {
            let e2 = energy_sqr(j1, j2, k);
            if e2 > 0.0 {
                let num = j1 * j2 * k.sin();
                num * num / e2
            } else {
                // only reachable at k = π with J1 = J2, where the limit is J1 J2
                j1 * j2
            }
        })
        .sum();
    Ok(sum / nk as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn winding_examples() {
        let w = winding_integral(1.0, 0.0, DEFAULT_NK).unwrap();
        assert_eq!(w.rounded, 0);
        assert_eq!(w.raw, 0.0);
        let w = winding_integral(0.0, 1.0, DEFAULT_NK).unwrap();
        assert_eq!(w.rounded, 1);
        assert!((w.raw - 1.0).abs() < 1e-14);
        assert_eq!(winding_integral(0.5, 1.0, DEFAULT_NK).unwrap().rounded, 1);
        assert_eq!(winding_integral(1.0, 0.5, DEFAULT_NK).unwrap().rounded, 0);
    }

    #[test]
    fn winding_refuses_closed_gap() {
        let err = winding_integral(0.7, 0.7, DEFAULT_NK).unwrap_err();
        assert!(err.to_string().contains("gap closed"));
        assert!(winding_integral(0.0, 0.0, DEFAULT_NK).is_err());
        assert!(winding_integral(0.5, 1.0, 32).is_err());
        assert!(analytic_ppdc(0.3, 0.3, 1.0, DEFAULT_NK).is_err());
    }

    #[test]
    fn dispersion_examples() {
        assert_relative_eq!(dispersion(0.3, 0.8, 0.0), 1.1, max_relative = 1e-15);
        assert!((dispersion(0.3, 0.8, PI) - 0.5).abs() < 1e-15);
        assert_relative_eq!(dispersion(1.0, 1.0, PI / 2.0), 2f64.sqrt(), max_relative = 1e-15);
        assert!(dispersion(1.0, 1.0, PI) < 1e-15);
    }

    #[test]
    fn bloch_vector_is_unit() {
        for k in k_grid(128) {
            let b = bloch_point(0.4, 0.9, k);
            let (nx, ny) = b.n.unwrap();
            assert!((nx.hypot(ny) - 1.0).abs() < 1e-12);
            assert!((b.energy - dispersion(0.4, 0.9, k)).abs() < 1e-14);
        }
        assert!(bloch_point(0.0, 0.0, 0.3).n.is_none());
    }

    #[test]
    fn ppdc_starts_at_zero() {
        for (j1, j2) in [(0.5, 1.0), (1.0, 0.5), (0.15, 0.05)] {
            assert_eq!(analytic_ppdc(j1, j2, 0.0, DEFAULT_NK).unwrap(), 0.0);
        }
    }

    #[test]
    fn ppdc_oscillates_about_half_winding() {
        let zs: Vec<f64> = (0..2000).map(|i| 50.0 + 0.37 * i as f64).collect();
        let mean =
            zs.iter().map(|&z| analytic_ppdc(0.5, 1.0, z, DEFAULT_NK).unwrap()).sum::<f64>() / zs.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn tpts_examples() {
        assert_eq!(analytic_tpts(0.5, 1.0), 0.125);
        assert_eq!(analytic_tpts(1.0, 1.0), 0.5);
        assert_eq!(analytic_tpts(1.0, 0.5), 0.125);
        assert_eq!(tpts_integral(1.0, 0.0, 4096).unwrap(), 0.0);
        assert!((tpts_integral(0.5, 1.0, 4096).unwrap() - 0.125).abs() < 1e-6);
    }

    /// Gapless chain: the integrand has a kink at k = π, so compare against a
    /// Richardson extrapolation of two trapezoid sums.
    #[test]
    fn tpts_integral_at_transition() {
        let coarse = tpts_integral(1.0, 1.0, 2048).unwrap();
        let fine = tpts_integral(1.0, 1.0, 4096).unwrap();
        let richardson = (4.0 * fine - coarse) / 3.0;
        assert!((richardson - 0.5).abs() < 1e-8);
        assert!((fine - 0.5).abs() < 1e-4);
    }

    /// Finite-difference evaluation of `n × ∂_k n`, independent of the
    /// closed form used by `winding_integral`.
    fn winding_fd(j1: f64, j2: f64, nk: usize) -> f64 {
        let h = 1e-5;
        k_grid(nk)
            .map(|k| {
                let (nx, ny) = bloch_point(j1, j2, k).n.unwrap();
                let (px, py) = bloch_point(j1, j2, k + h).n.unwrap();
                let (mx, my) = bloch_point(j1, j2, k - h).n.unwrap();
                nx * (py - my) / (2.0 * h) - ny * (px - mx) / (2.0 * h)
            })
            .sum::<f64>()
            / nk as f64
    }

    #[test]
    fn winding_matches_finite_difference() {
        for (j1, j2) in [(0.2, 0.9), (0.9, 0.2), (0.05, 0.15), (1.3, 0.4)] {
            let closed = winding_integral(j1, j2, 1024).unwrap().raw;
            assert!((closed - winding_fd(j1, j2, 1024)).abs() < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn winding_is_integer(j1 in 0.01f64..2.0, j2 in 0.01f64..2.0) {
            prop_assume!((j1 / j2 - 1.0).abs() > 0.05);
            let w = winding_integral(j1, j2, DEFAULT_NK).unwrap();
            prop_assert!((w.raw - w.raw.round()).abs() <= 1e-6);
            prop_assert_eq!(w.rounded, if j1 < j2 { 1 } else { 0 });
        }

        #[test]
        fn winding_is_scale_invariant(j1 in 0.01f64..2.0, j2 in 0.01f64..2.0, c in 0.01f64..100.0) {
            prop_assume!((j1 / j2 - 1.0).abs() > 0.05);
            let a = winding_integral(j1, j2, DEFAULT_NK).unwrap();
            let b = winding_integral(c * j1, c * j2, DEFAULT_NK).unwrap();
            prop_assert_eq!(a.rounded, b.rounded);
            prop_assert!((a.raw - b.raw).abs() < 1e-10);
        }

        #[test]
        fn band_edges(j1 in 0.0f64..2.0, j2 in 0.0f64..2.0, k in -PI..PI) {
            let e = dispersion(j1, j2, k);
            prop_assert!(e >= (j1 - j2).abs() - 1e-12);
            prop_assert!(e <= j1 + j2 + 1e-12);
            prop_assert!((dispersion(j1, j2, 0.0) - (j1 + j2)).abs() <= 1e-12);
            prop_assert!((dispersion(j1, j2, PI) - (j1 - j2).abs()).abs() <= 1e-12);
        }
    }
}
