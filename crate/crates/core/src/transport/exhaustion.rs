//! The exhaustion `ξ(y) = Σ |z|^{2α/w}` over slice coordinates `z` of weight
//! `w` (block `k` has weight `2k`), with `α > m`. Only checked as a formula:
//! transport itself uses the flat metric.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TransportError;
use crate::slice::{cstar_action, SliceMatrix, C64};

pub fn xi(alpha: f64, y: &SliceMatrix) -> f64 {
    y.blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let beta = alpha / (k + 1) as f64;
            b.iter().flatten().map(|z| libm::pow(z.norm(), beta)).sum::<f64>()
        })
        .sum()
}

/// Laplacian of `|z|^β` away from `0`: `β² |z|^{β-2}`.
pub fn xi_laplacian(beta: f64, z: C64) -> f64 {
    beta * beta * libm::pow(z.norm(), beta - 2.0)
}

/// Five-point Laplacian of `|z|^β` with step `h`.
pub fn xi_laplacian_fd(beta: f64, z: C64, h: f64) -> f64 {
    let f = |w: C64| libm::pow(w.norm(), beta);
    let (dx, dy) = (C64::new(h, 0.0), C64::new(0.0, h));
    (f(z + dx) + f(z - dx) + f(z + dy) + f(z - dy) - 4.0 * f(z)) / (h * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    pub alpha: f64,
    pub m: usize,
    pub samples: usize,
    /// Smallest sampled Laplacian of a summand; positive means `ξ` is
    /// strictly subharmonic in each coordinate there.
    pub min_laplacian: f64,
    /// Closed form against finite differences, relative.
    pub laplacian_error: f64,
    /// `|ξ(λ_r y) - r^{2α} ξ(y)| / (r^{2α} ξ(y))`.
    pub homogeneity_error: f64,
}

impl ExhaustionReport {
    pub fn passed(&self) -> bool {
        self.min_laplacian > 0.0 && self.laplacian_error < 1e-4 && self.homogeneity_error < 1e-10
    }
}

pub fn exhaustion_check(alpha: f64, m: usize, n: usize, seed: u64) -> Result<ExhaustionReport, TransportError> {
    if m == 0 || !(alpha > m as f64) {
        return Err(TransportError::BadParameter("need m >= 1 and alpha > m"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_laplacian = f64::INFINITY;
    let mut laplacian_error: f64 = 0.0;
    let mut homogeneity_error: f64 = 0.0;
    for _ in 0..n {
        for k in 1..=m {
            let beta = alpha / k as f64;
            let z = C64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(0.0..6.3));
            let exact = xi_laplacian(beta, z);
            let fd = xi_laplacian_fd(beta, z, 1e-4 * z.norm());
            min_laplacian = min_laplacian.min(exact);
            laplacian_error = laplacian_error.max((fd - exact).abs() / exact);
        }
        let coords: alloc::vec::Vec<C64> = (0..SliceMatrix::dimension(m))
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let y = SliceMatrix::from_coordinates(m, &coords).map_err(|_| TransportError::BadParameter("slice sample"))?;
        let r: f64 = rng.gen_range(0.5..2.0);
        let scaled = cstar_action(C64::new(r, 0.0), &y).map_err(|_| TransportError::BadParameter("scale"))?;
        let want = libm::pow(r, 2.0 * alpha) * xi(alpha, &y);
        homogeneity_error = homogeneity_error.max((xi(alpha, &scaled) - want).abs() / want);
    }
    Ok(ExhaustionReport { alpha, m, samples: n, min_laplacian, laplacian_error, homogeneity_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustion_is_homogeneous_and_subharmonic() {
        for m in 1..=3 {
            let r = exhaustion_check(m as f64 + 0.5, m, 200, 3).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(exhaustion_check(1.0, 2, 10, 0).is_err());
    }

    #[test]
    fn quadratic_case() {
        // β = 2: |z|² has Laplacian 4
        assert!((xi_laplacian(2.0, C64::new(0.3, -0.7)) - 4.0).abs() < 1e-15);
        assert!((xi_laplacian_fd(2.0, C64::new(0.3, -0.7), 1e-3) - 4.0).abs() < 1e-6);
    }
}
