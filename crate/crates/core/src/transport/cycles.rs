//! Sampled Lagrangian spheres: the A1 vanishing cycle `√t S²` and the
//! fibred spheres `Λ_α` of the A2 model.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Model, PointCloud, TransportError, TransportPath, P3};
use crate::slice::{critical_values, C64};

/// Fibonacci lattice: `(height, azimuth)` with heights `1 - (2k+1)/n`.
pub fn fibonacci(n: usize) -> Vec<[f64; 2]> {
    let golden = PI * (3.0 - libm::sqrt(5.0));
    (0..n)
        .map(|k| {
            let h = 1.0 - (2 * k + 1) as f64 / n as f64;
            [h, (golden * k as f64) % (2.0 * PI)]
        })
        .collect()
}

pub fn sphere_point([h, phi]: [f64; 2]) -> [f64; 3] {
    let r = libm::sqrt((1.0 - h * h).max(0.0));
    [r * libm::cos(phi), r * libm::sin(phi), h]
}

/// `√t S² ⊂ ℝ³ ⊂ ℂ³` over the fibre `t > 0` of the A1 model.
pub fn vanishing_cycle(t: f64, n: usize) -> Result<PointCloud, TransportError> {
    if !(t > 0.0) {
        return Err(TransportError::BadParameter("t must be positive"));
    }
    if n == 0 {
        return Err(TransportError::BadParameter("need at least one sample"));
    }
    let params = fibonacci(n);
    let s = libm::sqrt(t);
    let points = params.iter().map(|&q| sphere_point(q).map(|x| C64::new(s * x, 0.0))).collect();
    Ok(PointCloud { fiber: C64::new(t, 0.0), points, params })
}

/// The A2 model at real `d > 0` over `z = ζ⁻ + ε`, where `a³ - a d - z` has
/// three real roots and the right two are close to `√(d/3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Setup {
    pub d: f64,
    pub eps: f64,
    pub z: C64,
    /// Roots of `a³ - a d - z`, increasing.
    pub punctures: [C64; 3],
}

impl A2Setup {
    /// Requires `0 < ε < d^{3/2} / 100`.
    pub fn new(d: f64, eps: f64) -> Result<Self, TransportError> {
        if !(d > 0.0) {
            return Err(TransportError::BadParameter("d must be positive"));
        }
        if !(eps > 0.0 && eps < libm::pow(d, 1.5) / 100.0) {
            return Err(TransportError::BadParameter("need 0 < eps < d^(3/2)/100"));
        }
        let z = critical_values(C64::new(d, 0.0)).0 + eps;
        // trigonometric roots of a³ - d a - z, then Newton polish
        let r = 2.0 * libm::sqrt(d / 3.0);
        let theta = libm::acos((3.0 * z.re / (d * r)).clamp(-1.0, 1.0)) / 3.0;
        let mut roots = [0.0f64; 3];
        for (k, root) in roots.iter_mut().enumerate() {
            let mut a = r * libm::cos(theta - 2.0 * PI * k as f64 / 3.0);
            for _ in 0..4 {
                let f = a * a * a - d * a - z.re;
                let df = 3.0 * a * a - d;
                if df != 0.0 {
                    a -= f / df;
                }
            }
            *root = a;
        }
        roots.sort_by(f64::total_cmp);
        Ok(A2Setup { d, eps, z, punctures: roots.map(|a| C64::new(a, 0.0)) })
    }

    pub fn model(&self) -> Model {
        Model::A2 { d: C64::new(self.d, 0.0) }
    }

    pub fn gamma(&self) -> TransportPath {
        TransportPath::gamma(self.d, self.eps)
    }

    /// The straight path from the middle root (`r = 0`) to the right root
    /// (`r = 1`).
    pub fn alpha(&self, r: f64) -> C64 {
        self.punctures[1] + (self.punctures[2] - self.punctures[1]) * r
    }

    /// The point of `Λ_α` over `α(r)` at circle angle `phi`.
    pub fn fibred_point(&self, r: f64, phi: f64) -> P3 {
        fibred_point(self.d, self.z, self.alpha(r), phi)
    }

    /// Roots of `a³ - a d` (the punctures over `z = 0`), increasing.
    pub fn base_punctures(&self) -> [C64; 3] {
        let s = libm::sqrt(self.d);
        [C64::new(-s, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]
    }

    /// The first leg of `γ`, from `ζ⁻ + ε` to `0`.
    pub fn departure(&self) -> TransportPath {
        TransportPath::new(self.gamma().segments()[..1].to_vec())
    }

    /// The circle of `γ`, based at `0`.
    pub fn based_loop(&self) -> TransportPath {
        TransportPath::new(self.gamma().segments()[1..2].to_vec())
    }

    /// Fibonacci samples of `Λ_α`: height `h` maps to `r = (1 + h)/2`.
    pub fn lambda_alpha(&self, n: usize) -> PointCloud {
        let params = fibonacci(n);
        let points = params.iter().map(|&[h, phi]| self.fibred_point((1.0 + h) / 2.0, phi)).collect();
        PointCloud { fiber: self.z, points, params }
    }
}

/// The point over `a` on the circle `|b| = |c|`, `b c = -a³ + a d + z`, at
/// angle `phi`.
pub fn fibred_point(d: f64, z: C64, a: C64, phi: f64) -> P3 {
    let w = -(a * a * a) + a * d + z;
    let s = libm::sqrt(w.norm());
    [a, C64::from_polar(s, phi), C64::from_polar(s, w.arg() - phi)]
}

/// `||b| - |c||`, zero on the level set of the circle action's moment map.
pub fn moment_gap(p: &P3) -> f64 {
    (p[1].norm() - p[2].norm()).abs()
}
