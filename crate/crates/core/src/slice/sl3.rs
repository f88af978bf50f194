//! The 3×3 slice at a regular nilpotent and its normal form `(a, b, c, d)`.
//!
//! `a = 2α, b = β, c = -γ, d = ¾a² + δ`. With `d = ¾a² - δ` the
//! characteristic polynomial is not `t³ - t d + (a³ - a d + b c)`; the
//! verification below rejects that variant.

use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::numerics::{char_poly, C64};
use super::SliceError;

/// Gaussian rationals, used for the exact identity check.
pub type GaussQ = Complex<Ratio<i128>>;

/// Verification tolerance on each coefficient.
pub const SL3_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Coordinates {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl A2Coordinates {
    /// `(d, a^3 - a d + b c)`.
    pub fn chi(&self) -> (C64, C64) {
        let Self { a, b, c, d } = *self;
        (d, a * a * a - a * d + b * c)
    }
}

fn entries<T: Clone + Neg<Output = T> + Add<Output = T>>(
    alpha: T,
    beta: T,
    gamma: T,
    delta: T,
    zero: T,
    one: T,
) -> [[T; 3]; 3] {
    let minus_two = -(alpha.clone() + alpha.clone());
    [
        [alpha.clone(), zero.clone(), one],
        [beta, minus_two, zero],
        [delta, gamma, alpha],
    ]
}

pub fn sl3_matrix(alpha: C64, beta: C64, gamma: C64, delta: C64) -> DMatrix<C64> {
    let e = entries(alpha, beta, gamma, delta, C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    DMatrix::from_fn(3, 3, |i, j| e[i][j])
}

fn normal_form<T>(alpha: T, beta: T, gamma: T, delta: T, three_quarters: T) -> [T; 4]
where
    T: Clone + Neg<Output = T> + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let a = alpha.clone() + alpha;
    let d = three_quarters * a.clone() * a.clone() + delta;
    [a, beta, -gamma, d]
}

/// `[c_1, c_2, c_3]` of the target `t^3 - t d + (a^3 - a d + b c)`.
fn target<T>(n: &[T; 4], zero: T) -> [T; 3]
where
    T: Clone + Neg<Output = T> + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let [a, b, c, d] = n.clone();
    [zero, -d.clone(), a.clone() * a.clone() * a.clone() - a * d + b * c]
}

/// Change of coordinates, verified by recomputing the characteristic
/// polynomial numerically.
pub fn sl3_normal_form(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Result<A2Coordinates, SliceError> {
    let residual = sl3_residual(alpha, beta, gamma, delta);
    if !(residual <= SL3_TOL) {
        return Err(SliceError::Sl3Residual(residual));
    }
    let [a, b, c, d] = normal_form(alpha, beta, gamma, delta, C64::new(0.75, 0.0));
    Ok(A2Coordinates { a, b, c, d })
}

/// Largest coefficient difference between the characteristic polynomial of
/// the slice matrix and the normal-form polynomial.
pub fn sl3_residual(alpha: C64, beta: C64, gamma: C64, delta: C64) -> f64 {
    let n = normal_form(alpha, beta, gamma, delta, C64::new(0.75, 0.0));
    let want = target(&n, C64::new(0.0, 0.0));
    let got = char_poly(&sl3_matrix(alpha, beta, gamma, delta));
    (0..3).map(|k| (got[k + 1] - want[k]).norm()).fold(0.0, f64::max)
}

/// Exact check over Gaussian rationals. The characteristic polynomial is
/// expanded by principal minors (independently of the numeric route).
/// Returns the index `k` of the first coefficient `c_k` that disagrees.
pub fn sl3_verify_exact(alpha: GaussQ, beta: GaussQ, gamma: GaussQ, delta: GaussQ) -> Result<(), usize> {
    let zero = GaussQ::new(Ratio::from_integer(0), Ratio::from_integer(0));
    let one = GaussQ::new(Ratio::from_integer(1), Ratio::from_integer(0));
    let q = GaussQ::new(Ratio::new(3, 4), Ratio::from_integer(0));
    let m = entries(alpha, beta, gamma, delta, zero, one);
    let n = normal_form(alpha, beta, gamma, delta, q);
    let want = target(&n, zero);

    let trace = m[0][0] + m[1][1] + m[2][2];
    let minor = |i: usize, j: usize| m[i][i] * m[j][j] - m[i][j] * m[j][i];
    let det = m[0][0] * minor(1, 2) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let got = [-trace, minor(0, 1) + minor(0, 2) + minor(1, 2), -det];
    match (0..3).find(|&k| got[k] != want[k]) {
        Some(k) => Err(k + 1),
        None => Ok(()),
    }
}
