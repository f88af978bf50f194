//! The nilpotent slice `S_m ⊂ sl(2m)` at the element with two Jordan blocks
//! of size `m`.
//!
//! A point of `S_m` is stored as its first block column `y_{11}, ..., y_{m1}`
//! of 2×2 blocks; the assembled matrix carries identity blocks on the block
//! superdiagonal and zeros elsewhere. `y_{11}` is trace-free.
//!
//! The ℂ*-action scales `y_{i1}` by `r^{2i}`. This is `r^2 D y D^{-1}` with
//! `D = diag(r^{2(i-1)})` blockwise, so eigenvalues scale by `r^2`.

mod numerics;
mod sl3;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use numerics::{char_poly, hungarian, multiset_distance, numerical_rank, singular_values, C64};
pub use sl3::{sl3_matrix, sl3_normal_form, sl3_residual, sl3_verify_exact, A2Coordinates, GaussQ, SL3_TOL};

pub type Block = [[C64; 2]; 2];

pub const TRACE_TOL: f64 = 1e-12;
pub const RESIDUAL_WARN: f64 = 1e-8;
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const INJECTIVITY_TOL: f64 = 1e-8;
pub const JACOBIAN_STEP: f64 = 1e-6;
pub const JACOBIAN_RANK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum SliceError {
    Empty,
    TraceViolation(f64),
    ZeroScale,
    Sl3Residual(f64),
    NoEigenvalues,
    Json(String),
}

impl fmt::Display for SliceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SliceError::Empty => write!(f, "a slice matrix needs at least one block"),
            SliceError::TraceViolation(t) => write!(f, "y_11 is not trace-free (|trace| = {t:e})"),
            SliceError::ZeroScale => write!(f, "the C* action needs r != 0"),
            SliceError::Sl3Residual(r) => write!(f, "sl3 normal form check failed, residual {r:e}"),
            SliceError::NoEigenvalues => write!(f, "Schur iteration did not converge"),
            SliceError::Json(e) => write!(f, "bad slice matrix: {e}"),
        }
    }
}

impl core::error::Error for SliceError {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SliceJson", into = "SliceJson")]
pub struct SliceMatrix {
    blocks: Vec<Block>,
}

/// Wire format: each block is four `[re, im]` pairs in row-major order.
#[derive(Serialize, Deserialize)]
struct SliceJson {
    m: usize,
    blocks: Vec<[[f64; 2]; 4]>,
}

impl From<SliceMatrix> for SliceJson {
    fn from(y: SliceMatrix) -> Self {
        let blocks = y
            .blocks
            .iter()
            .map(|b| {
                let e = [b[0][0], b[0][1], b[1][0], b[1][1]];
                e.map(|z| [z.re, z.im])
            })
            .collect();
        SliceJson { m: y.m(), blocks }
    }
}

impl TryFrom<SliceJson> for SliceMatrix {
    type Error = SliceError;

    fn try_from(j: SliceJson) -> Result<Self, SliceError> {
        if j.blocks.len() != j.m {
            return Err(SliceError::Json(alloc::format!("m = {} but {} blocks", j.m, j.blocks.len())));
        }
        let blocks = j
            .blocks
            .into_iter()
            .map(|e| {
                let z = e.map(|[re, im]| C64::new(re, im));
                [[z[0], z[1]], [z[2], z[3]]]
            })
            .collect();
        SliceMatrix::new(blocks)
    }
}

impl SliceMatrix {
    pub fn new(blocks: Vec<Block>) -> Result<Self, SliceError> {
        let first = blocks.first().ok_or(SliceError::Empty)?;
        let trace = (first[0][0] + first[1][1]).norm();
        if !(trace <= TRACE_TOL) {
            return Err(SliceError::TraceViolation(trace));
        }
        Ok(SliceMatrix { blocks })
    }

    /// The point `n⁺` itself.
    pub fn nilpotent(m: usize) -> Result<Self, SliceError> {
        Self::new(alloc::vec![[[C64::new(0.0, 0.0); 2]; 2]; m])
    }

    /// Builds a point from free coordinates: three for `y_{11}`
    /// (`[[p, q], [r, -p]]`) and four row-major entries for each later block.
    pub fn from_coordinates(m: usize, x: &[C64]) -> Result<Self, SliceError> {
        if m == 0 {
            return Err(SliceError::Empty);
        }
        assert_eq!(x.len(), Self::dimension(m), "coordinate count");
        let mut blocks = Vec::with_capacity(m);
        blocks.push([[x[0], x[1]], [x[2], -x[0]]]);
        for c in x[3..].chunks(4) {
            blocks.push([[c[0], c[1]], [c[2], c[3]]]);
        }
        Self::new(blocks)
    }

    pub fn coordinates(&self) -> Vec<C64> {
        let b = &self.blocks[0];
        let mut x = alloc::vec![b[0][0], b[0][1], b[1][0]];
        for b in &self.blocks[1..] {
            x.extend([b[0][0], b[0][1], b[1][0], b[1][1]]);
        }
        x
    }

    /// Complex dimension `3 + 4(m - 1)`.
    pub fn dimension(m: usize) -> usize {
        4 * m - 1
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}

/// The full `2m × 2m` matrix.
pub fn assemble(y: &SliceMatrix) -> DMatrix<C64> {
    let n = 2 * y.m();
    let mut a = DMatrix::zeros(n, n);
    for (i, b) in y.blocks.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                a[(2 * i + r, c)] = b[r][c];
            }
        }
        if i + 1 < y.m() {
            a[(2 * i, 2 * i + 2)] = C64::new(1.0, 0.0);
            a[(2 * i + 1, 2 * i + 3)] = C64::new(1.0, 0.0);
        }
    }
    a
}

/// Unordered eigenvalues with multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenConfiguration {
    values: Vec<C64>,
    /// Largest `σ_min(A - λ)` over computed eigenvalues `λ`, relative to `‖A‖`.
    residual: f64,
}

impl EigenConfiguration {
    pub fn from_values(values: Vec<C64>) -> Self {
        EigenConfiguration { values, residual: 0.0 }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn warning(&self) -> bool {
        self.residual > RESIDUAL_WARN
    }

    pub fn sum(&self) -> C64 {
        self.values.iter().sum()
    }

    pub fn scaled(&self, s: C64) -> Self {
        EigenConfiguration { values: self.values.iter().map(|v| v * s).collect(), residual: self.residual }
    }

    pub fn with(&self, extra: &[C64]) -> Self {
        let mut values = self.values.clone();
        values.extend_from_slice(extra);
        EigenConfiguration { values, residual: self.residual }
    }

    /// Largest distance under the optimal matching.
    pub fn distance(&self, other: &Self) -> Option<f64> {
        multiset_distance(&self.values, &other.values)
    }

    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        self.distance(other).is_some_and(|d| d <= tol)
    }
}

pub fn eigenvalues(a: &DMatrix<C64>) -> Result<EigenConfiguration, SliceError> {
    let values: Vec<C64> = a.clone().schur().eigenvalues().ok_or(SliceError::NoEigenvalues)?.iter().copied().collect();
    let scale = a.norm().max(1.0);
    let n = a.nrows();
    let mut residual: f64 = 0.0;
    for &v in &values {
        let shifted = a - DMatrix::from_diagonal_element(n, n, v);
        residual = residual.max(singular_values(&shifted).last().copied().unwrap_or(0.0) / scale);
    }
    Ok(EigenConfiguration { values, residual })
}

pub fn adjoint_quotient(y: &SliceMatrix) -> Result<EigenConfiguration, SliceError> {
    eigenvalues(&assemble(y))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Injectivity {
    pub kernel_dim: usize,
    /// Smallest singular value of the projected orthonormal kernel basis.
    pub projected_min: f64,
    /// The kernel threshold did not separate the spectrum cleanly.
    pub inconclusive: bool,
}

impl Injectivity {
    pub fn injective(&self) -> bool {
        self.kernel_dim == 0 || self.projected_min > INJECTIVITY_TOL
    }
}

/// Projects a numerical basis of `ker(μ - y)` to the first two coordinates.
/// Kernel directions are the right singular vectors below `1e-8 σ_max`;
/// singular values in `(1e-8, 1e-4] σ_max` make the answer inconclusive.
pub fn eigenprojection_injective(y: &SliceMatrix, mu: C64) -> Injectivity {
    let a = assemble(y);
    let n = a.nrows();
    let shifted = DMatrix::from_diagonal_element(n, n, mu) - a;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let top = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let mut kernel = Vec::new();
    let mut inconclusive = false;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= INJECTIVITY_TOL * top {
            kernel.push(k);
        } else if s <= 1e-4 * top {
            inconclusive = true;
        }
    }
    if kernel.is_empty() {
        return Injectivity { kernel_dim: 0, projected_min: f64::INFINITY, inconclusive };
    }
    let p = DMatrix::from_fn(2, kernel.len(), |r, c| v_t[(kernel[c], r)].conj());
    let sv = singular_values(&p);
    let projected_min = if kernel.len() > 2 { 0.0 } else { sv.last().copied().unwrap_or(0.0) };
    Injectivity { kernel_dim: kernel.len(), projected_min, inconclusive }
}

/// `S_{m-1} -> S_m`, appending `y_{m1} = 0`.
pub fn embed_lower(y: &SliceMatrix) -> SliceMatrix {
    let mut blocks = y.blocks.clone();
    blocks.push([[C64::new(0.0, 0.0); 2]; 2]);
    SliceMatrix { blocks }
}

pub fn cstar_action(r: C64, y: &SliceMatrix) -> Result<SliceMatrix, SliceError> {
    if r == C64::new(0.0, 0.0) {
        return Err(SliceError::ZeroScale);
    }
    let r2 = r * r;
    let mut w = C64::new(1.0, 0.0);
    let blocks = y
        .blocks
        .iter()
        .map(|b| {
            w *= r2;
            b.map(|row| row.map(|z| z * w))
        })
        .collect();
    Ok(SliceMatrix { blocks })
}

/// `(ζ⁻, ζ⁺) = ∓√(4d³/27)`, principal root, so `ζ⁺ > 0` for `d > 0`.
pub fn critical_values(d: C64) -> (C64, C64) {
    let z = (d * d * d * (4.0 / 27.0)).sqrt();
    (-z, z)
}

/// The two critical points `(a, 0, 0)` of `a³ - a d + b c`, ordered so that
/// `[0]` lies over `ζ⁻` and `[1]` over `ζ⁺`.
pub fn critical_points(d: C64) -> [C64; 2] {
    let a = (d / 3.0).sqrt();
    [a, -a]
}

/// `ζ²` for rational `d`, computed from the critical-point equation
/// `3a² = d` as `a²(a² - d)²`.
pub fn critical_value_squared_exact(d: Ratio<i128>) -> Ratio<i128> {
    let a2 = d / Ratio::from_integer(3);
    a2 * (a2 - d) * (a2 - d)
}

/// Coefficients `c_2, ..., c_{2m}` of the characteristic polynomial; `c_1`
/// vanishes identically on the slice.
pub fn chi_coefficients(y: &SliceMatrix) -> Vec<C64> {
    char_poly(&assemble(y))[2..].to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianRank {
    pub rank: usize,
    pub expected_full: usize,
    pub singular_values: Vec<f64>,
}

/// Complex Jacobian of `chi_coefficients` in the slice coordinates, by
/// central differences; rank with threshold `1e-6 σ_max`.
pub fn chi_jacobian_rank(y: &SliceMatrix) -> JacobianRank {
    let m = y.m();
    let x = y.coordinates();
    let rows = 2 * m - 1;
    let mut jac = DMatrix::<C64>::zeros(rows, x.len());
    for k in 0..x.len() {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[k] += JACOBIAN_STEP;
        minus[k] -= JACOBIAN_STEP;
        let fp = chi_coefficients(&SliceMatrix::from_coordinates(m, &plus).expect("trace-free by construction"));
        let fm = chi_coefficients(&SliceMatrix::from_coordinates(m, &minus).expect("trace-free by construction"));
        for r in 0..rows {
            jac[(r, k)] = (fp[r] - fm[r]) / (2.0 * JACOBIAN_STEP);
        }
    }
    let singular_values = singular_values(&jac);
    JacobianRank { rank: numerical_rank(&singular_values, JACOBIAN_RANK_TOL), expected_full: rows, singular_values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_slice(rng: &mut ChaCha8Rng, m: usize) -> SliceMatrix {
        let x: Vec<C64> = (0..SliceMatrix::dimension(m)).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        SliceMatrix::from_coordinates(m, &x).unwrap()
    }

    fn zeros(k: usize) -> Vec<C64> {
        alloc::vec![c(0.0, 0.0); k]
    }

    #[test]
    fn assemble_small_cases() {
        let z = assemble(&SliceMatrix::nilpotent(1).unwrap());
        assert_eq!(z, DMatrix::zeros(2, 2));
        for m in 1..=5 {
            let n = assemble(&SliceMatrix::nilpotent(m).unwrap());
            let mut p = DMatrix::identity(2 * m, 2 * m);
            for _ in 0..m {
                p = &p * &n;
            }
            assert_eq!(p, DMatrix::zeros(2 * m, 2 * m), "n+^m = 0 for m = {m}");
            if m > 1 {
                let mut q = DMatrix::identity(2 * m, 2 * m);
                for _ in 0..m - 1 {
                    q = &q * &n;
                }
                assert_ne!(q, DMatrix::zeros(2 * m, 2 * m));
            }
        }
    }

    #[test]
    fn trace_violation_is_rejected() {
        let b = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(SliceMatrix::new(alloc::vec![b]), Err(SliceError::TraceViolation(_))));
        assert_eq!(SliceMatrix::new(Vec::new()), Err(SliceError::Empty));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = random_slice(&mut rng, 3);
        let s = serde_json::to_string(&y).unwrap();
        assert!(s.starts_with("{\"m\":3,\"blocks\":[[["));
        let back: SliceMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, y);
        let bad = r#"{"m":1,"blocks":[[[1,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(serde_json::from_str::<SliceMatrix>(bad).is_err());
        let short = r#"{"m":2,"blocks":[[[0,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(serde_json::from_str::<SliceMatrix>(short).is_err());
    }

    #[test]
    fn sl2_case_is_a_sum_of_squares() {
        // [[p, q], [r, -p]] has eigenvalues ±√(p² + qr); with p = a,
        // q = b + i c, r = b - i c this is ±√(a² + b² + c²).
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (a, b, cc) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let i = c(0.0, 1.0);
            let y = SliceMatrix::from_coordinates(1, &[c(a, 0.0), b + i * cc, b - i * cc]).unwrap();
            let s = c(a * a + b * b + cc * cc, 0.0).sqrt();
            let want = EigenConfiguration::from_values(alloc::vec![s, -s]);
            assert!(adjoint_quotient(&y).unwrap().matches(&want, SPECTRUM_TOL));
        }
    }

    #[test]
    fn nilpotent_spectrum_is_zero() {
        for m in 1..=4 {
            let e = adjoint_quotient(&SliceMatrix::nilpotent(m).unwrap()).unwrap();
            assert!(e.matches(&EigenConfiguration::from_values(zeros(2 * m)), 1e-12));
            assert!(!e.warning());
        }
    }

    #[test]
    fn eigenprojection_examples() {
        let n = SliceMatrix::nilpotent(3).unwrap();
        let r = eigenprojection_injective(&n, c(0.0, 0.0));
        assert_eq!(r.kernel_dim, 2);
        assert!(r.injective() && !r.inconclusive);
        assert!((r.projected_min - 1.0).abs() < 1e-12);
        let r = eigenprojection_injective(&n, c(0.5, 0.0));
        assert_eq!(r.kernel_dim, 0);
        assert!(r.injective());
    }

    #[test]
    fn eigenprojection_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 0..1000 {
            let y = random_slice(&mut rng, 1 + k % 4);
            for &mu in adjoint_quotient(&y).unwrap().values() {
                let r = eigenprojection_injective(&y, mu);
                assert!(r.kernel_dim >= 1 && r.injective(), "{y:?} at {mu}: {r:?}");
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let e = embed_lower(&SliceMatrix::nilpotent(1).unwrap());
        assert_eq!(e, SliceMatrix::nilpotent(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let y = random_slice(&mut rng, 1);
            let twice = assemble(&embed_lower(&embed_lower(&y)));
            let sv = singular_values(&twice);
            let rank = numerical_rank(&sv, 1e-10);
            assert!(twice.nrows() - rank >= 2);
        }
    }

    #[test]
    fn cstar_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = random_slice(&mut rng, 3);
        assert_eq!(cstar_action(c(1.0, 0.0), &y).unwrap(), y);
        assert_eq!(cstar_action(c(0.0, 0.0), &y), Err(SliceError::ZeroScale));
        let n = assemble(&SliceMatrix::nilpotent(3).unwrap());
        let mut last = f64::INFINITY;
        for r in [1e-1, 1e-2, 1e-3] {
            let dist = (assemble(&cstar_action(c(r, r), &y).unwrap()) - &n).norm();
            assert!(dist < last);
            last = dist;
        }
        assert!(last < 1e-5);
        let s = adjoint_quotient(&y).unwrap();
        let t = adjoint_quotient(&cstar_action(c(2.0, 0.0), &y).unwrap()).unwrap();
        assert!(t.matches(&s.scaled(c(4.0, 0.0)), SPECTRUM_TOL));
    }

    #[test]
    fn critical_value_examples() {
        assert_eq!(critical_values(c(0.0, 0.0)), (c(0.0, 0.0), c(0.0, 0.0)));
        let (lo, hi) = critical_values(c(3.0, 0.0));
        assert!((lo - c(-2.0, 0.0)).norm() < 1e-15 && (hi - c(2.0, 0.0)).norm() < 1e-15);
        // the formula agrees with π_d at the critical points
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let d = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let pi = |a: C64| a * a * a - a * d;
            let (zm, zp) = critical_values(d);
            let [pm, pp] = critical_points(d);
            assert!((3.0 * pm * pm - d).norm() < 1e-12);
            let got = EigenConfiguration::from_values(alloc::vec![pi(pm), pi(pp)]);
            assert!(got.matches(&EigenConfiguration::from_values(alloc::vec![zm, zp]), 1e-12));
            let d = c(rng.gen_range(0.01..3.0), 0.0);
            let pi = |a: C64| a * a * a - a * d;
            let (zm, zp) = critical_values(d);
            let [pm, pp] = critical_points(d);
            assert!(zp.re > 0.0);
            assert!((pi(pp) - zp).norm() < 1e-12 && (pi(pm) - zm).norm() < 1e-12);
        }
    }

    #[test]
    fn jacobian_full_at_generic_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for m in 1..=4 {
            for _ in 0..10 {
                let j = chi_jacobian_rank(&random_slice(&mut rng, m));
                assert_eq!(j.rank, j.expected_full, "{j:?}");
            }
        }
    }

    #[test]
    fn jacobian_drops_by_one_on_embedded_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 2..=4 {
            for _ in 0..10 {
                let j = chi_jacobian_rank(&embed_lower(&random_slice(&mut rng, m - 1)));
                assert_eq!(j.rank + 1, j.expected_full, "{j:?}");
            }
        }
    }

    fn slice_strategy() -> impl Strategy<Value = SliceMatrix> {
        (1usize..=4).prop_flat_map(|m| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), SliceMatrix::dimension(m)).prop_map(move |v| {
                let x: Vec<C64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
                SliceMatrix::from_coordinates(m, &x).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn subleading_coefficient_vanishes(y in slice_strategy()) {
            prop_assert!(char_poly(&assemble(&y))[1].norm() < 1e-12);
        }

        #[test]
        fn embedding_appends_two_zeros(y in slice_strategy()) {
            let up = adjoint_quotient(&embed_lower(&y)).unwrap();
            let want = adjoint_quotient(&y).unwrap().with(&zeros(2));
            prop_assert!(up.matches(&want, SPECTRUM_TOL), "{:?}", up.distance(&want));
        }

        #[test]
        fn cstar_equivariance(y in slice_strategy(), mag in 0.5f64..1.5, arg in 0.0f64..6.3) {
            let r = C64::from_polar(mag, arg);
            let moved = adjoint_quotient(&cstar_action(r, &y).unwrap()).unwrap();
            let want = adjoint_quotient(&y).unwrap().scaled(r * r);
            prop_assert!(moved.matches(&want, SPECTRUM_TOL), "{:?}", moved.distance(&want));
        }

        #[test]
        fn critical_values_exact(num in -200i128..200, den in 1i128..50) {
            let d = Ratio::new(num, den);
            let z2 = critical_value_squared_exact(d);
            prop_assert_eq!(Ratio::from_integer(27) * z2, Ratio::from_integer(4) * d * d * d);
        }
    }
}
