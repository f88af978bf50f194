//! Verification batteries on top of transport: vanishing-cycle scaling, A1
//! monodromy, the A2 half-twist picture, Maslov indices for Markov II,
//! gradient lower bounds, phase coherence and energy.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    distance, fibred_point, moment_gap, norm, transport, transport_point, vanishing_cycle, A2Setup, Model, PointCloud,
    TransportError, TransportOptions, TransportPath, P3,
};
use crate::braid::{BraidWord, Letter};
use crate::curves::MarkedDisc;
use crate::slice::C64;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub t: f64,
    pub targets: Vec<f64>,
    /// Per target, `max |p' - √(t'/t) p|`.
    pub errors: Vec<f64>,
    /// Largest point norm at the last target.
    pub max_norm: f64,
    pub fiber_residual: f64,
}

impl ScalingReport {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Transports `√t S²` along the real axis through the successive `targets`
/// and compares against the rescaled sphere.
pub fn a1_scaling(t: f64, targets: &[f64], n: usize, opts: &TransportOptions) -> Result<ScalingReport, TransportError> {
    let start = vanishing_cycle(t, n)?;
    let mut cloud = start.clone();
    let mut errors = Vec::new();
    let mut fiber_residual: f64 = 0.0;
    for &target in targets {
        if !(target > 0.0) {
            return Err(TransportError::BadParameter("targets must be positive"));
        }
        let path = TransportPath::line(cloud.fiber, real(target));
        cloud = transport(&Model::A1, &path, &cloud, opts)?;
        let k = libm::sqrt(target / t);
        let e = start
            .points
            .iter()
            .zip(&cloud.points)
            .map(|(p, q)| distance(&p.map(|z| z * k), q))
            .fold(0.0, f64::max);
        errors.push(e);
        fiber_residual = fiber_residual.max(cloud.fiber_residual(&Model::A1));
    }
    let max_norm = cloud.points.iter().map(norm).fold(0.0, f64::max);
    Ok(ScalingReport { t, targets: targets.to_vec(), errors, max_norm, fiber_residual })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub t: f64,
    pub sweep: f64,
    pub samples: usize,
    pub end_fiber: C64,
    pub fiber_residual: f64,
    /// `max | |p| - √|t| |`.
    pub norm_error: f64,
    /// Largest distance from a returned sample to `e^{i sweep/2} √t S²`.
    pub off_sphere: f64,
    /// `max |p_end - e^{i sweep/2} p_start|`; the antipodal deviation for a
    /// full loop.
    pub pointwise: f64,
    pub cloud: PointCloud,
}

/// Distance from `p` to `u · r S²` with `|u| = 1`, `S² ⊂ ℝ³`.
fn distance_to_rotated_sphere(p: &P3, u: C64, r: f64) -> f64 {
    let q = p.map(|z| z * u.conj());
    let re = libm::sqrt(q.iter().map(|z| z.re * z.re).sum::<f64>());
    let im2: f64 = q.iter().map(|z| z.im * z.im).sum();
    libm::sqrt((re - r) * (re - r) + im2)
}

/// Transports `√t S²` along `t e^{is}`, `s ∈ [0, sweep]`.
pub fn a1_loop(t: f64, sweep: f64, n: usize, opts: &TransportOptions) -> Result<LoopReport, TransportError> {
    let start = vanishing_cycle(t, n)?;
    let path = TransportPath::circle(real(t), sweep);
    let cloud = transport(&Model::A1, &path, &start, opts)?;
    let r = libm::sqrt(t);
    let u = C64::from_polar(1.0, sweep / 2.0);
    let mut report = LoopReport {
        t,
        sweep,
        samples: n,
        end_fiber: cloud.fiber,
        fiber_residual: cloud.fiber_residual(&Model::A1),
        norm_error: 0.0,
        off_sphere: 0.0,
        pointwise: 0.0,
        cloud: PointCloud { fiber: cloud.fiber, points: Vec::new(), params: Vec::new() },
    };
    for (p, q) in start.points.iter().zip(&cloud.points) {
        report.norm_error = report.norm_error.max((norm(q) - r).abs());
        report.off_sphere = report.off_sphere.max(distance_to_rotated_sphere(q, u, r));
        report.pointwise = report.pointwise.max(distance(&p.map(|z| z * u), q));
    }
    report.cloud = cloud;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A1MonodromyReport {
    pub tol: f64,
    pub full: LoopReport,
    pub half: LoopReport,
    /// Setwise return within `tol`; hard requirement.
    pub setwise: bool,
    /// Pointwise antipodal return within `1e-3`; soft.
    pub antipodal: bool,
    /// `π` on the half loop lands on `-t` and norms stay `√t`.
    pub half_loop: bool,
}

impl A1MonodromyReport {
    pub fn passed(&self) -> bool {
        self.setwise && self.half_loop
    }
}

pub const ANTIPODAL_TOL: f64 = 1e-3;

pub fn a1_monodromy_check(t: f64, n: usize, tol: f64, opts: &TransportOptions) -> Result<A1MonodromyReport, TransportError> {
    let full = a1_loop(t, 2.0 * PI, n, opts)?;
    let half = a1_loop(t, PI, n, opts)?;
    let setwise = full.off_sphere < tol && full.fiber_residual < opts.fiber_tol;
    let antipodal = full.pointwise < ANTIPODAL_TOL;
    let half_loop = (half.end_fiber + t).norm() < 1e-12 * (1.0 + t) && half.norm_error < tol && half.off_sphere < tol;
    Ok(A1MonodromyReport { tol, full, half, setwise, antipodal, half_loop })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Report {
    pub setup: A2Setup,
    pub power: i32,
    pub cloud: PointCloud,
    /// Largest distance of `P α` from the real segment `[0, √d]`.
    pub departure_drift: f64,
    /// `a`-coordinates over `0` of the segment `[0, √d]` carried around the
    /// based circle `power` times.
    pub arc: Vec<C64>,
    /// Segment parameters the arc points were sampled at.
    pub arc_params: Vec<f64>,
    /// Largest `||b| - |c||` over the cloud and the arc.
    pub moment_gap: f64,
    pub fiber_residual: f64,
    /// Punctures over `0` (1-based, left to right) at the ends of the arc.
    pub endpoints: (usize, usize),
    /// Real-axis crossings, as the number of punctures to their left.
    pub crossings: Vec<usize>,
    pub reduced: Vec<usize>,
    /// `(shared endpoints, interior crossings)` with `α`.
    pub pattern: (usize, usize),
    /// The same pattern computed in the curves module.
    pub expected: (usize, usize),
}

impl A2Report {
    pub fn passed(&self, tol: f64) -> bool {
        self.moment_gap < tol && self.departure_drift < DEPARTURE_TOL && self.pattern == self.expected
    }
}

pub const DEPARTURE_TOL: f64 = 1e-6;

/// Azimuth used for the projected arc; the projection does not depend on it.
pub const ARC_AZIMUTH: f64 = 0.7;
/// Bisection threshold for the projected arc, relative to the smallest gap
/// between punctures.
pub const ARC_RESOLUTION: f64 = 0.02;

/// `(shared endpoints, interior crossings)` of `α = [2, 3]` and `σ_1^n(α)`
/// on three marked points.
pub fn expected_pattern(n: i32) -> (usize, usize) {
    let disc = MarkedDisc::new(3).expect("three points");
    let alpha = disc.segment(2, 3).expect("valid segment");
    let sign = if n < 0 { -1 } else { 1 };
    let word = BraidWord::new(3, vec![Letter::new(1, sign); n.unsigned_abs() as usize]).expect("valid word");
    let image = alpha.act(&word).expect("matching strands");
    image.meet(&alpha).unwrap_or((2, 0))
}

/// Crossings of a polyline with the real axis; points within `noise` of the
/// axis are skipped.
pub fn real_crossings(arc: &[C64], punctures: &[C64], noise: f64) -> Vec<usize> {
    let pts: Vec<C64> = arc.iter().copied().filter(|z| z.im.abs() > noise).collect();
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (x, y) = (w[0], w[1]);
        if (x.im > 0.0) != (y.im > 0.0) {
            let s = x.im / (x.im - y.im);
            let at = x.re + s * (y.re - x.re);
            out.push(punctures.iter().filter(|p| p.re < at).count());
        }
    }
    out
}

/// Removes bigons with the real axis: repeated intervals, and a first or
/// last crossing in an interval adjacent to its own endpoint.
pub fn reduce_crossings(start: usize, seq: &[usize], end: usize) -> Vec<usize> {
    let mut s = seq.to_vec();
    loop {
        let before = s.len();
        let mut out: Vec<usize> = Vec::with_capacity(s.len());
        for &x in &s {
            if out.last() == Some(&x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        s = out;
        if let Some(&f) = s.first() {
            if f + 1 == start || f == start {
                s.remove(0);
            }
        }
        if let Some(&l) = s.last() {
            if l + 1 == end || l == end {
                s.pop();
            }
        }
        if s.len() == before {
            return s;
        }
    }
}

fn nearest_puncture(z: C64, punctures: &[C64]) -> usize {
    let mut best = 0;
    for (i, p) in punctures.iter().enumerate() {
        if (z - p).norm() < (z - punctures[best]).norm() {
            best = i;
        }
    }
    best + 1
}

/// Samples, largest moment gap, largest fibre residual.
type ArcSamples = (Vec<(f64, C64)>, f64, f64);

/// Adaptive samples `(r, a)` of the `a`-projection of
/// `{fibred_point(d, z, from + r (to - from), θ)}` transported along `path`.
fn projected_arc(
    model: &Model,
    d: f64,
    z: C64,
    ends: (C64, C64),
    punctures: &[C64; 3],
    path: &TransportPath,
    opts: &TransportOptions,
) -> Result<ArcSamples, TransportError> {
    let [p1, p2, p3] = *punctures;
    let threshold = ARC_RESOLUTION * (p2 - p1).norm().min((p3 - p2).norm());
    let mut gap: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let end = path.end().unwrap_or(z);
    let mut eval = |r: f64| -> Result<C64, TransportError> {
        let p = fibred_point(d, z, ends.0 + (ends.1 - ends.0) * r, ARC_AZIMUTH);
        let q = if path.segments().is_empty() { p } else { transport_point(model, path, p, opts)?.point };
        gap = gap.max(moment_gap(&q));
        residual = residual.max((model.pi(&q) - end).norm());
        Ok(q[0])
    };
    let mut pts: Vec<(f64, C64)> = Vec::new();
    for k in 0..=16 {
        let r = k as f64 / 16.0;
        pts.push((r, eval(r)?));
    }
    let mut i = 0;
    while i + 1 < pts.len() {
        let ((r0, a0), (r1, a1)) = (pts[i], pts[i + 1]);
        if (a1 - a0).norm() > threshold {
            if r1 - r0 < ARC_MIN_STEP {
                return Err(TransportError::Unresolved { r: r0, jump: (a1 - a0).norm() });
            }
            let rm = 0.5 * (r0 + r1);
            let am = eval(rm)?;
            pts.insert(i + 1, (rm, am));
        } else {
            i += 1;
        }
    }
    Ok((pts, gap, residual))
}

/// Smallest parameter step the arc sampler may bisect to.
pub const ARC_MIN_STEP: f64 = 1e-14;

/// Transports `Λ_α` (`n_samples` Fibonacci points) around `γ_{d,ε}^power`
/// and extracts the intersection pattern of the projected arc with `α`.
///
/// Transport along `γ` is `P⁻¹ ∘ L ∘ P`, with `P` the first leg and `L` the
/// circle based at `0`, so the pattern of `(γ^n α, α)` is the pattern of
/// `(L^n P α, P α)` over `0`. Near `ζ⁻ + ε` the flow expands like a saddle
/// at rate `∼ 1/ε`, so the arc is sampled over `0`, where `P α` is the real
/// segment `[0, √d]` (it is invariant under complex conjugation and has
/// real ends). `departure_drift` measures that claim on the transported
/// samples of `α`.
pub fn a2_monodromy(
    d: f64,
    eps: f64,
    power: i32,
    n_samples: usize,
    opts: &TransportOptions,
) -> Result<A2Report, TransportError> {
    let setup = A2Setup::new(d, eps)?;
    let model = setup.model();
    let cloud = transport(&model, &setup.gamma().power(power), &setup.lambda_alpha(n_samples), opts)?;

    let [_, b2, b3] = setup.base_punctures();
    let mut departure_drift: f64 = 0.0;
    for k in 0..=16 {
        let p = setup.fibred_point(k as f64 / 16.0, ARC_AZIMUTH);
        let a = transport_point(&model, &setup.departure(), p, opts)?.point[0];
        let off_segment = if a.re < b2.re { (a - b2).norm() } else if a.re > b3.re { (a - b3).norm() } else { a.im.abs() };
        departure_drift = departure_drift.max(off_segment);
    }

    let punctures = setup.base_punctures();
    let path = setup.based_loop().power(power);
    let (sampled, arc_gap, arc_residual) = projected_arc(&model, d, C64::new(0.0, 0.0), (b2, b3), &punctures, &path, opts)?;
    let (arc_params, arc): (Vec<f64>, Vec<C64>) = sampled.into_iter().unzip();
    let first = nearest_puncture(arc[0], &punctures);
    let last = nearest_puncture(arc[arc.len() - 1], &punctures);
    let scale = (punctures[2] - punctures[0]).norm();
    let crossings = real_crossings(&arc[1..arc.len() - 1], &punctures, 1e-8 * scale);
    let reduced = reduce_crossings(first, &crossings, last);
    let shared = [first, last].iter().filter(|&&e| e == 2 || e == 3).count();
    let interior = reduced.iter().filter(|&&x| x == 2).count();
    let gap = cloud.points.iter().map(moment_gap).fold(arc_gap, f64::max);
    Ok(A2Report {
        setup,
        power,
        fiber_residual: cloud.fiber_residual(&model).max(arc_residual),
        cloud,
        departure_drift,
        arc,
        arc_params,
        moment_gap: gap,
        endpoints: (first, last),
        crossings,
        reduced,
        pattern: (shared, interior),
        expected: expected_pattern(power),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkovSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaslovReport {
    pub sign: MarkovSign,
    pub index: usize,
    pub eigenvalues: [f64; 2],
    /// `|A_12 - A_21|` before symmetrising.
    pub asymmetry: f64,
    /// How far the transported intersection point moved.
    pub fixed_point_drift: f64,
}

fn to_real(p: &P3) -> [f64; 6] {
    [p[0].re, p[0].im, p[1].re, p[1].im, p[2].re, p[2].im]
}

/// Complex structure on `ℝ⁶ = ℂ³`.
fn j(v: &[f64; 6]) -> [f64; 6] {
    [-v[1], v[0], -v[3], v[2], -v[5], v[4]]
}

fn dot(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Best-fit 2-plane through `q`, as an orthonormal basis.
fn tangent_plane(q: &P3, points: &[P3]) -> [[f64; 6]; 2] {
    let rows: Vec<[f64; 6]> = points
        .iter()
        .map(|p| {
            let v = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
            let s = norm(&v);
            to_real(&v.map(|z| z / s))
        })
        .collect();
    let m = DMatrix::from_fn(rows.len(), 6, |i, k| rows[i][k]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    core::array::from_fn(|i| core::array::from_fn(|k| vt[(order[i], k)]))
}

/// Quadratic form of `T_f` written as the graph of a linear map over the
/// Lagrangian plane `T_e` (with `J T_e` as fibre direction).
pub fn graph_form(e: &[[f64; 6]; 2], f: &[[f64; 6]; 2]) -> Option<Matrix2<f64>> {
    let x = Matrix2::from_fn(|i, k| dot(&f[i], &e[k]));
    let y = Matrix2::from_fn(|i, k| dot(&f[i], &j(&e[k])));
    Some((x.try_inverse()? * y).transpose())
}

pub const HESSIAN_TOL: f64 = 1e-6;

/// Morse index of the local graph function of `Λ_α` over its image under the
/// twist `γ^{±1}` at the fixed point `(p_3, 0, 0)`.
pub fn maslov_markov_with(
    d: f64,
    eps: f64,
    sign: MarkovSign,
    opts: &TransportOptions,
) -> Result<MaslovReport, TransportError> {
    let setup = A2Setup::new(d, eps)?;
    let model = setup.model();
    let path = setup.gamma().power(if sign == MarkovSign::Plus { 1 } else { -1 });
    let q = setup.fibred_point(1.0, 0.0);
    let moved = transport_point(&model, &path, q, opts)?.point;
    let mut cap = Vec::new();
    for kappa in [1e-6, 4e-6] {
        for k in 0..16 {
            cap.push(setup.fibred_point(1.0 - kappa, 2.0 * PI * k as f64 / 16.0));
        }
    }
    let image = cap.iter().map(|p| transport_point(&model, &path, *p, opts).map(|t| t.point)).collect::<Result<Vec<_>, _>>()?;
    let f = tangent_plane(&q, &cap);
    let e = tangent_plane(&q, &image);
    let a = graph_form(&e, &f).ok_or(TransportError::Degenerate { eigenvalue: 0.0 })?;
    let asymmetry = (a[(0, 1)] - a[(1, 0)]).abs();
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym).eigenvalues;
    let mut eigenvalues = [eig[0], eig[1]];
    eigenvalues.sort_by(f64::total_cmp);
    if let Some(&bad) = eigenvalues.iter().find(|x| x.abs() < HESSIAN_TOL) {
        return Err(TransportError::Degenerate { eigenvalue: bad });
    }
    let index = eigenvalues.iter().filter(|&&x| x < 0.0).count();
    Ok(MaslovReport { sign, index, eigenvalues, asymmetry, fixed_point_drift: distance(&q, &moved) })
}

pub fn maslov_markov(sign: MarkovSign) -> Result<MaslovReport, TransportError> {
    maslov_markov_with(1.0, 1e-3, sign, &TransportOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub model: Model,
    pub radius: f64,
    pub samples: usize,
    /// Smallest sampled ratio, the empirical `ν⁻¹`.
    pub ratio: f64,
    pub ratio_doubled: f64,
    pub bounded: bool,
    pub stable: bool,
}

/// `|∂π|² / |π|` for A1, `|∂π|² / (|d|^{1/2} min_± |π - ζ^±|)` for A2.
pub fn gradient_ratio(model: &Model, p: &P3) -> f64 {
    let g2: f64 = model.grad(p).iter().map(|z| z.norm_sqr()).sum();
    let v = model.pi(p);
    let denominator = match model {
        Model::A1 => v.norm(),
        Model::A2 { d } => {
            libm::sqrt(d.norm()) * model.critical_values().iter().map(|z| (v - z).norm()).fold(f64::INFINITY, f64::min)
        }
    };
    g2 / denominator
}

fn ball_point(rng: &mut ChaCha8Rng, radius: f64) -> P3 {
    loop {
        let x: [f64; 6] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return [0, 2, 4].map(|i| C64::new(x[i], x[i + 1]) * radius);
        }
    }
}

fn min_ratio(model: &Model, radius: f64, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| gradient_ratio(model, &ball_point(&mut rng, radius))).filter(|r| r.is_finite()).fold(f64::INFINITY, f64::min)
}

/// Samples the ball of `radius ≤ 2` about the origin.
pub fn gradient_estimate_check(model: &Model, radius: f64, n: usize, seed: u64) -> Result<GradientReport, TransportError> {
    if !(radius > 0.0 && radius <= 2.0) {
        return Err(TransportError::BadParameter("radius must lie in (0, 2]"));
    }
    if n == 0 {
        return Err(TransportError::BadParameter("need samples"));
    }
    let ratio = min_ratio(model, radius, n, seed);
    let ratio_doubled = min_ratio(model, radius, 2 * n, seed.wrapping_add(1));
    Ok(GradientReport {
        model: *model,
        radius,
        samples: n,
        ratio,
        ratio_doubled,
        bounded: ratio > 1e-3,
        stable: (ratio - ratio_doubled).abs() <= 0.2 * ratio,
    })
}

/// `η² / |η|²` with `η(ξ_1, ξ_2) = det(conj(∂π)/|∂π|², ξ_1, ξ_2)`: the
/// squared phase of the real 2-plane spanned by `ξ_1, ξ_2` at `p`.
pub fn squared_phase(model: &Model, p: &P3, xi1: &P3, xi2: &P3) -> Option<C64> {
    let g = model.grad(p);
    let g2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
    let nv = g.map(|z| z.conj() / g2);
    let m = [nv, *xi1, *xi2];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let e2 = det * det;
    let n2 = e2.norm();
    (n2 > 0.0).then(|| e2 / n2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub reference: C64,
    /// Largest distance of a sampled phase from `reference`.
    pub spread: f64,
    pub samples: usize,
}

/// Phases on a sphere parametrised by `(height, azimuth)`: tangents by
/// forward differences, each neighbour transported along `path` too.
/// Samples with `|h| > 0.9` are skipped to stay off the coordinate poles.
pub fn phase_check<S: Fn(f64, f64) -> P3>(
    model: &Model,
    sample: S,
    params: &[[f64; 2]],
    path: &TransportPath,
    opts: &TransportOptions,
) -> Result<PhaseReport, TransportError> {
    let step = 1e-5;
    let go = |p: P3| -> Result<P3, TransportError> {
        if path.segments().is_empty() {
            Ok(p)
        } else {
            transport_point(model, path, p, opts).map(|t| t.point)
        }
    };
    let mut phases = Vec::new();
    for &[h, phi] in params.iter().filter(|q| q[0].abs() <= 0.9) {
        let p = go(sample(h, phi))?;
        let ph = go(sample(h + step, phi))?;
        let pp = go(sample(h, phi + step))?;
        let t1 = [0, 1, 2].map(|i| ph[i] - p[i]);
        let t2 = [0, 1, 2].map(|i| pp[i] - p[i]);
        if let Some(a) = squared_phase(model, &p, &t1, &t2) {
            phases.push(a);
        }
    }
    let reference = phases.first().copied().unwrap_or(C64::new(1.0, 0.0));
    let spread = phases.iter().map(|a| (a - reference).norm()).fold(0.0, f64::max);
    Ok(PhaseReport { reference, spread, samples: phases.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub end: f64,
    /// Longest integrated path of a sample.
    pub max_length: f64,
    /// `2 ν^{1/2} t^{1/2}` with `ν = 1/4`.
    pub bound: f64,
    pub slack: f64,
}

impl EnergyReport {
    pub fn passed(&self) -> bool {
        self.max_length <= self.bound * (1.0 + self.slack)
    }
}

/// Path lengths of vanishing-cycle samples transported from `t` to `end`.
pub fn a1_energy_check(t: f64, end: f64, n: usize, opts: &TransportOptions) -> Result<EnergyReport, TransportError> {
    let cloud = vanishing_cycle(t, n)?;
    let path = TransportPath::line(real(t), real(end));
    let mut max_length: f64 = 0.0;
    for p in &cloud.points {
        max_length = max_length.max(transport_point(&Model::A1, &path, *p, opts)?.length);
    }
    Ok(EnergyReport { t, end, max_length, bound: 2.0 * libm::sqrt(0.25 * t), slack: 0.5 })
}
