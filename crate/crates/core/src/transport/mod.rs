//! Symplectic parallel transport in the two model fibrations over ℂ, with
//! the flat Kähler form on ℂ³:
//!
//! * `A1`: `π(a, b, c) = a² + b² + c²`,
//! * `A2(d)`: `π_d(a, b, c) = a³ - a d + b c`.
//!
//! The horizontal lift of `v ∈ ℂ` at `p` is `conj(∂π) v / |∂π|²`. Every
//! accepted integration step is followed by Newton projection onto the
//! fibre, so the fibre residual does not accumulate along a path.

mod checks;
mod cycles;
mod exhaustion;
mod ode;

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::slice::{critical_values, C64};

pub use checks::*;
pub use cycles::*;
pub use exhaustion::*;
pub use ode::{distance, integrate, norm, Integrated, StepControl, P3};

/// `|∂π|` below this counts as a critical point.
pub const CRITICAL_TOL: f64 = 1e-10;
pub const FIBER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Model {
    A1,
    A2 { d: C64 },
}

impl Model {
    pub fn pi(&self, p: &P3) -> C64 {
        let [a, b, c] = *p;
        match self {
            Model::A1 => a * a + b * b + c * c,
            Model::A2 { d } => a * a * a - a * d + b * c,
        }
    }

    /// Holomorphic gradient `(∂_a π, ∂_b π, ∂_c π)`.
    pub fn grad(&self, p: &P3) -> P3 {
        let [a, b, c] = *p;
        match self {
            Model::A1 => [a * 2.0, b * 2.0, c * 2.0],
            Model::A2 { d } => [a * a * 3.0 - d, c, b],
        }
    }

    pub fn critical_values(&self) -> Vec<C64> {
        match self {
            Model::A1 => alloc::vec![C64::new(0.0, 0.0)],
            Model::A2 { d } => {
                let (lo, hi) = critical_values(*d);
                alloc::vec![lo, hi]
            }
        }
    }

    /// `Dπ(v) = Σ ∂_i π v_i`.
    pub fn differential(&self, p: &P3, v: &P3) -> C64 {
        let g = self.grad(p);
        (0..3).map(|i| g[i] * v[i]).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TransportError {
    NearCritical { grad_norm: f64 },
    /// Integration stalled at global path parameter `s` (segment index plus
    /// local parameter).
    Stalled { s: f64 },
    OffFiber { residual: f64 },
    WrongFiber { expected: C64, found: C64 },
    BadParameter(&'static str),
    Degenerate { eigenvalue: f64 },
    /// A sampled arc jumps by `jump` within the minimal step at parameter `r`.
    Unresolved { r: f64, jump: f64 },
}

impl fmt::Display for TransportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransportError::NearCritical { grad_norm } => write!(f, "too close to a critical point (|grad| = {grad_norm:e})"),
            TransportError::Stalled { s } => write!(f, "partial transport: step size underflow at path parameter {s}"),
            TransportError::OffFiber { residual } => write!(f, "point left the fibre (residual {residual:e})"),
            TransportError::WrongFiber { expected, found } => {
                write!(f, "cloud lies over {found}, path starts at {expected}")
            }
            TransportError::BadParameter(what) => write!(f, "bad parameter: {what}"),
            TransportError::Degenerate { eigenvalue } => write!(f, "degenerate Hessian (eigenvalue {eigenvalue:e})"),
            TransportError::Unresolved { r, jump } => write!(f, "arc not resolved near parameter {r}: jump {jump:e}"),
        }
    }
}

impl core::error::Error for TransportError {}

/// Horizontal lift of the base direction `v` at `p`.
pub fn horizontal(model: &Model, p: &P3, v: C64) -> Result<P3, TransportError> {
    let g = model.grad(p);
    let g2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
    if !(libm::sqrt(g2) >= CRITICAL_TOL) {
        return Err(TransportError::NearCritical { grad_norm: libm::sqrt(g2) });
    }
    let k = v / g2;
    Ok(g.map(|z| z.conj() * k))
}

/// Fibrewise part of the radial field `p / 2` (the Liouville field of the
/// flat form, restricted to the fibre).
pub fn liouville(model: &Model, p: &P3) -> P3 {
    let half = p.map(|z| z * 0.5);
    let g = model.grad(p);
    let g2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
    if g2 == 0.0 {
        return half;
    }
    let k = model.differential(p, &half) / g2;
    [half[0] - g[0].conj() * k, half[1] - g[1].conj() * k, half[2] - g[2].conj() * k]
}

/// Newton steps along `conj(∂π)` towards `π = t`.
pub fn project(model: &Model, mut p: P3, t: C64) -> P3 {
    for _ in 0..8 {
        let r = model.pi(&p) - t;
        if r.norm() <= 1e-15 * (1.0 + t.norm()) {
            break;
        }
        let g = model.grad(&p);
        let g2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        if g2 == 0.0 {
            break;
        }
        let k = r / g2;
        for i in 0..3 {
            p[i] -= g[i].conj() * k;
        }
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// `center + radius · e^{i(start + sweep·s)}`.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn at(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + sweep * s),
        }
    }

    pub fn velocity(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => {
                C64::new(0.0, sweep) * C64::from_polar(radius, start + sweep * s)
            }
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, sweep } => {
                Segment::Arc { center, radius, start: start + sweep, sweep: -sweep }
            }
        }
    }
}

/// A base path, each segment parametrised by `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportPath {
    segments: Vec<Segment>,
}

impl TransportPath {
    pub fn new(segments: Vec<Segment>) -> Self {
        TransportPath { segments }
    }

    pub fn line(from: C64, to: C64) -> Self {
        Self::new(alloc::vec![Segment::Line { from, to }])
    }

    /// `t · e^{i s}`, `s` from `0` to `sweep`.
    pub fn circle(t: C64, sweep: f64) -> Self {
        Self::new(alloc::vec![Segment::Arc { center: C64::new(0.0, 0.0), radius: t.norm(), start: t.arg(), sweep }])
    }

    /// From `ζ⁻ + ε` along the real axis to `0`, once around `ζ⁺`
    /// counterclockwise on the circle of radius `ζ⁺` through `0`, and back.
    pub fn gamma(d: f64, eps: f64) -> Self {
        let (lo, hi) = critical_values(C64::new(d, 0.0));
        let start = lo + eps;
        let zero = C64::new(0.0, 0.0);
        Self::new(alloc::vec![
            Segment::Line { from: start, to: zero },
            Segment::Arc { center: hi, radius: hi.re, start: PI, sweep: 2.0 * PI },
            Segment::Line { from: zero, to: start },
        ])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Option<C64> {
        self.segments.first().map(|s| s.at(0.0))
    }

    pub fn end(&self) -> Option<C64> {
        self.segments.last().map(|s| s.at(1.0))
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.segments.iter().rev().map(Segment::reversed).collect())
    }

    pub fn then(&self, other: &TransportPath) -> Self {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        Self::new(segments)
    }

    /// `n` copies, or `|n|` copies of the reverse for `n < 0`.
    pub fn power(&self, n: i32) -> Self {
        let base = if n < 0 { self.reversed() } else { self.clone() };
        let mut segments = Vec::new();
        for _ in 0..n.unsigned_abs() {
            segments.extend_from_slice(&base.segments);
        }
        Self::new(segments)
    }

    /// Smallest distance from the path to the given points (sampled).
    pub fn clearance(&self, points: &[C64]) -> f64 {
        let mut best = f64::INFINITY;
        for seg in &self.segments {
            for k in 0..=512 {
                let z = seg.at(k as f64 / 512.0);
                for p in points {
                    best = best.min((z - p).norm());
                }
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportOptions {
    pub control: StepControl,
    pub fiber_tol: f64,
    /// Rescaled mode: subtract `σ` times the fibrewise Liouville field per
    /// unit of path parameter, then flow forward by the total time.
    pub rescale: Option<f64>,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { control: StepControl::default(), fiber_tol: FIBER_TOL, rescale: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transported {
    pub point: P3,
    pub length: f64,
    pub steps: usize,
}

/// Transports a single point; the result lies within `fiber_tol` of the
/// fibre over the path end.
pub fn transport_point(
    model: &Model,
    path: &TransportPath,
    p: P3,
    opts: &TransportOptions,
) -> Result<Transported, TransportError> {
    let mut y = p;
    let mut length = 0.0;
    let mut steps = 0;
    let sigma = opts.rescale.unwrap_or(0.0);
    for (index, seg) in path.segments.iter().enumerate() {
        let field = |s: f64, q: &P3| -> Option<P3> {
            let mut h = horizontal(model, q, seg.velocity(s)).ok()?;
            if sigma != 0.0 {
                let z = liouville(model, q);
                for i in 0..3 {
                    h[i] -= z[i] * sigma;
                }
            }
            Some(h)
        };
        let proj = |s: f64, q: P3| project(model, q, seg.at(s));
        let r = integrate(field, proj, y, 0.0, 1.0, &opts.control)
            .map_err(|e| TransportError::Stalled { s: index as f64 + e.s })?;
        y = r.y;
        length += r.length;
        steps += r.steps;
    }
    let end = path.end().unwrap_or(model.pi(&p));
    if sigma != 0.0 {
        let total = sigma * path.segments.len() as f64;
        let flow = |_: f64, q: &P3| Some(liouville(model, q));
        let proj = |_: f64, q: P3| project(model, q, end);
        let r = integrate(flow, proj, y, 0.0, total, &opts.control).map_err(|e| TransportError::Stalled { s: e.s })?;
        y = r.y;
        steps += r.steps;
    }
    let residual = (model.pi(&y) - end).norm();
    if !(residual < opts.fiber_tol) {
        return Err(TransportError::OffFiber { residual });
    }
    Ok(Transported { point: y, length, steps })
}

/// Points in ℂ³ over a common fibre value, with the sphere coordinates
/// `(height, azimuth)` each sample was generated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub fiber: C64,
    pub points: Vec<P3>,
    pub params: Vec<[f64; 2]>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn fiber_residual(&self, model: &Model) -> f64 {
        self.points.iter().map(|p| (model.pi(p) - self.fiber).norm()).fold(0.0, f64::max)
    }
}

/// Transports every point of `cloud` along `path`.
pub fn transport(
    model: &Model,
    path: &TransportPath,
    cloud: &PointCloud,
    opts: &TransportOptions,
) -> Result<PointCloud, TransportError> {
    let (Some(start), Some(end)) = (path.start(), path.end()) else {
        return Ok(cloud.clone());
    };
    if (start - cloud.fiber).norm() > 1e-12 * (1.0 + start.norm()) {
        return Err(TransportError::WrongFiber { expected: start, found: cloud.fiber });
    }
    let points = cloud
        .points
        .iter()
        .map(|p| transport_point(model, path, *p, opts).map(|t| t.point))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PointCloud { fiber: end, points, params: cloud.params.clone() })
}
