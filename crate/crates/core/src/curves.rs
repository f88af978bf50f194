//! Arcs between marked points `1..=n` on a horizontal line in a disc, and the
//! braid group acting on them by half-twists.
//!
//! An arc is stored through the closed curve bounding a thin neighbourhood
//! of it. The fence consists of the vertical wall between points `k` and
//! `k+1` (crossing count `m[k]`) and the vertical rays above and below each
//! point (`u[k]`, `d[k]`). In minimal position these counts are isotopy
//! invariants and determine the class; the Dynnikov pairs
//! `a = (d - u) / 2`, `b = (m[k-1] - m[k]) / 2` at interior points carry the
//! same information.
//!
//! A positive letter `s_k` is the counterclockwise half-twist exchanging
//! points `k` and `k+1`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::braid::{BraidWord, Letter};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveError {
    TooFewPoints(usize),
    BadPoint { point: usize, points: usize },
    StrandMismatch { braid: usize, points: usize },
    NotAnArc,
    NotDisjoint,
    NotAMatching,
    NeedTwoComponents,
    SameComponent,
    PathCollision,
    Parse(String),
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::TooFewPoints(n) => write!(f, "a marked disc needs at least 2 points, got {n}"),
            CurveError::BadPoint { point, points } => write!(f, "point {point} is not among 1..={points}"),
            CurveError::StrandMismatch { braid, points } => {
                write!(f, "braid on {braid} strands acting on a disc with {points} points")
            }
            CurveError::NotAnArc => write!(f, "coordinates do not describe a single arc"),
            CurveError::NotDisjoint => write!(f, "arcs of the system meet"),
            CurveError::NotAMatching => write!(f, "arcs do not pair all marked points"),
            CurveError::NeedTwoComponents => write!(f, "a slide needs at least two arcs"),
            CurveError::SameComponent => write!(f, "slide endpoints lie on the same arc"),
            CurveError::PathCollision => write!(f, "slide path meets another arc"),
            CurveError::Parse(s) => write!(f, "cannot parse matching: {s}"),
        }
    }
}

impl core::error::Error for CurveError {}

/// Which side of the line of marked points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Half {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedDisc {
    n: usize,
}

impl MarkedDisc {
    pub fn new(n: usize) -> Result<Self, CurveError> {
        if n < 2 {
            return Err(CurveError::TooFewPoints(n));
        }
        Ok(MarkedDisc { n })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    /// The straight arc between neighbouring points `i` and `j` (1-based).
    pub fn segment(&self, i: usize, j: usize) -> Result<Arc, CurveError> {
        if i.abs_diff(j) != 1 {
            return Err(CurveError::NotAnArc);
        }
        self.semicircle(i, j, Half::Upper)
    }

    pub fn semicircle(&self, i: usize, j: usize, half: Half) -> Result<Arc, CurveError> {
        let (lo, hi) = (i.min(j), i.max(j));
        self.monotone(lo, hi, &vec![half; hi.saturating_sub(lo + 1)])
    }

    /// The arc from `i` to `j` that passes each point strictly between them
    /// on the given side, in order.
    pub fn monotone(&self, i: usize, j: usize, sides: &[Half]) -> Result<Arc, CurveError> {
        let n = self.n;
        for p in [i, j] {
            if p == 0 || p > n {
                return Err(CurveError::BadPoint { point: p, points: n });
            }
        }
        let (i, j) = (i.min(j) - 1, i.max(j) - 1);
        if i == j || sides.len() != j - i - 1 {
            return Err(CurveError::NotAnArc);
        }
        let mut u = vec![0; n];
        let mut d = vec![0; n];
        let mut m = vec![0; n - 1];
        u[i] = 1;
        d[i] = 1;
        u[j] = 1;
        d[j] = 1;
        for (k, side) in (i + 1..j).zip(sides) {
            match side {
                Half::Upper => u[k] = 2,
                Half::Lower => d[k] = 2,
            }
        }
        for w in m.iter_mut().take(j).skip(i) {
            *w = 2;
        }
        Ok(Arc { u, d, m })
    }
}

/// One arc, as crossing counts of its neighbourhood boundary with the fence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    u: Vec<i64>,
    d: Vec<i64>,
    m: Vec<i64>,
}

/// Pieces of the curve inside the vertical strip around one point: `above`
/// and `below` run wall to wall, `left` and `right` turn around the point
/// from the wall on that side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Strip {
    above: i64,
    below: i64,
    left: i64,
    right: i64,
}

fn wall(m: &[i64], w: isize) -> i64 {
    if w < 0 {
        0
    } else {
        m.get(w as usize).copied().unwrap_or(0)
    }
}

impl Arc {
    /// Checks the counts and that they bound a neighbourhood of one arc.
    pub fn from_counts(u: Vec<i64>, d: Vec<i64>, m: Vec<i64>) -> Result<Arc, CurveError> {
        let n = u.len();
        if n < 2 || d.len() != n || m.len() != n - 1 {
            return Err(CurveError::NotAnArc);
        }
        let a = Arc { u, d, m };
        for k in 0..n {
            let (l, r) = (wall(&a.m, k as isize - 1), wall(&a.m, k as isize));
            if l < 0 || r < 0 || (l - r) % 2 != 0 || a.u[k] + a.d[k] != l.max(r) {
                return Err(CurveError::NotAnArc);
            }
            let s = a.strip(k);
            if s.above < 0 || s.below < 0 {
                return Err(CurveError::NotAnArc);
            }
        }
        if a.u.iter().filter(|&&x| x % 2 != 0).count() != 2 || a.relax().is_none() {
            return Err(CurveError::NotAnArc);
        }
        Ok(a)
    }

    /// Decodes Dynnikov pairs `(a_k, b_k)` at the interior points
    /// `k = 2..n-1`. With `n = 2` the only arc is returned.
    pub fn from_dynnikov(n: usize, ab: &[(i64, i64)]) -> Result<Arc, CurveError> {
        MarkedDisc::new(n)?;
        if ab.len() != n - 2 {
            return Err(CurveError::NotAnArc);
        }
        if n == 2 {
            return MarkedDisc { n }.segment(1, 2);
        }
        // m[0] is the least value keeping every strip count non-negative
        let mut m0: i64 = 0;
        let mut run: i64 = 0;
        for &(a, b) in ab {
            m0 = m0.max(2 * a.abs() + 2 * b.max(0) + 2 * run);
            run += b;
        }
        m0 = m0.max(2 * run);
        let mut m = vec![m0];
        for &(_, b) in ab {
            let last = *m.last().unwrap();
            m.push(last - 2 * b);
        }
        let mut u = vec![m[0] / 2];
        let mut d = vec![m[0] / 2];
        for (k, &(a, b)) in ab.iter().enumerate() {
            let (l, r) = (b.max(0), (-b).max(0));
            let half = (m[k] - 2 * l) / 2;
            u.push(half - a + l + r);
            d.push(half + a + l + r);
        }
        u.push(m[n - 2] / 2);
        d.push(m[n - 2] / 2);
        Arc::from_counts(u, d, m)
    }

    pub fn points(&self) -> usize {
        self.u.len()
    }

    /// Crossings with the rays above each point.
    pub fn above(&self) -> &[i64] {
        &self.u
    }

    /// Crossings with the rays below each point.
    pub fn below(&self) -> &[i64] {
        &self.d
    }

    /// Crossings with the walls between consecutive points.
    pub fn walls(&self) -> &[i64] {
        &self.m
    }

    pub fn dynnikov(&self) -> Vec<(i64, i64)> {
        let n = self.points();
        (1..n.saturating_sub(1))
            .map(|k| ((self.d[k] - self.u[k]) / 2, (self.m[k - 1] - self.m[k]) / 2))
            .collect()
    }

    /// The two marked points it joins, 1-based and increasing. A point is
    /// enclosed by the neighbourhood boundary iff its upward ray is crossed
    /// an odd number of times.
    pub fn endpoints(&self) -> (usize, usize) {
        let mut it = (0..self.points()).filter(|&k| self.u[k] % 2 != 0).map(|k| k + 1);
        let i = it.next().expect("arc has two endpoints");
        let j = it.next().expect("arc has two endpoints");
        (i, j)
    }

    /// Total crossings with the walls; 2 exactly for a segment between
    /// neighbouring points.
    pub fn complexity(&self) -> i64 {
        self.m.iter().sum()
    }

    /// `Some(k)` if this is the segment from `k` to `k+1`.
    pub fn as_segment(&self) -> Option<usize> {
        if self.complexity() != 2 {
            return None;
        }
        self.m.iter().position(|&x| x == 2).map(|w| w + 1)
    }

    fn strip(&self, k: usize) -> Strip {
        let b2 = wall(&self.m, k as isize - 1) - wall(&self.m, k as isize);
        let left = b2.max(0) / 2;
        let right = (-b2).max(0) / 2;
        Strip { above: self.u[k] - left - right, below: self.d[k] - left - right, left, right }
    }

    pub fn apply(&self, l: Letter) -> Arc {
        let mut out = self.clone();
        out.apply_mut(l);
        out
    }

    fn apply_mut(&mut self, l: Letter) {
        debug_assert!(l.index >= 1 && l.index < self.points());
        let (a, b) = (l.index - 1, l.index);
        let w = a as isize;
        let (u, d) = if l.sign > 0 { (&mut self.u, &mut self.d) } else { (&mut self.d, &mut self.u) };
        let (ml, mr) = (wall(&self.m, w - 1), wall(&self.m, w + 1));
        let mid = (2 * (d[a] + u[b])).max(ml + mr) - self.m[a];
        let ua = u[b];
        let db = d[a];
        d[a] = ml.max(mid) - ua;
        u[b] = mid.max(mr) - db;
        u[a] = ua;
        d[b] = db;
        self.m[a] = mid;
    }

    /// Letters applied left to right.
    pub fn act(&self, b: &BraidWord) -> Result<Arc, CurveError> {
        if b.strands() != self.points() {
            return Err(CurveError::StrandMismatch { braid: b.strands(), points: self.points() });
        }
        let mut out = self.clone();
        for &l in b.letters() {
            out.apply_mut(l);
        }
        Ok(out)
    }

    /// A word carrying this arc to a segment `(k, k+1)`, found by greedily
    /// lowering the wall count, together with `k`.
    pub fn relax(&self) -> Option<(Vec<Letter>, usize)> {
        let n = self.points();
        let mut cur = self.clone();
        let mut word = Vec::new();
        loop {
            if let Some(k) = cur.as_segment() {
                return Some((word, k));
            }
            let c = cur.complexity();
            let best = (1..n)
                .flat_map(|k| [Letter::new(k, 1), Letter::new(k, -1)])
                .map(|l| (cur.apply(l), l))
                .min_by_key(|(a, _)| a.complexity())?;
            if best.0.complexity() >= c {
                return None;
            }
            word.push(best.1);
            cur = best.0;
        }
    }

    /// The half-twist about this arc, positive for `sign = 1`.
    pub fn half_twist(&self, sign: i8) -> BraidWord {
        let (w, k) = self.relax().expect("valid arcs relax");
        let mut letters = w.clone();
        letters.push(Letter::new(k, sign));
        letters.extend(w.iter().rev().map(|l| l.inverse()));
        BraidWord::new(self.points(), letters).expect("letters are in range")
    }

    /// Minimal number of crossings between the segment from `k` to `k+1`
    /// and this arc's neighbourhood boundary.
    pub fn segment_crossings(&self, k: usize) -> i64 {
        let w = k - 1;
        let s = self.strip(w);
        let t = self.strip(w + 1);
        let top = self.m[w];
        // `x` = number of wall crossings above the point where the segment
        // passes the wall; pieces on each side are crossed unless they
        // separate that point from their own marked point
        let f = |x: i64| {
            s.left
                + (s.above - x).max(0)
                + (x - s.above - 2 * s.right).max(0)
                + s.right.min((x - s.above - s.right).abs())
                + t.right
                + (t.above - x).max(0)
                + (x - t.above - 2 * t.left).max(0)
                + t.left.min((x - t.above - t.left).abs())
        };
        let marks = [
            0,
            top,
            s.above,
            s.above + s.right,
            s.above + 2 * s.right,
            t.above,
            t.above + t.left,
            t.above + 2 * t.left,
        ];
        marks.iter().filter(|&&x| (0..=top).contains(&x)).map(|&x| f(x)).min().unwrap_or(0)
    }

    /// `(shared endpoints, interior crossings)` in minimal position; `None`
    /// if the arcs coincide.
    pub fn meet(&self, other: &Arc) -> Option<(usize, usize)> {
        if self == other {
            return None;
        }
        let (w, k) = self.relax().expect("valid arcs relax");
        let mut o = other.clone();
        for &l in &w {
            o.apply_mut(l);
        }
        let (p, q) = o.endpoints();
        let shared = [p, q].iter().filter(|&&x| x == k || x == k + 1).count();
        let c = o.segment_crossings(k) - shared as i64;
        debug_assert!(c >= 0 && c % 2 == 0);
        Some((shared, (c / 2) as usize))
    }

    /// The halves in which this arc is a semicircle: both for a segment
    /// between neighbours, none for a winding arc.
    pub fn semicircle_halves(&self) -> Vec<Half> {
        let (i, j) = self.endpoints();
        let disc = MarkedDisc { n: self.points() };
        [Half::Upper, Half::Lower].into_iter().filter(|&h| disc.semicircle(i, j, h).as_ref() == Ok(self)).collect()
    }
}

impl Ord for Arc {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.endpoints(), &self.u, &self.d, &self.m).cmp(&(other.endpoints(), &other.u, &other.d, &other.m))
    }
}

impl PartialOrd for Arc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pairwise disjoint arcs, kept sorted so that equality is equality of
/// isotopy classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcSystem {
    n: usize,
    arcs: Vec<Arc>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intersection {
    pub endpoints: usize,
    pub interior: usize,
    /// Some arc occurs in both systems; it was left out of the counts.
    pub degenerate: bool,
}

impl ArcSystem {
    pub fn new(disc: MarkedDisc, mut arcs: Vec<Arc>) -> Result<Self, CurveError> {
        if let Some(a) = arcs.iter().find(|a| a.points() != disc.n) {
            return Err(CurveError::StrandMismatch { braid: disc.n, points: a.points() });
        }
        arcs.sort();
        for (x, a) in arcs.iter().enumerate() {
            for b in &arcs[x + 1..] {
                if a.meet(b) != Some((0, 0)) {
                    return Err(CurveError::NotDisjoint);
                }
            }
        }
        Ok(ArcSystem { n: disc.n, arcs })
    }

    pub fn disc(&self) -> MarkedDisc {
        MarkedDisc { n: self.n }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn act(&self, b: &BraidWord) -> Result<ArcSystem, CurveError> {
        let mut arcs = self.arcs.iter().map(|a| a.act(b)).collect::<Result<Vec<_>, _>>()?;
        arcs.sort();
        Ok(ArcSystem { n: self.n, arcs })
    }
}

pub fn act(b: &BraidWord, a: &ArcSystem) -> Result<ArcSystem, CurveError> {
    a.act(b)
}

/// Sums over pairs of arcs. A coinciding pair sets the flag and adds its two
/// endpoints but no interior crossings.
pub fn intersection(a: &ArcSystem, b: &ArcSystem) -> Intersection {
    let mut out = Intersection::default();
    for x in &a.arcs {
        for y in &b.arcs {
            match x.meet(y) {
                Some((e, i)) => {
                    out.endpoints += e;
                    out.interior += i;
                }
                None => {
                    out.endpoints += 2;
                    out.degenerate = true;
                }
            }
        }
    }
    out
}

/// An arc system pairing all `2m` marked points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    system: ArcSystem,
}

impl Matching {
    pub fn new(system: ArcSystem) -> Result<Self, CurveError> {
        let n = system.n;
        if !n.is_multiple_of(2) || system.arcs.len() * 2 != n {
            return Err(CurveError::NotAMatching);
        }
        Ok(Matching { system })
    }

    /// Semicircles `(i, j, half)`.
    pub fn from_semicircles(n: usize, arcs: &[(usize, usize, Half)]) -> Result<Self, CurveError> {
        let disc = MarkedDisc::new(n)?;
        let arcs = arcs.iter().map(|&(i, j, h)| disc.semicircle(i, j, h)).collect::<Result<Vec<_>, _>>()?;
        Matching::new(ArcSystem::new(disc, arcs)?)
    }

    pub fn system(&self) -> &ArcSystem {
        &self.system
    }

    pub fn m(&self) -> usize {
        self.system.n / 2
    }

    /// Endpoint pairs, 1-based, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut p: Vec<_> = self.system.arcs.iter().map(Arc::endpoints).collect();
        p.sort_unstable();
        p
    }

    pub fn act(&self, b: &BraidWord) -> Result<Matching, CurveError> {
        Ok(Matching { system: self.system.act(b)? })
    }

    fn component(&self, point: usize) -> Result<usize, CurveError> {
        if point == 0 || point > self.system.n {
            return Err(CurveError::BadPoint { point, points: self.system.n });
        }
        Ok(self
            .system
            .arcs
            .iter()
            .position(|a| {
                let (i, j) = a.endpoints();
                i == point || j == point
            })
            .expect("every point is matched"))
    }
}

/// Concentric semicircles pairing `i` with `2m + 1 - i`.
pub fn standard_matching(m: usize, half: Half) -> Matching {
    assert!(m >= 1);
    let arcs: Vec<_> = (1..=m).map(|i| (i, 2 * m + 1 - i, half)).collect();
    Matching::from_semicircles(2 * m, &arcs).expect("concentric arcs are disjoint")
}

/// The path of a slide: a semicircle from a point of the moving arc to a
/// point of the arc slid over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlidePath {
    pub half: Half,
    /// Go around the fixed arc the other way; undoes the plain slide.
    pub reverse: bool,
}

/// Slides the arc through `pair.1` over the arc through `pair.0` along the
/// semicircle joining those two points: the endpoint at `pair.1` is pushed
/// along the path, once around the other arc, and back.
pub fn slide(p: &Matching, pair: (usize, usize), path: SlidePath) -> Result<Matching, CurveError> {
    if p.m() < 2 {
        return Err(CurveError::NeedTwoComponents);
    }
    let (over, moving) = (p.component(pair.0)?, p.component(pair.1)?);
    if over == moving {
        return Err(CurveError::SameComponent);
    }
    let route = p.system.disc().semicircle(pair.0, pair.1, path.half)?;
    for (x, a) in p.system.arcs.iter().enumerate() {
        let want = if x == over || x == moving { (1, 0) } else { (0, 0) };
        if route.meet(a) != Some(want) {
            return Err(CurveError::PathCollision);
        }
    }
    let t_route = route.half_twist(1);
    let t_over = p.system.arcs[over].half_twist(1);
    // pushing around the loop is the twist about both arcs together
    // followed by the inverse twist about the fixed arc
    let pair_twist = t_route.concat(&t_over);
    let mut push = pair_twist.concat(&pair_twist).concat(&pair_twist);
    push = push.concat(&t_over.inverse()).concat(&t_over.inverse());
    if !path.reverse {
        push = push.inverse();
    }
    p.act(&push)
}

impl fmt::Display for Matching {
    /// `m; (1,4)+ (2,3)+` with `+`/`-` for upper/lower semicircles and
    /// `{a b ...}` Dynnikov pairs otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.m())?;
        let halves: Vec<Vec<Half>> = self.system.arcs.iter().map(Arc::semicircle_halves).collect();
        // segments take the side of the other semicircles when that is unanimous
        let lower = halves.iter().any(|h| h == &[Half::Lower])
            && !halves.iter().any(|h| h == &[Half::Upper]);
        for (a, h) in self.system.arcs.iter().zip(&halves) {
            let (i, j) = a.endpoints();
            write!(f, " ({i},{j})")?;
            match h.as_slice() {
                [Half::Upper, Half::Lower] if lower => write!(f, "-")?,
                [Half::Upper, ..] => write!(f, "+")?,
                [Half::Lower] => write!(f, "-")?,
                _ => {
                    let parts: Vec<String> =
                        a.dynnikov().iter().map(|(x, y)| format!("{x} {y}")).collect();
                    write!(f, "{{{}}}", parts.join(" "))?
                }
            }
        }
        Ok(())
    }
}

pub fn parse_matching(text: &str) -> Result<Matching, CurveError> {
    let bad = |s: &str| CurveError::Parse(s.to_string());
    let (head, rest) = text.split_once(';').ok_or_else(|| bad("missing `;`"))?;
    let m: usize = head.trim().parse().map_err(|_| bad(head.trim()))?;
    if m == 0 {
        return Err(bad("m must be positive"));
    }
    let n = 2 * m;
    let disc = MarkedDisc::new(n)?;
    let mut arcs = Vec::new();
    let mut s = rest.trim();
    while !s.is_empty() {
        let close = s.find(')').ok_or_else(|| bad(s))?;
        let inner = s.strip_prefix('(').ok_or_else(|| bad(s))?[..close - 1].to_string();
        let (a, b) = inner.split_once(',').ok_or_else(|| bad(&inner))?;
        let i: usize = a.trim().parse().map_err(|_| bad(&inner))?;
        let j: usize = b.trim().parse().map_err(|_| bad(&inner))?;
        s = &s[close + 1..];
        let arc = if let Some(r) = s.strip_prefix('+') {
            s = r;
            disc.semicircle(i, j, Half::Upper)?
        } else if let Some(r) = s.strip_prefix('-') {
            s = r;
            disc.semicircle(i, j, Half::Lower)?
        } else if let Some(r) = s.strip_prefix('{') {
            let end = r.find('}').ok_or_else(|| bad(s))?;
            let nums = r[..end]
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| bad(t)))
                .collect::<Result<Vec<_>, _>>()?;
            if nums.len() % 2 != 0 {
                return Err(bad(&r[..end]));
            }
            let ab: Vec<(i64, i64)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
            s = &r[end + 1..];
            let arc = Arc::from_dynnikov(n, &ab)?;
            if arc.endpoints() != (i.min(j), i.max(j)) {
                return Err(bad(&inner));
            }
            arc
        } else {
            return Err(bad("expected `+`, `-` or `{`"));
        };
        arcs.push(arc);
        s = s.trim_start();
    }
    Matching::new(ArcSystem::new(disc, arcs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Free-group model: x_k is a loop around point k based below the line.
    // A half-twist acts by the Artin automorphism; ray and wall crossing
    // counts of a closed curve are read off its cyclically reduced word.
    mod free {
        use alloc::vec::Vec;

        pub fn reduce(w: &[i64]) -> Vec<i64> {
            let mut out: Vec<i64> = Vec::new();
            for &x in w {
                if out.last() == Some(&-x) {
                    out.pop();
                } else {
                    out.push(x);
                }
            }
            let mut s = 0;
            let mut e = out.len();
            while e - s > 1 && out[s] == -out[e - 1] {
                s += 1;
                e -= 1;
            }
            out[s..e].to_vec()
        }

        fn inv(w: &[i64]) -> Vec<i64> {
            w.iter().rev().map(|x| -x).collect()
        }

        fn subst(w: &[i64], img: impl Fn(usize) -> Vec<i64>) -> Vec<i64> {
            let mut out = Vec::new();
            for &x in w {
                let i = img(x.unsigned_abs() as usize);
                out.extend(if x > 0 { i } else { inv(&i) });
            }
            reduce(&out)
        }

        pub fn artin(w: &[i64], k: usize, sign: i8) -> Vec<i64> {
            let (k1, k2) = (k as i64, k as i64 + 1);
            subst(w, |x| {
                if sign > 0 {
                    if x == k {
                        vec![k1, k2, -k1]
                    } else if x == k + 1 {
                        vec![k1]
                    } else {
                        vec![x as i64]
                    }
                } else if x == k {
                    vec![k2]
                } else if x == k + 1 {
                    vec![-k2, k1, k2]
                } else {
                    vec![x as i64]
                }
            })
        }

        // mirror in the line, which turns above-counts into below-counts
        fn reflect(w: &[i64]) -> Vec<i64> {
            subst(w, |k| {
                let c: Vec<i64> = (1..k as i64).collect();
                let mut out = c.clone();
                out.push(-(k as i64));
                out.extend(inv(&c));
                out
            })
        }

        pub fn counts(n: usize, w: &[i64]) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
            let tally = |w: &[i64]| {
                let mut c = vec![0i64; n];
                for &x in w {
                    c[x.unsigned_abs() as usize - 1] += 1;
                }
                c
            };
            let d = tally(w);
            let u = tally(&reflect(w));
            let m = (1..n)
                .map(|k| {
                    let side: Vec<bool> = w.iter().map(|x| x.unsigned_abs() as usize <= k).collect();
                    (0..side.len()).filter(|&i| side[i] != side[(i + side.len() - 1) % side.len()]).count() as i64
                })
                .collect();
            (u, d, m)
        }

        /// Boundary of a monotone arc from `i` to `j`; `below[k]` for each
        /// point in between.
        pub fn arc_word(i: usize, j: usize, below: &[bool]) -> Vec<i64> {
            let p: Vec<i64> = (i + 1..j).zip(below).filter(|(_, &b)| b).map(|(k, _)| k as i64).collect();
            let mut w = vec![i as i64];
            w.extend(&p);
            w.push(j as i64);
            w.extend(inv(&p));
            reduce(&w)
        }

        #[derive(Clone, Debug, PartialEq)]
        enum Tok {
            X(i64),
            C(i64),
        }

        fn reduce_out(w: Vec<Tok>) -> Vec<Tok> {
            let mut out: Vec<Tok> = Vec::new();
            for t in w {
                match (out.last().cloned(), t) {
                    (Some(Tok::C(a)), Tok::C(b)) => {
                        out.pop();
                        if a + b != 0 {
                            out.push(Tok::C(a + b));
                        }
                    }
                    (Some(Tok::X(a)), Tok::X(b)) if a == -b => {
                        out.pop();
                    }
                    (_, Tok::C(0)) => {}
                    (_, t) => out.push(t),
                }
            }
            out
        }

        #[derive(Clone, Debug)]
        enum Syl {
            In(Vec<i64>),
            Out(Vec<Tok>),
        }

        /// Crossings of a closed curve with the round circle about points
        /// `k` and `k+1`: cyclic syllable length over the splitting along
        /// that circle, whose boundary loop is `x_k x_{k+1}`.
        pub fn circle_crossings(w: &[i64], k: usize) -> usize {
            let inside = |x: i64| x.unsigned_abs() as usize == k || x.unsigned_abs() as usize == k + 1;
            let c = [k as i64, k as i64 + 1];
            let power = |w: &[i64]| -> Option<i64> {
                if w.is_empty() {
                    return Some(0);
                }
                if !w.len().is_multiple_of(2) {
                    return None;
                }
                let j = (w.len() / 2) as i64;
                if w.chunks(2).all(|p| p == c) {
                    Some(j)
                } else if w.chunks(2).all(|p| p == [-c[1], -c[0]]) {
                    Some(-j)
                } else {
                    None
                }
            };
            let mut syl: Vec<Syl> = Vec::new();
            for &x in w {
                match (syl.last_mut(), inside(x)) {
                    (Some(Syl::In(v)), true) => v.push(x),
                    (Some(Syl::Out(v)), false) => v.push(Tok::X(x)),
                    (_, true) => syl.push(Syl::In(vec![x])),
                    (_, false) => syl.push(Syl::Out(vec![Tok::X(x)])),
                }
            }
            loop {
                // cyclic merge of neighbours of the same kind
                let mut merged: Vec<Syl> = Vec::new();
                for s in syl.drain(..) {
                    match (merged.last_mut(), s) {
                        (Some(Syl::In(a)), Syl::In(b)) => {
                            a.extend(b);
                            let r = reduce_linear(a);
                            *a = r;
                        }
                        (Some(Syl::Out(a)), Syl::Out(b)) => {
                            a.extend(b);
                            let r = reduce_out(core::mem::take(a));
                            *a = r;
                        }
                        (_, s) => merged.push(s),
                    }
                }
                if merged.len() > 1 {
                    let first_last = (&merged[0], &merged[merged.len() - 1]);
                    if matches!(first_last, (Syl::In(_), Syl::In(_)) | (Syl::Out(_), Syl::Out(_))) {
                        let last = merged.pop().unwrap();
                        match (last, &mut merged[0]) {
                            (Syl::In(mut a), Syl::In(b)) => {
                                a.extend(b.iter());
                                *b = reduce_linear(&a);
                            }
                            (Syl::Out(mut a), Syl::Out(b)) => {
                                a.extend(b.iter().cloned());
                                *b = reduce_out(a);
                            }
                            _ => unreachable!(),
                        }
                    }
                }
                merged.retain(|s| match s {
                    Syl::In(v) => !v.is_empty(),
                    Syl::Out(v) => !v.is_empty(),
                });
                syl = merged;
                if syl.len() <= 1 {
                    return 0;
                }
                let mut changed = false;
                for s in syl.iter_mut() {
                    match s {
                        Syl::In(v) => {
                            if let Some(j) = power(v) {
                                *s = Syl::Out(vec![Tok::C(j)]);
                                changed = true;
                                break;
                            }
                        }
                        Syl::Out(v) => {
                            if v.iter().all(|t| matches!(t, Tok::C(_))) {
                                let j: i64 = v.iter().map(|t| if let Tok::C(j) = t { *j } else { 0 }).sum();
                                let mut body = Vec::new();
                                for _ in 0..j.abs() {
                                    if j > 0 {
                                        body.extend(c);
                                    } else {
                                        body.extend([-c[1], -c[0]]);
                                    }
                                }
                                *s = Syl::In(body);
                                changed = true;
                                break;
                            }
                        }
                    }
                }
                if !changed {
                    return syl.len();
                }
            }
        }

        pub fn reduce_linear(w: &[i64]) -> Vec<i64> {
            let mut out: Vec<i64> = Vec::new();
            for &x in w {
                if out.last() == Some(&-x) {
                    out.pop();
                } else {
                    out.push(x);
                }
            }
            out
        }
    }

    fn disc(n: usize) -> MarkedDisc {
        MarkedDisc::new(n).unwrap()
    }

    fn word(n: usize, ints: &[i64]) -> BraidWord {
        BraidWord::from_ints(n, ints).unwrap()
    }

    fn random_word(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<i64> {
        (0..len)
            .map(|_| {
                let k = rng.gen_range(1..n) as i64;
                if rng.gen_bool(0.5) {
                    k
                } else {
                    -k
                }
            })
            .collect()
    }

    /// A random monotone arc with its boundary word.
    fn random_arc(rng: &mut ChaCha8Rng, n: usize) -> (Arc, Vec<i64>) {
        let i = rng.gen_range(1..n);
        let j = rng.gen_range(i + 1..=n);
        let below: Vec<bool> = (i + 1..j).map(|_| rng.gen_bool(0.5)).collect();
        let sides: Vec<Half> = below.iter().map(|&b| if b { Half::Lower } else { Half::Upper }).collect();
        (disc(n).monotone(i, j, &sides).unwrap(), free::arc_word(i, j, &below))
    }

    fn counts(a: &Arc) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
        (a.above().to_vec(), a.below().to_vec(), a.walls().to_vec())
    }

    #[test]
    fn action_matches_free_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1500 {
            let n = rng.gen_range(2..=8);
            let (mut arc, mut w) = random_arc(&mut rng, n);
            assert_eq!(counts(&arc), free::counts(n, &w));
            let len = rng.gen_range(0..9);
            for x in random_word(&mut rng, n, len) {
                let l = Letter::new(x.unsigned_abs() as usize, x.signum() as i8);
                arc = arc.apply(l);
                w = free::artin(&w, l.index, l.sign);
                assert_eq!(counts(&arc), free::counts(n, &w), "word {w:?}");
            }
        }
    }

    #[test]
    fn segment_crossings_match_circle_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1500 {
            let n = rng.gen_range(3..=8);
            let (mut arc, mut w) = random_arc(&mut rng, n);
            let len = rng.gen_range(0..10);
            for x in random_word(&mut rng, n, len) {
                let l = Letter::new(x.unsigned_abs() as usize, x.signum() as i8);
                arc = arc.apply(l);
                w = free::artin(&w, l.index, l.sign);
            }
            let k = rng.gen_range(1..n);
            assert_eq!(2 * arc.segment_crossings(k) as usize, free::circle_crossings(&w, k), "{w:?} k={k}");
        }
    }

    #[test]
    fn positive_twist_is_counterclockwise() {
        let d = disc(3);
        let a = d.segment(2, 3).unwrap().act(&word(3, &[1])).unwrap();
        assert_eq!(a, d.semicircle(1, 3, Half::Upper).unwrap());
        let b = d.segment(2, 3).unwrap().act(&word(3, &[-1])).unwrap();
        assert_eq!(b, d.semicircle(1, 3, Half::Lower).unwrap());
        // twisting about an arc's own endpoints fixes it
        let s = d.segment(1, 2).unwrap();
        assert_eq!(s.act(&word(3, &[1])).unwrap(), s);
    }

    #[test]
    fn dynnikov_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.gen_range(2..=8);
            let (arc, _) = random_arc(&mut rng, n);
            let arc = arc.act(&BraidWord::from_ints(n, &random_word(&mut rng, n, 8)).unwrap()).unwrap();
            assert_eq!(Arc::from_dynnikov(n, &arc.dynnikov()).unwrap(), arc);
        }
        assert_eq!(Arc::from_dynnikov(3, &[(0, 1)]).unwrap(), disc(3).segment(1, 2).unwrap());
        assert_eq!(Arc::from_dynnikov(3, &[(0, -1)]).unwrap(), disc(3).segment(2, 3).unwrap());
        assert_eq!(Arc::from_dynnikov(3, &[(-1, 0)]).unwrap(), disc(3).semicircle(1, 3, Half::Upper).unwrap());
        // a closed curve around one point is not an arc boundary
        assert_eq!(Arc::from_counts(vec![0, 1, 0], vec![0, 1, 0], vec![1, 1]), Err(CurveError::NotAnArc));
        assert_eq!(Arc::from_dynnikov(3, &[(0, 0)]), Err(CurveError::NotAnArc));
    }

    #[test]
    fn twist_examples() {
        let d = disc(3);
        let alpha = ArcSystem::new(d, vec![d.segment(2, 3).unwrap()]).unwrap();
        let t = d.segment(1, 2).unwrap().half_twist(1);
        let once = alpha.act(&t).unwrap();
        assert_eq!(intersection(&alpha, &once), Intersection { endpoints: 1, interior: 0, degenerate: false });
        let thrice = alpha.act(&t.concat(&t).concat(&t)).unwrap();
        assert_eq!(intersection(&alpha, &thrice), Intersection { endpoints: 1, interior: 1, degenerate: false });
        assert!(intersection(&alpha, &alpha).degenerate);
    }

    #[test]
    fn standard_matchings() {
        assert_eq!(standard_matching(1, Half::Upper).pairs(), vec![(1, 2)]);
        assert_eq!(standard_matching(2, Half::Upper).pairs(), vec![(1, 4), (2, 3)]);
        assert_eq!(standard_matching(3, Half::Lower).pairs(), vec![(1, 6), (2, 5), (3, 4)]);
        for m in 1..=5 {
            let (p, q) = (standard_matching(m, Half::Upper), standard_matching(m, Half::Lower));
            let i = intersection(p.system(), q.system());
            // the innermost arcs coincide
            assert_eq!((i.endpoints, i.interior, i.degenerate), (2 * m, 0, true));
            assert_eq!(i, intersection(q.system(), p.system()));
        }
    }

    #[test]
    fn crossing_semicircles_rejected() {
        let e = Matching::from_semicircles(4, &[(1, 3, Half::Upper), (2, 4, Half::Upper)]);
        assert_eq!(e, Err(CurveError::NotDisjoint));
        assert!(Matching::from_semicircles(4, &[(1, 3, Half::Upper), (2, 4, Half::Lower)]).is_ok());
        let d = disc(4);
        let sys = ArcSystem::new(d, vec![d.segment(1, 2).unwrap()]).unwrap();
        assert_eq!(Matching::new(sys), Err(CurveError::NotAMatching));
        let p = standard_matching(2, Half::Upper);
        assert!(matches!(p.act(&word(3, &[1])), Err(CurveError::StrandMismatch { .. })));
    }

    #[test]
    fn slide_moves_nested_outer_arc_below() {
        let p = standard_matching(2, Half::Upper);
        let path = SlidePath { half: Half::Upper, reverse: false };
        let q = slide(&p, (2, 1), path).unwrap();
        assert_eq!(q, Matching::from_semicircles(4, &[(1, 4, Half::Lower), (2, 3, Half::Upper)]).unwrap());
        assert_eq!(q.pairs(), p.pairs());
        let back = slide(&q, (2, 1), SlidePath { reverse: true, ..path }).unwrap();
        assert_eq!(back, p);
        assert_ne!(slide(&p, (2, 1), SlidePath { reverse: true, ..path }).unwrap(), q);
    }

    #[test]
    fn slide_errors() {
        let path = SlidePath { half: Half::Upper, reverse: false };
        assert_eq!(slide(&standard_matching(1, Half::Upper), (1, 2), path), Err(CurveError::NeedTwoComponents));
        let p = standard_matching(3, Half::Upper);
        assert_eq!(slide(&p, (1, 6), path), Err(CurveError::SameComponent));
        // from 3 to 1 above the line the path must cross the arc (2,5)
        assert_eq!(slide(&p, (1, 3), path), Err(CurveError::PathCollision));
        assert!(slide(&p, (1, 3), SlidePath { half: Half::Lower, reverse: false }).is_ok());
        assert!(matches!(slide(&p, (0, 3), path), Err(CurveError::BadPoint { .. })));
    }

    /// Every `s_{2m-k}^{-1} s_k` image of the upper matching is one slide
    /// away from it.
    #[test]
    fn twist_untwist_is_a_slide() {
        for m in 1..=4 {
            let p = standard_matching(m, Half::Upper);
            for k in 1..2 * m {
                let moved = p.act(&word(2 * m, &[k as i64, -((2 * m - k) as i64)])).unwrap();
                if k == m {
                    assert_eq!(moved, p);
                    continue;
                }
                let found = (1..=2 * m).any(|x| {
                    (1..=2 * m).any(|y| {
                        [Half::Upper, Half::Lower].iter().any(|&half| {
                            [false, true].iter().any(|&reverse| {
                                slide(&p, (x, y), SlidePath { half, reverse }).is_ok_and(|q| q == moved)
                            })
                        })
                    })
                });
                assert!(found, "m={m} k={k}");
                assert_eq!(moved.pairs(), p.pairs());
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let p = standard_matching(3, Half::Lower);
        assert_eq!(p.to_string(), "3; (1,6)- (2,5)- (3,4)-");
        assert_eq!(parse_matching(&p.to_string()).unwrap(), p);
        let q = standard_matching(2, Half::Upper).act(&word(4, &[2, 2, -3, 1])).unwrap();
        assert_eq!(parse_matching(&q.to_string()).unwrap(), q);
        assert!(parse_matching("2; (1,4)+ (2,3)").is_err());
        assert!(parse_matching("2 (1,4)+ (2,3)+").is_err());
        assert!(parse_matching("2; (1,3)+ (2,4)+").is_err());
    }

    fn system_strategy() -> impl Strategy<Value = (usize, ArcSystem)> {
        (3usize..=8, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = disc(n);
            // disjoint segments between neighbours, then scrambled
            let mut arcs = Vec::new();
            let mut k = 1;
            while k < n {
                if rng.gen_bool(0.6) {
                    arcs.push(d.segment(k, k + 1).unwrap());
                    k += 2;
                } else {
                    k += 1;
                }
            }
            if arcs.is_empty() {
                arcs.push(d.segment(1, 2).unwrap());
            }
            let sys = ArcSystem::new(d, arcs).unwrap();
            let len = rng.gen_range(0..7);
            (n, sys.act(&word(n, &random_word(&mut rng, n, len))).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn braid_relations((n, a) in system_strategy(), k in 1usize..7, l in 1usize..7) {
            let (k, l) = (1 + k % (n - 1), 1 + l % (n - 1));
            let k = k as i64;
            let l = l as i64;
            if k + 1 < n as i64 {
                let lhs = a.act(&word(n, &[k, k + 1, k])).unwrap();
                let rhs = a.act(&word(n, &[k + 1, k, k + 1])).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
            if (k - l).abs() >= 2 {
                prop_assert_eq!(a.act(&word(n, &[k, l])).unwrap(), a.act(&word(n, &[l, k])).unwrap());
            }
        }

        #[test]
        fn inverse_words_undo((n, a) in system_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = word(n, &random_word(&mut rng, n, 8));
            prop_assert_eq!(&a.act(&w.inverse()).unwrap().act(&w).unwrap(), &a);
            prop_assert_eq!(&a.act(&w).unwrap().act(&w.inverse()).unwrap(), &a);
        }

        #[test]
        fn intersection_symmetric((n, a) in system_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = a.act(&word(n, &random_word(&mut rng, n, 5))).unwrap();
            prop_assert_eq!(intersection(&a, &b), intersection(&b, &a));
            let own = intersection(&a, &a);
            prop_assert!(own.degenerate);
            prop_assert_eq!((own.endpoints, own.interior), (2 * a.arcs().len(), 0));
        }

        #[test]
        fn intersections_are_braid_invariant((n, a) in system_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = a.act(&word(n, &random_word(&mut rng, n, 5))).unwrap();
            let g = word(n, &random_word(&mut rng, n, 5));
            prop_assert_eq!(intersection(&a, &b), intersection(&a.act(&g).unwrap(), &b.act(&g).unwrap()));
        }

        #[test]
        fn relaxation_reaches_a_segment((n, a) in system_strategy()) {
            for arc in a.arcs() {
                let (w, k) = arc.relax().unwrap();
                let b = BraidWord::new(n, w).unwrap();
                prop_assert_eq!(arc.act(&b).unwrap().as_segment(), Some(k));
                // the half-twist about an arc fixes it
                prop_assert_eq!(&arc.act(&arc.half_twist(1)).unwrap(), arc);
            }
        }
    }
}
