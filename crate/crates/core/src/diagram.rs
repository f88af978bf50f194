//! Planar crossing data for braid and plat closures.
//!
//! A crossing lists its four edges counter-clockwise starting at the
//! incoming end of the under strand, so slots 0 and 2 carry the under strand
//! (0 in, 2 out). The over strand enters at slot 3 for a positive crossing
//! and at slot 1 for a negative one. The 0-smoothing joins slots (0,1),(2,3);
//! the 1-smoothing joins (0,3),(1,2).
//!
//! Braids are drawn left to right with strand position `p` at height `p`.
//! For `s_k` the strand rising from `k` to `k+1` passes over.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::util::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub edges: [usize; 4],
    pub sign: i8,
    /// Slot sitting at the top-left corner of the planar picture.
    pub nw: u8,
}

impl Crossing {
    pub fn is_incoming(&self, slot: usize) -> bool {
        slot == 0 || (slot == 3 && self.sign > 0) || (slot == 1 && self.sign < 0)
    }

    /// Slot pairs joined by a smoothing.
    pub fn smoothing_pairs(bit: u8) -> [(usize, usize); 2] {
        if bit == 0 {
            [(0, 1), (2, 3)]
        } else {
            [(0, 3), (1, 2)]
        }
    }

    /// The smoothing that respects orientation.
    pub fn oriented_smoothing(&self) -> u8 {
        if self.sign > 0 {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Braid { strands: usize },
    Plat { strands: usize },
    Resolution,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDiagram {
    pub crossings: Vec<Crossing>,
    pub edge_count: usize,
    /// Components without crossings.
    pub free_loops: usize,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleSet {
    pub count: usize,
    /// Circle index of each edge; free loops take the last indices.
    pub circle_of_edge: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagramError {
    NoSuchCrossing { index: usize, crossings: usize },
    AssignmentLength { expected: usize, got: usize },
    StrandMismatch { braid: usize, matching: usize },
    BadMatching,
}

impl fmt::Display for DiagramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramError::NoSuchCrossing { index, crossings } => {
                write!(f, "crossing {index} does not exist (diagram has {crossings})")
            }
            DiagramError::AssignmentLength { expected, got } => {
                write!(f, "smoothing assignment has length {got}, expected {expected}")
            }
            DiagramError::StrandMismatch { braid, matching } => {
                write!(f, "braid has {braid} strands but the matchings cover {matching} points")
            }
            DiagramError::BadMatching => write!(f, "matching is not a perfect pairing of the endpoints"),
        }
    }
}

impl core::error::Error for DiagramError {}

// Corner order, counter-clockwise.
const NW: usize = 0;
const SW: usize = 1;
const SE: usize = 2;
const NE: usize = 3;

fn corner_partner(k: usize) -> usize {
    (k + 2) % 4
}

/// End of a strand segment in the braid region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum End {
    Left(usize),
    Right(usize),
    Corner(usize, usize),
}

/// How the boundary points of the braid region are joined.
enum Closure<'a> {
    Braid,
    Plat { left: &'a [(usize, usize)], right: &'a [(usize, usize)] },
}

struct Strands {
    // per segment: (left end, right end)
    segs: Vec<(End, End)>,
    // per crossing: segments at NW, SW, SE, NE and whether SW-NE is over
    corners: Vec<([usize; 4], bool)>,
    left_seg: Vec<usize>,
    right_seg: Vec<usize>,
}

fn lay_out(b: &BraidWord) -> Strands {
    let m = b.strands();
    let mut segs: Vec<(End, End)> = (0..m).map(|p| (End::Left(p), End::Right(p))).collect();
    let left_seg: Vec<usize> = (0..m).collect();
    let mut current = left_seg.clone();
    let mut corners = Vec::with_capacity(b.len());
    for (c, l) in b.letters().iter().enumerate() {
        let (lo, hi) = (l.index - 1, l.index);
        let sw = current[lo];
        let nw = current[hi];
        segs[sw].1 = End::Corner(c, SW);
        segs[nw].1 = End::Corner(c, NW);
        let se = segs.len();
        segs.push((End::Corner(c, SE), End::Right(lo)));
        let ne = segs.len();
        segs.push((End::Corner(c, NE), End::Right(hi)));
        current[lo] = se;
        current[hi] = ne;
        corners.push(([nw, sw, se, ne], l.sign > 0));
    }
    Strands { segs, corners, left_seg, right_seg: current }
}

fn assemble(b: &BraidWord, closure: Closure<'_>, provenance: Provenance) -> LinkDiagram {
    let m = b.strands();
    let st = lay_out(b);
    // boundary partner: for a boundary end, the end it is glued to
    let mut left_to: Vec<End> = vec![End::Left(0); m];
    let mut right_to: Vec<End> = vec![End::Right(0); m];
    match closure {
        Closure::Braid => {
            for p in 0..m {
                left_to[p] = End::Right(p);
                right_to[p] = End::Left(p);
            }
        }
        Closure::Plat { left, right } => {
            for &(i, j) in left {
                left_to[i] = End::Left(j);
                left_to[j] = End::Left(i);
            }
            for &(i, j) in right {
                right_to[i] = End::Right(j);
                right_to[j] = End::Right(i);
            }
        }
    }

    // edges: segments glued across boundary points
    let nseg = st.segs.len();
    let mut uf = UnionFind::new(nseg);
    for p in 0..m {
        let a = st.left_seg[p];
        let other = match left_to[p] {
            End::Left(q) => st.left_seg[q],
            End::Right(q) => st.right_seg[q],
            End::Corner(..) => unreachable!(),
        };
        uf.union(a, other);
        let a = st.right_seg[p];
        let other = match right_to[p] {
            End::Left(q) => st.left_seg[q],
            End::Right(q) => st.right_seg[q],
            End::Corner(..) => unreachable!(),
        };
        uf.union(a, other);
    }

    // orientation by walking each component
    let n = st.corners.len();
    let mut incoming = vec![[false; 4]; n];
    let mut visited_seg = vec![false; nseg];
    let mut starts: Vec<(usize, bool)> = Vec::new(); // (segment, moving right)
    match closure {
        Closure::Braid => {
            for p in 0..m {
                starts.push((st.left_seg[p], true));
            }
        }
        Closure::Plat { left, .. } => {
            let mut caps: Vec<(usize, usize)> = left.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
            caps.sort();
            for (i, _) in caps {
                starts.push((st.left_seg[i], true));
            }
        }
    }
    let seg_ending_at = |end: End| -> (usize, bool) {
        // segment having `end` as an end, and whether we then move right
        match end {
            End::Left(q) => (st.left_seg[q], true),
            End::Right(q) => (st.right_seg[q], false),
            End::Corner(..) => unreachable!(),
        }
    };
    for &(s0, r0) in &starts {
        if visited_seg[s0] {
            continue;
        }
        let (mut s, mut right) = (s0, r0);
        loop {
            visited_seg[s] = true;
            let end = if right { st.segs[s].1 } else { st.segs[s].0 };
            let (ns, nr) = match end {
                End::Corner(c, k) => {
                    incoming[c][k] = true;
                    let out = corner_partner(k);
                    let seg = st.corners[c].0[out];
                    // leaving through an east corner means moving right
                    (seg, out == SE || out == NE)
                }
                End::Right(p) => seg_ending_at(right_to[p]),
                End::Left(p) => seg_ending_at(left_to[p]),
            };
            s = ns;
            right = nr;
            if s == s0 && right == r0 {
                break;
            }
        }
    }

    let mut edge_id = vec![usize::MAX; nseg];
    let mut next = 0;
    let mut corner_edges = Vec::with_capacity(n);
    for (segs, _) in &st.corners {
        let mut e = [0usize; 4];
        for k in 0..4 {
            let root = uf.find(segs[k]);
            if edge_id[root] == usize::MAX {
                edge_id[root] = next;
                next += 1;
            }
            e[k] = edge_id[root];
        }
        corner_edges.push(e);
    }
    let mut free_loops = 0;
    let mut seen_root = vec![false; nseg];
    for s in 0..nseg {
        let r = uf.find(s);
        if edge_id[r] == usize::MAX && !seen_root[r] {
            seen_root[r] = true;
            free_loops += 1;
        }
    }

    let mut crossings = Vec::with_capacity(n);
    for c in 0..n {
        let over_swne = st.corners[c].1;
        let under = if over_swne { [NW, SE] } else { [SW, NE] };
        let over = if over_swne { [SW, NE] } else { [NW, SE] };
        let under_in = if incoming[c][under[0]] { under[0] } else { under[1] };
        let over_in = if incoming[c][over[0]] { over[0] } else { over[1] };
        let mut edges = [0usize; 4];
        for (i, slot) in edges.iter_mut().enumerate() {
            *slot = corner_edges[c][(under_in + i) % 4];
        }
        let over_slot = (over_in + 4 - under_in) % 4;
        let sign = if over_slot == 3 { 1 } else { -1 };
        crossings.push(Crossing { edges, sign, nw: ((4 - under_in) % 4) as u8 });
    }
    let d = LinkDiagram { crossings, edge_count: next, free_loops, provenance };
    debug_assert!(d.check().is_ok());
    d
}

/// Closure of a braid: every strand returns to its own starting height.
pub fn braid_closure_diagram(b: &BraidWord) -> LinkDiagram {
    assemble(b, Closure::Braid, Provenance::Braid { strands: b.strands() })
}

/// Plat closure of a braid on `2m` strands between two pairings of the
/// positions `1..=2m` (the first caps the left ends, the second the right
/// ends). Components are oriented from their lowest left cap, entering the
/// braid at the cap's lower endpoint.
pub fn plat_closure_pairs(
    left: &[(usize, usize)],
    b: &BraidWord,
    right: &[(usize, usize)],
) -> Result<LinkDiagram, DiagramError> {
    let m2 = b.strands();
    for pairs in [left, right] {
        if 2 * pairs.len() != m2 {
            return Err(DiagramError::StrandMismatch { braid: m2, matching: 2 * pairs.len() });
        }
        let mut hit = vec![false; m2];
        for &(i, j) in pairs {
            if i == j || i == 0 || j == 0 || i > m2 || j > m2 || hit[i - 1] || hit[j - 1] {
                return Err(DiagramError::BadMatching);
            }
            hit[i - 1] = true;
            hit[j - 1] = true;
        }
    }
    let l: Vec<(usize, usize)> = left.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    let r: Vec<(usize, usize)> = right.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    Ok(assemble(b, Closure::Plat { left: &l, right: &r }, Provenance::Plat { strands: m2 }))
}

pub fn plat_closure(
    top: &crate::curves::Matching,
    b: &BraidWord,
    bottom: &crate::curves::Matching,
) -> Result<LinkDiagram, DiagramError> {
    plat_closure_pairs(&top.pairs(), b, &bottom.pairs())
}

impl LinkDiagram {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_plus(&self) -> usize {
        self.crossings.iter().filter(|c| c.sign > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossings.iter().filter(|c| c.sign < 0).count()
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus() as i64 - self.n_minus() as i64
    }

    /// For each edge: (tail, head) as (crossing, slot).
    pub fn edge_ends(&self) -> Vec<[(usize, usize); 2]> {
        let mut ends = vec![[(usize::MAX, 0), (usize::MAX, 0)]; self.edge_count];
        for (c, x) in self.crossings.iter().enumerate() {
            for s in 0..4 {
                let idx = if x.is_incoming(s) { 1 } else { 0 };
                ends[x.edges[s]][idx] = (c, s);
            }
        }
        ends
    }

    /// Every edge has exactly one tail and one head.
    pub fn check(&self) -> Result<(), usize> {
        let mut tails = vec![0u8; self.edge_count];
        let mut heads = vec![0u8; self.edge_count];
        for x in &self.crossings {
            for s in 0..4 {
                let e = x.edges[s];
                if e >= self.edge_count {
                    return Err(e);
                }
                if x.is_incoming(s) {
                    heads[e] += 1;
                } else {
                    tails[e] += 1;
                }
            }
        }
        for e in 0..self.edge_count {
            if tails[e] != 1 || heads[e] != 1 {
                return Err(e);
            }
        }
        Ok(())
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.edge_count);
        for x in &self.crossings {
            uf.union(x.edges[0], x.edges[2]);
            uf.union(x.edges[1], x.edges[3]);
        }
        uf.count() + self.free_loops
    }

    /// Circles of the smoothing with bits `assignment[c]`.
    pub fn smooth(&self, assignment: &[u8]) -> Result<CircleSet, DiagramError> {
        if assignment.len() != self.crossings.len() {
            return Err(DiagramError::AssignmentLength { expected: self.crossings.len(), got: assignment.len() });
        }
        Ok(self.smooth_bits(|c| assignment[c]))
    }

    pub(crate) fn smooth_bits(&self, bit: impl Fn(usize) -> u8) -> CircleSet {
        let mut uf = UnionFind::new(self.edge_count);
        for (c, x) in self.crossings.iter().enumerate() {
            for (p, q) in Crossing::smoothing_pairs(bit(c)) {
                uf.union(x.edges[p], x.edges[q]);
            }
        }
        let mut label = vec![usize::MAX; self.edge_count];
        let mut circle_of_edge = vec![0; self.edge_count];
        let mut next = 0;
        for e in 0..self.edge_count {
            let r = uf.find(e);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            circle_of_edge[e] = label[r];
        }
        CircleSet { count: next + self.free_loops, circle_of_edge }
    }

    /// Crossings met by the arc of the crossing complement that starts at the
    /// top-left corner of `c`, with the number of passes through each.
    fn nw_arc(&self, c: usize) -> (Vec<usize>, Vec<u8>) {
        let ends = self.edge_ends();
        let mut edges = Vec::new();
        let mut passes = vec![0u8; self.crossings.len()];
        let (mut at, mut slot) = (c, self.crossings[c].nw as usize);
        loop {
            let e = self.crossings[at].edges[slot];
            edges.push(e);
            let [a, b] = ends[e];
            let (nc, ns) = if a == (at, slot) { b } else { a };
            if nc == c {
                break;
            }
            passes[nc] += 1;
            at = nc;
            slot = (ns + 2) % 4;
        }
        (edges, passes)
    }

    /// Signed count of crossings between the top-left arc of the complement
    /// of crossing `c` and the rest of the diagram.
    pub fn crossing_v(&self, c: usize) -> Result<i64, DiagramError> {
        if c >= self.crossings.len() {
            return Err(DiagramError::NoSuchCrossing { index: c, crossings: self.crossings.len() });
        }
        let (_, passes) = self.nw_arc(c);
        Ok(passes
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p == 1)
            .map(|(i, _)| self.crossings[i].sign as i64)
            .sum())
    }

    /// The diagram with crossing `c` replaced by smoothing `bit`. When that
    /// smoothing does not respect orientation, the top-left arc of the
    /// complement is reversed.
    pub fn resolve(&self, c: usize, bit: u8) -> Result<LinkDiagram, DiagramError> {
        if c >= self.crossings.len() {
            return Err(DiagramError::NoSuchCrossing { index: c, crossings: self.crossings.len() });
        }
        let x = self.crossings[c];
        let mut reversed = vec![false; self.edge_count];
        if bit != x.oriented_smoothing() {
            for e in self.nw_arc(c).0 {
                reversed[e] = true;
            }
        }
        let mut uf = UnionFind::new(self.edge_count);
        for (p, q) in Crossing::smoothing_pairs(bit) {
            uf.union(x.edges[p], x.edges[q]);
        }
        let mut label = vec![usize::MAX; self.edge_count];
        let mut next = 0;
        let mut crossings = Vec::with_capacity(self.crossings.len() - 1);
        for (i, y) in self.crossings.iter().enumerate() {
            if i == c {
                continue;
            }
            let mut edges = [0usize; 4];
            for s in 0..4 {
                let r = uf.find(y.edges[s]);
                if label[r] == usize::MAX {
                    label[r] = next;
                    next += 1;
                }
                edges[s] = label[r];
            }
            let under_rev = reversed[y.edges[0]];
            let over_rev = reversed[y.edges[1]];
            let mut sign = y.sign;
            let mut nw = y.nw;
            if under_rev {
                edges = [edges[2], edges[3], edges[0], edges[1]];
                nw = (nw + 2) % 4;
                sign = -sign;
            }
            if over_rev {
                sign = -sign;
            }
            crossings.push(Crossing { edges, sign, nw });
        }
        let mut new_loops = 0;
        let mut seen = vec![false; self.edge_count];
        for e in 0..self.edge_count {
            let r = uf.find(e);
            if label[r] == usize::MAX && !seen[r] {
                seen[r] = true;
                new_loops += 1;
            }
        }
        let d = LinkDiagram {
            crossings,
            edge_count: next,
            free_loops: self.free_loops + new_loops,
            provenance: Provenance::Resolution,
        };
        debug_assert!(d.check().is_ok(), "resolution orientation inconsistent");
        Ok(d)
    }

    /// Same diagram with every component reversed.
    pub fn reverse_all(&self) -> LinkDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|y| Crossing {
                edges: [y.edges[2], y.edges[3], y.edges[0], y.edges[1]],
                sign: y.sign,
                nw: (y.nw + 2) % 4,
            })
            .collect();
        LinkDiagram { crossings, ..self.clone() }
    }

    /// Disjoint union with an unknot.
    pub fn with_unknot(&self) -> LinkDiagram {
        LinkDiagram { free_loops: self.free_loops + 1, ..self.clone() }
    }
}
