//! Khovanov homology by scanning: crossings are tensored one at a time onto
//! a complex whose objects are crossingless tangles, closed circles are
//! delooped as soon as they appear, and invertible entries are cancelled by
//! Gaussian elimination.
//!
//! A morphism between crossingless tangles `A -> B` is an integer
//! combination of dot patterns on the cycles of `A u B`: every cycle bounds
//! a disk, dotted or not. Relations: a sphere is 0, a dotted sphere is 1, two
//! dots vanish, and a neck equals a dot on either side.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::snf::{prime_power_parts, smith_invariants, SparseMatrix};
use super::{BigradedAbelianGroup, Group};
use crate::diagram::{Crossing, LinkDiagram};
use crate::util::UnionFind;

type Mask = u64;
type Terms = Vec<(Mask, i64)>;

fn add_into(v: &mut Terms, m: Mask, c: i64) {
    if c == 0 {
        return;
    }
    match v.binary_search_by_key(&m, |t| t.0) {
        Ok(i) => {
            v[i].1 += c;
            if v[i].1 == 0 {
                v.remove(i);
            }
        }
        Err(i) => v.insert(i, (m, c)),
    }
}

/// Cycle index of each boundary position in `a u b`, numbered by smallest
/// position, and the number of cycles.
fn cycles(a: &[u8], b: &[u8]) -> (Vec<u8>, usize) {
    let n = a.len();
    let mut cyc = vec![u8::MAX; n];
    let mut k = 0u8;
    for s in 0..n {
        if cyc[s] != u8::MAX {
            continue;
        }
        let mut p = s;
        loop {
            cyc[p] = k;
            let q = a[p] as usize;
            cyc[q] = k;
            p = b[q] as usize;
            if p == s {
                break;
            }
        }
        k += 1;
    }
    (cyc, k as usize)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    Shared,
    Bottom,
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CycleKind {
    /// Meets the tangle boundary; carries the smallest boundary point.
    Through(u32),
    SourceLoop(u32),
    TargetLoop(u32),
}

/// A surface glued from disks along segments, with its boundary drawn as
/// arcs between nodes.
#[derive(Default)]
struct Surface {
    dots: Vec<u8>,
    seams: Vec<(usize, usize)>,
    arcs: Vec<(usize, usize, usize)>,
    node_point: Vec<u32>,
    node_kind: Vec<NodeKind>,
}

impl Surface {
    fn piece(&mut self, dots: u8) -> usize {
        self.dots.push(dots);
        self.dots.len() - 1
    }

    /// Boundary cycles and the expansion of the surface in dot patterns on
    /// them (bit set = dotted). An empty expansion means zero.
    fn evaluate(&self) -> (Vec<CycleKind>, Terms) {
        let np = self.dots.len();
        let mut puf = UnionFind::new(np);
        for &(a, b) in &self.seams {
            puf.union(a, b);
        }
        let mut comp_of = vec![usize::MAX; np];
        let mut ncomp = 0;
        for p in 0..np {
            let r = puf.find(p);
            if comp_of[r] == usize::MAX {
                comp_of[r] = ncomp;
                ncomp += 1;
            }
            comp_of[p] = comp_of[r];
        }
        let mut chi = vec![0i64; ncomp];
        let mut dots = vec![0u32; ncomp];
        for p in 0..np {
            chi[comp_of[p]] += 1;
            dots[comp_of[p]] += self.dots[p] as u32;
        }
        for &(a, _) in &self.seams {
            chi[comp_of[a]] -= 1;
        }

        let nn = self.node_point.len();
        let mut nuf = UnionFind::new(nn);
        for &(a, b, _) in &self.arcs {
            nuf.union(a, b);
        }
        let mut cyc_of_root = vec![usize::MAX; nn];
        let mut kinds: Vec<CycleKind> = Vec::new();
        let mut cyc_comp: Vec<usize> = Vec::new();
        for &(a, _, piece) in &self.arcs {
            let r = nuf.find(a);
            if cyc_of_root[r] == usize::MAX {
                cyc_of_root[r] = kinds.len();
                kinds.push(CycleKind::SourceLoop(u32::MAX));
                cyc_comp.push(comp_of[piece]);
            }
        }
        // kinds from node data
        let mut min_shared = vec![u32::MAX; kinds.len()];
        let mut min_any = vec![u32::MAX; kinds.len()];
        let mut bottom = vec![false; kinds.len()];
        for n in 0..nn {
            let r = nuf.find(n);
            let c = cyc_of_root[r];
            if c == usize::MAX {
                continue;
            }
            let pt = self.node_point[n];
            min_any[c] = min_any[c].min(pt);
            match self.node_kind[n] {
                NodeKind::Shared => min_shared[c] = min_shared[c].min(pt),
                NodeKind::Bottom => bottom[c] = true,
                NodeKind::Top => {}
            }
        }
        for c in 0..kinds.len() {
            kinds[c] = if min_shared[c] != u32::MAX {
                CycleKind::Through(min_shared[c])
            } else if bottom[c] {
                CycleKind::SourceLoop(min_any[c])
            } else {
                CycleKind::TargetLoop(min_any[c])
            };
        }
        assert!(kinds.len() <= 64, "too many boundary cycles");

        let mut comp_cycles: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
        for (c, &k) in cyc_comp.iter().enumerate() {
            comp_cycles[k].push(c);
        }
        let mut terms: Terms = vec![(0, 1)];
        for k in 0..ncomp {
            let b = comp_cycles[k].len() as i64;
            let g2 = 2 - chi[k] - b;
            debug_assert!(g2 >= 0 && g2 % 2 == 0, "non-orientable or bad surface");
            let g = g2 / 2;
            let e = g + dots[k] as i64;
            let all: Mask = comp_cycles[k].iter().fold(0, |m, &c| m | (1 << c));
            if b == 0 {
                if e != 1 {
                    return (kinds, Vec::new());
                }
                for t in terms.iter_mut() {
                    t.1 <<= g;
                }
            } else if e >= 2 {
                return (kinds, Vec::new());
            } else if e == 1 {
                for t in terms.iter_mut() {
                    t.0 |= all;
                    t.1 <<= g;
                }
            } else {
                let mut next = Vec::with_capacity(terms.len() * comp_cycles[k].len());
                for &(m, c) in &terms {
                    for &cy in &comp_cycles[k] {
                        next.push((m | (all & !(1 << cy)), c));
                    }
                }
                terms = next;
            }
        }
        (kinds, terms)
    }
}

#[derive(Clone, Copy)]
struct Obj {
    mat: u32,
    h: i32,
    q: i32,
    alive: bool,
}

/// Objects after a crossing is added: new matching and the loops it closed,
/// the latter identified by their smallest point.
#[derive(Clone)]
struct Capped {
    mat: u32,
    loops: Vec<u32>,
}

/// Entry of a transformed morphism: source delooping choice, target
/// delooping choice, dot pattern, coefficient.
type Block = Vec<(u32, u32, Mask, i64)>;

struct Scanner {
    bnd: Vec<u32>,
    mats: Vec<Vec<u8>>,
    mat_ids: BTreeMap<Vec<u8>, u32>,
    objs: Vec<Obj>,
    out: Vec<BTreeMap<u32, Terms>>,
    inc: Vec<BTreeSet<u32>>,
    compose_cache: BTreeMap<(u32, u32, u32, Mask, Mask), Terms>,
}

impl Scanner {
    fn new(free_loops: usize) -> Self {
        let mut s = Scanner {
            bnd: Vec::new(),
            mats: Vec::new(),
            mat_ids: BTreeMap::new(),
            objs: Vec::new(),
            out: Vec::new(),
            inc: Vec::new(),
            compose_cache: BTreeMap::new(),
        };
        let empty = s.intern(Vec::new());
        for sigma in 0u32..(1 << free_loops) {
            let q = free_loops as i32 - 2 * sigma.count_ones() as i32;
            s.push_obj(Obj { mat: empty, h: 0, q, alive: true });
        }
        s
    }

    fn intern(&mut self, m: Vec<u8>) -> u32 {
        if let Some(&id) = self.mat_ids.get(&m) {
            return id;
        }
        let id = self.mats.len() as u32;
        self.mats.push(m.clone());
        self.mat_ids.insert(m, id);
        id
    }

    fn push_obj(&mut self, o: Obj) -> u32 {
        self.objs.push(o);
        self.out.push(BTreeMap::new());
        self.inc.push(BTreeSet::new());
        (self.objs.len() - 1) as u32
    }

    fn set_entry(&mut self, x: u32, y: u32, t: Terms) {
        if t.is_empty() {
            if self.out[x as usize].remove(&y).is_some() {
                self.inc[y as usize].remove(&x);
            }
        } else {
            self.out[x as usize].insert(y, t);
            self.inc[y as usize].insert(x);
        }
    }

    fn add_crossing(&mut self, x: &Crossing) {
        let ce: [u32; 4] = [x.edges[0] as u32, x.edges[1] as u32, x.edges[2] as u32, x.edges[3] as u32];
        let old_bnd = self.bnd.clone();
        let mult = |e: u32| ce.iter().filter(|&&f| f == e).count();
        let internal = |e: u32| mult(e) == 2 || (mult(e) == 1 && old_bnd.binary_search(&e).is_ok());
        let mut nb: Vec<u32> = self.bnd.iter().copied().filter(|&e| !ce.contains(&e)).collect();
        for &e in &ce {
            if !internal(e) {
                nb.push(e);
            }
        }
        nb.sort_unstable();
        nb.dedup();

        // nodes: one per boundary point, two (bottom, top) per internal point
        let mut points: Vec<u32> = self.bnd.clone();
        points.extend_from_slice(&ce);
        points.sort_unstable();
        points.dedup();
        let mut bot_node: BTreeMap<u32, usize> = BTreeMap::new();
        let mut top_node: BTreeMap<u32, usize> = BTreeMap::new();
        let mut node_point = Vec::new();
        let mut node_kind = Vec::new();
        for &p in &points {
            if internal(p) {
                bot_node.insert(p, node_point.len());
                node_point.push(p);
                node_kind.push(NodeKind::Bottom);
                top_node.insert(p, node_point.len());
                node_point.push(p);
                node_kind.push(NodeKind::Top);
            } else {
                bot_node.insert(p, node_point.len());
                top_node.insert(p, node_point.len());
                node_point.push(p);
                node_kind.push(NodeKind::Shared);
            }
        }
        let old_pos = |e: u32| old_bnd.binary_search(&e).unwrap();
        let new_pos = |e: u32| nb.binary_search(&e).unwrap();

        // new matchings
        let old_mats = core::mem::take(&mut self.mats);
        self.mat_ids.clear();
        self.compose_cache.clear();
        let mut capped: BTreeMap<(u32, u8), Capped> = BTreeMap::new();
        for (mid, m) in old_mats.iter().enumerate() {
            for s in 0..2u8 {
                let mut arcs: Vec<(u32, u32)> = Vec::new();
                for p in 0..m.len() {
                    if p < m[p] as usize {
                        arcs.push((old_bnd[p], old_bnd[m[p] as usize]));
                    }
                }
                for (a, b) in Crossing::smoothing_pairs(s) {
                    arcs.push((ce[a], ce[b]));
                }
                let (mat, loops) = trace_arcs(&arcs, &nb);
                let id = self.intern(mat);
                capped.insert((mid as u32, s), Capped { mat: id, loops });
            }
        }

        // new objects
        let old_objs = core::mem::take(&mut self.objs);
        let old_out = core::mem::take(&mut self.out);
        self.inc.clear();
        let mut base: Vec<[u32; 2]> = vec![[u32::MAX; 2]; old_objs.len()];
        for (i, o) in old_objs.iter().enumerate() {
            if !o.alive {
                continue;
            }
            for s in 0..2u8 {
                let cp = &capped[&(o.mat, s)];
                let l = cp.loops.len() as u32;
                base[i][s as usize] = self.objs.len() as u32;
                for sigma in 0u32..(1 << l) {
                    let q = o.q + s as i32 + l as i32 - 2 * sigma.count_ones() as i32;
                    self.push_obj(Obj { mat: cp.mat, h: o.h + s as i32, q, alive: true });
                }
            }
        }

        let env = Env {
            ce,
            old_bnd: &old_bnd,
            bot_node: &bot_node,
            top_node: &top_node,
            node_point: &node_point,
            node_kind: &node_kind,
            internal: &|e| internal(e),
            old_pos: &old_pos,
            new_pos: &new_pos,
        };

        // d_old (x) id
        let mut tensor_cache: BTreeMap<(u32, u32, Mask, u8), Block> = BTreeMap::new();
        let mut pending: Vec<(u32, u32, Block, i64)> = Vec::new();
        for (xi, o) in old_objs.iter().enumerate() {
            if !o.alive {
                continue;
            }
            for (&yi, terms) in &old_out[xi] {
                let p = &old_objs[yi as usize];
                for s in 0..2u8 {
                    let (ca, cb) = (&capped[&(o.mat, s)], &capped[&(p.mat, s)]);
                    let mut block: Block = Vec::new();
                    for &(mask, coeff) in terms {
                        let key = (o.mat, p.mat, mask, s);
                        let b = tensor_cache.entry(key).or_insert_with(|| {
                            let surf = env.tensor_surface(&old_mats[o.mat as usize], &old_mats[p.mat as usize], mask, s);
                            map_block(&surf, ca, cb, &self.mats, &env)
                        });
                        for &(sg, tu, m, c) in b.iter() {
                            block.push((sg, tu, m, c * coeff));
                        }
                    }
                    pending.push((base[xi][s as usize], base[yi as usize][s as usize], block, 1));
                }
            }
        }
        // id (x) saddle, with the Koszul sign
        let mut saddle_cache: BTreeMap<u32, Block> = BTreeMap::new();
        for (xi, o) in old_objs.iter().enumerate() {
            if !o.alive {
                continue;
            }
            let (c0, c1) = (&capped[&(o.mat, 0)], &capped[&(o.mat, 1)]);
            let b = saddle_cache
                .entry(o.mat)
                .or_insert_with(|| {
                    let surf = env.saddle_surface(&old_mats[o.mat as usize]);
                    map_block(&surf, c0, c1, &self.mats, &env)
                })
                .clone();
            let sign = if o.h % 2 == 0 { 1 } else { -1 };
            pending.push((base[xi][0], base[xi][1], b, sign));
        }
        self.bnd = nb.clone();
        for (src_base, dst_base, block, sign) in pending {
            let mut acc: BTreeMap<(u32, u32), Terms> = BTreeMap::new();
            for (sg, tu, m, c) in block {
                add_into(acc.entry((src_base + sg, dst_base + tu)).or_default(), m, c * sign);
            }
            for ((a, b), t) in acc {
                if !t.is_empty() {
                    self.debug_degree(a, b, &t);
                    let mut cur = self.out[a as usize].get(&b).cloned().unwrap_or_default();
                    for (m, c) in t {
                        add_into(&mut cur, m, c);
                    }
                    self.set_entry(a, b, cur);
                }
            }
        }
    }

    fn debug_degree(&self, a: u32, b: u32, t: &Terms) {
        if cfg!(debug_assertions) {
            let (oa, ob) = (self.objs[a as usize], self.objs[b as usize]);
            let (_, ncyc) = cycles(&self.mats[oa.mat as usize], &self.mats[ob.mat as usize]);
            for &(m, _) in t {
                let deg = ncyc as i32 - self.bnd.len() as i32 / 2 - 2 * m.count_ones() as i32 + ob.q - oa.q;
                assert_eq!(deg, 0, "differential entry of nonzero degree");
                assert_eq!(ob.h, oa.h + 1);
            }
        }
    }

    /// `g o f` for `f: A -> M` and `g: M -> C`.
    fn compose(&mut self, a: u32, mm: u32, c: u32, f: &Terms, g: &Terms) -> Terms {
        let mut out: Terms = Vec::new();
        for &(fm, fc) in f {
            for &(gm, gc) in g {
                let key = (a, mm, c, fm, gm);
                if !self.compose_cache.contains_key(&key) {
                    let r = compose_basis(&self.mats[a as usize], &self.mats[mm as usize], &self.mats[c as usize], fm, gm);
                    self.compose_cache.insert(key, r);
                }
                for &(m, k) in &self.compose_cache[&key] {
                    add_into(&mut out, m, k * fc * gc);
                }
            }
        }
        out
    }

    fn is_unit_iso(&self, x: u32, y: u32, t: &Terms) -> Option<i64> {
        let (ox, oy) = (self.objs[x as usize], self.objs[y as usize]);
        if ox.mat == oy.mat && ox.q == oy.q && t.len() == 1 && t[0].0 == 0 && (t[0].1 == 1 || t[0].1 == -1) {
            Some(t[0].1)
        } else {
            None
        }
    }

    /// Cancels invertible entries until none remain.
    fn reduce(&mut self) {
        loop {
            let mut cands: Vec<(usize, u32, u32)> = Vec::new();
            for x in 0..self.objs.len() as u32 {
                if !self.objs[x as usize].alive {
                    continue;
                }
                for (&y, t) in &self.out[x as usize] {
                    if self.is_unit_iso(x, y, t).is_some() {
                        let cost = self.inc[y as usize].len() * self.out[x as usize].len();
                        cands.push((cost, x, y));
                    }
                }
            }
            if cands.is_empty() {
                return;
            }
            cands.sort_unstable();
            for (_, x, y) in cands {
                if !self.objs[x as usize].alive || !self.objs[y as usize].alive {
                    continue;
                }
                let Some(t) = self.out[x as usize].get(&y) else { continue };
                let Some(u) = self.is_unit_iso(x, y, t) else { continue };
                self.eliminate(x, y, u);
            }
        }
    }

    /// Removes `x -> y` (an isomorphism `u * id`), replacing each `a -> b`
    /// by `a -> b - (x -> b) u^{-1} (a -> y)`.
    fn eliminate(&mut self, x: u32, y: u32, u: i64) {
        let mid = self.objs[x as usize].mat;
        let ins: Vec<u32> = self.inc[y as usize].iter().copied().filter(|&a| a != x).collect();
        let outs: Vec<(u32, Terms)> =
            self.out[x as usize].iter().filter(|&(&b, _)| b != y).map(|(&b, t)| (b, t.clone())).collect();
        for &a in &ins {
            let delta = self.out[a as usize][&y].clone();
            let ma = self.objs[a as usize].mat;
            for (b, gamma) in &outs {
                let mb = self.objs[*b as usize].mat;
                let prod = self.compose(ma, mid, mb, &delta, gamma);
                if prod.is_empty() {
                    continue;
                }
                let mut cur = self.out[a as usize].get(b).cloned().unwrap_or_default();
                for (m, c) in prod {
                    add_into(&mut cur, m, -u * c);
                }
                self.set_entry(a, *b, cur);
            }
        }
        for z in [x, y] {
            let ins: Vec<u32> = self.inc[z as usize].iter().copied().collect();
            for a in ins {
                self.out[a as usize].remove(&z);
            }
            let outs: Vec<u32> = self.out[z as usize].keys().copied().collect();
            for b in outs {
                self.inc[b as usize].remove(&z);
            }
            self.out[z as usize].clear();
            self.inc[z as usize].clear();
            self.objs[z as usize].alive = false;
        }
    }

    /// Drops dead objects and renumbers.
    fn compact(&mut self) {
        let mut map = vec![u32::MAX; self.objs.len()];
        let mut objs = Vec::new();
        for (i, o) in self.objs.iter().enumerate() {
            if o.alive {
                map[i] = objs.len() as u32;
                objs.push(*o);
            }
        }
        let mut out = vec![BTreeMap::new(); objs.len()];
        let mut inc = vec![BTreeSet::new(); objs.len()];
        for (i, row) in self.out.iter().enumerate() {
            if map[i] == u32::MAX {
                continue;
            }
            for (&j, t) in row {
                out[map[i] as usize].insert(map[j as usize], t.clone());
                inc[map[j as usize] as usize].insert(map[i]);
            }
        }
        self.objs = objs;
        self.out = out;
        self.inc = inc;
    }

    fn homology(&self, n_plus: usize, n_minus: usize) -> BigradedAbelianGroup {
        debug_assert!(self.bnd.is_empty());
        let mut by_deg: BTreeMap<(i32, i32), Vec<u32>> = BTreeMap::new();
        for (i, o) in self.objs.iter().enumerate() {
            if o.alive {
                by_deg.entry((o.q, o.h)).or_default().push(i as u32);
            }
        }
        let mut out = BigradedAbelianGroup::new();
        let qs: BTreeSet<i32> = by_deg.keys().map(|k| k.0).collect();
        for q in qs {
            let hs: Vec<i32> = by_deg.range((q, i32::MIN)..=(q, i32::MAX)).map(|(k, _)| k.1).collect();
            let mut inv = BTreeMap::new();
            for &h in &hs {
                let src = &by_deg[&(q, h)];
                let Some(dst) = by_deg.get(&(q, h + 1)) else { continue };
                let row_of: BTreeMap<u32, usize> = dst.iter().enumerate().map(|(r, &y)| (y, r)).collect();
                let mut m = SparseMatrix::new(dst.len(), src.len());
                for (c, &x) in src.iter().enumerate() {
                    for (y, t) in &self.out[x as usize] {
                        if let Some(&r) = row_of.get(y) {
                            debug_assert!(t.len() == 1 && t[0].0 == 0);
                            m.push(r, c, t[0].1);
                        }
                    }
                }
                inv.insert(h, smith_invariants(&m));
            }
            for &h in &hs {
                let dim = by_deg[&(q, h)].len() as u64;
                let out_rank = inv.get(&h).map_or(0, |s: &super::snf::SmithInvariants| s.rank) as u64;
                let (in_rank, tors) = inv.get(&(h - 1)).map_or((0, Vec::new()), |s| (s.rank as u64, s.torsion.clone()));
                let mut torsion: Vec<u64> = tors.into_iter().flat_map(prime_power_parts).collect();
                torsion.sort_unstable();
                let i = h as i64 - n_minus as i64;
                let j = q as i64 + n_plus as i64 - 2 * n_minus as i64;
                out.add(i, j, Group { rank: dim - out_rank - in_rank, torsion });
            }
        }
        out
    }
}

/// Traces the arcs through internal points; returns the matching on the new
/// boundary `nb` and the smallest point of each closed loop, sorted.
fn trace_arcs(arcs: &[(u32, u32)], nb: &[u32]) -> (Vec<u8>, Vec<u32>) {
    let mut at: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &(a, b)) in arcs.iter().enumerate() {
        at.entry(a).or_default().push(i);
        at.entry(b).or_default().push(i);
    }
    let mut used = vec![false; arcs.len()];
    let mut mat = vec![0u8; nb.len()];
    for (pi, &p) in nb.iter().enumerate() {
        let first = at[&p][0];
        if used[first] {
            continue;
        }
        let (mut cur, mut arc) = (p, first);
        loop {
            used[arc] = true;
            let (a, b) = arcs[arc];
            let nxt = if a == cur { b } else { a };
            let list = &at[&nxt];
            let other = list.iter().copied().find(|&k| !used[k]);
            match (nb.binary_search(&nxt), other) {
                (Ok(qi), _) if list.len() == 1 || other.is_none() => {
                    mat[pi] = qi as u8;
                    mat[qi] = pi as u8;
                    break;
                }
                (_, Some(k)) => {
                    cur = nxt;
                    arc = k;
                }
                _ => unreachable!("dangling arc"),
            }
        }
    }
    let mut loops = Vec::new();
    for s in 0..arcs.len() {
        if used[s] {
            continue;
        }
        let mut min = u32::MAX;
        let (mut cur, mut arc) = (arcs[s].0, s);
        loop {
            used[arc] = true;
            let (a, b) = arcs[arc];
            min = min.min(a).min(b);
            let nxt = if a == cur { b } else { a };
            match at[&nxt].iter().copied().find(|&k| !used[k]) {
                Some(k) => {
                    cur = nxt;
                    arc = k;
                }
                None => break,
            }
        }
        loops.push(min);
    }
    loops.sort_unstable();
    (mat, loops)
}

struct Env<'a> {
    ce: [u32; 4],
    old_bnd: &'a [u32],
    bot_node: &'a BTreeMap<u32, usize>,
    top_node: &'a BTreeMap<u32, usize>,
    node_point: &'a [u32],
    node_kind: &'a [NodeKind],
    internal: &'a dyn Fn(u32) -> bool,
    old_pos: &'a dyn Fn(u32) -> usize,
    new_pos: &'a dyn Fn(u32) -> usize,
}

impl Env<'_> {
    fn blank(&self) -> Surface {
        Surface { node_point: self.node_point.to_vec(), node_kind: self.node_kind.to_vec(), ..Default::default() }
    }

    fn slots_of(&self, e: u32) -> Vec<usize> {
        (0..4).filter(|&t| self.ce[t] == e).collect()
    }

    /// Basis element `mask` of `Hom(A, B)` tensored with the identity on
    /// smoothing `s`.
    fn tensor_surface(&self, a: &[u8], b: &[u8], mask: Mask, s: u8) -> Surface {
        let mut sf = self.blank();
        let (cyc, n) = cycles(a, b);
        let disks: Vec<usize> = (0..n).map(|k| sf.piece(((mask >> k) & 1) as u8)).collect();
        let pairs = Crossing::smoothing_pairs(s);
        let strips = [sf.piece(0), sf.piece(0)];
        let strip_of_slot = |t: usize| if pairs[0].0 == t || pairs[0].1 == t { strips[0] } else { strips[1] };
        for &e in self.ce.iter().collect::<BTreeSet<_>>() {
            if !(self.internal)(e) {
                continue;
            }
            let slots = self.slots_of(e);
            if slots.len() == 2 {
                sf.seams.push((strip_of_slot(slots[0]), strip_of_slot(slots[1])));
            } else {
                sf.seams.push((disks[cyc[(self.old_pos)(e)] as usize], strip_of_slot(slots[0])));
            }
        }
        for p in 0..a.len() {
            if p < a[p] as usize {
                let (u, v) = (self.old_bnd[p], self.old_bnd[a[p] as usize]);
                sf.arcs.push((self.bot_node[&u], self.bot_node[&v], disks[cyc[p] as usize]));
            }
            if p < b[p] as usize {
                let (u, v) = (self.old_bnd[p], self.old_bnd[b[p] as usize]);
                sf.arcs.push((self.top_node[&u], self.top_node[&v], disks[cyc[p] as usize]));
            }
        }
        for (k, &(x, y)) in pairs.iter().enumerate() {
            let (u, v) = (self.ce[x], self.ce[y]);
            sf.arcs.push((self.bot_node[&u], self.bot_node[&v], strips[k]));
            sf.arcs.push((self.top_node[&u], self.top_node[&v], strips[k]));
        }
        sf
    }

    /// Identity on `A` tensored with the saddle from the 0- to the
    /// 1-smoothing.
    fn saddle_surface(&self, a: &[u8]) -> Surface {
        let mut sf = self.blank();
        let (cyc, n) = cycles(a, a);
        let strips: Vec<usize> = (0..n).map(|_| sf.piece(0)).collect();
        let saddle = sf.piece(0);
        for &e in self.ce.iter().collect::<BTreeSet<_>>() {
            if !(self.internal)(e) {
                continue;
            }
            if self.slots_of(e).len() == 2 {
                sf.seams.push((saddle, saddle));
            } else {
                sf.seams.push((strips[cyc[(self.old_pos)(e)] as usize], saddle));
            }
        }
        for p in 0..a.len() {
            if p < a[p] as usize {
                let (u, v) = (self.old_bnd[p], self.old_bnd[a[p] as usize]);
                let piece = strips[cyc[p] as usize];
                sf.arcs.push((self.bot_node[&u], self.bot_node[&v], piece));
                sf.arcs.push((self.top_node[&u], self.top_node[&v], piece));
            }
        }
        for (x, y) in Crossing::smoothing_pairs(0) {
            sf.arcs.push((self.bot_node[&self.ce[x]], self.bot_node[&self.ce[y]], saddle));
        }
        for (x, y) in Crossing::smoothing_pairs(1) {
            sf.arcs.push((self.top_node[&self.ce[x]], self.top_node[&self.ce[y]], saddle));
        }
        sf
    }
}

/// Evaluates a surface between capped objects and splits it along the
/// delooping isomorphisms. A source loop pairs with the `{+1}` summand
/// through a dotted disk; a target loop with the `{+1}` summand through an
/// undotted one.
fn map_block(sf: &Surface, src: &Capped, dst: &Capped, mats: &[Vec<u8>], env: &Env<'_>) -> Block {
    let (kinds, terms) = sf.evaluate();
    let (cyc, _) = cycles(&mats[src.mat as usize], &mats[dst.mat as usize]);
    let mut out: Block = Vec::new();
    for (mask, coeff) in terms {
        let (mut sigma, mut tau, mut m) = (0u32, 0u32, 0u64);
        for (c, k) in kinds.iter().enumerate() {
            let dotted = (mask >> c) & 1 == 1;
            match *k {
                CycleKind::Through(p) => {
                    if dotted {
                        m |= 1 << cyc[(env.new_pos)(p)];
                    }
                }
                CycleKind::SourceLoop(p) => {
                    let l = src.loops.binary_search(&p).expect("source loop");
                    if !dotted {
                        sigma |= 1 << l;
                    }
                }
                CycleKind::TargetLoop(p) => {
                    let l = dst.loops.binary_search(&p).expect("target loop");
                    if dotted {
                        tau |= 1 << l;
                    }
                }
            }
        }
        out.push((sigma, tau, m, coeff));
    }
    out
}

/// `g o f` on basis elements, `f` a dot pattern on `cycles(a, m)` and `g` on
/// `cycles(m, c)`; result on `cycles(a, c)`.
fn compose_basis(a: &[u8], m: &[u8], c: &[u8], fm: Mask, gm: Mask) -> Terms {
    let n = a.len();
    let (fc, nf) = cycles(a, m);
    let (gc, ng) = cycles(m, c);
    let mut sf = Surface {
        node_point: (0..n as u32).collect(),
        node_kind: vec![NodeKind::Shared; n],
        ..Default::default()
    };
    let f: Vec<usize> = (0..nf).map(|k| sf.piece(((fm >> k) & 1) as u8)).collect();
    let g: Vec<usize> = (0..ng).map(|k| sf.piece(((gm >> k) & 1) as u8)).collect();
    for p in 0..n {
        if p < m[p] as usize {
            sf.seams.push((f[fc[p] as usize], g[gc[p] as usize]));
        }
        if p < a[p] as usize {
            sf.arcs.push((p, a[p] as usize, f[fc[p] as usize]));
        }
        if p < c[p] as usize {
            sf.arcs.push((p, c[p] as usize, g[gc[p] as usize]));
        }
    }
    let (kinds, terms) = sf.evaluate();
    let (ac, _) = cycles(a, c);
    let mut out = Vec::new();
    for (mask, coeff) in terms {
        let mut r = 0u64;
        for (k, kind) in kinds.iter().enumerate() {
            if (mask >> k) & 1 == 1 {
                match *kind {
                    CycleKind::Through(p) => r |= 1 << ac[p as usize],
                    _ => unreachable!("closed cycle in a composition"),
                }
            }
        }
        add_into(&mut out, r, coeff);
    }
    out
}

/// Order in which crossings are added: each step takes the crossing sharing
/// the most edges with the current boundary.
fn scan_order(d: &LinkDiagram) -> Vec<usize> {
    let n = d.crossings.len();
    let mut done = vec![false; n];
    let mut open: BTreeSet<usize> = BTreeSet::new();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(i64, usize)> = None;
        for c in 0..n {
            if done[c] {
                continue;
            }
            let e = d.crossings[c].edges;
            let shared = e.iter().filter(|x| open.contains(x)).count() as i64;
            let mut distinct: Vec<usize> = e.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            let kinks = 4 - distinct.len() as i64;
            let score = 2 * shared + 2 * kinks;
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, c));
            }
        }
        let (_, c) = best.unwrap();
        done[c] = true;
        order.push(c);
        for &e in &d.crossings[c].edges {
            if !open.remove(&e) {
                open.insert(e);
            }
        }
    }
    order
}

/// Khovanov homology through the scanning algorithm.
pub fn khovanov_scan(d: &LinkDiagram) -> BigradedAbelianGroup {
    let mut s = Scanner::new(d.free_loops);
    for c in scan_order(d) {
        s.add_crossing(&d.crossings[c]);
        s.reduce();
        s.compact();
    }
    s.reduce();
    s.homology(d.n_plus(), d.n_minus())
}
