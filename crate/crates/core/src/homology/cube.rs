//! The cube of resolutions as an explicit chain complex.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::snf::SparseMatrix;
use super::HomologyError;
use crate::diagram::{CircleSet, LinkDiagram};

/// Basis element: a cube vertex and a labelling of its circles (bit set
/// means `X`, clear means `1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CubeGenerator {
    pub vertex: u64,
    pub labels: u64,
    pub j: i64,
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub n_plus: usize,
    pub n_minus: usize,
    gens: BTreeMap<i64, Vec<CubeGenerator>>,
    /// `d_i : C^i -> C^{i+1}`; rows index `C^{i+1}`.
    diffs: BTreeMap<i64, SparseMatrix>,
}

/// Builds the complex and checks `d o d = 0`.
pub fn build_cube(d: &LinkDiagram) -> Result<ChainComplex, HomologyError> {
    let n = d.crossing_count();
    assert!(n < 40, "cube too large");
    let n_plus = d.n_plus();
    let n_minus = d.n_minus();
    let shift_j = n_plus as i64 - 2 * n_minus as i64;

    let verts = 1u64 << n;
    let circles: Vec<CircleSet> = (0..verts).map(|v| d.smooth_bits(|c| ((v >> c) & 1) as u8)).collect();
    let edge_circles = |cs: &CircleSet| cs.count - d.free_loops;

    // offsets of each vertex inside its homological degree
    let mut gens: BTreeMap<i64, Vec<CubeGenerator>> = BTreeMap::new();
    let mut offset = vec![0usize; verts as usize];
    for v in 0..verts {
        let h = v.count_ones() as i64;
        let i = h - n_minus as i64;
        let list = gens.entry(i).or_default();
        offset[v as usize] = list.len();
        let k = circles[v as usize].count;
        for labels in 0..(1u64 << k) {
            let deg = k as i64 - 2 * labels.count_ones() as i64;
            list.push(CubeGenerator { vertex: v, labels, j: deg + h + shift_j });
        }
    }

    let mut diffs: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
    for (&i, list) in &gens {
        if let Some(next) = gens.get(&(i + 1)) {
            diffs.insert(i, SparseMatrix::new(next.len(), list.len()));
        }
    }

    for v in 0..verts {
        let cv = &circles[v as usize];
        let i = v.count_ones() as i64 - n_minus as i64;
        for (c, x) in d.crossings.iter().enumerate() {
            if (v >> c) & 1 == 1 {
                continue;
            }
            let w = v | (1 << c);
            let cw = &circles[w as usize];
            let sign: i64 = if (v & ((1u64 << c) - 1)).count_ones().is_multiple_of(2) { 1 } else { -1 };
            let ca = cv.circle_of_edge[x.edges[0]];
            let cb = cv.circle_of_edge[x.edges[2]];
            // other circles of v -> circles of w
            let mut map = vec![usize::MAX; cv.count];
            for (e, &k) in cv.circle_of_edge.iter().enumerate() {
                if k != ca && k != cb {
                    map[k] = cw.circle_of_edge[e];
                }
            }
            let (ev, ew) = (edge_circles(cv), edge_circles(cw));
            for l in 0..d.free_loops {
                map[ev + l] = ew + l;
            }
            let carry = |labels: u64| -> u64 {
                let mut out = 0u64;
                for (k, &t) in map.iter().enumerate() {
                    if t != usize::MAX && (labels >> k) & 1 == 1 {
                        out |= 1 << t;
                    }
                }
                out
            };
            let m = diffs.get_mut(&i).expect("target degree exists");
            let (ov, ow) = (offset[v as usize], offset[w as usize]);
            for labels in 0..(1u64 << cv.count) {
                let base = carry(labels);
                let col = ov + labels as usize;
                let a = (labels >> ca) & 1;
                if ca != cb {
                    let b = (labels >> cb) & 1;
                    if a == 1 && b == 1 {
                        continue;
                    }
                    let t = cw.circle_of_edge[x.edges[0]];
                    let out = base | ((a | b) << t);
                    m.push(ow + out as usize, col, sign);
                } else {
                    let t1 = cw.circle_of_edge[x.edges[0]];
                    let t2 = cw.circle_of_edge[x.edges[1]];
                    if a == 0 {
                        m.push(ow + (base | (1 << t2)) as usize, col, sign);
                        m.push(ow + (base | (1 << t1)) as usize, col, sign);
                    } else {
                        m.push(ow + (base | (1 << t1) | (1 << t2)) as usize, col, sign);
                    }
                }
            }
        }
    }
    let cx = ChainComplex { n_plus, n_minus, gens, diffs };
    cx.verify_d_squared()?;
    Ok(cx)
}

impl ChainComplex {
    pub fn generators(&self, i: i64) -> &[CubeGenerator] {
        self.gens.get(&i).map_or(&[], |v| v.as_slice())
    }

    pub fn total_rank(&self) -> usize {
        self.gens.values().map(|v| v.len()).sum()
    }

    pub fn homological_range(&self) -> (i64, i64) {
        (-(self.n_minus as i64), self.n_plus as i64)
    }

    pub fn quantum_degrees(&self) -> BTreeSet<i64> {
        self.gens.values().flat_map(|v| v.iter().map(|g| g.j)).collect()
    }

    pub fn dim(&self, i: i64, j: i64) -> usize {
        self.generators(i).iter().filter(|g| g.j == j).count()
    }

    pub fn differential(&self, i: i64) -> Option<&SparseMatrix> {
        self.diffs.get(&i)
    }

    /// `d_i` restricted to quantum degree `j`.
    pub fn differential_at(&self, i: i64, j: i64) -> SparseMatrix {
        let src = self.generators(i);
        let dst = self.generators(i + 1);
        let index = |gs: &[CubeGenerator]| -> Vec<usize> {
            let mut next = 0;
            gs.iter()
                .map(|g| {
                    if g.j == j {
                        next += 1;
                        next - 1
                    } else {
                        usize::MAX
                    }
                })
                .collect()
        };
        let (si, di) = (index(src), index(dst));
        let mut m = SparseMatrix::new(
            dst.iter().filter(|g| g.j == j).count(),
            src.iter().filter(|g| g.j == j).count(),
        );
        if let Some(d) = self.diffs.get(&i) {
            for &(r, c, v) in &d.entries {
                if si[c] != usize::MAX {
                    debug_assert!(di[r] != usize::MAX, "differential changes j");
                    m.push(di[r], si[c], v);
                }
            }
        }
        m
    }

    /// Every differential entry preserves `j` and `d o d = 0`.
    pub fn verify_d_squared(&self) -> Result<(), HomologyError> {
        for (&i, d) in &self.diffs {
            let (src, dst) = (self.generators(i), self.generators(i + 1));
            for &(r, c, _) in &d.entries {
                if src[c].j != dst[r].j {
                    return Err(HomologyError::NotAComplex { degree: i });
                }
            }
            if let Some(d2) = self.diffs.get(&(i + 1)) {
                if !d2.mul(d).is_zero() {
                    return Err(HomologyError::NotAComplex { degree: i });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;
    use crate::diagram::braid_closure_diagram;

    fn cube(s: &str) -> ChainComplex {
        build_cube(&braid_closure_diagram(&parse_braid(s).unwrap())).unwrap()
    }

    #[test]
    fn unknot_complex() {
        let c = cube("1:");
        assert_eq!(c.total_rank(), 2);
        let js: Vec<i64> = c.generators(0).iter().map(|g| g.j).collect();
        assert_eq!(js, vec![1, -1]);
        assert!(c.differential(0).is_none());
    }

    #[test]
    fn unlink_complex() {
        let c = cube("2:");
        let mut js: Vec<i64> = c.generators(0).iter().map(|g| g.j).collect();
        js.sort();
        assert_eq!(js, vec![-2, 0, 0, 2]);
    }

    #[test]
    fn trefoil_complex_size() {
        let d = braid_closure_diagram(&parse_braid("2: 1 1 1").unwrap());
        let c = build_cube(&d).unwrap();
        let expect: usize = (0u64..8).map(|v| 1usize << d.smooth_bits(|k| ((v >> k) & 1) as u8).count).sum();
        assert_eq!(c.total_rank(), expect);
        // 3 circles at all-0, then 2, 1, 2 circles as crossings turn to 1
        assert_eq!(expect, 8 + 3 * 4 + 3 * 2 + 4);
        assert_eq!(c.homological_range(), (-3, 0));
    }

    #[test]
    fn d_squared_on_examples() {
        for s in ["3: 1 -2 1 -2", "3: 1 2 1 2 -1", "4: 1 2 3 -1 2", "2: 1 -1 1"] {
            assert!(cube(s).verify_d_squared().is_ok());
        }
    }
}
