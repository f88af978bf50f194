//! Smith normal form over the integers.
//!
//! Unit pivots are eliminated sparsely first; whatever is left is reduced as
//! a dense `i128` matrix.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// Matrix given by `(row, col, value)` triples; repeated positions add up.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn push(&mut self, r: usize, c: usize, v: i64) {
        if v != 0 {
            self.entries.push((r, c, v));
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i128>> {
        let mut d = vec![vec![0i128; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] += v as i128;
        }
        d
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_row: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
        for &(r, c, v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(r, k, v) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, w) in row {
                    *acc.entry((r, c)).or_insert(0) += v * w;
                }
            }
        }
        let mut out = SparseMatrix::new(self.rows, other.cols);
        for ((r, c), v) in acc {
            out.push(r, c, v);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(r, c, v) in &self.entries {
            *acc.entry((r, c)).or_insert(0) += v;
        }
        acc.values().all(|&v| v == 0)
    }
}

/// Rank and the elementary divisors greater than one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmithInvariants {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

pub fn smith_invariants(m: &SparseMatrix) -> SmithInvariants {
    let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); m.rows];
    for &(r, c, v) in &m.entries {
        let e = rows[r].entry(c).or_insert(0);
        *e += v;
        if *e == 0 {
            rows[r].remove(&c);
        }
    }
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (r, row) in rows.iter().enumerate() {
        for &c in row.keys() {
            cols[c].insert(r);
        }
    }
    let mut row_alive = vec![true; m.rows];
    let mut rank = 0;
    let mut divisors: Vec<u64> = Vec::new();
    // Pivots that divide their whole row and column split off a summand
    // Z/|p| without disturbing the rest; units first, then larger values.
    for units_only in [true, false] {
        loop {
            let mut progress = false;
            for c in 0..m.cols {
                let mut best: Option<(usize, i64, usize)> = None;
                for &r in &cols[c] {
                    let v = rows[r][&c];
                    let a = v.abs();
                    if units_only && a != 1 {
                        continue;
                    }
                    if best.is_some_and(|(_, b, l)| (a, rows[r].len()) >= (b, l)) {
                        continue;
                    }
                    let divides = a == 1
                        || (rows[r].values().all(|&x| x % a == 0) && cols[c].iter().all(|&q| rows[q][&c] % a == 0));
                    if divides {
                        best = Some((r, a, rows[r].len()));
                    }
                }
                let Some((pr, a, _)) = best else { continue };
                let pv = rows[pr][&c];
                let pivot_row: Vec<(usize, i64)> = rows[pr].iter().map(|(&k, &v)| (k, v)).collect();
                let others: Vec<usize> = cols[c].iter().copied().filter(|&r| r != pr).collect();
                for r in others {
                    let f = rows[r][&c] / pv;
                    for &(k, v) in &pivot_row {
                        let e = rows[r].entry(k).or_insert(0);
                        *e -= f * v;
                        if *e == 0 {
                            rows[r].remove(&k);
                            cols[k].remove(&r);
                        } else {
                            cols[k].insert(r);
                        }
                    }
                }
                for &(k, _) in &pivot_row {
                    cols[k].remove(&pr);
                }
                rows[pr].clear();
                row_alive[pr] = false;
                rank += 1;
                if a > 1 {
                    divisors.push(a as u64);
                }
                progress = true;
            }
            if !progress || units_only {
                break;
            }
        }
    }
    // dense remainder, one connected block at a time
    let live_rows: Vec<usize> = (0..m.rows).filter(|&r| row_alive[r] && !rows[r].is_empty()).collect();
    let mut torsion = divisors;
    let mut uf = crate::util::UnionFind::new(m.rows + m.cols);
    for &r in &live_rows {
        for &c in rows[r].keys() {
            uf.union(r, m.rows + c);
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &r in &live_rows {
        blocks.entry(uf.find(r)).or_default().push(r);
    }
    for block in blocks.values() {
        let mut live_cols: Vec<usize> = block.iter().flat_map(|&r| rows[r].keys().copied()).collect();
        live_cols.sort_unstable();
        live_cols.dedup();
        let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut d = vec![vec![0i128; live_cols.len()]; block.len()];
        for (i, &r) in block.iter().enumerate() {
            for (&c, &v) in &rows[r] {
                d[i][col_pos[&c]] = v as i128;
            }
        }
        for x in smith_diagonal(d) {
            rank += 1;
            let a = x.unsigned_abs();
            if a > 1 {
                torsion.push(u64::try_from(a).expect("elementary divisor overflow"));
            }
        }
    }
    SmithInvariants { rank, torsion: invariant_factors(&torsion) }
}

/// Nonzero diagonal of the Smith normal form, each dividing the next.
pub fn smith_diagonal(mut a: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block goes to (t, t);
            // every round strictly lowers |a[t][t]| or finishes the pivot
            let mut best: Option<(usize, usize, i128)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = a[i][j].abs();
                    if v != 0 && best.is_none_or(|(_, _, b)| v < b) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((bi, bj, _)) = best else { return diag };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = nearest_quotient(a[i][t], p);
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = nearest_quotient(a[t][j], p);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // p must divide the trailing block; otherwise fold an offending
            // row into row t and go again
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// `q` with `|x - q p| <= |p| / 2`.
fn nearest_quotient(x: i128, p: i128) -> i128 {
    let q = x.div_euclid(p);
    let r = x - q * p;
    if 2 * r > p.abs() {
        q + p.signum()
    } else {
        q
    }
}

/// Invariant factors `d_1 | d_2 | ...` (all `> 1`) of `sum Z/a` over `diag`.
pub fn invariant_factors(diag: &[u64]) -> Vec<u64> {
    let mut d: Vec<u64> = diag.iter().copied().filter(|&a| a > 1).collect();
    // (a, b) -> (gcd, lcm) keeps the group; after pass i, d[i] divides the rest
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = gcd(d[i], d[j]);
            d[j] *= d[i] / g;
            d[i] = g;
        }
    }
    d.retain(|&a| a > 1);
    d
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Splits `n >= 2` into its prime-power factors, ascending.
pub fn prime_power_parts(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p <= n / p {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        let mut m = SparseMatrix::new(rows.len(), rows.first().map_or(0, |r| r.len()));
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.push(i, j, v);
            }
        }
        m
    }

    #[test]
    fn small_cases() {
        let m = dense(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        // known form diag(2, 6, 12)
        assert_eq!(smith_diagonal(m.to_dense()), vec![2, 6, 12]);
        assert_eq!(smith_invariants(&m), SmithInvariants { rank: 3, torsion: vec![2, 6, 12] });
        let m = dense(&[&[1, 1], &[1, -1]]);
        assert_eq!(smith_invariants(&m), SmithInvariants { rank: 2, torsion: vec![2] });
        assert_eq!(smith_invariants(&SparseMatrix::new(3, 2)).rank, 0);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_parts(12), vec![3, 4]);
        assert_eq!(prime_power_parts(2), vec![2]);
        assert_eq!(prime_power_parts(360), vec![5, 8, 9]);
        assert_eq!(invariant_factors(&[2, 3, 4]), vec![2, 12]);
        assert_eq!(invariant_factors(&[1, 6, 2]), vec![2, 6]);
    }

    // determinant by cofactor expansion, for the oracle below
    fn det(m: &[Vec<i128>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut s = 0;
        for j in 0..n {
            let minor: Vec<Vec<i128>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            s += sign * m[0][j] * det(&minor);
        }
        s
    }

    #[test]
    fn dense_entries_stay_bounded() {
        // once overflowed i128 when the pivot was chosen only once per step
        let v = [-2, 4, 0, 3, 4, 3, -2, 6, -2, 6, 0, -2, 3, 4, 6, 0, 0, 0, 0, 0, 4, 3, 4, 0, 3, -2, 0, 0, 0, 0, 6, 4, 3, 2, 3, 0];
        let m = SparseMatrix { rows: 6, cols: 6, entries: v.iter().enumerate().map(|(k, &x)| (k / 6, k % 6, x)).collect() };
        let diag = smith_diagonal(m.to_dense());
        assert_eq!(diag.iter().product::<i128>(), det(&m.to_dense()).abs());
        assert_eq!(smith_invariants(&m).rank, diag.len());
    }

    proptest! {
        #[test]
        fn sparse_matches_dense_on_structured(v in prop::collection::vec(prop::sample::select(vec![0i64, 0, 0, 2, -2, 4, 3, 6]), 36)) {
            let m = SparseMatrix {
                rows: 6,
                cols: 6,
                entries: v.iter().enumerate().map(|(k, &x)| (k / 6, k % 6, x)).collect(),
            };
            let diag = smith_diagonal(m.to_dense());
            let inv = smith_invariants(&m);
            prop_assert_eq!(inv.rank, diag.len());
            let d: Vec<u64> = diag.iter().map(|&x| x as u64).filter(|&x| x > 1).collect();
            prop_assert_eq!(inv.torsion, d);
        }

        #[test]
        fn dense_diagonal_divides_on_larger_blocks(v in prop::collection::vec(-9i64..10, 100)) {
            let m = SparseMatrix { rows: 10, cols: 10, entries: v.iter().enumerate().map(|(k, &x)| (k / 10, k % 10, x)).collect() };
            let diag = smith_diagonal(m.to_dense());
            prop_assert!(diag.windows(2).all(|w| w[1] % w[0] == 0));
            let inv = smith_invariants(&m);
            prop_assert_eq!(inv.rank, diag.len());
            let d: Vec<u64> = diag.iter().map(|&x| x as u64).filter(|&x| x > 1).collect();
            prop_assert_eq!(inv.torsion, d);
        }

        #[test]
        fn square_determinant_matches(v in prop::collection::vec(-4i64..5, 16)) {
            let m = SparseMatrix {
                rows: 4,
                cols: 4,
                entries: v.iter().enumerate().map(|(k, &x)| (k / 4, k % 4, x)).collect(),
            };
            let d = det(&m.to_dense());
            let inv = smith_invariants(&m);
            let diag = smith_diagonal(m.to_dense());
            prop_assert_eq!(inv.rank, diag.len());
            if d != 0 {
                prop_assert_eq!(inv.rank, 4);
                let prod: i128 = inv.torsion.iter().map(|&t| t as i128).product();
                prop_assert_eq!(prod, d.abs());
            } else {
                prop_assert!(inv.rank < 4);
            }
            for w in diag.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
        }

        #[test]
        fn sparse_and_dense_agree(v in prop::collection::vec(-2i64..3, 30)) {
            let m = SparseMatrix {
                rows: 5,
                cols: 6,
                entries: v.iter().enumerate().map(|(k, &x)| (k / 6, k % 6, x)).collect(),
            };
            let diag = smith_diagonal(m.to_dense());
            let mut parts: Vec<u64> = diag.iter().filter(|&&x| x > 1).flat_map(|&x| prime_power_parts(x as u64)).collect();
            parts.sort_unstable();
            let inv = smith_invariants(&m);
            let mut parts2: Vec<u64> = inv.torsion.iter().flat_map(|&x| prime_power_parts(x)).collect();
            parts2.sort_unstable();
            prop_assert_eq!(inv.rank, diag.len());
            prop_assert_eq!(parts, parts2);
        }
    }
}
