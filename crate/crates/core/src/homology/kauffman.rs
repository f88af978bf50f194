//! Jones polynomial by the Kauffman bracket state sum.
//!
//! Independent of the homology code: it only reads crossing slots, signs and
//! free loops from the diagram.

use alloc::vec::Vec;

use super::poly::LaurentPolynomial;
use crate::diagram::LinkDiagram;
use crate::util::UnionFind;

/// `V(t) = (-A^3)^{-w} <D>` at `A = t^{-1/4}`, with exponents counting
/// powers of `t^{1/2}`.
pub fn kauffman_jones(d: &LinkDiagram) -> LaurentPolynomial {
    let n = d.crossings.len();
    assert!(n < 30, "state sum too large");
    // delta = -A^2 - A^-2, exponents in A
    let delta = LaurentPolynomial::from_terms([(2, -1), (-2, -1)]);
    // every state loop contains an edge, or is a free loop
    let max_loops = d.edge_count + d.free_loops + 1;
    let mut delta_pow: Vec<LaurentPolynomial> = Vec::with_capacity(max_loops);
    delta_pow.push(LaurentPolynomial::monomial(0, 1));
    for k in 1..max_loops {
        let next = delta_pow[k - 1].mul(&delta);
        delta_pow.push(next);
    }
    let mut bracket = LaurentPolynomial::zero();
    for state in 0u64..(1u64 << n) {
        let mut uf = UnionFind::new(d.edge_count);
        for (c, x) in d.crossings.iter().enumerate() {
            // over strand sits in slots 1 and 3; turning it counter-clockwise
            // sweeps the corners (1,2) and (3,0), and the A-smoothing opens a
            // channel between those two, leaving arcs 0-1 and 2-3
            let b = (state >> c) & 1 == 1;
            let (p, q, r, s) = if !b { (0, 1, 2, 3) } else { (0, 3, 1, 2) };
            uf.union(x.edges[p], x.edges[q]);
            uf.union(x.edges[r], x.edges[s]);
        }
        let loops = uf.count() + d.free_loops;
        let b_count = state.count_ones() as i64;
        let a_count = n as i64 - b_count;
        bracket = bracket.add(&delta_pow[loops - 1].shift(a_count - b_count));
    }
    let w: i64 = d.crossings.iter().map(|c| c.sign as i64).sum();
    // (-A^3)^{-w} = (-1)^w A^{-3w}
    let norm = LaurentPolynomial::monomial(-3 * w, if w.rem_euclid(2) == 0 { 1 } else { -1 });
    let v_a = bracket.mul(&norm);
    // A^e = t^{-e/4} = (t^{1/2})^{-e/2}
    LaurentPolynomial::from_terms(v_a.terms().map(|(e, c)| {
        assert!(e % 2 == 0, "odd power of A in a normalised bracket");
        (-e / 2, c)
    }))
}
