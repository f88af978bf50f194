//! Khovanov homology over the integers, the Jones polynomial, and the
//! collapsed single grading `k = i - j`.
//!
//! Conventions: `V = Z{1, X}` with `deg 1 = +1`, `deg X = -1`; vertex `v`
//! of the cube sits in `i = |v| - n_-` and a generator has
//! `j = deg + |v| + n_+ - 2 n_-`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::LinkDiagram;

mod bar_natan;
mod cube;
mod kauffman;
pub mod poly;
mod skein;
pub mod snf;

pub use bar_natan::khovanov_scan;
pub use cube::{build_cube, ChainComplex, CubeGenerator};
pub use kauffman::kauffman_jones;
pub use poly::LaurentPolynomial;
pub use skein::{les_rank_check, skein_check, LesReport, SkeinReport};

/// A finitely generated abelian group `Z^rank + sum Z/t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Group {
    pub rank: u64,
    /// Prime-power orders, ascending.
    pub torsion: Vec<u64>,
}

impl Group {
    pub fn free(rank: u64) -> Self {
        Group { rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Group) -> Group {
        let mut torsion = self.torsion.clone();
        torsion.extend_from_slice(&other.torsion);
        torsion.sort_unstable();
        Group { rank: self.rank + other.rank, torsion }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<alloc::string::String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(alloc::format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let t = self.torsion[i];
            let mut n = 1;
            while i + n < self.torsion.len() && self.torsion[i + n] == t {
                n += 1;
            }
            if n == 1 {
                parts.push(alloc::format!("Z/{t}"));
            } else {
                parts.push(alloc::format!("(Z/{t})^{n}"));
            }
            i += n;
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `(i, j) -> group`, zero entries omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigradedAbelianGroup {
    entries: BTreeMap<(i64, i64), Group>,
}

impl BigradedAbelianGroup {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `g` to the entry at `(i, j)`.
    pub fn add(&mut self, i: i64, j: i64, g: Group) {
        if g.is_zero() {
            return;
        }
        let e = self.entries.entry((i, j)).or_default();
        *e = e.direct_sum(&g);
    }

    pub fn get(&self, i: i64, j: i64) -> Group {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((i64, i64), &Group)> + '_ {
        self.entries.iter().map(|(&k, g)| (k, g))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rank of the rational homology at `(i, j)`.
    pub fn dim(&self, i: i64, j: i64) -> u64 {
        self.entries.get(&(i, j)).map_or(0, |g| g.rank)
    }

    /// `sum (-1)^i q^j rank`.
    pub fn euler_q(&self) -> LaurentPolynomial {
        let mut p = LaurentPolynomial::zero();
        for (&(i, j), g) in &self.entries {
            let s = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(j, s * g.rank as i64);
        }
        p
    }

    /// Tensor with the homology of an unknot (`Z` at `(0, +-1)`), which is
    /// the homology of the split union with an unknot.
    pub fn with_unknot(&self) -> BigradedAbelianGroup {
        let mut r = BigradedAbelianGroup::new();
        for (&(i, j), g) in &self.entries {
            r.add(i, j + 1, g.clone());
            r.add(i, j - 1, g.clone());
        }
        r
    }
}

/// `k -> group`, zero entries omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedAbelianGroup {
    entries: BTreeMap<i64, Group>,
}

impl GradedAbelianGroup {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, k: i64, g: Group) {
        if g.is_zero() {
            return;
        }
        let e = self.entries.entry(k).or_default();
        *e = e.direct_sum(&g);
    }

    pub fn get(&self, k: i64) -> Group {
        self.entries.get(&k).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, &Group)> + '_ {
        self.entries.iter().map(|(&k, g)| (k, g))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum (-1)^k rank_k`.
    pub fn euler(&self) -> i64 {
        self.entries.iter().map(|(&k, g)| if k.rem_euclid(2) == 0 { g.rank as i64 } else { -(g.rank as i64) }).sum()
    }

    /// Each summand at `k` copied to `k - 1` and `k + 1`.
    pub fn split_by_sphere(&self) -> GradedAbelianGroup {
        let mut r = GradedAbelianGroup::new();
        for (&k, g) in &self.entries {
            r.add(k - 1, g.clone());
            r.add(k + 1, g.clone());
        }
        r
    }
}

/// Direct sum over `i - j = k`.
pub fn collapse(kh: &BigradedAbelianGroup) -> GradedAbelianGroup {
    let mut r = GradedAbelianGroup::new();
    for ((i, j), g) in kh.entries() {
        r.add(i - j, g.clone());
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomologyError {
    /// `d o d != 0` in the given homological degree.
    NotAComplex { degree: i64 },
    /// Euler characteristic not divisible by `q + q^{-1}`.
    InexactDivision,
    TooManyCrossings { crossings: usize, limit: usize },
    BadCrossing(crate::diagram::DiagramError),
}

impl fmt::Display for HomologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomologyError::NotAComplex { degree } => write!(f, "d^2 != 0 starting in degree {degree}"),
            HomologyError::InexactDivision => write!(f, "graded Euler characteristic not divisible by q + 1/q"),
            HomologyError::TooManyCrossings { crossings, limit } => {
                write!(f, "{crossings} crossings exceeds the limit of {limit}")
            }
            HomologyError::BadCrossing(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for HomologyError {}

/// Jones polynomial from the graded Euler characteristic, divided by
/// `q + q^{-1}` and evaluated at `q = -t^{1/2}`. Exponents of the result
/// count powers of `t^{1/2}`.
pub fn jones(kh: &BigradedAbelianGroup) -> Result<LaurentPolynomial, HomologyError> {
    let chi = kh.euler_q();
    let r = chi.div_x_plus_inv().ok_or(HomologyError::InexactDivision)?;
    Ok(q_to_t(&r))
}

/// `q^n -> (-1)^n t^{n/2}`.
pub(crate) fn q_to_t(p: &LaurentPolynomial) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(p.terms().map(|(e, c)| (e, if e.rem_euclid(2) == 0 { c } else { -c })))
}

/// Khovanov homology of a diagram by the scanning engine.
pub fn khovanov(d: &LinkDiagram) -> BigradedAbelianGroup {
    khovanov_scan(d)
}

/// Khovanov homology through the full cube of resolutions.
pub fn khovanov_cube(d: &LinkDiagram) -> Result<BigradedAbelianGroup, HomologyError> {
    integral_homology(&build_cube(d)?)
}

/// Homology of a cube complex, one quantum degree at a time.
pub fn integral_homology(c: &ChainComplex) -> Result<BigradedAbelianGroup, HomologyError> {
    c.verify_d_squared()?;
    let mut out = BigradedAbelianGroup::new();
    for j in c.quantum_degrees() {
        let (lo, hi) = c.homological_range();
        // smith invariants of d_i restricted to degree j, for i in lo-1..=hi
        let mut inv: BTreeMap<i64, snf::SmithInvariants> = BTreeMap::new();
        for i in lo..hi {
            inv.insert(i, snf::smith_invariants(&c.differential_at(i, j)));
        }
        for i in lo..=hi {
            let dim = c.dim(i, j) as u64;
            if dim == 0 {
                continue;
            }
            let out_rank = inv.get(&i).map_or(0, |s| s.rank) as u64;
            let (in_rank, tors) = inv.get(&(i - 1)).map_or((0, Vec::new()), |s| (s.rank as u64, s.torsion.clone()));
            let mut torsion: Vec<u64> = tors.into_iter().flat_map(snf::prime_power_parts).collect();
            torsion.sort_unstable();
            out.add(i, j, Group { rank: dim - out_rank - in_rank, torsion });
        }
    }
    Ok(out)
}
