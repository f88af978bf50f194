//! Braid words on `m` strands and Markov moves.
//!
//! The generator `s_k` is drawn as a negative crossing, so a letter with
//! sign `+1` contributes `-1` to the writhe.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// One letter `s_index^sign`, with `1 <= index <= strands - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub index: usize,
    pub sign: i8,
}

impl Letter {
    pub fn new(index: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter { index, sign }
    }

    pub fn inverse(self) -> Self {
        Letter { index: self.index, sign: -self.sign }
    }

    /// Crossing sign of this letter in a closure diagram.
    pub fn crossing_sign(self) -> i8 {
        -self.sign
    }

    fn as_int(self) -> i64 {
        self.index as i64 * self.sign as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BraidError {
    NoStrands,
    BadLetter { index: usize, strands: usize },
    Parse { token: String, reason: &'static str },
    NotDestabilizable,
    NoGenerator { index: usize, strands: usize },
}

impl fmt::Display for BraidError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BraidError::NoStrands => write!(f, "a braid needs at least one strand"),
            BraidError::BadLetter { index, strands } => {
                write!(f, "generator index {index} out of range for {strands} strands")
            }
            BraidError::Parse { token, reason } => write!(f, "bad token `{token}`: {reason}"),
            BraidError::NotDestabilizable => {
                write!(f, "word does not end in a lone s_(m-1)^(+-1); cannot destabilize")
            }
            BraidError::NoGenerator { index, strands } => {
                write!(f, "no generator s_{index} in the braid group on {strands} strands")
            }
        }
    }
}

impl core::error::Error for BraidError {}

/// A word in the braid group on `strands` strands. Words are kept as
/// written; [`BraidWord::free_reduce`] is the only normalisation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

/// Permutation of strand positions (`perm[p]` is where the strand starting
/// at `p` ends, 0-based) and its number of cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosurePermutation {
    pub perm: Vec<usize>,
    pub components: usize,
}

impl ClosurePermutation {
    pub fn identity(m: usize) -> Self {
        ClosurePermutation { perm: (0..m).collect(), components: m }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &ClosurePermutation) -> ClosurePermutation {
        assert_eq!(self.perm.len(), other.perm.len());
        let perm: Vec<usize> = self.perm.iter().map(|&p| other.perm[p]).collect();
        let components = count_cycles(&perm);
        ClosurePermutation { perm, components }
    }
}

pub(crate) fn count_cycles(perm: &[usize]) -> usize {
    let mut seen = alloc::vec![false; perm.len()];
    let mut cycles = 0;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        cycles += 1;
        let mut p = s;
        while !seen[p] {
            seen[p] = true;
            p = perm[p];
        }
    }
    cycles
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkovMove {
    /// `s_k^{-sign} b s_k^{sign}`.
    Conjugate { index: usize, sign: i8 },
    /// Add a strand and append `s_m^{sign}`.
    Stabilize(i8),
    Destabilize,
}

impl fmt::Display for MarkovMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MarkovMove::Conjugate { index, sign } => {
                write!(f, "conjugate({index},{})", if sign > 0 { '+' } else { '-' })
            }
            MarkovMove::Stabilize(s) => write!(f, "stabilize({})", if s > 0 { '+' } else { '-' }),
            MarkovMove::Destabilize => write!(f, "destabilize"),
        }
    }
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        for l in &letters {
            if l.index == 0 || l.index >= strands || (l.sign != 1 && l.sign != -1) {
                return Err(BraidError::BadLetter { index: l.index, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Builds a word from signed integers (`k` is `s_k`, `-k` its inverse).
    pub fn from_ints(strands: usize, ints: &[i64]) -> Result<Self, BraidError> {
        let mut letters = Vec::with_capacity(ints.len());
        for &k in ints {
            if k == 0 {
                return Err(BraidError::Parse { token: "0".to_string(), reason: "zero is not a generator" });
            }
            letters.push(Letter::new(k.unsigned_abs() as usize, if k > 0 { 1 } else { -1 }));
        }
        BraidWord::new(strands, letters)
    }

    pub fn identity(strands: usize) -> Self {
        BraidWord::new(strands, Vec::new()).expect("positive strand count")
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_ints(&self) -> Vec<i64> {
        self.letters.iter().map(|l| l.as_int()).collect()
    }

    /// Sum of crossing signs of the closure: `-(sum of letter signs)`.
    pub fn writhe(&self) -> i64 {
        -self.letters.iter().map(|l| l.sign as i64).sum::<i64>()
    }

    pub fn closure_permutation(&self) -> ClosurePermutation {
        let mut at: Vec<usize> = (0..self.strands).collect(); // at[p] = strand now at p
        for l in &self.letters {
            at.swap(l.index - 1, l.index);
        }
        let mut perm = alloc::vec![0; self.strands];
        for (p, &s) in at.iter().enumerate() {
            perm[s] = p;
        }
        let components = count_cycles(&perm);
        ClosurePermutation { perm, components }
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        BraidWord { strands: self.strands, letters: out }
    }

    pub fn is_freely_equal(&self, other: &BraidWord) -> bool {
        self.strands == other.strands && self.free_reduce().letters == other.free_reduce().letters
    }

    /// Same letters on `2m` strands.
    pub fn double(&self) -> BraidWord {
        BraidWord { strands: 2 * self.strands, letters: self.letters.clone() }
    }

    /// The word read backwards.
    pub fn reversed(&self) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.reverse();
        BraidWord { strands: self.strands, letters }
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Concatenation `self * other` (left to right).
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands, "strand counts differ");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands, letters }
    }

    /// Embeds into more strands, adding trivial strands on top.
    pub fn widen(&self, strands: usize) -> BraidWord {
        assert!(strands >= self.strands);
        BraidWord { strands, letters: self.letters.clone() }
    }

    /// Whether [`MarkovMove::Destabilize`] applies.
    pub fn can_destabilize(&self) -> bool {
        if self.strands < 2 {
            return false;
        }
        let r = self.free_reduce();
        let top = self.strands - 1;
        match r.letters.last() {
            Some(l) if l.index == top => r.letters.iter().filter(|l| l.index == top).count() == 1,
            _ => false,
        }
    }

    pub fn markov_move(&self, mv: MarkovMove) -> Result<BraidWord, BraidError> {
        match mv {
            MarkovMove::Conjugate { index, sign } => {
                if index == 0 || index >= self.strands {
                    return Err(BraidError::NoGenerator { index, strands: self.strands });
                }
                let l = Letter::new(index, if sign > 0 { 1 } else { -1 });
                let mut letters = Vec::with_capacity(self.letters.len() + 2);
                letters.push(l.inverse());
                letters.extend_from_slice(&self.letters);
                letters.push(l);
                Ok(BraidWord { strands: self.strands, letters })
            }
            MarkovMove::Stabilize(sign) => {
                let mut letters = self.letters.clone();
                letters.push(Letter::new(self.strands, if sign > 0 { 1 } else { -1 }));
                Ok(BraidWord { strands: self.strands + 1, letters })
            }
            MarkovMove::Destabilize => {
                if !self.can_destabilize() {
                    return Err(BraidError::NotDestabilizable);
                }
                // keep the word as written when it already has the required shape
                let top = self.strands - 1;
                let raw_ok = self.letters.last().map(|l| l.index) == Some(top)
                    && self.letters.iter().filter(|l| l.index == top).count() == 1;
                let mut r = if raw_ok { self.clone() } else { self.free_reduce() };
                r.letters.pop();
                r.strands -= 1;
                Ok(r)
            }
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.strands)?;
        for l in &self.letters {
            write!(f, " {}", l.as_int())?;
        }
        Ok(())
    }
}

/// Parses `"m: k1 k2 ..."`; the `m:` header is optional and defaults to
/// `1 + max |k|`.
pub fn parse_braid(text: &str) -> Result<BraidWord, BraidError> {
    let text = text.trim();
    let (header, body) = match text.find(':') {
        Some(pos) => (Some(text[..pos].trim()), &text[pos + 1..]),
        None => (None, text),
    };
    let mut ints = Vec::new();
    for tok in body.split_whitespace() {
        let k: i64 = tok
            .parse()
            .map_err(|_| BraidError::Parse { token: tok.to_string(), reason: "not an integer" })?;
        if k == 0 {
            return Err(BraidError::Parse { token: tok.to_string(), reason: "zero is not a generator" });
        }
        ints.push((tok, k));
    }
    let strands = match header {
        Some(h) => {
            let m: usize = h
                .parse()
                .map_err(|_| BraidError::Parse { token: h.to_string(), reason: "bad strand count" })?;
            if m == 0 {
                return Err(BraidError::Parse { token: h.to_string(), reason: "strand count must be positive" });
            }
            m
        }
        None => 1 + ints.iter().map(|(_, k)| k.unsigned_abs() as usize).max().unwrap_or(0),
    };
    for (tok, k) in &ints {
        if k.unsigned_abs() as usize >= strands {
            return Err(BraidError::Parse {
                token: tok.to_string(),
                reason: "generator index must be below the strand count",
            });
        }
    }
    let ks: Vec<i64> = ints.into_iter().map(|(_, k)| k).collect();
    BraidWord::from_ints(strands, &ks)
}

/// One braid per non-empty line; `#` starts a comment. Errors carry the
/// 1-based line number.
pub fn parse_corpus(text: &str) -> Result<Vec<BraidWord>, (usize, BraidError)> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_braid(line).map_err(|e| (n + 1, e))?);
    }
    Ok(out)
}

/// Display helper used in reports: `s1 s2^-1 ...`.
pub fn describe(b: &BraidWord) -> String {
    if b.letters.is_empty() {
        return format!("identity in Br_{}", b.strands);
    }
    let parts: Vec<String> = b
        .letters
        .iter()
        .map(|l| if l.sign > 0 { format!("s{}", l.index) } else { format!("s{}^-1", l.index) })
        .collect();
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let t = parse_braid("2: 1 1 1").unwrap();
        assert_eq!(t.strands(), 2);
        assert_eq!(t.to_ints(), vec![1, 1, 1]);
        let u = parse_braid("1:").unwrap();
        assert_eq!((u.strands(), u.len()), (1, 0));
        let f = parse_braid("3: 1 -2 1").unwrap();
        assert_eq!(f.letters(), &[Letter::new(1, 1), Letter::new(2, -1), Letter::new(1, 1)]);
        assert_eq!(parse_braid("1 -3").unwrap().strands(), 4);
    }

    #[test]
    fn parse_errors_name_token() {
        match parse_braid("3: 1 0 2") {
            Err(BraidError::Parse { token, .. }) => assert_eq!(token, "0"),
            other => panic!("{other:?}"),
        }
        match parse_braid("2: 1 -2") {
            Err(BraidError::Parse { token, .. }) => assert_eq!(token, "-2"),
            other => panic!("{other:?}"),
        }
        assert!(parse_braid("2: 1 x").is_err());
        assert!(parse_braid("0:").is_err());
    }

    #[test]
    fn corpus_comments() {
        let c = parse_corpus("# knots\n2: 1 1 1  # trefoil\n\n1:\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(parse_corpus("1:\n2: 5").unwrap_err().0, 2);
    }

    #[test]
    fn writhe_examples() {
        assert_eq!(parse_braid("2: 1 1 1").unwrap().writhe(), -3);
        assert_eq!(BraidWord::identity(4).writhe(), 0);
        assert_eq!(parse_braid("3: 1 -2").unwrap().writhe(), 0);
    }

    #[test]
    fn permutation_examples() {
        let p = parse_braid("2: 1 1 1").unwrap().closure_permutation();
        assert_eq!((p.perm.clone(), p.components), (vec![1, 0], 1));
        assert_eq!(parse_braid("2: 1 1").unwrap().closure_permutation().components, 2);
        assert_eq!(BraidWord::identity(1).closure_permutation().components, 1);
    }

    #[test]
    fn markov_examples() {
        let u = BraidWord::identity(1);
        assert_eq!(u.markov_move(MarkovMove::Stabilize(1)).unwrap(), parse_braid("2: 1").unwrap());
        let t = parse_braid("2: 1 1 1").unwrap();
        let c = t.markov_move(MarkovMove::Conjugate { index: 1, sign: 1 }).unwrap();
        assert_eq!(c.to_ints(), vec![-1, 1, 1, 1, 1]);
        assert_eq!(c.free_reduce(), t);
        let d = parse_braid("2: 1").unwrap().markov_move(MarkovMove::Destabilize).unwrap();
        assert_eq!(d, BraidWord::identity(1));
        assert_eq!(t.markov_move(MarkovMove::Destabilize), Err(BraidError::NotDestabilizable));
        assert!(u.markov_move(MarkovMove::Conjugate { index: 1, sign: 1 }).is_err());
        // top generator occurs twice
        let w = parse_braid("3: 2 1 2").unwrap();
        assert!(!w.can_destabilize());
        let w = parse_braid("3: 1 -1 2").unwrap();
        assert_eq!(w.markov_move(MarkovMove::Destabilize).unwrap(), parse_braid("2: 1 -1").unwrap());
        let w = parse_braid("3: 2 1 -1").unwrap();
        assert_eq!(w.markov_move(MarkovMove::Destabilize).unwrap(), BraidWord::identity(2));
    }

    #[test]
    fn double_examples() {
        let t = parse_braid("2: 1 1 1").unwrap().double();
        assert_eq!((t.strands(), t.to_ints()), (4, vec![1, 1, 1]));
        assert_eq!(BraidWord::identity(1).double(), BraidWord::identity(2));
        assert_eq!(parse_braid("3: 2").unwrap().double().strands(), 6);
    }

    #[test]
    fn display_round_trip() {
        let b = parse_braid("4: 1 -3 2").unwrap();
        assert_eq!(b.to_string(), "4: 1 -3 2");
        assert_eq!(parse_braid(&b.to_string()).unwrap(), b);
        assert_eq!(describe(&b), "s1 s3^-1 s2");
    }

    fn word() -> impl Strategy<Value = BraidWord> {
        (1usize..6).prop_flat_map(|m| {
            let letter = if m < 2 {
                Just(Vec::new()).boxed()
            } else {
                prop::collection::vec((1..m, prop::bool::ANY), 0..10)
                    .prop_map(|v| {
                        v.into_iter().map(|(k, s)| Letter::new(k, if s { 1 } else { -1 })).collect()
                    })
                    .boxed()
            };
            letter.prop_map(move |ls| BraidWord::new(m, ls).unwrap())
        })
    }

    proptest! {
        #[test]
        fn conjugation_round_trip(b in word(), k in 1usize..6, s in prop::bool::ANY) {
            prop_assume!(k < b.strands());
            let sign = if s { 1 } else { -1 };
            let c = b.markov_move(MarkovMove::Conjugate { index: k, sign }).unwrap();
            let back = c.markov_move(MarkovMove::Conjugate { index: k, sign: -sign }).unwrap();
            prop_assert!(back.is_freely_equal(&b));
        }

        #[test]
        fn stabilize_destabilize(b in word(), s in prop::bool::ANY) {
            let st = b.markov_move(MarkovMove::Stabilize(if s { 1 } else { -1 })).unwrap();
            prop_assert_eq!(st.markov_move(MarkovMove::Destabilize).unwrap(), b);
        }

        #[test]
        fn permutation_is_monoid_map(a in word(), b in word()) {
            let m = a.strands().max(b.strands());
            let (a, b) = (a.widen(m), b.widen(m));
            let ab = a.concat(&b).closure_permutation();
            prop_assert_eq!(ab, a.closure_permutation().then(&b.closure_permutation()));
        }

        #[test]
        fn doubling_laws(b in word()) {
            let d = b.double();
            prop_assert_eq!(d.writhe(), b.writhe());
            prop_assert_eq!(
                d.closure_permutation().components,
                b.closure_permutation().components + b.strands()
            );
        }

        #[test]
        fn parse_display_round_trip(b in word()) {
            prop_assert_eq!(parse_braid(&b.to_string()).unwrap(), b);
        }
    }
}
