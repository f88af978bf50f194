//! Khovanov reports for braid closures, the random Markov-move battery and
//! the corpus battery.

use std::collections::BTreeSet;

use khslice_core::braid::{BraidWord, MarkovMove};
use khslice_core::diagram::{braid_closure_diagram, LinkDiagram};
use khslice_core::homology::{
    collapse, jones, kauffman_jones, khovanov, les_rank_check, skein_check, BigradedAbelianGroup, Group,
    HomologyError, LaurentPolynomial,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::config::RunConfig;
use crate::corpus::Entry;
use crate::report::{Check, Report};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigradedEntry {
    pub i: i64,
    pub j: i64,
    pub rank: u64,
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapsedEntry {
    pub k: i64,
    pub rank: u64,
    pub torsion: Vec<u64>,
}

/// A Laurent polynomial in `t^{1/2}`, serialized as `{"t^(p/2)": coeff}` in
/// increasing `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jones(pub LaurentPolynomial);

impl Serialize for Jones {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.terms().map(|(p, c)| (format!("t^({p}/2)"), c)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhSummary {
    pub braid: String,
    pub strands: usize,
    pub crossings: usize,
    pub writhe: i64,
    pub components: usize,
    pub bigraded: Vec<BigradedEntry>,
    pub collapsed: Vec<CollapsedEntry>,
    pub jones: Jones,
}

pub fn guard(d: &LinkDiagram, limit: usize) -> Result<(), HomologyError> {
    let crossings = d.crossing_count();
    if crossings > limit {
        return Err(HomologyError::TooManyCrossings { crossings, limit });
    }
    Ok(())
}

/// Khovanov homology of the closure of `b`, refusing diagrams with more than
/// `limit` crossings.
pub fn closure_homology(b: &BraidWord, limit: usize) -> Result<BigradedAbelianGroup, HomologyError> {
    let d = braid_closure_diagram(b);
    guard(&d, limit)?;
    Ok(khovanov(&d))
}

pub fn summarize(b: &BraidWord, kh: &BigradedAbelianGroup) -> Result<KhSummary, HomologyError> {
    let d = braid_closure_diagram(b);
    let bigraded = kh
        .entries()
        .map(|((i, j), g)| BigradedEntry { i, j, rank: g.rank, torsion: g.torsion.clone() })
        .collect();
    let collapsed = collapse(kh)
        .entries()
        .map(|(k, g)| CollapsedEntry { k, rank: g.rank, torsion: g.torsion.clone() })
        .collect();
    Ok(KhSummary {
        braid: b.to_string(),
        strands: b.strands(),
        crossings: d.crossing_count(),
        writhe: d.writhe(),
        components: d.components(),
        bigraded,
        collapsed,
        jones: Jones(jones(kh)?),
    })
}

/// Rows of quantum degree `j` (descending), columns of homological degree
/// `i` (ascending).
pub fn table(kh: &BigradedAbelianGroup) -> Vec<String> {
    let is: BTreeSet<i64> = kh.entries().map(|((i, _), _)| i).collect();
    let js: BTreeSet<i64> = kh.entries().map(|((_, j), _)| j).collect();
    if is.is_empty() {
        return vec!["(zero)".to_string()];
    }
    let cells: Vec<Vec<String>> = js
        .iter()
        .rev()
        .map(|&j| is.iter().map(|&i| if kh.get(i, j).is_zero() { ".".to_string() } else { kh.get(i, j).to_string() }).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).chain(is.iter().map(|i| i.to_string().len())).max().unwrap_or(1);
    let label = js.iter().map(|j| j.to_string().len()).max().unwrap_or(1).max(3);
    let mut out = Vec::new();
    let mut head = format!("{:>label$} |", "j\\i");
    for i in &is {
        head.push_str(&format!(" {i:>width$}"));
    }
    out.push(head);
    for (j, row) in js.iter().rev().zip(&cells) {
        let mut line = format!("{j:>label$} |");
        for c in row {
            line.push_str(&format!(" {c:>width$}"));
        }
        out.push(line);
    }
    out
}

fn group_list<'a>(it: impl Iterator<Item = (i64, &'a Group)>) -> String {
    let parts: Vec<String> = it.map(|(k, g)| format!("{g}@{k}")).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(", ")
    }
}

pub fn kh_report(b: &BraidWord, cfg: &RunConfig) -> Result<Report, HomologyError> {
    let d = braid_closure_diagram(b);
    guard(&d, cfg.max_crossings)?;
    let kh = khovanov(&d);
    let summary = summarize(b, &kh)?;
    let mut r = Report::new(format!("kh {b}"), cfg.seed);
    r.line(format!(
        "braid {}  strands {}  crossings {}  writhe {}  components {}",
        summary.braid, summary.strands, summary.crossings, summary.writhe, summary.components
    ));
    r.line("bigraded Kh^{i,j}:");
    r.body.extend(table(&kh));
    r.line(format!("collapsed (k = i - j): {}", group_list(collapse(&kh).entries())));
    r.line(format!("Jones: {}", summary.jones.0.render("t", 2)));
    let state_sum = kauffman_jones(&d);
    r.check("jones-vs-state-sum", state_sum == summary.jones.0, format!("state sum {}", state_sum.render("t", 2)));
    let chi = collapse(&kh).euler();
    r.check(
        "euler-magnitude",
        chi.unsigned_abs() == 1u64 << summary.components,
        format!("|chi| = {} for {} component(s)", chi.unsigned_abs(), summary.components),
    );
    r.data = match serde_json::to_value(&summary).expect("serializable summary") {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("summary is a struct"),
    };
    Ok(r)
}

/// Picks a legal move: conjugation by a random generator, stabilization of
/// random sign, or destabilization when the word allows it.
pub fn random_move(rng: &mut impl Rng, b: &BraidWord) -> MarkovMove {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    match rng.gen_range(0..3) {
        0 if b.strands() > 1 => MarkovMove::Conjugate { index: rng.gen_range(1..b.strands()), sign },
        2 if b.can_destabilize() => MarkovMove::Destabilize,
        _ => MarkovMove::Stabilize(sign),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkovRun {
    pub start: String,
    pub end: String,
    pub trace: Vec<String>,
    pub equal: bool,
}

/// Applies `moves` random Markov moves to `b` and compares the homology of
/// the closures before and after.
pub fn markov_run(b: &BraidWord, moves: usize, seed: u64, limit: usize) -> Result<MarkovRun, HomologyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = b.clone();
    let mut trace = Vec::with_capacity(moves);
    for _ in 0..moves {
        let mv = random_move(&mut rng, &cur);
        cur = cur.markov_move(mv).expect("random_move only proposes legal moves");
        trace.push(format!("{mv} -> {cur}"));
    }
    let before = closure_homology(b, limit)?;
    let after = closure_homology(&cur, limit)?;
    Ok(MarkovRun { start: b.to_string(), end: cur.to_string(), trace, equal: before == after })
}

pub fn markov_report(b: &BraidWord, moves: usize, cfg: &RunConfig) -> Result<Report, HomologyError> {
    let run = markov_run(b, moves, cfg.seed, cfg.max_crossings)?;
    let mut r = Report::new(format!("markov {b} --moves {moves}"), cfg.seed);
    r.line(format!("{} -> {}", run.start, run.end));
    if !run.equal {
        for (k, t) in run.trace.iter().enumerate() {
            r.line(format!("  move {}: {t}", k + 1));
        }
    }
    r.check("homology-unchanged", run.equal, format!("{} move(s)", moves));
    r.insert("run", &run);
    Ok(r)
}

/// Homology-level properties of one corpus braid: Jones against the state
/// sum, Euler magnitude, the split unknot, orientation reversal, and (up to
/// `skein_limit` crossings) the skein and exact-sequence checks at every
/// crossing.
pub fn corpus_checks(e: &Entry, limit: usize, skein_limit: usize) -> Vec<Check> {
    let label = if e.name.is_empty() { e.braid.to_string() } else { format!("{} [{}]", e.name, e.braid) };
    let d = braid_closure_diagram(&e.braid);
    if let Err(err) = guard(&d, limit) {
        return vec![Check { name: label, passed: false, detail: err.to_string() }];
    }
    let kh = khovanov(&d);
    let mut out = Vec::new();
    let mut push = |what: &str, passed: bool, detail: String| {
        out.push(Check { name: format!("{label} {what}"), passed, detail })
    };
    match jones(&kh) {
        Ok(j) => push("jones", j == kauffman_jones(&d), j.render("t", 2)),
        Err(err) => push("jones", false, err.to_string()),
    }
    let chi = collapse(&kh).euler().unsigned_abs();
    push("euler", chi == 1 << d.components(), format!("|chi| = {chi}, {} component(s)", d.components()));
    let split = khovanov(&d.with_unknot());
    push(
        "split-unknot",
        split == kh.with_unknot() && collapse(&split) == collapse(&kh).split_by_sphere(),
        String::new(),
    );
    let reversed = khovanov(&d.reverse_all()) == kh
        && collapse(&khovanov(&braid_closure_diagram(&e.braid.reversed()))) == collapse(&kh);
    push("reversal", reversed, String::new());
    if d.crossing_count() <= skein_limit {
        let bad: Vec<usize> = (0..d.crossing_count())
            .filter(|&c| {
                let skein = skein_check(&d, c).map(|r| r.holds()).unwrap_or(false);
                let les = les_rank_check(&d, c).map(|r| r.holds()).unwrap_or(false);
                !(skein && les)
            })
            .collect();
        push("skein+les", bad.is_empty(), format!("{} crossing(s), failing {bad:?}", d.crossing_count()));
    }
    out
}

pub fn corpus_report(entries: &[Entry], cfg: &RunConfig) -> Report {
    let mut r = Report::new(format!("corpus ({} braids)", entries.len()), cfg.seed);
    let checks: Vec<Vec<Check>> = entries.par_iter().map(|e| corpus_checks(e, cfg.max_crossings, 7)).collect();
    r.extend(checks.into_iter().flatten());
    r
}
