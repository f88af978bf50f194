use khslice_core::braid::{parse_corpus, BraidError, BraidWord};

/// The bundled corpus: links of at most 4 strands and 7 crossings.
pub const CORPUS: &str = include_str!("../data/corpus.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub braid: BraidWord,
    /// The trailing comment, if any.
    pub name: String,
}

pub fn entries(text: &str) -> Result<Vec<Entry>, (usize, BraidError)> {
    let braids = parse_corpus(text)?;
    let names = text.lines().filter_map(|line| {
        let (body, comment) = line.split_once('#').unwrap_or((line, ""));
        (!body.trim().is_empty()).then(|| comment.trim().to_string())
    });
    Ok(braids.into_iter().zip(names).map(|(braid, name)| Entry { braid, name }).collect())
}

pub fn bundled() -> Vec<Entry> {
    entries(CORPUS).expect("bundled corpus parses")
}

/// The first bundled entry with this name.
pub fn named(name: &str) -> Option<BraidWord> {
    bundled().into_iter().find(|e| e.name == name).map(|e| e.braid)
}
