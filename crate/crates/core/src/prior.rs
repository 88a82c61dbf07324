//! Surface-form priors `Pr(concept | surface)`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::corpus::{canonical_concept, normalize_token, Corpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConcept {
    pub concept: String,
    pub probability: f64,
}

/// Link counts per surface, with probabilities derived on demand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PriorTable {
    counts: BTreeMap<String, BTreeMap<String, u64>>,
    folded: BTreeMap<String, BTreeMap<String, u64>>,
}

/// Mention tokens joined by single spaces, each normalized.
pub fn surface_of<S: AsRef<str>>(tokens: &[S]) -> String {
    tokens
        .iter()
        .map(|t| normalize_token(t.as_ref()))
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

impl PriorTable {
    pub fn build(corpus: &Corpus) -> Self {
        let mut table = PriorTable::default();
        for rec in corpus.records() {
            if let Some(c) = &rec.concept {
                table.add(&rec.surface(), c, 1);
            }
        }
        table
    }

    pub fn add(&mut self, surface: &str, concept: &str, count: u64) {
        if count == 0 {
            return;
        }
        let surface = surface_of(&surface.split(' ').collect::<Vec<_>>());
        let concept = canonical_concept(concept);
        *self
            .folded
            .entry(surface.to_lowercase())
            .or_default()
            .entry(concept.clone())
            .or_insert(0) += count;
        *self.counts.entry(surface).or_default().entry(concept).or_insert(0) += count;
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self, surface: &str) -> u64 {
        self.counts.get(surface).map(|m| m.values().sum()).unwrap_or(0)
    }

    /// The distribution for an exact surface, most probable first.
    pub fn distribution(&self, surface: &str) -> Vec<SurfaceConcept> {
        self.counts.get(surface).map(to_distribution).unwrap_or_default()
    }

    /// `argmax_c Pr(c | surface)`: exact-case lookup, then casefolded.
    /// Ties go to the smaller concept id.
    pub fn surface_concept<S: AsRef<str>>(&self, mention_tokens: &[S]) -> Option<SurfaceConcept> {
        let surface = surface_of(mention_tokens);
        self.counts
            .get(&surface)
            .or_else(|| self.folded.get(&surface.to_lowercase()))
            .and_then(|m| to_distribution(m).into_iter().next())
    }

    /// `surface<TAB>concept<TAB>count` rows.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (surface, m) in &self.counts {
            for (c, n) in m {
                writeln!(out, "{surface}\t{c}\t{n}")?;
            }
        }
        Ok(())
    }

    pub fn read_tsv<R: Read>(input: R) -> Result<Self> {
        let mut table = PriorTable::default();
        for (i, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| Error::Parse {
                line: i + 1,
                column: 1,
                message: message.to_string(),
            };
            let mut cols = line.split('\t');
            let (Some(surface), Some(concept), Some(count), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(err("expected surface<TAB>concept<TAB>count"));
            };
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| err("count must be a non-negative integer"))?;
            if count == 0 {
                return Err(err("count must be positive"));
            }
            table.add(surface, concept, count);
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io_at(path, e))?;
        Self::read_tsv(f)
    }
}

fn to_distribution(m: &BTreeMap<String, u64>) -> Vec<SurfaceConcept> {
    let total: u64 = m.values().sum();
    let mut out: Vec<SurfaceConcept> = m
        .iter()
        .map(|(c, &n)| SurfaceConcept {
            concept: c.clone(),
            probability: n as f64 / total as f64,
        })
        .collect();
    // BTreeMap order is concept-ascending, so a stable sort keeps the tie-break.
    out.sort_by(|a, b| b.probability.partial_cmp(&a.probability).unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{MentionSentence, Span};

    fn rec(id: usize, surface: &[&str], concept: Option<&str>) -> MentionSentence {
        let mut tokens: Vec<String> = surface.iter().map(|s| s.to_string()).collect();
        tokens.push("said".into());
        MentionSentence {
            sentence_id: id.to_string(),
            span: Span::new(0, surface.len()),
            tokens,
            concept: concept.map(String::from),
        }
    }

    fn fixture() -> Corpus {
        Corpus::from_records(vec![
            rec(0, &["Jordan"], Some("A")),
            rec(1, &["Jordan"], Some("B")),
            rec(2, &["Jordan"], Some("A")),
            rec(3, &["Jordan"], Some("A")),
            rec(4, &["New", "York"], Some("NYC")),
            rec(5, &["Mercury"], Some("Planet")),
            rec(6, &["Mercury"], Some("Element")),
        ])
        .unwrap()
    }

    #[test]
    fn counts_to_probabilities() {
        let t = PriorTable::build(&fixture());
        let d = t.distribution("Jordan");
        assert_eq!(
            d[0],
            SurfaceConcept {
                concept: "A".into(),
                probability: 0.75
            }
        );
        assert_eq!(
            d[1],
            SurfaceConcept {
                concept: "B".into(),
                probability: 0.25
            }
        );
        assert_eq!(t.distribution("New York")[0].probability, 1.0);
        assert_eq!(t.surface_concept(&["Jordan"]).unwrap().concept, "A");
        assert_eq!(t.surface_concept(&["Jordan"]).unwrap().probability, 0.75);
    }

    #[test]
    fn unseen_and_casefold_fallback() {
        let t = PriorTable::build(&fixture());
        assert!(t.surface_concept(&["Nowhere"]).is_none());
        assert_eq!(t.surface_concept(&["new", "york"]).unwrap().concept, "NYC");
    }

    #[test]
    fn tie_goes_to_smaller_id() {
        let t = PriorTable::build(&fixture());
        let got = t.surface_concept(&["Mercury"]).unwrap();
        assert_eq!(got.concept, "Element");
        assert_eq!(got.probability, 0.5);
    }

    #[test]
    fn conceptless_corpus_is_empty() {
        let c = Corpus::from_records(vec![rec(0, &["x"], None)]).unwrap();
        assert!(PriorTable::build(&c).is_empty());
    }

    #[test]
    fn tsv_round_trip() {
        let t = PriorTable::build(&fixture());
        let mut buf = Vec::new();
        t.write_tsv(&mut buf).unwrap();
        assert_eq!(PriorTable::read_tsv(&buf[..]).unwrap(), t);
        assert!(PriorTable::read_tsv("a\tb\n".as_bytes()).is_err());
        assert!(PriorTable::read_tsv("a\tb\tx\n".as_bytes()).is_err());
    }
}
