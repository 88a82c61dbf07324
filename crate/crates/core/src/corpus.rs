//! Mention corpora, concept type tables and query files.
//!
//! Corpora arrive pre-tokenized as JSON lines; nothing in here splits raw
//! text. Tokens are NFC-normalized and trimmed on load, case is preserved.
//! The only casefolding point is [`word_key`], which feeds document
//! frequencies and the ESA index.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Half-open token span `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `0 <= start < end <= n_tokens`
    pub fn is_valid_for(&self, n_tokens: usize) -> bool {
        self.start < self.end && self.end <= n_tokens
    }
}

/// A sentence with one mention span and, in training corpora, the concept it links to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MentionSentence {
    pub sentence_id: String,
    pub tokens: Vec<String>,
    #[serde(rename = "mention")]
    pub span: Span,
    #[serde(default)]
    pub concept: Option<String>,
}

impl MentionSentence {
    pub fn mention_tokens(&self) -> &[String] {
        &self.tokens[self.span.start..self.span.end]
    }

    /// Mention tokens joined by single spaces.
    pub fn surface(&self) -> String {
        self.mention_tokens().join(" ")
    }

    fn normalize(&mut self) -> Result<()> {
        for tok in self.tokens.iter_mut() {
            *tok = normalize_token(tok);
            if tok.is_empty() {
                return Err(Error::Validation(format!(
                    "sentence {}: empty token after normalization",
                    self.sentence_id
                )));
            }
        }
        if !self.span.is_valid_for(self.tokens.len()) {
            return Err(Error::Validation(format!(
                "sentence {}: mention span ({}, {}) out of range for {} tokens",
                self.sentence_id,
                self.span.start,
                self.span.end,
                self.tokens.len()
            )));
        }
        if let Some(c) = self.concept.as_mut() {
            *c = canonical_concept(c);
            if c.is_empty() {
                return Err(Error::Validation(format!(
                    "sentence {}: empty concept identifier",
                    self.sentence_id
                )));
            }
        }
        Ok(())
    }
}

/// A query or gold mention: the corpus line format plus optional gold types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryMention {
    #[serde(flatten)]
    pub sentence: MentionSentence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_types: Option<Vec<String>>,
}

/// Sentence count and per-word document frequency.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusStats {
    pub n_sentences: usize,
    pub df: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn df(&self, word: &str) -> usize {
        self.df.get(word).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    records: Vec<MentionSentence>,
    by_concept: BTreeMap<String, Vec<usize>>,
    stats: CorpusStats,
}

impl Corpus {
    /// Validates and indexes a set of records.
    pub fn from_records(records: Vec<MentionSentence>) -> Result<Self> {
        let mut corpus = Corpus::default();
        let mut seen = HashSet::new();
        for mut rec in records {
            rec.normalize()?;
            if !seen.insert(rec.sentence_id.clone()) {
                return Err(Error::Validation(format!("duplicate sentence_id {}", rec.sentence_id)));
            }
            corpus.push_indexed(rec);
        }
        Ok(corpus)
    }

    fn push_indexed(&mut self, rec: MentionSentence) {
        let idx = self.records.len();
        if let Some(c) = &rec.concept {
            self.by_concept.entry(c.clone()).or_default().push(idx);
        }
        let words: BTreeSet<String> = rec.tokens.iter().map(|t| word_key(t)).collect();
        for w in words {
            *self.stats.df.entry(w).or_insert(0) += 1;
        }
        self.stats.n_sentences += 1;
        self.records.push(rec);
    }

    pub fn records(&self) -> &[MentionSentence] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn stats(&self) -> &CorpusStats {
        &self.stats
    }

    pub fn by_concept(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.by_concept
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.by_concept.keys().map(String::as_str)
    }

    /// Records linked to `concept`, in corpus order.
    pub fn sentences_of_concept(&self, concept: &str) -> Vec<&MentionSentence> {
        self.by_concept
            .get(concept)
            .map(|ix| ix.iter().map(|&i| &self.records[i]).collect())
            .unwrap_or_default()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Reads a corpus from JSON lines. Blank lines are skipped.
pub fn read_corpus<R: Read>(reader: R) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    let mut seen = HashSet::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut rec: MentionSentence = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        rec.normalize()?;
        if !seen.insert(rec.sentence_id.clone()) {
            return Err(Error::Validation(format!("duplicate sentence_id {}", rec.sentence_id)));
        }
        corpus.push_indexed(rec);
    }
    Ok(corpus)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io_at(path, e))?;
    read_corpus(f)
}

/// Reads query or gold mentions. Unlike corpora, duplicate ids are allowed.
pub fn read_queries<R: Read>(reader: R) -> Result<Vec<QueryMention>> {
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut q: QueryMention = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        q.sentence.normalize()?;
        if let Some(gold) = q.gold_types.as_mut() {
            for t in gold.iter_mut() {
                *t = normalize_token(t);
            }
        }
        out.push(q);
    }
    Ok(out)
}

pub fn load_queries(path: impl AsRef<Path>) -> Result<Vec<QueryMention>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io_at(path, e))?;
    read_queries(f)
}

/// Concept → primitive type paths.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConceptTypeTable {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl ConceptTypeTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a concept row, validating and lowercasing its types.
    pub fn insert<I, S>(&mut self, concept: &str, types: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let concept = canonical_concept(concept);
        if self.entries.contains_key(&concept) {
            return Err(Error::Validation(format!("duplicate concept row: {concept}")));
        }
        let mut set = BTreeSet::new();
        for t in types {
            let t = t.as_ref().trim();
            if t.is_empty() {
                continue;
            }
            if !t.starts_with('/') || t.chars().any(char::is_whitespace) {
                return Err(Error::Validation(format!(
                    "concept {concept}: malformed primitive type {t:?}"
                )));
            }
            set.insert(t.to_lowercase());
        }
        self.entries.insert(concept, set);
        Ok(())
    }

    pub fn get(&self, concept: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(concept)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (c, ts) in &self.entries {
            let joined: Vec<&str> = ts.iter().map(String::as_str).collect();
            writeln!(out, "{c}\t{}", joined.join(","))?;
        }
        Ok(())
    }
}

pub fn read_concept_types<R: Read>(reader: R) -> Result<ConceptTypeTable> {
    let mut table = ConceptTypeTable::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (concept, types) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: lineno + 1,
            column: 1,
            message: "expected concept<TAB>types".into(),
        })?;
        let concept = concept.trim();
        if concept.is_empty() {
            return Err(Error::Parse {
                line: lineno + 1,
                column: 1,
                message: "empty concept".into(),
            });
        }
        table.insert(concept, types.split(','))?;
    }
    Ok(table)
}

pub fn load_concept_types(path: impl AsRef<Path>) -> Result<ConceptTypeTable> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io_at(path, e))?;
    read_concept_types(f)
}

/// NFC-normalizes and trims a token. Case is preserved.
pub fn normalize_token(raw: &str) -> String {
    raw.nfc().collect::<String>().trim().to_string()
}

/// Casefolded word key used for document frequencies and the ESA index.
pub fn word_key(token: &str) -> String {
    normalize_token(token).to_lowercase()
}

/// Canonical concept id: NFC, trimmed, inner spaces replaced by underscores.
pub fn canonical_concept(raw: &str) -> String {
    normalize_token(raw).replace(' ', "_")
}
