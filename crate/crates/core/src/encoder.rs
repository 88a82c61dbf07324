//! Mention-aware sentence vectors, concept centroids and consistency re-ranking.
//!
//! A sentence is encoded with its mention tokens joined by `_` into a single
//! token. Two backends ship: [`HashingEncoder`], a deterministic feature-hashing
//! encoder that needs no model files, and [`PrecomputedEncoder`], which serves
//! vectors produced elsewhere (e.g. by a contextual language model) from a
//! vector file keyed by sentence id.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::corpus::{Corpus, Span};
use crate::error::{Error, Result};
use crate::esa::ScoredConcept;
use crate::io::{BinReader, BinWriter};

pub const DEFAULT_ELL_ELMO: usize = 20;
pub const HASHING_DIM: usize = 256;

const VECTOR_MAGIC: &[u8; 4] = b"TGVF";
const VECTOR_VERSION: u32 = 1;
const REPS_MAGIC: &[u8; 4] = b"TGCR";
const REPS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(pub Vec<f32>);

impl DenseVector {
    pub fn zeros(dim: usize) -> Self {
        DenseVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

/// Cosine similarity; 0 when either vector is all zeros.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

/// Joins the mention tokens with `_`. Returns the new sequence and the
/// position of the joined token.
pub fn join_mention(tokens: &[String], span: Span) -> Result<(Vec<String>, usize)> {
    if !span.is_valid_for(tokens.len()) {
        return Err(Error::Validation(format!(
            "mention span ({}, {}) out of range for {} tokens",
            span.start,
            span.end,
            tokens.len()
        )));
    }
    let mut out = Vec::with_capacity(tokens.len() - span.len() + 1);
    out.extend_from_slice(&tokens[..span.start]);
    out.push(tokens[span.start..span.end].join("_"));
    out.extend_from_slice(&tokens[span.end..]);
    Ok((out, span.start))
}

pub trait EncoderBackend: Send + Sync {
    fn dim(&self) -> usize;

    /// Encodes a mention-joined token sequence. `key` identifies the sentence
    /// for backends that serve precomputed vectors.
    fn encode(&self, key: &str, tokens: &[String], mention: usize) -> Result<DenseVector>;
}

/// `SentRep(s|m)`.
pub fn sent_rep(backend: &dyn EncoderBackend, key: &str, tokens: &[String], span: Span) -> Result<DenseVector> {
    let (joined, mention) = join_mention(tokens, span)?;
    backend.encode(key, &joined, mention)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Signed feature hashing of casefolded tokens, weighted by distance to the
/// mention and L2-normalized.
#[derive(Debug, Clone)]
pub struct HashingEncoder {
    dim: usize,
}

impl Default for HashingEncoder {
    fn default() -> Self {
        HashingEncoder { dim: HASHING_DIM }
    }
}

impl HashingEncoder {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "encoder dimension must be positive");
        HashingEncoder { dim }
    }
}

impl EncoderBackend for HashingEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, _key: &str, tokens: &[String], mention: usize) -> Result<DenseVector> {
        let mut acc = vec![0.0f64; self.dim];
        for (i, tok) in tokens.iter().enumerate() {
            let h = fnv1a64(tok.to_lowercase().as_bytes());
            let idx = (h % self.dim as u64) as usize;
            let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
            let weight = if i == mention {
                2.0
            } else {
                1.0 / (1.0 + i.abs_diff(mention) as f64)
            };
            acc[idx] += sign * weight;
        }
        let norm = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            acc.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(DenseVector(acc.into_iter().map(|x| x as f32).collect()))
    }
}

/// Vectors looked up by sentence id.
#[derive(Debug, Clone, Default)]
pub struct PrecomputedEncoder {
    dim: usize,
    vectors: HashMap<String, DenseVector>,
}

impl PrecomputedEncoder {
    pub fn new(dim: usize) -> Self {
        PrecomputedEncoder {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn insert(&mut self, key: impl Into<String>, v: DenseVector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::Validation(format!(
                "vector dimension {} does not match {}",
                v.dim(),
                self.dim
            )));
        }
        if v.0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("non-finite vector component".into()));
        }
        self.vectors.insert(key.into(), v);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        let mut keys: Vec<&String> = self.vectors.keys().collect();
        keys.sort();
        let mut w = BinWriter::new(out);
        w.bytes(VECTOR_MAGIC)?;
        w.u32(VECTOR_VERSION)?;
        w.u32(self.dim as u32)?;
        w.u64(keys.len() as u64)?;
        for k in keys {
            w.str(k)?;
            for &x in &self.vectors[k].0 {
                w.f32(x)?;
            }
        }
        w.flush()
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let mut r = BinReader::new(input);
        r.expect_magic(VECTOR_MAGIC)?;
        let version = r.u32()?;
        if version != VECTOR_VERSION {
            return Err(Error::Format(format!("unsupported vector file version {version}")));
        }
        let dim = r.u32()? as usize;
        let count = r.u64()?;
        let mut enc = PrecomputedEncoder::new(dim);
        for _ in 0..count {
            let key = r.str()?;
            let v = (0..dim).map(|_| r.f32()).collect::<Result<Vec<_>>>()?;
            enc.insert(key, DenseVector(v))?;
        }
        r.expect_eof()?;
        Ok(enc)
    }

    /// `key<TAB>space-separated floats` per line.
    pub fn read_tsv<R: Read>(input: R) -> Result<Self> {
        let mut enc: Option<PrecomputedEncoder> = None;
        for (i, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: i + 1,
                column: 1,
                message,
            };
            let (key, rest) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected key<TAB>values".into()))?;
            let values = rest
                .split_whitespace()
                .map(|x| x.parse::<f32>().map_err(|e| parse_err(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let enc = enc.get_or_insert_with(|| PrecomputedEncoder::new(values.len()));
            enc.insert(key, DenseVector(values))
                .map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(enc.unwrap_or_default())
    }

    /// Detects binary or TSV by the magic bytes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io_at(path, e))?;
        if bytes.starts_with(VECTOR_MAGIC) {
            Self::read_binary(&bytes[..])
        } else {
            Self::read_tsv(&bytes[..])
        }
    }
}

impl EncoderBackend for PrecomputedEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, key: &str, _tokens: &[String], _mention: usize) -> Result<DenseVector> {
        self.vectors
            .get(key)
            .cloned()
            .ok_or_else(|| Error::Validation(format!("no precomputed vector for {key}")))
    }
}

/// `ConceptRep(c)`: the mean sentence vector of each concept.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConceptRepStore {
    dim: usize,
    reps: BTreeMap<String, (DenseVector, u64)>,
}

impl ConceptRepStore {
    pub fn build(backend: &dyn EncoderBackend, corpus: &Corpus) -> Result<Self> {
        let dim = backend.dim();
        let mut reps = BTreeMap::new();
        for concept in corpus.concepts() {
            let sentences = corpus.sentences_of_concept(concept);
            let mut sum = vec![0.0f64; dim];
            for s in &sentences {
                let v = sent_rep(backend, &s.sentence_id, &s.tokens, s.span)?;
                for (acc, &x) in sum.iter_mut().zip(&v.0) {
                    *acc += x as f64;
                }
            }
            let n = sentences.len() as f64;
            let mean = DenseVector(sum.into_iter().map(|x| (x / n) as f32).collect());
            reps.insert(concept.to_string(), (mean, sentences.len() as u64));
        }
        Ok(ConceptRepStore { dim, reps })
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, DenseVector, u64)>,
    {
        let mut reps = BTreeMap::new();
        for (c, v, support) in entries {
            if v.dim() != dim || support == 0 {
                return Err(Error::Validation(format!("bad concept representation for {c}")));
            }
            reps.insert(c, (v, support));
        }
        Ok(ConceptRepStore { dim, reps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn get(&self, concept: &str) -> Option<&DenseVector> {
        self.reps.get(concept).map(|(v, _)| v)
    }

    pub fn support(&self, concept: &str) -> Option<u64> {
        self.reps.get(concept).map(|&(_, n)| n)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.reps.keys().map(String::as_str)
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BinWriter::new(out);
        w.bytes(REPS_MAGIC)?;
        w.u32(REPS_VERSION)?;
        w.u32(self.dim as u32)?;
        w.u64(self.reps.len() as u64)?;
        for (c, (v, support)) in &self.reps {
            w.str(c)?;
            w.u64(*support)?;
            for &x in &v.0 {
                w.f32(x)?;
            }
        }
        w.flush()
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let mut r = BinReader::new(input);
        r.expect_magic(REPS_MAGIC)?;
        let version = r.u32()?;
        if version != REPS_VERSION {
            return Err(Error::Format(format!("unsupported reps version {version}")));
        }
        let dim = r.u32()? as usize;
        let count = r.u64()?;
        let mut entries = Vec::new();
        for _ in 0..count {
            let c = r.str()?;
            let support = r.u64()?;
            let v = (0..dim).map(|_| r.f32()).collect::<Result<Vec<_>>>()?;
            entries.push((c, DenseVector(v), support));
        }
        r.expect_eof()?;
        Self::from_entries(dim, entries)
    }
}

/// Cosine between a query vector and a concept's centroid.
pub fn consistency(query: &DenseVector, concept: &str, store: &ConceptRepStore) -> Result<f64> {
    let rep = store
        .get(concept)
        .ok_or_else(|| Error::UnknownConcept(concept.to_string()))?;
    Ok(cosine(&query.0, &rep.0))
}

/// A re-ranked concept with its consistency score.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedConcept {
    pub concept: String,
    pub consistency: f64,
}

/// Keeps the `ell_elmo` most consistent candidates. Ties keep ESA order.
/// Candidates without a representation are skipped and reported in the notes.
pub fn rerank(
    c_esa: &[ScoredConcept],
    query: &DenseVector,
    store: &ConceptRepStore,
    ell_elmo: usize,
) -> Result<(Vec<RankedConcept>, Vec<String>)> {
    if ell_elmo == 0 {
        return Err(Error::InvalidArgument("ell_elmo must be at least 1".into()));
    }
    let mut notes = Vec::new();
    let mut scored: Vec<(usize, RankedConcept)> = Vec::with_capacity(c_esa.len());
    for (rank, cand) in c_esa.iter().enumerate() {
        match store.get(&cand.concept) {
            Some(rep) => scored.push((
                rank,
                RankedConcept {
                    concept: cand.concept.clone(),
                    consistency: cosine(&query.0, &rep.0),
                },
            )),
            None => notes.push(format!("skipped {}: no concept representation", cand.concept)),
        }
    }
    scored.sort_by(|(ra, a), (rb, b)| {
        b.consistency
            .partial_cmp(&a.consistency)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ra.cmp(rb))
    });
    scored.truncate(ell_elmo);
    Ok((scored.into_iter().map(|(_, c)| c).collect(), notes))
}
