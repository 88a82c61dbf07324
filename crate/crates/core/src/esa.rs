//! Word → concept association map and candidate retrieval.
//!
//! Each corpus sentence is a document. For a word `w` and a concept `c`,
//! `score(c|w)` is the sum of `tfidf(w, s)` over the sentences `s` of `c`
//! that contain `w`. A query's candidate list is the per-concept sum of
//! `score(c|w)` over every token of the query sentence.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{word_key, Corpus, CorpusStats, MentionSentence};
use crate::error::{Error, Result};
use crate::io::{BinReader, BinWriter};

pub const DEFAULT_ELL_ESA: usize = 300;

const INDEX_MAGIC: &[u8; 4] = b"TGEI";
const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredConcept {
    pub concept: String,
    pub score: f64,
}

/// Orders by score descending, then concept ascending.
pub fn rank_order(a_score: f64, a_concept: &str, b_score: f64, b_concept: &str) -> Ordering {
    b_score
        .partial_cmp(&a_score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a_concept.cmp(b_concept))
}

/// `tf(w, s) * ln(N / df(w))`, with `w` already casefolded.
pub fn tfidf(word: &str, sentence: &MentionSentence, stats: &CorpusStats) -> f64 {
    let df = stats.df(word);
    if df == 0 {
        return 0.0;
    }
    let tf = sentence.tokens.iter().filter(|t| word_key(t) == word).count();
    if tf == 0 {
        return 0.0;
    }
    tf as f64 * (stats.n_sentences as f64 / df as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Posting {
    concept: u32,
    score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsaIndex {
    concepts: Vec<String>,
    n_sentences: u64,
    df: BTreeMap<String, u64>,
    postings: BTreeMap<String, Vec<Posting>>,
}

impl EsaIndex {
    pub fn build(corpus: &Corpus) -> Self {
        let stats = corpus.stats();
        let n = stats.n_sentences as f64;
        // Concept ids follow title order so id order and title order agree.
        let concepts: Vec<String> = corpus.concepts().map(str::to_string).collect();
        let mut acc: BTreeMap<String, BTreeMap<u32, f64>> = BTreeMap::new();
        for (cid, concept) in concepts.iter().enumerate() {
            for sentence in corpus.sentences_of_concept(concept) {
                let mut tf: BTreeMap<String, usize> = BTreeMap::new();
                for tok in &sentence.tokens {
                    *tf.entry(word_key(tok)).or_insert(0) += 1;
                }
                for (word, count) in tf {
                    let idf = (n / stats.df(&word) as f64).ln();
                    let w = count as f64 * idf;
                    if w > 0.0 {
                        *acc.entry(word).or_default().entry(cid as u32).or_insert(0.0) += w;
                    }
                }
            }
        }
        let postings = acc
            .into_iter()
            .map(|(word, per_concept)| {
                let mut list: Vec<Posting> = per_concept
                    .into_iter()
                    .map(|(concept, score)| Posting { concept, score })
                    .collect();
                list.sort_by(|a, b| {
                    rank_order(
                        a.score,
                        &concepts[a.concept as usize],
                        b.score,
                        &concepts[b.concept as usize],
                    )
                });
                (word, list)
            })
            .collect();
        EsaIndex {
            concepts,
            n_sentences: stats.n_sentences as u64,
            df: stats.df.iter().map(|(w, &c)| (w.clone(), c as u64)).collect(),
            postings,
        }
    }

    pub fn n_sentences(&self) -> u64 {
        self.n_sentences
    }

    pub fn df(&self, word: &str) -> u64 {
        self.df.get(&word_key(word)).copied().unwrap_or(0)
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn n_words(&self) -> usize {
        self.postings.len()
    }

    /// `score(c|w)`, or 0 when absent. The word is normalized first.
    pub fn score(&self, word: &str, concept: &str) -> f64 {
        self.postings
            .get(&word_key(word))
            .and_then(|list| {
                list.iter()
                    .find(|p| self.concepts[p.concept as usize] == concept)
                    .map(|p| p.score)
            })
            .unwrap_or(0.0)
    }

    /// Postings of a word, best first.
    pub fn postings(&self, word: &str) -> Vec<ScoredConcept> {
        self.postings
            .get(&word_key(word))
            .map(|list| {
                list.iter()
                    .map(|p| ScoredConcept {
                        concept: self.concepts[p.concept as usize].clone(),
                        score: p.score,
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Every concept reached by the tokens, ranked by summed score.
    pub fn aggregate<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<ScoredConcept> {
        let mut weights: HashMap<u32, f64> = HashMap::new();
        for tok in tokens {
            if let Some(list) = self.postings.get(&word_key(tok.as_ref())) {
                for p in list {
                    *weights.entry(p.concept).or_insert(0.0) += p.score;
                }
            }
        }
        let mut out: Vec<ScoredConcept> = weights
            .into_iter()
            .map(|(cid, score)| ScoredConcept {
                concept: self.concepts[cid as usize].clone(),
                score,
            })
            .collect();
        out.sort_by(|a, b| rank_order(a.score, &a.concept, b.score, &b.concept));
        out
    }

    /// The top `ell_esa` concepts for a query sentence.
    pub fn candidates<S: AsRef<str>>(&self, tokens: &[S], ell_esa: usize) -> Result<Vec<ScoredConcept>> {
        if ell_esa == 0 {
            return Err(Error::InvalidArgument("ell_esa must be at least 1".into()));
        }
        let mut all = self.aggregate(tokens);
        all.truncate(ell_esa);
        Ok(all)
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BinWriter::new(out);
        w.bytes(INDEX_MAGIC)?;
        w.u32(INDEX_VERSION)?;
        w.u64(self.n_sentences)?;
        w.u64(self.df.len() as u64)?;
        for (word, df) in &self.df {
            w.str(word)?;
            w.u64(*df)?;
        }
        w.u32(self.concepts.len() as u32)?;
        for c in &self.concepts {
            w.str(c)?;
        }
        w.u64(self.postings.len() as u64)?;
        for (word, list) in &self.postings {
            w.str(word)?;
            w.u32(list.len() as u32)?;
            for p in list {
                w.u32(p.concept)?;
                w.f64(p.score)?;
            }
        }
        w.flush()
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let mut r = BinReader::new(input);
        r.expect_magic(INDEX_MAGIC)?;
        let version = r.u32()?;
        if version != INDEX_VERSION {
            return Err(Error::Format(format!("unsupported index version {version}")));
        }
        let n_sentences = r.u64()?;
        let n_df = r.u64()?;
        let mut df = BTreeMap::new();
        for _ in 0..n_df {
            let word = r.str()?;
            df.insert(word, r.u64()?);
        }
        let n_concepts = r.u32()?;
        let concepts = (0..n_concepts).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let n_words = r.u64()?;
        let mut postings = BTreeMap::new();
        for _ in 0..n_words {
            let word = r.str()?;
            let len = r.u32()?;
            let mut list = Vec::with_capacity(len as usize);
            for _ in 0..len {
                let concept = r.u32()?;
                if concept >= n_concepts {
                    return Err(Error::Format(format!("concept id {concept} out of range")));
                }
                list.push(Posting {
                    concept,
                    score: r.f64()?,
                });
            }
            postings.insert(word, list);
        }
        r.expect_eof()?;
        Ok(EsaIndex {
            concepts,
            n_sentences,
            df,
            postings,
        })
    }
}
