//! Typing metrics, retrieval coverage curves and the nearest-neighbour baseline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Span};
use crate::encoder::{cosine, sent_rep, DenseVector, EncoderBackend};
use crate::error::{Error, Result};
use crate::typedef::ConceptTargets;

pub type TypeSet = BTreeSet<String>;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Averaging {
    Macro,
    Micro,
}

fn check_aligned(golds: &[TypeSet], preds: &[TypeSet]) -> Result<()> {
    if golds.len() != preds.len() {
        return Err(Error::InvalidArgument(format!(
            "{} gold mentions but {} predictions",
            golds.len(),
            preds.len()
        )));
    }
    if golds.is_empty() {
        return Err(Error::InvalidArgument("no mentions to evaluate".into()));
    }
    Ok(())
}

fn overlap(a: &TypeSet, b: &TypeSet) -> usize {
    a.intersection(b).count()
}

/// Fraction of mentions whose predicted set equals the gold set.
pub fn strict_accuracy(golds: &[TypeSet], preds: &[TypeSet]) -> Result<f64> {
    check_aligned(golds, preds)?;
    let hits = golds.iter().zip(preds).filter(|(g, p)| g == p).count();
    Ok(hits as f64 / golds.len() as f64)
}

/// Per-mention precision and recall averaged over mentions. An empty
/// prediction scores precision 0.
pub fn macro_prf(golds: &[TypeSet], preds: &[TypeSet]) -> Result<Prf> {
    check_aligned(golds, preds)?;
    let (mut p, mut r) = (0.0, 0.0);
    for (g, t) in golds.iter().zip(preds) {
        let hit = overlap(g, t) as f64;
        if !t.is_empty() {
            p += hit / t.len() as f64;
        }
        if !g.is_empty() {
            r += hit / g.len() as f64;
        }
    }
    let n = golds.len() as f64;
    Ok(Prf::new(p / n, r / n))
}

/// Pooled precision and recall over all mentions.
pub fn micro_prf(golds: &[TypeSet], preds: &[TypeSet]) -> Result<Prf> {
    check_aligned(golds, preds)?;
    let (mut hit, mut np, mut ng) = (0usize, 0usize, 0usize);
    for (g, t) in golds.iter().zip(preds) {
        hit += overlap(g, t);
        np += t.len();
        ng += g.len();
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(Prf::new(ratio(hit, np), ratio(hit, ng)))
}

/// Per-type counts: mentions with gold type `t`, predicted `t`, and both.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCounts {
    pub gold: usize,
    pub predicted: usize,
    pub correct: usize,
}

pub fn type_counts(golds: &[TypeSet], preds: &[TypeSet]) -> BTreeMap<String, TypeCounts> {
    let mut table: BTreeMap<String, TypeCounts> = BTreeMap::new();
    for (g, p) in golds.iter().zip(preds) {
        for t in g {
            table.entry(t.clone()).or_default().gold += 1;
        }
        for t in p {
            let e = table.entry(t.clone()).or_default();
            e.predicted += 1;
            if g.contains(t) {
                e.correct += 1;
            }
        }
    }
    table
}

/// Type-level metrics.
///
/// Macro precision weights each type's `C(t)/P(t)` by its gold share
/// `G(t)/ΣG`; macro recall mirrors it, weighting `C(t)/G(t)` by the
/// prediction share `P(t)/ΣP`. Micro pools `ΣC/ΣP` and `ΣC/ΣG`.
pub fn per_type_prf(golds: &[TypeSet], preds: &[TypeSet], mode: Averaging) -> Result<Prf> {
    check_aligned(golds, preds)?;
    let table = type_counts(golds, preds);
    let total_g: usize = table.values().map(|c| c.gold).sum();
    let total_p: usize = table.values().map(|c| c.predicted).sum();
    let total_c: usize = table.values().map(|c| c.correct).sum();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(match mode {
        Averaging::Micro => Prf::new(ratio(total_c, total_p), ratio(total_c, total_g)),
        Averaging::Macro => {
            let (mut p, mut r) = (0.0, 0.0);
            for c in table.values() {
                p += ratio(c.correct, c.predicted) * ratio(c.gold, total_g);
                r += ratio(c.correct, c.gold) * ratio(c.predicted, total_p);
            }
            Prf::new(p, r)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_mentions: usize,
    pub strict_acc: f64,
    #[serde(rename = "macro")]
    pub macro_: Prf,
    pub micro: Prf,
    pub per_type_macro: Prf,
    pub per_type_micro: Prf,
}

impl MetricsReport {
    pub fn compute(golds: &[TypeSet], preds: &[TypeSet]) -> Result<Self> {
        Ok(MetricsReport {
            n_mentions: golds.len(),
            strict_acc: strict_accuracy(golds, preds)?,
            macro_: macro_prf(golds, preds)?,
            micro: micro_prf(golds, preds)?,
            per_type_macro: per_type_prf(golds, preds, Averaging::Macro)?,
            per_type_micro: per_type_prf(golds, preds, Averaging::Micro)?,
        })
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mentions        {:>8}", self.n_mentions)?;
        writeln!(f, "strict acc      {:>8.4}", self.strict_acc)?;
        writeln!(f, "{:<16}{:>8} {:>8} {:>8}", "", "P", "R", "F1")?;
        for (name, m) in [
            ("macro", &self.macro_),
            ("micro", &self.micro),
            ("type macro", &self.per_type_macro),
            ("type micro", &self.per_type_micro),
        ] {
            writeln!(f, "{name:<16}{:>8.4} {:>8.4} {:>8.4}", m.precision, m.recall, m.f1)?;
        }
        Ok(())
    }
}

/// Per-type breakdown as TSV: type, G, P, C, precision, recall, F1.
pub fn per_type_tsv(golds: &[TypeSet], preds: &[TypeSet]) -> String {
    let mut out = String::from("type\tgold\tpredicted\tcorrect\tprecision\trecall\tf1\n");
    for (t, c) in type_counts(golds, preds) {
        let p = if c.predicted == 0 {
            0.0
        } else {
            c.correct as f64 / c.predicted as f64
        };
        let r = if c.gold == 0 {
            0.0
        } else {
            c.correct as f64 / c.gold as f64
        };
        let m = Prf::new(p, r);
        out.push_str(&format!(
            "{t}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\n",
            c.gold, c.predicted, c.correct, m.precision, m.recall, m.f1
        ));
    }
    out
}

/// Fraction of mentions whose gold types are all produced by the top `ell`
/// candidates, for `ell = 1..=max_ell`.
pub fn coverage_curve<S: AsRef<str>>(
    golds: &[TypeSet],
    candidate_lists: &[Vec<S>],
    targets: &ConceptTargets,
    max_ell: usize,
) -> Result<Vec<(usize, f64)>> {
    if golds.len() != candidate_lists.len() {
        return Err(Error::InvalidArgument(
            "gold and candidate lists differ in length".into(),
        ));
    }
    if golds.is_empty() {
        return Ok((1..=max_ell).map(|ell| (ell, 0.0)).collect());
    }
    // The first ell at which each mention becomes covered, if ever.
    let mut first_covered = Vec::with_capacity(golds.len());
    for (gold, cands) in golds.iter().zip(candidate_lists) {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut at = None;
        for (i, c) in cands.iter().take(max_ell).enumerate() {
            seen.extend(targets.of(c.as_ref()).iter().map(String::as_str));
            if gold.iter().all(|t| seen.contains(t.as_str())) {
                at = Some(i + 1);
                break;
            }
        }
        first_covered.push(at);
    }
    let n = golds.len() as f64;
    Ok((1..=max_ell)
        .map(|ell| {
            let covered = first_covered.iter().filter(|a| a.is_some_and(|a| a <= ell)).count();
            (ell, covered as f64 / n)
        })
        .collect())
}

/// Mean sentence vector per target type.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeReps {
    reps: BTreeMap<String, DenseVector>,
}

impl TypeReps {
    /// Averages `SentRep` over corpus sentences whose concept carries each type.
    pub fn build(backend: &dyn EncoderBackend, corpus: &Corpus, targets: &ConceptTargets) -> Result<Self> {
        let dim = backend.dim();
        let mut sums: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
        for rec in corpus.records() {
            let Some(c) = &rec.concept else { continue };
            let types = targets.of(c);
            if types.is_empty() {
                continue;
            }
            let v = sent_rep(backend, &rec.sentence_id, &rec.tokens, rec.span)?;
            for t in types {
                let e = sums.entry(t.clone()).or_insert_with(|| (vec![0.0; dim], 0));
                for (acc, &x) in e.0.iter_mut().zip(&v.0) {
                    *acc += x as f64;
                }
                e.1 += 1;
            }
        }
        let reps = sums
            .into_iter()
            .map(|(t, (sum, n))| (t, DenseVector(sum.into_iter().map(|x| (x / n as f64) as f32).collect())))
            .collect();
        Ok(TypeReps { reps })
    }

    pub fn from_map(reps: BTreeMap<String, DenseVector>) -> Self {
        TypeReps { reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Types ranked by cosine to the query, ties by name.
    pub fn nearest(&self, query: &DenseVector, k: usize) -> Result<Vec<(String, f64)>> {
        if self.reps.is_empty() {
            return Err(Error::InvalidArgument("no type representations".into()));
        }
        let mut scored: Vec<(String, f64)> = self
            .reps
            .iter()
            .map(|(t, v)| (t.clone(), cosine(&query.0, &v.0)))
            .collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        scored.truncate(k);
        Ok(scored)
    }
}

/// Nearest-neighbour types for a mention in context.
pub fn elmonn_baseline(
    key: &str,
    tokens: &[String],
    span: Span,
    backend: &dyn EncoderBackend,
    type_reps: &TypeReps,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let q = sent_rep(backend, key, tokens, span)?;
    type_reps.nearest(&q, k)
}

/// Seeded split into a `fraction` sample and the remainder, both in input order.
pub fn dev_split(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let k = ((n as f64) * fraction.clamp(0.0, 1.0)).round() as usize;
    let mut dev = idx[..k].to_vec();
    let mut rest = idx[k..].to_vec();
    dev.sort_unstable();
    rest.sort_unstable();
    (dev, rest)
}
