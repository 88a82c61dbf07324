//! Coarse and fine type inference from retrieved concepts.
//!
//! Inputs are the ESA candidates `C_ESA`, their consistency re-ranking
//! `C_ELMo`, and the surface prior's best concept `c_surf`. With
//! `Count(t; C)` the number of concepts in `C` whose target types include `t`:
//!
//! ```text
//! r(t, t'; C, C') = (Count(t; C) / |C|) / (Count(t'; C') / |C'|)
//! ```
//!
//! The surface branch is taken when `Pr(c_surf | m) >= lambda` and at least
//! one coarse type of `c_surf` is enriched in `C_ELMo` relative to `C_ESA`
//! (`r > 1`). It keeps `c_surf`'s fine types whose support relative to the
//! chosen coarse type over `{c_surf} ∪ C_ELMo` reaches `eta_s`. Otherwise the
//! context branch picks the most consistent concept among those carrying an
//! enriched coarse type and keeps fine types of `C_ELMo` with support ratio
//! at least `eta_c`. The coarse type is always chosen by a consistency-weighted
//! vote of `C_ELMo` over the chosen concept's coarse types.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::Span;
use crate::encoder::{consistency, rerank, sent_rep, ConceptRepStore, EncoderBackend, RankedConcept};
use crate::error::{Error, Result};
use crate::esa::{EsaIndex, ScoredConcept, DEFAULT_ELL_ESA};
use crate::prior::{PriorTable, SurfaceConcept};
use crate::typedef::{is_compatible, ConceptTargets};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceParams {
    pub lambda: f64,
    pub eta_s: f64,
    pub eta_c: f64,
    pub ell_esa: usize,
    pub ell_elmo: usize,
}

impl Default for InferenceParams {
    fn default() -> Self {
        InferenceParams {
            lambda: 0.5,
            eta_s: 0.8,
            eta_c: 0.3,
            ell_esa: DEFAULT_ELL_ESA,
            ell_elmo: crate::encoder::DEFAULT_ELL_ELMO,
        }
    }
}

impl InferenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidArgument(format!("lambda {} not in [0, 1]", self.lambda)));
        }
        if !(self.eta_s > 0.0 && self.eta_s.is_finite()) || !(self.eta_c > 0.0 && self.eta_c.is_finite()) {
            return Err(Error::InvalidArgument("eta_s and eta_c must be positive".into()));
        }
        if self.ell_esa == 0 || self.ell_elmo == 0 {
            return Err(Error::InvalidArgument("ell_esa and ell_elmo must be at least 1".into()));
        }
        Ok(())
    }
}

/// What to predict when retrieval produces nothing usable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Fallback {
    #[default]
    Abstain,
    Target(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedConcept {
    pub title: String,
    pub consistency: f64,
}

/// One prediction record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypePrediction {
    /// `None` when the engine abstains.
    pub coarse: Option<String>,
    pub fine: Vec<String>,
    pub used_surface: bool,
    pub concepts: Vec<PredictedConcept>,
    pub trace: Vec<String>,
}

impl TypePrediction {
    /// Coarse and fine types as one set.
    pub fn type_set(&self) -> BTreeSet<String> {
        self.coarse.iter().chain(self.fine.iter()).cloned().collect()
    }
}

/// `|{c ∈ C : t ∈ T(c)}|`
pub fn count_type<S: AsRef<str>>(t: &str, concepts: &[S], targets: &ConceptTargets) -> usize {
    concepts.iter().filter(|c| targets.of(c.as_ref()).contains(t)).count()
}

/// `r(t, t'; C, C')`. A zero denominator yields `+inf` when the numerator is
/// positive and 0 otherwise.
pub fn ratio_r<S: AsRef<str>, U: AsRef<str>>(
    t: &str,
    t_prime: &str,
    c: &[S],
    c_prime: &[U],
    targets: &ConceptTargets,
) -> Result<f64> {
    if c.is_empty() || c_prime.is_empty() {
        return Err(Error::InvalidArgument("ratio over an empty concept collection".into()));
    }
    let num = count_type(t, c, targets) as f64 / c.len() as f64;
    let den = count_type(t_prime, c_prime, targets) as f64 / c_prime.len() as f64;
    Ok(if den == 0.0 {
        if num > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        num / den
    })
}

/// Consistency-weighted vote over `concept`'s coarse types. Ties go to the
/// type with the larger count in `C_ELMo`, then to the smaller name.
pub fn select_coarse(
    concept: &str,
    c_elmo: &[RankedConcept],
    targets: &ConceptTargets,
) -> Result<(String, Vec<(String, f64)>)> {
    let candidates: Vec<&str> = targets.coarse_of(concept).collect();
    if candidates.is_empty() {
        return Err(Error::InvalidArgument(format!("{concept} has no coarse type")));
    }
    let names: Vec<&str> = c_elmo.iter().map(|c| c.concept.as_str()).collect();
    let mut votes = Vec::with_capacity(candidates.len());
    let mut best: Option<(&str, f64, usize)> = None;
    for t in candidates {
        let mut vote = 0.0;
        for c in c_elmo {
            if targets.of(&c.concept).contains(t) {
                vote += c.consistency;
            }
        }
        let count = count_type(t, &names, targets);
        votes.push((t.to_string(), vote));
        // Candidates arrive in ascending name order, so only a strict win replaces.
        let better = match best {
            None => true,
            Some((_, bv, bc)) => vote > bv || (vote == bv && count > bc),
        };
        if better {
            best = Some((t, vote, count));
        }
    }
    Ok((best.unwrap().0.to_string(), votes))
}

/// Retrieved concepts for one mention.
#[derive(Debug, Clone, Default)]
pub struct Candidates {
    pub c_esa: Vec<ScoredConcept>,
    pub c_elmo: Vec<RankedConcept>,
    pub surface: Option<SurfaceConcept>,
    /// Consistency of the surface concept, when it has a representation.
    pub surface_consistency: Option<f64>,
}

fn fallback_prediction(fallback: &Fallback, mut trace: Vec<String>, reason: &str) -> TypePrediction {
    trace.push(format!("fallback: {reason}"));
    let coarse = match fallback {
        Fallback::Abstain => {
            trace.push("abstain".into());
            None
        }
        Fallback::Target(t) => {
            trace.push(format!("coarse {t} (fallback)"));
            Some(t.clone())
        }
    };
    TypePrediction {
        coarse,
        fine: Vec::new(),
        used_surface: false,
        concepts: Vec::new(),
        trace,
    }
}

fn fmt_ratio(r: f64) -> String {
    if r.is_infinite() {
        "inf".into()
    } else {
        format!("{r:.4}")
    }
}

/// Runs the inference rule on already-retrieved candidates.
pub fn infer_from_candidates(
    cands: &Candidates,
    params: &InferenceParams,
    targets: &ConceptTargets,
    fallback: &Fallback,
) -> TypePrediction {
    let mut trace = vec![format!(
        "retrieved {} ESA candidates, {} after re-ranking",
        cands.c_esa.len(),
        cands.c_elmo.len()
    )];
    if cands.c_esa.is_empty() {
        return fallback_prediction(fallback, trace, "no ESA candidates");
    }
    if cands.c_elmo.is_empty() {
        return fallback_prediction(fallback, trace, "no re-ranked candidates");
    }
    let esa: Vec<&str> = cands.c_esa.iter().map(|c| c.concept.as_str()).collect();
    let elmo: Vec<&str> = cands.c_elmo.iter().map(|c| c.concept.as_str()).collect();
    // Both collections are non-empty from here on, so ratios cannot fail.
    let enriched = |t: &str| ratio_r(t, t, &elmo, &esa, targets).unwrap();

    let mut surface_coarse: BTreeSet<&str> = BTreeSet::new();
    match &cands.surface {
        Some(s) => {
            trace.push(format!("surface concept {} with prior {:.4}", s.concept, s.probability));
            for t in targets.coarse_of(&s.concept) {
                let r = enriched(t);
                trace.push(format!("surface coarse {t}: r = {}", fmt_ratio(r)));
                if r > 1.0 {
                    surface_coarse.insert(t);
                }
            }
        }
        None => trace.push("no surface concept".into()),
    }

    let surface_ok = cands
        .surface
        .as_ref()
        .is_some_and(|s| s.probability >= params.lambda && !surface_coarse.is_empty());

    let mut concepts: Vec<PredictedConcept> = cands
        .c_elmo
        .iter()
        .map(|c| PredictedConcept {
            title: c.concept.clone(),
            consistency: c.consistency,
        })
        .collect();

    if surface_ok {
        let surf = cands.surface.as_ref().unwrap();
        trace.push("branch: surface".into());
        let (coarse, votes) = select_coarse(&surf.concept, &cands.c_elmo, targets).unwrap();
        trace.push(format!("votes {}", fmt_votes(&votes)));
        trace.push(format!("coarse {coarse}"));
        let mut pool: Vec<&str> = vec![surf.concept.as_str()];
        pool.extend(elmo.iter().filter(|&&c| c != surf.concept));
        let mut fine = Vec::new();
        for tf in targets.fine_of(&surf.concept) {
            if !is_compatible(tf, &coarse) {
                continue;
            }
            let r = ratio_r(tf, &coarse, &pool, &pool, targets).unwrap();
            let keep = r >= params.eta_s;
            trace.push(format!(
                "fine {tf}: r = {} {}",
                fmt_ratio(r),
                if keep { "kept" } else { "dropped" }
            ));
            if keep {
                fine.push(tf.to_string());
            }
        }
        if !elmo.contains(&surf.concept.as_str()) {
            concepts.insert(
                0,
                PredictedConcept {
                    title: surf.concept.clone(),
                    consistency: cands.surface_consistency.unwrap_or(0.0),
                },
            );
        }
        return TypePrediction {
            coarse: Some(coarse),
            fine,
            used_surface: true,
            concepts,
            trace,
        };
    }

    trace.push("branch: context".into());
    let filtered: Vec<&RankedConcept> = cands
        .c_elmo
        .iter()
        .filter(|c| targets.coarse_of(&c.concept).any(|t| enriched(t) > 1.0))
        .collect();
    let pool: Vec<&RankedConcept> = if filtered.is_empty() {
        trace.push("no concept with an enriched coarse type; using all re-ranked concepts".into());
        cands.c_elmo.iter().collect()
    } else {
        filtered
    };
    let mut chosen = pool[0];
    for c in &pool[1..] {
        if c.consistency > chosen.consistency {
            chosen = c;
        }
    }
    trace.push(format!(
        "selected concept {} ({:.4})",
        chosen.concept, chosen.consistency
    ));
    let (coarse, votes) = match select_coarse(&chosen.concept, &cands.c_elmo, targets) {
        Ok(x) => x,
        Err(_) => {
            return fallback_prediction(fallback, trace, "selected concept has no coarse type");
        }
    };
    trace.push(format!("votes {}", fmt_votes(&votes)));
    trace.push(format!("coarse {coarse}"));
    let fine_pool: BTreeSet<&str> = elmo.iter().flat_map(|c| targets.fine_of(c)).collect();
    let mut fine = Vec::new();
    for tf in fine_pool {
        if !is_compatible(tf, &coarse) {
            continue;
        }
        let r = ratio_r(tf, &coarse, &elmo, &elmo, targets).unwrap();
        let keep = r >= params.eta_c;
        trace.push(format!(
            "fine {tf}: r = {} {}",
            fmt_ratio(r),
            if keep { "kept" } else { "dropped" }
        ));
        if keep {
            fine.push(tf.to_string());
        }
    }
    TypePrediction {
        coarse: Some(coarse),
        fine,
        used_surface: false,
        concepts,
        trace,
    }
}

fn fmt_votes(votes: &[(String, f64)]) -> String {
    votes
        .iter()
        .map(|(t, v)| format!("{t}={v:.4}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Everything needed to type a mention.
pub struct Resources<'a> {
    pub index: &'a EsaIndex,
    pub backend: &'a dyn EncoderBackend,
    pub store: &'a ConceptRepStore,
    pub priors: &'a PriorTable,
    pub targets: &'a ConceptTargets,
    pub fallback: Fallback,
}

/// Retrieval, re-ranking, surface lookup and inference for one mention.
/// `key` identifies the sentence for precomputed-vector backends.
pub fn infer_types(
    key: &str,
    tokens: &[String],
    span: Span,
    params: &InferenceParams,
    res: &Resources<'_>,
) -> Result<TypePrediction> {
    params.validate()?;
    let cands = retrieve(key, tokens, span, params, res)?;
    let mut pred = infer_from_candidates(&cands.0, params, res.targets, &res.fallback);
    if !cands.1.is_empty() {
        pred.trace.splice(1..1, cands.1);
    }
    Ok(pred)
}

/// Candidate generation only; returns the candidates and re-ranking notes.
pub fn retrieve(
    key: &str,
    tokens: &[String],
    span: Span,
    params: &InferenceParams,
    res: &Resources<'_>,
) -> Result<(Candidates, Vec<String>)> {
    if !span.is_valid_for(tokens.len()) {
        return Err(Error::Validation(format!("{key}: mention span out of range")));
    }
    let c_esa = res.index.candidates(tokens, params.ell_esa)?;
    let (c_elmo, notes) = if c_esa.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let query = sent_rep(res.backend, key, tokens, span)?;
        rerank(&c_esa, &query, res.store, params.ell_elmo)?
    };
    let surface = res.priors.surface_concept(&tokens[span.start..span.end]);
    let surface_consistency = match &surface {
        Some(s) if res.store.get(&s.concept).is_some() => {
            let query = sent_rep(res.backend, key, tokens, span)?;
            Some(consistency(&query, &s.concept, res.store)?)
        }
        _ => None,
    };
    Ok((
        Candidates {
            c_esa,
            c_elmo,
            surface,
            surface_consistency,
        },
        notes,
    ))
}
