//! Owned resources and batch helpers shared by the CLI and the demo.

use std::io::{BufRead, BufReader, Read, Write};

use crate::corpus::{ConceptTypeTable, Corpus, QueryMention};
use crate::encoder::{ConceptRepStore, EncoderBackend, HashingEncoder};
use crate::error::{Error, Result};
use crate::esa::EsaIndex;
use crate::eval::TypeSet;
use crate::inference::{infer_types, retrieve, Fallback, InferenceParams, Resources, TypePrediction};
use crate::prior::PriorTable;
use crate::typedef::{ConceptTargets, TypeDefinition};

pub struct Engine {
    pub index: EsaIndex,
    pub backend: Box<dyn EncoderBackend>,
    pub store: ConceptRepStore,
    pub priors: PriorTable,
    pub defs: TypeDefinition,
    pub targets: ConceptTargets,
    pub fallback: Fallback,
}

impl Engine {
    /// Builds every offline resource from a corpus.
    pub fn from_corpus(
        corpus: &Corpus,
        types: &ConceptTypeTable,
        defs: TypeDefinition,
        backend: Box<dyn EncoderBackend>,
    ) -> Result<Self> {
        let index = EsaIndex::build(corpus);
        let store = ConceptRepStore::build(backend.as_ref(), corpus)?;
        let priors = PriorTable::build(corpus);
        Ok(Self::from_parts(index, backend, store, priors, defs, types))
    }

    pub fn from_parts(
        index: EsaIndex,
        backend: Box<dyn EncoderBackend>,
        store: ConceptRepStore,
        priors: PriorTable,
        defs: TypeDefinition,
        types: &ConceptTypeTable,
    ) -> Self {
        let targets = ConceptTargets::build(&defs, types);
        let fallback = default_fallback(&defs);
        Engine {
            index,
            backend,
            store,
            priors,
            defs,
            targets,
            fallback,
        }
    }

    pub fn with_hashing_encoder(corpus: &Corpus, types: &ConceptTypeTable, defs: TypeDefinition) -> Result<Self> {
        Self::from_corpus(corpus, types, defs, Box::new(HashingEncoder::default()))
    }

    pub fn resources(&self) -> Resources<'_> {
        Resources {
            index: &self.index,
            backend: self.backend.as_ref(),
            store: &self.store,
            priors: &self.priors,
            targets: &self.targets,
            fallback: self.fallback.clone(),
        }
    }

    pub fn type_query(&self, q: &QueryMention, params: &InferenceParams) -> Result<TypePrediction> {
        let s = &q.sentence;
        infer_types(&s.sentence_id, &s.tokens, s.span, params, &self.resources())
    }

    /// Ranked C_ESA and C_ELMo concept names for a query.
    pub fn ranked_candidates(&self, q: &QueryMention, params: &InferenceParams) -> Result<(Vec<String>, Vec<String>)> {
        let s = &q.sentence;
        let (c, _) = retrieve(&s.sentence_id, &s.tokens, s.span, params, &self.resources())?;
        Ok((
            c.c_esa.into_iter().map(|x| x.concept).collect(),
            c.c_elmo.into_iter().map(|x| x.concept).collect(),
        ))
    }
}

/// The taxonomy's OTHER type when it has one, otherwise abstain.
pub fn default_fallback(defs: &TypeDefinition) -> Fallback {
    defs.other_target()
        .map(|t| Fallback::Target(t.to_string()))
        .unwrap_or(Fallback::Abstain)
}

pub fn write_predictions<W: Write>(mut out: W, preds: &[TypePrediction]) -> Result<()> {
    for p in preds {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_predictions<R: Read>(input: R) -> Result<Vec<TypePrediction>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Gold type sets of query mentions; every mention must carry gold types.
pub fn gold_sets(queries: &[QueryMention]) -> Result<Vec<TypeSet>> {
    queries
        .iter()
        .map(|q| match &q.gold_types {
            Some(g) if !g.is_empty() => Ok(g.iter().cloned().collect()),
            _ => Err(Error::Validation(format!(
                "{}: missing gold_types",
                q.sentence.sentence_id
            ))),
        })
        .collect()
}
