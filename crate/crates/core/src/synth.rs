//! Seeded synthetic worlds: a mention corpus, primitive types, a type
//! definition and held-out queries with gold types.
//!
//! Every concept owns a disjoint topic vocabulary. Sentences mix a few
//! filler words that occur everywhere, several topic words of the linked
//! concept and, with probability `noise` (0 by default), one topic word borrowed from
//! another concept. Concept `i` carries coarse type `i % n_coarse` and, for
//! `i < n_fine`, fine type `i`, whose parent is coarse type `i % n_coarse`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ConceptTypeTable, Corpus, MentionSentence, QueryMention, Span};
use crate::error::Result;
use crate::typedef::{parse_typedefs, TypeDefinition};

const COARSE_NAMES: [&str; 8] = [
    "PERSON",
    "LOCATION",
    "ORGANIZATION",
    "EVENT",
    "PRODUCT",
    "WORK",
    "ANIMAL",
    "SUBSTANCE",
];
const FILLERS: [&str; 3] = ["the", "of", "and"];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_sentences: usize,
    pub n_concepts: usize,
    pub n_coarse: usize,
    pub n_fine: usize,
    pub n_queries: usize,
    pub vocab_per_concept: usize,
    pub topic_words_per_sentence: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_sentences: 500,
            n_concepts: 20,
            n_coarse: 6,
            n_fine: 10,
            n_queries: 50,
            vocab_per_concept: 12,
            topic_words_per_sentence: 6,
            noise: 0.0,
            seed: 42,
        }
    }
}

pub struct SynthWorld {
    pub corpus: Corpus,
    pub types: ConceptTypeTable,
    pub typedefs_source: String,
    pub defs: TypeDefinition,
    /// Held-out mentions with novel surfaces, gold types and their source concept.
    pub queries: Vec<QueryMention>,
    pub query_concepts: Vec<String>,
}

pub fn concept_name(i: usize) -> String {
    format!("Concept_{i:02}")
}

fn coarse_target(k: usize) -> String {
    format!("/{}", COARSE_NAMES[k % COARSE_NAMES.len()])
}

fn fine_target(k: usize, n_coarse: usize) -> String {
    format!("{}/SUB{k}", coarse_target(k % n_coarse))
}

fn topic_word(concept: usize, j: usize) -> String {
    format!("t{concept}w{j}")
}

fn sentence(rng: &mut ChaCha8Rng, cfg: &SynthConfig, concept: usize, mention: &[String]) -> (Vec<String>, Span) {
    let mut words: Vec<String> = FILLERS.iter().map(|s| s.to_string()).collect();
    let mut topic: Vec<usize> = (0..cfg.vocab_per_concept).collect();
    topic.shuffle(rng);
    words.extend(
        topic
            .iter()
            .take(cfg.topic_words_per_sentence)
            .map(|&j| topic_word(concept, j)),
    );
    if cfg.n_concepts > 1 && rng.gen_bool(cfg.noise) {
        let mut other = rng.gen_range(0..cfg.n_concepts - 1);
        if other >= concept {
            other += 1;
        }
        words.push(topic_word(other, rng.gen_range(0..cfg.vocab_per_concept)));
    }
    words.shuffle(rng);
    let at = rng.gen_range(0..=words.len());
    let mut tokens = words[..at].to_vec();
    tokens.extend(mention.iter().cloned());
    tokens.extend(words[at..].iter().cloned());
    (tokens, Span::new(at, at + mention.len()))
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthWorld> {
    assert!(cfg.n_coarse >= 1 && cfg.n_coarse <= COARSE_NAMES.len());
    assert!(cfg.n_fine <= cfg.n_concepts);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut typedefs_source = String::from("# synthetic taxonomy\n");
    for k in 0..cfg.n_coarse {
        typedefs_source.push_str(&format!("{} := /synth/coarse{k}\n", coarse_target(k)));
    }
    for k in 0..cfg.n_fine {
        typedefs_source.push_str(&format!(
            "{} := /synth/coarse{}/fine{k}\n",
            fine_target(k, cfg.n_coarse),
            k % cfg.n_coarse
        ));
    }
    let defs = parse_typedefs(&typedefs_source)?;

    let mut types = ConceptTypeTable::new();
    for i in 0..cfg.n_concepts {
        let mut prims = vec![format!("/synth/coarse{}", i % cfg.n_coarse)];
        if i < cfg.n_fine {
            prims.push(format!("/synth/coarse{}/fine{i}", i % cfg.n_coarse));
        }
        types.insert(&concept_name(i), prims)?;
    }

    let mut records = Vec::with_capacity(cfg.n_sentences);
    for n in 0..cfg.n_sentences {
        let concept = n % cfg.n_concepts;
        // Two surfaces per concept; the second is shared with a neighbour.
        let surface = if rng.gen_bool(0.8) {
            vec![format!("Ent{concept}")]
        } else {
            vec!["Alias".to_string(), format!("{}", concept / 2)]
        };
        let (tokens, span) = sentence(&mut rng, cfg, concept, &surface);
        records.push(MentionSentence {
            sentence_id: format!("s{n:05}"),
            tokens,
            span,
            concept: Some(concept_name(concept)),
        });
    }
    let corpus = Corpus::from_records(records)?;

    let mut queries = Vec::with_capacity(cfg.n_queries);
    let mut query_concepts = Vec::with_capacity(cfg.n_queries);
    for q in 0..cfg.n_queries {
        let concept = rng.gen_range(0..cfg.n_concepts);
        let surface = vec![format!("Novel{q}")];
        let (tokens, span) = sentence(&mut rng, cfg, concept, &surface);
        let prims: Vec<&str> = types
            .get(&concept_name(concept))
            .map(|s| s.iter().map(String::as_str).collect())
            .unwrap_or_default();
        let gold: Vec<String> = defs.apply(&prims).into_iter().collect();
        queries.push(QueryMention {
            sentence: MentionSentence {
                sentence_id: format!("q{q:04}"),
                tokens,
                span,
                concept: None,
            },
            gold_types: Some(gold),
        });
        query_concepts.push(concept_name(concept));
    }

    Ok(SynthWorld {
        corpus,
        types,
        typedefs_source,
        defs,
        queries,
        query_concepts,
    })
}
