//! Zero-shot entity typing by grounding a mention to type-compatible concepts.
//!
//! A mention in context is matched to concepts of a linked corpus in three
//! steps: a TF-IDF word→concept index proposes candidates, a mention-aware
//! sentence encoder re-ranks them by context consistency, and a surface prior
//! proposes the most likely concept for the mention string. The concepts'
//! primitive types are mapped onto a target taxonomy with a small Boolean
//! rule language, and a count-ratio rule picks one coarse type and a set of
//! compatible fine types.
//!
//! ```
//! use typeground::synth::{generate, SynthConfig};
//! use typeground::pipeline::Engine;
//! use typeground::inference::InferenceParams;
//!
//! let world = generate(&SynthConfig::default()).unwrap();
//! let engine = Engine::with_hashing_encoder(&world.corpus, &world.types, world.defs.clone()).unwrap();
//! let pred = engine.type_query(&world.queries[0], &InferenceParams::default()).unwrap();
//! assert!(pred.coarse.is_some());
//! ```

pub mod corpus;
pub mod encoder;
pub mod error;
pub mod esa;
pub mod eval;
pub mod inference;
mod io;
pub mod pipeline;
pub mod prior;
pub mod synth;
pub mod typedef;

pub use error::{Error, Result};
