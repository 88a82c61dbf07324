//! Browser bindings. Every export takes and returns plain strings (JSON for
//! structured values) so the same functions can be exercised natively.
//! Failures come back as `{"error": "..."}`.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use typeground::eval::{coverage_curve, MetricsReport};
use typeground::inference::InferenceParams;
use typeground::pipeline::{gold_sets, Engine};
use typeground::synth::{generate, SynthConfig, SynthWorld};
use typeground::typedef::{parse_typedefs, BUILTIN_TYPEDEFS};

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Names and sources of the shipped type-definition listings.
#[wasm_bindgen]
pub fn builtin_listings() -> String {
    let v: Vec<Value> = BUILTIN_TYPEDEFS
        .iter()
        .map(|(name, src)| json!({ "name": name, "source": src }))
        .collect();
    Value::Array(v).to_string()
}

/// Applies rules to primitive types given one per line or separated by
/// commas or whitespace.
#[wasm_bindgen]
pub fn apply_typedefs(source: &str, primitives: &str) -> String {
    respond((|| {
        let defs = parse_typedefs(source).map_err(|e| e.to_string())?;
        let prims: Vec<&str> = primitives
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let targets: Vec<String> = defs.apply(&prims).into_iter().collect();
        Ok(json!({
            "targets": targets,
            "warnings": defs.warnings(),
            "normalized": defs.to_string(),
            "rules": defs.rules().len(),
        }))
    })())
}

#[derive(Serialize)]
struct QueryView<'a> {
    id: &'a str,
    text: String,
    mention: String,
    concept: &'a str,
    gold: Vec<String>,
    predicted: Vec<String>,
    correct: bool,
    trace: Vec<String>,
}

/// A seeded synthetic world with every resource built.
#[wasm_bindgen]
pub struct SynthDemo {
    world: SynthWorld,
    engine: Engine,
}

#[wasm_bindgen]
impl SynthDemo {
    /// Panics only on an impossible generator configuration; inputs are clamped.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, noise: f64) -> SynthDemo {
        let cfg = SynthConfig {
            seed: seed as u64,
            noise: if noise.is_finite() { noise.clamp(0.0, 1.0) } else { 0.0 },
            ..SynthConfig::default()
        };
        let world = generate(&cfg).expect("default synthetic configuration is valid");
        let engine = Engine::with_hashing_encoder(&world.corpus, &world.types, world.defs.clone())
            .expect("synthetic corpus is valid");
        SynthDemo { world, engine }
    }

    pub fn query_count(&self) -> usize {
        self.world.queries.len()
    }

    /// The generated type-definition rules.
    pub fn typedefs(&self) -> String {
        self.world.typedefs_source.clone()
    }

    /// Types every held-out query with the given parameters (a JSON object
    /// with `lambda`, `eta_s`, `eta_c`, `ell_esa`, `ell_elmo`).
    pub fn run(&self, params_json: &str) -> String {
        respond(self.run_inner(params_json))
    }

    /// Coverage of gold types by the top `ell` retrieved concepts.
    pub fn coverage(&self, max_ell: usize) -> String {
        respond(self.coverage_inner(max_ell))
    }
}

impl SynthDemo {
    fn run_inner(&self, params_json: &str) -> Result<Value, String> {
        let params: InferenceParams = serde_json::from_str(params_json).map_err(|e| e.to_string())?;
        params.validate().map_err(|e| e.to_string())?;
        let golds = gold_sets(&self.world.queries).map_err(|e| e.to_string())?;
        let mut preds = Vec::new();
        let mut views = Vec::new();
        for ((q, gold), concept) in self.world.queries.iter().zip(&golds).zip(&self.world.query_concepts) {
            let p = self.engine.type_query(q, &params).map_err(|e| e.to_string())?;
            let set = p.type_set();
            views.push(QueryView {
                id: &q.sentence.sentence_id,
                text: q.sentence.tokens.join(" "),
                mention: q.sentence.surface(),
                concept,
                gold: gold.iter().cloned().collect(),
                predicted: set.iter().cloned().collect(),
                correct: &set == gold,
                trace: p.trace,
            });
            preds.push(set);
        }
        let report = MetricsReport::compute(&golds, &preds).map_err(|e| e.to_string())?;
        Ok(json!({ "report": report, "queries": views }))
    }

    fn coverage_inner(&self, max_ell: usize) -> Result<Value, String> {
        if max_ell == 0 {
            return Err("max_ell must be at least 1".into());
        }
        let params = InferenceParams {
            ell_esa: max_ell,
            ..InferenceParams::default()
        };
        let mut lists = Vec::new();
        for q in &self.world.queries {
            lists.push(self.engine.ranked_candidates(q, &params).map_err(|e| e.to_string())?.0);
        }
        let golds = gold_sets(&self.world.queries).map_err(|e| e.to_string())?;
        let curve = coverage_curve(&golds, &lists, &self.engine.targets, max_ell).map_err(|e| e.to_string())?;
        let points: Vec<Value> = curve.iter().map(|(l, c)| json!([l, c])).collect();
        Ok(Value::Array(points))
    }
}
