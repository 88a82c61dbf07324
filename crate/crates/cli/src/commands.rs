use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use typeground::corpus::{load_concept_types, load_corpus, load_queries, read_queries, Corpus, QueryMention};
use typeground::encoder::{ConceptRepStore, EncoderBackend, HashingEncoder, PrecomputedEncoder};
use typeground::esa::EsaIndex;
use typeground::eval::{coverage_curve, elmonn_baseline, per_type_tsv, MetricsReport, TypeReps, TypeSet};
use typeground::inference::{Fallback, TypePrediction};
use typeground::pipeline::{gold_sets, read_predictions, write_predictions, Engine};
use typeground::prior::PriorTable;
use typeground::typedef::{depth, parse_typedefs, ConceptTargets, TypeDefinition};
use typeground::Error;

use crate::config::{EncoderChoice, ParamArgs, ResourceArgs, RunConfig};
use crate::error::{CliError, CliResult};

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| Error::io_at(path, e).into())
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>) -> CliResult<()> {
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

fn output(what: &str, flag: Option<PathBuf>, configured: &Option<PathBuf>) -> CliResult<PathBuf> {
    flag.or_else(|| configured.clone())
        .ok_or_else(|| CliError::Input(format!("no output path for the {what} (--out or config)")))
}

fn corpus(cfg: &RunConfig) -> CliResult<Corpus> {
    Ok(load_corpus(cfg.input("corpus", &cfg.corpus)?)?)
}

fn backend(cfg: &RunConfig) -> CliResult<Box<dyn EncoderBackend>> {
    Ok(match cfg.encoder {
        EncoderChoice::Hashing => Box::new(HashingEncoder::default()),
        EncoderChoice::Vectors => Box::new(PrecomputedEncoder::load(cfg.input("vectors", &cfg.vectors)?)?),
    })
}

fn typedefs(cfg: &RunConfig) -> CliResult<TypeDefinition> {
    let path = cfg.input("typedefs", &cfg.typedefs)?;
    let src = std::fs::read_to_string(&path).map_err(|e| Error::io_at(&path, e))?;
    let defs = parse_typedefs(&src).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for w in defs.warnings() {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(defs)
}

fn pool(cfg: &RunConfig) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn build_index(res: &ResourceArgs, out: Option<PathBuf>) -> CliResult<()> {
    let cfg = RunConfig::load(res, &ParamArgs::default())?;
    let out = output("index", out, &cfg.index)?;
    let index = EsaIndex::build(&corpus(&cfg)?);
    let mut w = create(&out)?;
    index.write_to(&mut w)?;
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn build_priors(res: &ResourceArgs, out: Option<PathBuf>) -> CliResult<()> {
    let cfg = RunConfig::load(res, &ParamArgs::default())?;
    let out = output("priors", out, &cfg.priors)?;
    let priors = PriorTable::build(&corpus(&cfg)?);
    let mut w = create(&out)?;
    priors.write_tsv(&mut w)?;
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn build_reps(res: &ResourceArgs, out: Option<PathBuf>) -> CliResult<()> {
    let cfg = RunConfig::load(res, &ParamArgs::default())?;
    let out = output("concept representations", out, &cfg.reps)?;
    let store = ConceptRepStore::build(backend(&cfg)?.as_ref(), &corpus(&cfg)?)?;
    let mut w = create(&out)?;
    store.write_to(&mut w)?;
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

/// Loads stored resources where configured and builds the rest from the corpus.
fn engine(cfg: &RunConfig) -> CliResult<Engine> {
    let defs = typedefs(cfg)?;
    let types = load_concept_types(cfg.input("concept types", &cfg.concept_types)?)?;
    let backend = backend(cfg)?;
    let index_path = cfg.optional_input("index", &cfg.index)?;
    let priors_path = cfg.optional_input("priors", &cfg.priors)?;
    let reps_path = cfg.optional_input("concept representations", &cfg.reps)?;
    let corpus = if index_path.is_none() || priors_path.is_none() || reps_path.is_none() {
        Some(corpus(cfg)?)
    } else {
        None
    };
    let index = match &index_path {
        Some(p) => EsaIndex::read_from(io::BufReader::new(open(p)?))?,
        None => EsaIndex::build(corpus.as_ref().unwrap()),
    };
    let priors = match &priors_path {
        Some(p) => PriorTable::load(p)?,
        None => PriorTable::build(corpus.as_ref().unwrap()),
    };
    let store = match &reps_path {
        Some(p) => ConceptRepStore::read_from(io::BufReader::new(open(p)?))?,
        None => ConceptRepStore::build(backend.as_ref(), corpus.as_ref().unwrap())?,
    };
    if store.dim() != backend.dim() {
        return Err(CliError::Input(format!(
            "concept representations have dimension {}, encoder produces {}",
            store.dim(),
            backend.dim()
        )));
    }
    let mut engine = Engine::from_parts(index, backend, store, priors, defs, &types);
    match cfg.fallback.as_deref() {
        Some("abstain") => engine.fallback = Fallback::Abstain,
        Some(t) => engine.fallback = Fallback::Target(t.to_string()),
        None => {}
    }
    Ok(engine)
}

fn queries(input: Option<&Path>) -> CliResult<Vec<QueryMention>> {
    Ok(match input {
        Some(p) => load_queries(p)?,
        None => read_queries(io::stdin().lock())?,
    })
}

pub fn type_mentions(
    res: &ResourceArgs,
    params: &ParamArgs,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let cfg = RunConfig::load(res, params)?;
    let engine = engine(&cfg)?;
    let queries = queries(input.as_deref())?;
    let preds: Vec<TypePrediction> = pool(&cfg)?.install(|| {
        queries
            .par_iter()
            .map(|q| engine.type_query(q, &cfg.params))
            .collect::<Result<_, _>>()
    })?;
    let mut w = sink(out.as_deref())?;
    write_predictions(&mut w, &preds)?;
    finish(w)
}

pub fn evaluate(
    gold: &Path,
    pred: &Path,
    out: Option<PathBuf>,
    per_type: Option<PathBuf>,
    json_only: bool,
) -> CliResult<()> {
    let golds = gold_sets(&load_queries(gold)?)?;
    let preds: Vec<TypeSet> = read_predictions(open(pred)?)?
        .iter()
        .map(TypePrediction::type_set)
        .collect();
    if golds.len() != preds.len() {
        return Err(CliError::Input(format!(
            "{} gold mentions but {} predictions",
            golds.len(),
            preds.len()
        )));
    }
    let report = MetricsReport::compute(&golds, &preds)?;
    let json = serde_json::to_string(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
    match &out {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{json}")
                .and_then(|_| w.flush())
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        }
        None => println!("{json}"),
    }
    if !json_only {
        print!("{report}");
    }
    if let Some(p) = per_type {
        let mut w = create(&p)?;
        w.write_all(per_type_tsv(&golds, &preds).as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    Ok(())
}

pub fn coverage(
    res: &ResourceArgs,
    params: &ParamArgs,
    input: &Path,
    max_ell: usize,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let cfg = RunConfig::load(res, params)?;
    if max_ell == 0 {
        return Err(CliError::Input("--max-ell must be at least 1".into()));
    }
    let engine = engine(&cfg)?;
    let queries = load_queries(input)?;
    let golds = gold_sets(&queries)?;
    let mut p = cfg.params;
    p.ell_esa = max_ell;
    let lists: Vec<Vec<String>> = pool(&cfg)?.install(|| {
        queries
            .par_iter()
            .map(|q| engine.ranked_candidates(q, &p).map(|(esa, _)| esa))
            .collect::<Result<_, _>>()
    })?;
    let curve = coverage_curve(&golds, &lists, &engine.targets, max_ell)?;
    let mut w = sink(out.as_deref())?;
    let write = |w: &mut Box<dyn Write>| -> io::Result<()> {
        writeln!(w, "ell\tcoverage")?;
        for (ell, c) in &curve {
            writeln!(w, "{ell}\t{c:.6}")?;
        }
        Ok(())
    };
    write(&mut w).map_err(|e| CliError::Runtime(e.to_string()))?;
    finish(w)
}

/// Top-k nearest types as a prediction record: the best-ranked coarse type
/// and every finer type among the k.
fn baseline_record(ranked: Vec<(String, f64)>) -> TypePrediction {
    let coarse = ranked.iter().find(|(t, _)| depth(t) == 1).map(|(t, _)| t.clone());
    let mut fine: Vec<String> = ranked
        .iter()
        .filter(|(t, _)| depth(t) >= 2)
        .map(|(t, _)| t.clone())
        .collect();
    fine.sort();
    let trace = ranked.iter().map(|(t, s)| format!("{t}: cosine {s:.4}")).collect();
    TypePrediction {
        coarse,
        fine,
        used_surface: false,
        concepts: Vec::new(),
        trace,
    }
}

pub fn baseline(res: &ResourceArgs, input: Option<PathBuf>, out: Option<PathBuf>, k: usize) -> CliResult<()> {
    let cfg = RunConfig::load(res, &ParamArgs::default())?;
    if k == 0 {
        return Err(CliError::Input("-k must be at least 1".into()));
    }
    let defs = typedefs(&cfg)?;
    let types = load_concept_types(cfg.input("concept types", &cfg.concept_types)?)?;
    let targets = ConceptTargets::build(&defs, &types);
    let backend = backend(&cfg)?;
    let reps = TypeReps::build(backend.as_ref(), &corpus(&cfg)?, &targets)?;
    let queries = queries(input.as_deref())?;
    let preds: Vec<TypePrediction> = pool(&cfg)?.install(|| {
        queries
            .par_iter()
            .map(|q| {
                let s = &q.sentence;
                elmonn_baseline(&s.sentence_id, &s.tokens, s.span, backend.as_ref(), &reps, k).map(baseline_record)
            })
            .collect::<Result<_, _>>()
    })?;
    let mut w = sink(out.as_deref())?;
    write_predictions(&mut w, &preds)?;
    finish(w)
}
