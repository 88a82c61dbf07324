//! Run configuration: a TOML file, overridden by command-line flags.
//!
//! ```toml
//! corpus = "corpus.jsonl"
//! concept_types = "types.tsv"
//! typedefs = "figer.typedefs"
//! index = "index.bin"
//! priors = "priors.tsv"
//! reps = "reps.bin"
//! encoder = "hashing"        # or "vectors", which needs `vectors`
//! fallback = "abstain"       # or a target type; default is the OTHER type if defined
//! threads = 4
//!
//! [params]
//! lambda = 0.5
//! eta_s = 0.8
//! eta_c = 0.3
//! ell_esa = 300
//! ell_elmo = 20
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use typeground::inference::InferenceParams;

use crate::error::{CliError, CliResult};

pub const CONFIG_ENV: &str = "TYPEGROUND_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EncoderChoice {
    Hashing,
    Vectors,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    lambda: Option<f64>,
    eta_s: Option<f64>,
    eta_c: Option<f64>,
    ell_esa: Option<usize>,
    ell_elmo: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    corpus: Option<PathBuf>,
    concept_types: Option<PathBuf>,
    typedefs: Option<PathBuf>,
    vectors: Option<PathBuf>,
    index: Option<PathBuf>,
    priors: Option<PathBuf>,
    reps: Option<PathBuf>,
    encoder: Option<EncoderChoice>,
    fallback: Option<String>,
    threads: Option<usize>,
    #[serde(default)]
    params: ParamsFile,
}

/// Resource locations shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ResourceArgs {
    /// TOML run configuration
    #[arg(long, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Mention corpus (JSON lines)
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Concept to primitive-type table (TSV)
    #[arg(long)]
    pub concept_types: Option<PathBuf>,
    /// Type-definition rules
    #[arg(long)]
    pub typedefs: Option<PathBuf>,
    /// Precomputed sentence vectors (binary or TSV)
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub priors: Option<PathBuf>,
    #[arg(long)]
    pub reps: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub encoder: Option<EncoderChoice>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta_s: Option<f64>,
    #[arg(long)]
    pub eta_c: Option<f64>,
    #[arg(long)]
    pub ell_esa: Option<usize>,
    #[arg(long)]
    pub ell_elmo: Option<usize>,
    /// "abstain" or a target type used when no concept is found
    #[arg(long)]
    pub fallback: Option<String>,
    /// Worker threads; 0 uses all cores
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub concept_types: Option<PathBuf>,
    pub typedefs: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub priors: Option<PathBuf>,
    pub reps: Option<PathBuf>,
    pub encoder: EncoderChoice,
    pub fallback: Option<String>,
    pub threads: usize,
    pub params: InferenceParams,
}

fn resolve(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_relative() { base.join(p) } else { p })
}

impl RunConfig {
    pub fn load(res: &ResourceArgs, params: &ParamArgs) -> CliResult<Self> {
        let file = match &res.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                let parsed: ConfigFile = toml::from_str(&text)
                    .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e.message())))?;
                let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
                ConfigFile {
                    corpus: resolve(&base, parsed.corpus),
                    concept_types: resolve(&base, parsed.concept_types),
                    typedefs: resolve(&base, parsed.typedefs),
                    vectors: resolve(&base, parsed.vectors),
                    index: resolve(&base, parsed.index),
                    priors: resolve(&base, parsed.priors),
                    reps: resolve(&base, parsed.reps),
                    ..parsed
                }
            }
            None => ConfigFile::default(),
        };
        let vectors = res.vectors.clone().or(file.vectors);
        let encoder = res.encoder.or(file.encoder).unwrap_or(if vectors.is_some() {
            EncoderChoice::Vectors
        } else {
            EncoderChoice::Hashing
        });
        let d = InferenceParams::default();
        let p = &file.params;
        let inference = InferenceParams {
            lambda: params.lambda.or(p.lambda).unwrap_or(d.lambda),
            eta_s: params.eta_s.or(p.eta_s).unwrap_or(d.eta_s),
            eta_c: params.eta_c.or(p.eta_c).unwrap_or(d.eta_c),
            ell_esa: params.ell_esa.or(p.ell_esa).unwrap_or(d.ell_esa),
            ell_elmo: params.ell_elmo.or(p.ell_elmo).unwrap_or(d.ell_elmo),
        };
        inference.validate().map_err(|e| CliError::Input(e.to_string()))?;
        let cfg = RunConfig {
            corpus: res.corpus.clone().or(file.corpus),
            concept_types: res.concept_types.clone().or(file.concept_types),
            typedefs: res.typedefs.clone().or(file.typedefs),
            vectors,
            index: res.index.clone().or(file.index),
            priors: res.priors.clone().or(file.priors),
            reps: res.reps.clone().or(file.reps),
            encoder,
            fallback: params.fallback.clone().or(file.fallback),
            threads: params.threads.or(file.threads).unwrap_or(0),
            params: inference,
        };
        if cfg.encoder == EncoderChoice::Vectors && cfg.vectors.is_none() {
            return Err(CliError::Input("encoder \"vectors\" needs a vectors path".into()));
        }
        Ok(cfg)
    }

    /// A configured path that must name an existing file.
    pub fn input(&self, what: &str, path: &Option<PathBuf>) -> CliResult<PathBuf> {
        match path {
            Some(p) if p.is_file() => Ok(p.clone()),
            Some(p) => Err(CliError::Input(format!("{what}: no such file: {}", p.display()))),
            None => Err(CliError::Input(format!("no {what} path given (flag or config)"))),
        }
    }

    /// An optional path that, when given, must exist.
    pub fn optional_input(&self, what: &str, path: &Option<PathBuf>) -> CliResult<Option<PathBuf>> {
        match path {
            Some(_) => self.input(what, path).map(Some),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_paths_resolve() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.toml");
        std::fs::write(
            &cfg_path,
            "corpus = \"c.jsonl\"\ntypedefs = \"/abs/t.typedefs\"\n[params]\nlambda = 0.7\neta_c = 0.4\n",
        )
        .unwrap();
        let res = ResourceArgs {
            config: Some(cfg_path),
            ..Default::default()
        };
        let params = ParamArgs {
            eta_c: Some(0.9),
            ..Default::default()
        };
        let cfg = RunConfig::load(&res, &params).unwrap();
        assert_eq!(cfg.corpus, Some(dir.path().join("c.jsonl")));
        assert_eq!(cfg.typedefs, Some(PathBuf::from("/abs/t.typedefs")));
        assert_eq!(cfg.params.lambda, 0.7);
        assert_eq!(cfg.params.eta_c, 0.9);
        assert_eq!(cfg.params.ell_elmo, 20);
        assert_eq!(cfg.encoder, EncoderChoice::Hashing);
    }

    #[test]
    fn unknown_keys_and_bad_params_are_input_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.toml");
        std::fs::write(&p, "corpse = \"x\"\n").unwrap();
        let res = ResourceArgs {
            config: Some(p),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::load(&res, &ParamArgs::default()),
            Err(CliError::Input(_))
        ));
        let params = ParamArgs {
            lambda: Some(1.5),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::load(&ResourceArgs::default(), &params),
            Err(CliError::Input(_))
        ));
    }
}
