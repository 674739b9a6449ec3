//! Flag parsing and the key=value configuration file.
//!
//! A config file is TOML: top-level keys mirror the long flags, and scenario
//! parameters for `simulate`/`pipeline` live in a `[scenario]` table. Flags
//! given on the command line win over the file.
//!
//! ```toml
//! variant = "all"
//! formula = "ochiai"
//! cutoff = 0.3
//! mask = "ideal"
//! seed = 0
//! count = 200
//!
//! [scenario]
//! p_flip = 0.05
//! locality_span = 0
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use dkmr_core::synth::ScenarioParams;
use dkmr_core::{DenoiseConfig, Formula, MaskKind, Variant};
use serde::Deserialize;

use crate::UsageError;

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Input dataset directory, matrix file or report root, depending on the command.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// full, denoise-only, metallaxis or all.
    #[arg(long)]
    pub variant: Option<String>,
    /// dstar, dstarN, gp13, jaccard, ochiai, op2, tarantula or all.
    #[arg(long)]
    pub formula: Option<String>,
    /// Low-pass cutoff D0 in (0, 1].
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// ideal or gaussian.
    #[arg(long)]
    pub mask: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of scenarios to generate.
    #[arg(long)]
    pub count: Option<usize>,
    /// Print per-stage wall time to stderr.
    #[arg(long)]
    pub timings: bool,
    /// TOML file with defaults for any of the flags above.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub variant: Option<String>,
    pub formula: Option<String>,
    pub cutoff: Option<f64>,
    pub mask: Option<String>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub timings: Option<bool>,
    #[serde(default)]
    pub scenario: ScenarioOverrides,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub n_statements: Option<usize>,
    pub mutants_per_statement: Option<usize>,
    pub n_failing_tests: Option<usize>,
    pub n_passing_tests: Option<usize>,
    pub n_faulty_statements: Option<usize>,
    pub p_detect: Option<f64>,
    pub p_couple: Option<f64>,
    pub p_flip: Option<f64>,
    pub p_strong_given_weak: Option<f64>,
    pub p_pass_kill: Option<f64>,
    pub locality_span: Option<usize>,
}

impl ScenarioOverrides {
    pub fn apply(&self, mut p: ScenarioParams) -> ScenarioParams {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { p.$field = v; })*
            };
        }
        set!(
            n_statements,
            mutants_per_statement,
            n_failing_tests,
            n_passing_tests,
            n_faulty_statements,
            p_detect,
            p_couple,
            p_flip,
            p_strong_given_weak,
            p_pass_kill,
            locality_span
        );
        p
    }
}

/// Fully resolved settings for one command invocation.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub variants: Vec<Variant>,
    pub formulas: Vec<Formula>,
    pub denoise: DenoiseConfig,
    pub seed: u64,
    pub count: usize,
    pub timings: bool,
    pub params: ScenarioParams,
}

pub const DEFAULT_COUNT: usize = 200;

fn parse_list<T: Copy + std::str::FromStr<Err = String>>(
    flag: &str,
    value: &str,
    all: &[T],
) -> Result<Vec<T>, UsageError> {
    if value.eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    value
        .parse()
        .map(|v| vec![v])
        .map_err(|e| UsageError(format!("--{flag}: {e}")))
}

impl PipelineConfig {
    /// Merges flags over the config file over defaults. `default_variants` is
    /// used when neither names a variant.
    pub fn resolve(args: &CommonArgs, default_variants: &[Variant]) -> Result<Self, UsageError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let variants = match args.variant.as_ref().or(file.variant.as_ref()) {
            Some(v) => parse_list("variant", v, &Variant::ALL)?,
            None => default_variants.to_vec(),
        };
        let formulas = match args.formula.as_ref().or(file.formula.as_ref()) {
            Some(f) => parse_list("formula", f, &Formula::ALL)?,
            None => vec![Formula::Ochiai],
        };
        let mask = match args.mask.as_ref().or(file.mask.as_ref()) {
            Some(m) => m
                .parse::<MaskKind>()
                .map_err(|e| UsageError(format!("--mask: {e}")))?,
            None => MaskKind::default(),
        };
        let cutoff = args
            .cutoff
            .or(file.cutoff)
            .unwrap_or(DenoiseConfig::default().cutoff_d0);
        let denoise =
            DenoiseConfig::new(cutoff, mask).map_err(|e| UsageError(format!("--cutoff: {e}")))?;
        let count = args.count.or(file.count).unwrap_or(DEFAULT_COUNT);
        if count == 0 {
            return Err(UsageError("--count must be >= 1".into()));
        }
        let params = file.scenario.apply(ScenarioParams::default());
        params.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(Self {
            input: args.input.clone().or(file.input),
            output: args.output.clone().or(file.output),
            variants,
            formulas,
            denoise,
            seed: args.seed.or(file.seed).unwrap_or(0),
            count,
            timings: args.timings || file.timings.unwrap_or(false),
            params,
        })
    }

    pub fn input(&self) -> Result<&Path, UsageError> {
        self.input
            .as_deref()
            .ok_or_else(|| UsageError("missing --input".into()))
    }

    pub fn output(&self) -> Result<&Path, UsageError> {
        self.output
            .as_deref()
            .ok_or_else(|| UsageError("missing --output".into()))
    }
}
