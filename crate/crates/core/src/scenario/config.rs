//! Suite configuration and its flat `key = value` text format.
//!
//! ```text
//! # comments and blank lines are ignored
//! seed = 42
//! datasets = camera, dalle2
//! scenarios = ideal, redundancy, multidimensional, nonnormal
//! likert_levels = 5        # or "none" for continuous responses
//! ```
//!
//! Every field of [`SuiteConfig`] has a key of the same name; see
//! [`SuiteConfig::KEYS`]. Later assignments override earlier ones, which is
//! how command-line flags are layered over a file.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::data::VarianceMode;
use crate::error::{Error, Result};
use crate::measures::{Measure, OmegaVariant, SplitScheme};
use crate::optimizer::{ProposalMode, SearchParams, DEFAULT_RESTARTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Tau-equivalent one-factor data.
    Ideal,
    /// Ideal data plus near-duplicate items.
    Redundancy,
    /// Two latent traits on disjoint item blocks.
    Multidimensional,
    /// Skewed responses with autocorrelated item errors.
    NonNormal,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::Ideal,
        ScenarioKind::Redundancy,
        ScenarioKind::Multidimensional,
        ScenarioKind::NonNormal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Ideal => "ideal",
            ScenarioKind::Redundancy => "redundancy",
            ScenarioKind::Multidimensional => "multidimensional",
            ScenarioKind::NonNormal => "nonnormal",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub datasets: Vec<String>,
    pub scenarios: Vec<ScenarioKind>,
    pub n_respondents: usize,
    pub n_items: usize,
    pub loading: f64,
    pub noise_sd: f64,
    pub likert_levels: Option<u32>,
    /// `None` appends `n_items / 2` duplicates.
    pub redundancy_count: Option<usize>,
    pub redundancy_factor: f64,
    pub redundancy_noise_sd: Option<f64>,
    pub k1: usize,
    pub k2: usize,
    pub trait_correlation: f64,
    pub multi_loading: f64,
    pub multi_noise_sd: f64,
    pub skew_strength: f64,
    pub error_rho: f64,
    pub nonnormal_loading: f64,
    pub nonnormal_noise_sd: f64,
    pub measures: Vec<Measure>,
    pub omega_variant: OmegaVariant,
    pub restarts: usize,
    pub max_non_improving: Option<u64>,
    pub proposal_mode: ProposalMode,
    pub variance_mode: VarianceMode,
    pub split_scheme: SplitScheme,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            datasets: ["camera", "dalle2", "dalle3", "stable_diffusion"]
                .map(String::from)
                .to_vec(),
            scenarios: ScenarioKind::ALL.to_vec(),
            n_respondents: 350,
            n_items: 15,
            loading: 0.8,
            noise_sd: 0.6,
            likert_levels: Some(5),
            redundancy_count: None,
            redundancy_factor: 0.95,
            redundancy_noise_sd: None,
            k1: 8,
            k2: 8,
            trait_correlation: 0.0,
            multi_loading: 0.8,
            multi_noise_sd: 0.6,
            skew_strength: 1.5,
            error_rho: 0.6,
            nonnormal_loading: 0.2,
            nonnormal_noise_sd: 2.0,
            measures: Measure::ALL.to_vec(),
            omega_variant: OmegaVariant::SumSq,
            restarts: DEFAULT_RESTARTS,
            max_non_improving: None,
            proposal_mode: ProposalMode::default(),
            variance_mode: VarianceMode::Sample,
            split_scheme: SplitScheme::OddEven,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse {value:?} for {key}"))
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> std::result::Result<Option<T>, String> {
    match value.trim() {
        "" | "none" | "auto" => Ok(None),
        v => parse(key, v).map(Some),
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl SuiteConfig {
    pub const KEYS: [&'static str; 28] = [
        "seed",
        "datasets",
        "scenarios",
        "n_respondents",
        "n_items",
        "loading",
        "noise_sd",
        "likert_levels",
        "redundancy_count",
        "redundancy_factor",
        "redundancy_noise_sd",
        "k1",
        "k2",
        "trait_correlation",
        "multi_loading",
        "multi_noise_sd",
        "skew_strength",
        "error_rho",
        "nonnormal_loading",
        "nonnormal_noise_sd",
        "measures",
        "omega_variant",
        "restarts",
        "max_non_improving",
        "proposal_mode",
        "variance_mode",
        "split_scheme",
        "version",
    ];

    /// Applies one assignment. Errors carry no line number; callers add it.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "seed" => self.seed = parse(key, v)?,
            "datasets" => {
                let labels: Vec<String> = list(v).map(String::from).collect();
                if labels.is_empty() {
                    return Err("datasets must name at least one label".into());
                }
                self.datasets = labels;
            }
            "scenarios" => {
                self.scenarios = list(v)
                    .map(|s| s.parse().map_err(|e: Error| e.to_string()))
                    .collect::<std::result::Result<_, _>>()?;
            }
            "n_respondents" => self.n_respondents = parse(key, v)?,
            "n_items" => self.n_items = parse(key, v)?,
            "loading" => self.loading = parse(key, v)?,
            "noise_sd" => self.noise_sd = parse(key, v)?,
            "likert_levels" => {
                self.likert_levels = match v {
                    "none" | "continuous" | "0" => None,
                    _ => Some(parse(key, v)?),
                }
            }
            "redundancy_count" => self.redundancy_count = parse_optional(key, v)?,
            "redundancy_factor" => self.redundancy_factor = parse(key, v)?,
            "redundancy_noise_sd" => self.redundancy_noise_sd = parse_optional(key, v)?,
            "k1" => self.k1 = parse(key, v)?,
            "k2" => self.k2 = parse(key, v)?,
            "trait_correlation" => self.trait_correlation = parse(key, v)?,
            "multi_loading" => self.multi_loading = parse(key, v)?,
            "multi_noise_sd" => self.multi_noise_sd = parse(key, v)?,
            "skew_strength" => self.skew_strength = parse(key, v)?,
            "error_rho" => self.error_rho = parse(key, v)?,
            "nonnormal_loading" => self.nonnormal_loading = parse(key, v)?,
            "nonnormal_noise_sd" => self.nonnormal_noise_sd = parse(key, v)?,
            "measures" => {
                self.measures =
                    Measure::parse_list(v, self.omega_variant).map_err(|e| e.to_string())?
            }
            "omega_variant" => self.omega_variant = v.parse().map_err(|e: Error| e.to_string())?,
            "restarts" => self.restarts = parse(key, v)?,
            "max_non_improving" => self.max_non_improving = parse_optional(key, v)?,
            "proposal_mode" => self.proposal_mode = v.parse().map_err(|e: Error| e.to_string())?,
            "variance_mode" => self.variance_mode = v.parse().map_err(|e: Error| e.to_string())?,
            "split_scheme" => self.split_scheme = v.parse().map_err(|e: Error| e.to_string())?,
            // Informational only; written by `to_pairs`.
            "version" => {}
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Parses a whole config file on top of the defaults.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            self.set(key, value).map_err(|message| Error::Config {
                line: i + 1,
                message,
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.n_respondents < 2 {
            return Err(Error::TooFewRespondents(self.n_respondents));
        }
        if self.n_items < 2 {
            return bad("n_items must be >= 2");
        }
        if self.k1 < 2 || self.k2 < 2 {
            return bad("k1 and k2 must be >= 2");
        }
        if self.scenarios.is_empty() {
            return bad("no scenarios selected");
        }
        if self.measures.is_empty() {
            return bad("no measures selected");
        }
        let mut labels = self.datasets.clone();
        labels.sort();
        labels.dedup();
        if labels.len() != self.datasets.len() {
            return bad("dataset labels must be distinct");
        }
        if self.redundancy_count == Some(0) {
            return bad("redundancy_count must be >= 1");
        }
        self.search_params(0).validate()
    }

    pub fn search_params(&self, seed: u64) -> SearchParams {
        SearchParams {
            seed,
            restarts: self.restarts,
            max_non_improving: self.max_non_improving,
            proposal_mode: self.proposal_mode,
        }
    }

    pub fn redundancy_count(&self) -> usize {
        self.redundancy_count.unwrap_or((self.n_items / 2).max(1))
    }

    /// Every parameter as text, in key order; feeding these back through
    /// [`SuiteConfig::set`] reproduces the configuration.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
        }
        let join = |items: Vec<&str>| items.join(",");
        let mut out = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            out.insert(k.to_string(), v);
        };
        put("seed", self.seed.to_string());
        put("datasets", self.datasets.join(","));
        put("scenarios", join(self.scenarios.iter().map(|s| s.name()).collect()));
        put("n_respondents", self.n_respondents.to_string());
        put("n_items", self.n_items.to_string());
        put("loading", self.loading.to_string());
        put("noise_sd", self.noise_sd.to_string());
        put("likert_levels", opt(&self.likert_levels));
        put("redundancy_count", opt(&self.redundancy_count));
        put("redundancy_factor", self.redundancy_factor.to_string());
        put("redundancy_noise_sd", opt(&self.redundancy_noise_sd));
        put("k1", self.k1.to_string());
        put("k2", self.k2.to_string());
        put("trait_correlation", self.trait_correlation.to_string());
        put("multi_loading", self.multi_loading.to_string());
        put("multi_noise_sd", self.multi_noise_sd.to_string());
        put("skew_strength", self.skew_strength.to_string());
        put("error_rho", self.error_rho.to_string());
        put("nonnormal_loading", self.nonnormal_loading.to_string());
        put("nonnormal_noise_sd", self.nonnormal_noise_sd.to_string());
        put("measures", join(self.measures.iter().map(|m| m.name()).collect()));
        put("omega_variant", self.omega_variant.name().to_string());
        put("restarts", self.restarts.to_string());
        put("max_non_improving", opt(&self.max_non_improving));
        put("proposal_mode", self.proposal_mode.name().to_string());
        put("variance_mode", self.variance_mode.name().to_string());
        put("split_scheme", self.split_scheme.to_string());
        out
    }

    pub fn to_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
