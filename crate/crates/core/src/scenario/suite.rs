use serde::Serialize;

use crate::data::ResponseMatrix;
use crate::error::Result;
use crate::measures::{Measure, MeasureParams};
use crate::par;
use crate::report::{time_measures, Report, ReportMeta, ReportRow};

use super::config::{ScenarioKind, SuiteConfig};
use super::generators::{
    apply_nonnormal_correlated, generate_multidimensional, generate_unidimensional,
    inject_redundancy, MultidimensionalSpec, NonNormalSpec, RedundancySpec, SyntheticSpec,
};

/// Seed for the `index`-th dataset label; shared by every scenario so that
/// scenarios built on the same base data see the same draws.
pub fn dataset_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// The tau-equivalent base data for one dataset.
pub fn ideal_spec(config: &SuiteConfig, seed: u64) -> SyntheticSpec {
    SyntheticSpec::equal_loadings(
        config.n_respondents,
        config.n_items,
        config.loading,
        config.noise_sd,
        config.likert_levels,
        seed,
    )
}

/// The unidimensional data matched to the multidimensional scenario:
/// same item count, loadings, noise and seed, but one trait.
pub fn multidimensional_baseline(config: &SuiteConfig, seed: u64) -> Result<ResponseMatrix> {
    generate_unidimensional(&SyntheticSpec::equal_loadings(
        config.n_respondents,
        config.k1 + config.k2,
        config.multi_loading,
        config.multi_noise_sd,
        config.likert_levels,
        seed,
    ))
}

/// Unidimensional data matched to the non-normal scenario (no skew, no
/// error correlation).
pub fn nonnormal_baseline(config: &SuiteConfig, seed: u64) -> Result<ResponseMatrix> {
    generate_unidimensional(&SyntheticSpec::equal_loadings(
        config.n_respondents,
        config.n_items,
        config.nonnormal_loading,
        config.nonnormal_noise_sd,
        config.likert_levels,
        seed,
    ))
}

pub fn scenario_matrix(config: &SuiteConfig, kind: ScenarioKind, seed: u64) -> Result<ResponseMatrix> {
    match kind {
        ScenarioKind::Ideal => generate_unidimensional(&ideal_spec(config, seed)),
        ScenarioKind::Redundancy => {
            let base = generate_unidimensional(&ideal_spec(config, seed))?;
            inject_redundancy(
                &base,
                &RedundancySpec {
                    count: config.redundancy_count(),
                    factor: config.redundancy_factor,
                    noise_sd: config.redundancy_noise_sd,
                    likert_levels: config.likert_levels,
                    seed,
                },
            )
        }
        ScenarioKind::Multidimensional => generate_multidimensional(&MultidimensionalSpec {
            n_respondents: config.n_respondents,
            loadings_first: vec![config.multi_loading; config.k1],
            loadings_second: vec![config.multi_loading; config.k2],
            trait_correlation: config.trait_correlation,
            noise_sd: config.multi_noise_sd,
            likert_levels: config.likert_levels,
            seed,
        }),
        ScenarioKind::NonNormal => apply_nonnormal_correlated(&NonNormalSpec {
            base: SyntheticSpec::equal_loadings(
                config.n_respondents,
                config.n_items,
                config.nonnormal_loading,
                config.nonnormal_noise_sd,
                config.likert_levels,
                seed,
            ),
            skew_strength: config.skew_strength,
            error_rho: config.error_rho,
        }),
    }
}

pub fn measure_params(config: &SuiteConfig, seed: u64) -> MeasureParams {
    MeasureParams {
        variance_mode: config.variance_mode,
        split_scheme: config.split_scheme,
        search: config.search_params(seed),
        ..MeasureParams::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRow {
    pub scenario: ScenarioKind,
    pub dataset: String,
    pub measure: Measure,
    pub value: Option<f64>,
    pub seconds: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub config: SuiteConfig,
    /// Ordered by scenario, then dataset, then measure, as configured.
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioReport {
    pub fn value(&self, scenario: ScenarioKind, dataset: &str, measure: Measure) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.dataset == dataset && r.measure == measure)
            .and_then(|r| r.value)
    }

    /// Flattens to report rows labelled `scenario/dataset`.
    pub fn to_report(&self) -> Report {
        let rows = self
            .rows
            .iter()
            .map(|r| ReportRow {
                dataset: format!("{}/{}", r.scenario.name(), r.dataset),
                measure: r.measure.name().to_string(),
                value: r.value,
                seconds: r.seconds,
                note: r.note.clone(),
            })
            .collect();
        Report {
            meta: ReportMeta::new("scenario", self.config.seed, self.config.to_pairs()),
            rows,
        }
    }
}

/// Generates every (scenario, dataset) pair and evaluates the configured
/// measures on it. Measure failures become rows with no value and a note.
pub fn run_scenario_suite(config: &SuiteConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let jobs: Vec<(ScenarioKind, usize)> = config
        .scenarios
        .iter()
        .flat_map(|&s| (0..config.datasets.len()).map(move |d| (s, d)))
        .collect();

    let per_job = par::map_indices(jobs.len(), |i| {
        let (scenario, d) = jobs[i];
        let seed = dataset_seed(config.seed, d);
        let label = &config.datasets[d];
        let row = |measure, value, seconds, note| ScenarioRow {
            scenario,
            dataset: label.clone(),
            measure,
            value,
            seconds,
            note,
        };
        match scenario_matrix(config, scenario, seed) {
            Ok(m) => time_measures(&m, &config.measures, &measure_params(config, seed))
                .into_iter()
                .map(|t| {
                    let measure = t.measure;
                    let r = t.into_row(label);
                    row(measure, r.value, r.seconds, r.note)
                })
                .collect::<Vec<_>>(),
            Err(e) => config
                .measures
                .iter()
                .map(|&measure| {
                    row(measure, None, 0.0, Some(format!("{}: generation failed: {e}", e.code())))
                })
                .collect(),
        }
    });

    Ok(ScenarioReport {
        config: config.clone(),
        rows: per_job.into_iter().flatten().collect(),
    })
}
