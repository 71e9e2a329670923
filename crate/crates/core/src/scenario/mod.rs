//! Synthetic stress scenarios and the suite that benchmarks measures on them.

pub mod config;
pub mod generators;
pub mod suite;

pub use config::{ScenarioKind, SuiteConfig};
pub use generators::{
    apply_nonnormal_correlated, discretize, generate_multidimensional, generate_unidimensional,
    inject_redundancy, skew_transform, MultidimensionalSpec, NonNormalSpec, RedundancySpec,
    SyntheticSpec,
};
pub use suite::{
    dataset_seed, measure_params, multidimensional_baseline, nonnormal_baseline, run_scenario_suite,
    scenario_matrix, ScenarioReport, ScenarioRow,
};
