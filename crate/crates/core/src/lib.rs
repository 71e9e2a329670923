//! Monotone delta: an internal-consistency coefficient computed from a
//! weighted tournament over respondents, with classical reliability
//! measures and synthetic stress scenarios for comparison.
//!
//! ```
//! use monotone_delta::{monotone_delta, ResponseMatrix, SearchParams};
//!
//! let m = ResponseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]]).unwrap();
//! let r = monotone_delta(&m, &SearchParams::with_seed(7)).unwrap();
//! assert_eq!(r.c_star, 1);
//! assert_eq!(r.c_max, 6);
//! ```

pub mod data;
pub mod error;
pub mod measures;
pub mod optimizer;
mod par;
pub mod report;
pub mod scenario;
pub mod tournament;

pub use data::{load_csv, summarize, ResponseMatrix, SummaryStats, VarianceMode};
pub use error::{Error, Result};
pub use measures::{Measure, MeasureParams, MeasureValue, OmegaVariant, SplitScheme};
pub use optimizer::{
    exact_min_contradictions, initial_ordering, local_search, local_search_from, monotone_delta,
    swap_cost_delta, ExactResult, ProposalMode, SearchParams,
};
pub use par::is_parallel;
pub use report::{emit_report, time_measures, OutputFormat, Report, ReportMeta, ReportRow};
pub use tournament::{
    build_tournament, contradiction_count, delta_from_counts, max_contradictions, DeltaResult,
    DominanceMatrix, Ordering, SearchDiagnostics,
};
