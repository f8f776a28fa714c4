//! Quantified reproducibility assessment (QRA).
//!
//! Given several measured quantity values for the same object (a system
//! variant) and measurand (an evaluation measure), each annotated with its
//! conditions of measurement, a QRA test reports the de-biased coefficient of
//! variation CV* with confidence statistics, along with which conditions were
//! the same and which differed.
//!
//! ```
//! use qra::{bundled_paper_dataset, run_qra_test, Classification};
//!
//! let dataset = bundled_paper_dataset();
//! let report = run_qra_test(&dataset, "NTS_def", "BLEU").unwrap();
//! assert_eq!(report.precision.n, 7);
//! assert!((report.precision.cv_star - 1.562).abs() < 0.001);
//! assert_eq!(report.classification, Classification::Reproducibility);
//! ```

pub mod engine;
pub mod fixture;
pub mod io;
pub mod model;
pub mod precision;
pub mod report;
pub mod sim;
pub mod special;

pub use engine::{
    assess_all, classify, condition_diff, run_qra_test, subgroup_assess, subgroup_assess_by,
    Classification, ConditionDiffMatrix, ConditionMatch, QraError, QraReport, Verdict,
};
pub use fixture::bundled_paper_dataset;
pub use io::{
    load_dataset, save_dataset, validate_dataset, DatasetError, Format, Severity, ValidationIssue,
};
pub use model::{
    default_condition_schema, group, ConditionCategory, ConditionSchema, ConditionValue, Measurand,
    Measurement, ObjectRef, QraDataset, ValueKind,
};
pub use precision::{
    c4, cv_star_pipeline, sample_stats, shift_values, stdev_ci95, stdev_stderr, t_quantile,
    unbiased_stdev, Interval, PrecisionResult, StatsError,
};
pub use report::{render_condition_matrix, render_precision_table, RenderFormat, RenderSpec};
pub use sim::{simulate, SimError, SimResult};
