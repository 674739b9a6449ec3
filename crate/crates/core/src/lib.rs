//! Denoising-based kill matrix refinement for mutation-based fault
//! localization.
//!
//! The pipeline turns raw `(mutant, test)` execution records into an ordered
//! kill matrix, enhances it with strong-kill information, low-pass filters it
//! in the frequency domain, and scores program statements with fuzzy kill
//! statistics. The [`metrics`] module evaluates rankings against known faults
//! and [`synth`] generates seeded scenarios with ground truth.
//!
//! ```
//! use dkmr_core::{localize, DenoiseConfig, Formula, Variant};
//! use dkmr_core::synth::{generate_scenario, ScenarioParams};
//!
//! let scenario = generate_scenario(&ScenarioParams::default(), 7).unwrap();
//! let report = localize(
//!     &scenario.dataset,
//!     Variant::Full,
//!     Formula::Ochiai,
//!     &DenoiseConfig::default(),
//! )
//! .unwrap();
//! assert_eq!(report.ranking[0].rank, 1);
//! ```

pub mod denoise;
pub mod enhance;
mod error;
pub mod killdata;
pub mod matrix;
pub mod metrics;
pub mod suspicion;
pub mod synth;

pub use denoise::{refine, DenoiseConfig, MaskKind, RefinedKillMatrix, Spectrum};
pub use enhance::{
    build_enhanced_matrix, build_weak_matrix, classify_kill, BooleanKillMatrix, EnhancedKillMatrix,
    KillClass, KillMatrix,
};
pub use error::{Error, Result};
pub use killdata::{
    load_dataset, order_axes, Dataset, ExecutionRecord, GroundTruth, MutantMeta, Outcome,
    Statement, TestMeta, Verdict,
};
pub use matrix::Matrix;
pub use metrics::{evaluate, EvaluationReport, StatTestResult, VersionResult};
pub use suspicion::{localize, Formula, RankedStatement, SuspiciousnessReport, Variant};
