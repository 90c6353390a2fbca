//! Partial quasi-metric spaces and Kannan-type fixed points.
//!
//! - [`spaces`]: point universes with a distance `p`, the conjugate
//!   `p^-1(x, y) = p(y, x)`, the symmetrization `p+ = p + p^-1`, and balls.
//! - [`axioms`]: exhaustive or seeded checks of the partial quasi-metric and
//!   partial metric axioms, and structure classification.
//! - [`kannan`]: self-maps, the p-Kannan condition and constant estimation.
//! - [`solver`]: Picard iteration to a fixed point with zero self-distance.
//! - [`completeness`]: Cauchy/convergence verdicts for sequences,
//!   completeness evidence, and the fixed-point-free Kannan map on an
//!   incomplete space.
//! - [`oracle`]: brute-force audits of every self-map of a small finite space.
//!
//! ```
//! use pqmetric::prelude::*;
//!
//! let space = builtin_space("paper_example").unwrap();
//! let (_, fixed) = iterate(&space, &Mapping::ExampleMap, Point::Coord(64.0), 1e-12, 100).unwrap();
//! assert_eq!(fixed.point, Point::Coord(0.0));
//! ```

pub mod axioms;
pub mod cli;
pub mod completeness;
pub mod error;
pub mod kannan;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::axioms::{
        check_axioms, check_derived_lemma, check_partial_metric, classify_structure, CheckMode,
        CheckStrategy, PointSampler, Structure,
    };
    pub use crate::completeness::{
        audit_counterexample, build_counterexample_map, classify_sequence, default_candidates,
        default_family, parse_sequence, probe_completeness, Notion, SequenceSpec,
    };
    pub use crate::error::{Error, Result};
    pub use crate::kannan::{
        check_kannan, check_lemma2, estimate_lambda, named_mapping, KannanConstant, LambdaEstimate, Mapping,
    };
    pub use crate::oracle::{
        enumerate_self_maps, exhaustive_kannan_audit, min_kannan_constant, random_valid_space, MinConstant,
    };
    pub use crate::report::VerificationReport;
    pub use crate::solver::{iterate, rate_bound_check, uniqueness_probe, verify_fixed_point, IterationTrace};
    pub use crate::spaces::{builtin_space, eval_distance, load_finite_space, Point, Space};
}
