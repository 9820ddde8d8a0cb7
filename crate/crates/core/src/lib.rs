//! TimeML datafile I/O, temporal closure reasoning, shared-task scoring and
//! ensemble merging of system annotations.

pub mod closure;
pub mod merging;
pub mod model;
pub mod scalar;
pub mod scoring;
pub mod stats;
pub mod timeml;

pub use closure::{ClosedGraph, Entailment, Inconsistency, PointGraph, PointRelation};
pub use model::{AnnotatedDocument, EntityRef, EventAnnotation, RelationType, Span, TemporalLink, TimexAnnotation, TimexType};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type Prf64 = scoring::Prf<f64>;
pub type ExactPrf = scoring::Prf<Rational>;
pub type ScoreReport64 = scoring::ScoreReport<f64>;
pub type ExactScoreReport = scoring::ScoreReport<Rational>;
/// Merge configuration with exact decimal weights.
pub type MergeConfig = merging::MergeConfig<Rational>;
