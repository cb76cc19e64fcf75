//! Exact Hausdorff premeasures of closed subsets of Cantor space, and the
//! effective constructions built on them.

pub mod bits;
pub mod construct;
pub mod dag;
pub mod error;
pub mod gadgets;
pub mod measure;
pub mod spec;
pub mod trees;
pub mod weights;

pub use bits::{BitString, CodePrefix};
pub use construct::{
    approx_subset, baire_intersect, besicovitch_extract, dense_monotone_min, interpolate_subset, lebesgue_path,
    pruned_approx_subset, thin_test, thinify, BesicovitchConfig, DensityTarget, Extraction, InterpolationResult,
    MonotoneFn, RefinementCertificate, ThinParams,
};
pub use dag::{DagCode, Forest, NodeId};
pub use error::{Error, Family, Result};
pub use gadgets::{build_gadget, check_gadget, eval_counterexample, GadgetInstance, GadgetKind, InjectionTable};
pub use measure::{htilde, htilde_bruteforce, htilde_code, CoverSet, MeasureBracket, MeasureValue, Premeasure};
pub use spec::{parse_spec, SpecSource, TreeSpec};
pub use trees::{validate_code, Builtin, SubtreeCodePrefix, TreeSource, TruncatedTree};
pub use weights::{AlgebraicWeight, Dyadic, Exponent};
