//! Effective constructions on codes and trees.

pub mod baire;
pub mod besicovitch;
pub mod dmmin;
pub mod interpolate;
pub mod lebesgue;
pub mod thin;

pub use interpolate::{approx_subset, interpolate_subset, pruned_approx_subset, InterpolationResult, Selection};
pub use thin::{replace_cover, thin_test, thinify, ThinParams, ThinResult};
pub use besicovitch::{besicovitch_extract, verify_extraction, BesicovitchConfig, Extraction, RefinementCertificate};
pub use baire::{baire_intersect, BaireResult, OpenCode};
pub use dmmin::{dense_monotone_min, DensityTarget, DmminResult, MonotoneFn};
pub use lebesgue::lebesgue_path;
