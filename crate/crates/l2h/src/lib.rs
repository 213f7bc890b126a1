//! Exact-arithmetic toolkit for cellular chain complexes over group rings.
//!
//! The crate builds chain complexes of universal covers from finite group
//! presentations, does exact rational group-ring arithmetic, certifies
//! spectral gaps of combinatorial Laplacians through rigorous norm bounds,
//! estimates normalized Betti numbers through finite quotients, and runs the
//! wedge-and-attach pipeline that kills degree-2 homology of a presentation
//! complex with three-cells.
//!
//! All certified quantities are exact rationals with directed rounding;
//! floating point appears only inside heuristics whose outputs are
//! re-certified exactly. With the default `parallel` feature the hot inner
//! loops (convolution, compression assembly, per-quotient scans) run on
//! rayon; disabling the feature yields bit-identical sequential results.

pub mod error;
pub mod word;
pub mod presentation;
pub mod group;
pub mod ring;
pub mod linalg;
pub mod snf;
pub mod complex;
pub mod cyclotomic;
pub mod quotient;
pub mod spectral;
pub mod hopf;
pub mod fw;
pub mod report;

pub(crate) mod par;

pub use error::{Error, Result};
