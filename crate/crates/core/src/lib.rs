//! Exact arithmetic for families of abelian covers of the projective line:
//! cover data, eigenspace spectra, specialness rules, characteristic-p
//! Hasse-Witt blocks and bounded enumeration.

pub mod classify;
pub mod cover;
pub mod enumerate;
pub mod error;
pub mod hasse_witt;
pub mod residue;
mod snf;
pub mod spectrum;

pub use classify::{classify, ClassificationReport, Rule, Verdict};
pub use cover::{AbelianGroupStructure, CanonicalKey, CoverDatum, Equivalence};
pub use enumerate::{EnumerationRecord, SearchSpec, Shape};
pub use error::{Error, Result};
pub use spectrum::{spectrum_table, Character, EigenspaceRecord, SpectrumTable};

/// Version string written into generated table headers and manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
