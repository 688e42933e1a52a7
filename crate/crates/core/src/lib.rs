//! Isomorph-free generation of unlabelled 2-connected graphs by canonical
//! ear augmentation, with searches for uniquely `K_r`-saturated graphs and
//! edge-reconstruction checks built on the same engine.

pub mod canon;
pub mod engine;
pub mod error;
pub mod families;
pub mod graph;
pub mod graph6;
pub mod parallel;
pub mod reconstruction;
pub mod saturation;

pub use canon::{canonical_form, canonical_key, canonize, CanonKey, CanonicalForm};
pub use error::{ConfigError, Graph6Error, GraphError};
pub use graph::{Ear, Graph, CAP};
