//! Split generation, rendering, evaluation and analysis for morphological
//! inflection experiments built around language-independent (BLIND) and
//! language-specific (PROBE) train/test splits.

pub mod baseline;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod manifest;
pub mod normalize;
pub mod pipeline;
pub mod probes;
pub mod rng;
pub mod split;
pub mod stats;
pub mod transcribe;

pub use corpus::{Corpus, CorpusSummary, LanguageConfig, Triple};
pub use error::{Error, Result};
pub use features::{FeatureSet, FeatureTag, TagOrdering};
