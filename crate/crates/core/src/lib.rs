//! Example-based verb sense disambiguation over a tree thesaurus, with a
//! selective-sampling trainer that picks the sentences whose labels are
//! expected to raise the system's certainty the most.

pub mod corpus;
pub mod db;
pub mod disambiguator;
pub mod error;
pub mod eval;
pub mod sampler;
pub mod synth;
pub mod thesaurus;

pub use db::{CommitPolicy, Complement, Database, FillerSet, SenseEntry, SentenceExample};
pub use disambiguator::{score_senses, CaseWeights, Interpretation, Ranking, Weighting};
pub use error::{Error, Result};
pub use sampler::{certainty, SamplerConfig, SamplingState, Strategy};
pub use thesaurus::{Sim, Thesaurus, MAX_SIM};
