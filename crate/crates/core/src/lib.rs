//! Toolkit for a task-oriented spoken dialogue system in the early
//! math-learning domain, plus the evaluation machinery to study how
//! speech-recognition errors propagate through intent recognition into
//! dialogue-policy response selection.
//!
//! The pipeline is text-in/text-out: a simulated ASR noise channel stands
//! in for a real speech recognizer, so every experiment is deterministic
//! and reproducible from a seed.
//!
//! Modules follow the pipeline order:
//!
//! - [`corpus`]: dataset schema, synthetic math-game corpora, episodes.
//! - [`featurize`]: tokenization, sparse n-gram features, dense embedding
//!   providers backed by a file cache or a hashing fallback.
//! - [`nlu`]: joint intent classification and entity recognition.
//! - [`dm`]: dialogue state tracking and a transformer next-action policy.
//! - [`nlg`]: template-based response rendering.
//! - [`asr_sim`]: word-error-rate computation and a calibrated noise channel.
//! - [`eval`]: metrics and the staged pipeline evaluation harness.

pub mod asr_sim;
pub mod corpus;
pub mod dm;
pub mod error;
pub mod eval;
pub mod featurize;
pub mod nlg;
pub mod nlu;
pub mod nn;

pub use error::{Error, Result};
