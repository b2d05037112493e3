//! Factorized latent Dirichlet allocation.
//!
//! Topics are trained by collapsed Gibbs sampling under a prior that pushes
//! each topic to be either private to one class or shared evenly by all
//! classes. The class-private part of the topic space then drives
//! maximum-likelihood classification while the shared part, which absorbs
//! class-independent structure such as function words, cancels out.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod factorization;
pub mod matrix;
pub mod model;
pub mod report;
pub mod sampler;

pub use classify::{
    classify, doc_log_likelihood, evaluate, holdout_split, EvalReport, HoldoutMode,
};
pub use corpus::{Corpus, Document, SyntheticSpec, Vocabulary};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::{Hyperparams, ModelState, TrainedModel};
pub use sampler::{train, train_chains, Sampler, SweepDiagnostics};
