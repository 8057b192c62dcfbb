//! Self-organizing constructive classifiers.
//!
//! The crate grows small, inspectable models from labeled data:
//!
//! - [`ecnn`]: evolving cascade networks that add input features and neurons
//!   only while the validation error keeps falling.
//! - [`gmdh`]: GMDH-type polynomial networks of two-input supporting neurons,
//!   grown layer by layer or by roulette selection.
//! - [`lmdt`]: linear machines, pocket/ratchet training, feature selection and
//!   pairwise neural decision trees for multi-class problems.
//! - [`ruletree`]: single-feature threshold rules extracted from the rows a
//!   trained network classifies correctly.
//! - [`baseline`]: a fully connected feed-forward network and PCA for comparison.
//!
//! [`model`] persists any trained learner as versioned JSON and [`cli`] wires
//! everything into the `sonn` command.

pub mod baseline;
pub mod cli;
pub mod dataset;
pub mod ecnn;
pub mod error;
pub mod gmdh;
pub mod lmdt;
pub mod model;
pub mod neurocore;
pub mod ruletree;
pub mod seeding;

pub use error::{Error, Result};
