//! Proper PAC learning on finite concept classes.
//!
//! The crate computes Helly-type parameters of finite classes (VC dimension,
//! star number, hollow star number, dual Helly number), runs the recursive
//! proper learners built on the projection operator, checks stable sample
//! compression schemes including hard-margin SVM, and reproduces the
//! lower-bound constructions as Monte Carlo experiments.

pub mod cli;
pub mod compression;
pub mod concept_class;
pub mod error;
pub mod learners;
pub mod parameters;
pub mod simulation;
pub mod svm;

pub use concept_class::{ConceptClass, Example, Label, Labeled, LabeledSample};
pub use error::{Error, Result};
