//! Random groups in the square model.
//!
//! Sampling in the positive square model and the square model, a ℤ₄
//! triviality certificate built from the word-pair graph, a freeness
//! certificate built from the hypergraphs of the presentation complex,
//! an abelianization oracle, and abstract van Kampen diagrams with
//! fulfillment search and probability bounds.

pub mod abelian;
pub mod complex;
pub mod diagrams;
pub mod freeness;
pub mod harness;
pub mod model;
pub mod randgraph;
pub mod rng;
pub mod triviality;

pub use model::{
    count_words, is_cyclically_reduced, num_relators, sample_presentation, Density, Letter, Model, ModelError,
    Presentation, Relator,
};
