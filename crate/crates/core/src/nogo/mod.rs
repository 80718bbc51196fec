//! Robust embeddings into repeated games and the extraction pipeline that
//! turns a robust one into a rectangle contradicting fortification.

pub mod bounds;
pub mod embedding;
pub mod experiment;
pub mod extract;

pub use bounds::{bound_table, BoundTable};
pub use embedding::{make_embedding, robustness_fraction, trivial_strategy, EmbProvider, EmbeddingMap};
pub use experiment::{nogo_experiment, Branch, NoGoVerdict};
pub use extract::{extract_rectangle, ExtractionTrace};
