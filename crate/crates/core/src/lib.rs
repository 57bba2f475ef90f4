//! Measurement and mitigation of gender bias in word embeddings of
//! grammatically gendered languages, and in bilingual spaces that align
//! such a language with English.

pub mod bias;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod lexicon;
pub mod linalg;
pub mod mitigation;
pub mod stats;
pub mod synthetic;

pub use embedding::{
    cosine, load_text_embeddings, save_text_embeddings, top_k, BilingualSpace, EmbeddingSpace,
    LoadStats, Neighbor, SpaceBuilder,
};
pub use error::{Error, Result};
pub use geometry::{GenderDirections, Ridge};
pub use lexicon::{BilingualDictionary, GenderLexicon, GenderPair, OccupationPair};
