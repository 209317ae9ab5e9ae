//! Symbolic chain-of-thought corpora and the metrics used to probe how
//! models trained on them generalize.
//!
//! The crate covers the data side of the lab: a 26-letter symbolic algebra
//! with two cyclic transformations, corpus generation and serialization,
//! distribution-shift split construction, prompt perturbation, a small BPE
//! tokenizer with protected special tokens, generation scoring, and the
//! shift-complexity metrics (TGC, curve fits, alignment score, n-gram KL).

pub mod corpus;
pub mod element;
pub mod eval;
pub mod lens;
pub mod tokenizer;
pub mod transform;

pub use element::{atom_from_index, atom_index, enumerate_elements, Atom, Element};
pub use transform::{
    apply_rot, apply_shift, apply_transformation, build_chain, ReasoningChain, TransformKind,
    Transformation, TransformationRegistry,
};
