//! Random edge-coloured grid jigsaws: generation, feasibility of placement
//! maps, local window search, reconstruction from decks, and exact oracles
//! for small instances.

pub mod feasibility;
pub mod format;
pub mod grid;
pub mod jigsaw;
pub mod oracle;
pub mod reconstruct;
pub mod rng;
pub mod sweep;
pub mod template;
pub mod union_find;
pub mod window;
