pub mod codec;
pub mod graph;
pub mod rng;
pub mod tasks;
pub mod sandbox;
pub mod forge;
pub mod manifest;
pub mod prompt;
pub mod pool;
pub mod inference;
pub mod library;
pub mod rlcf;
pub mod cli;
