//! Construction and Monte Carlo simulation of fault-tolerant logical blocks:
//! cubical block templates compile to fusion networks, whose measurement
//! outcomes form syndrome graphs with logical membrane masks; an
//! erasure-aware union-find decoder drives threshold and decay campaigns.

pub mod analysis;
pub mod blocks;
pub mod cell;
pub mod checks;
pub mod config;
pub mod decoder;
pub mod distance;
pub mod engine;
pub mod fusion;
pub mod graph;
pub mod noise;
pub mod pauli;
pub mod template;
pub mod verify;
