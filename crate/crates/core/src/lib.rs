//! Spatio-temporal sequential pattern mining over event instances, with an
//! optional microclustering index that summarises nearby instances of the
//! same type.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod datagen;
pub mod error;
pub mod extremes;
pub mod geometry;
pub mod io;
pub mod join;
pub mod microcluster;
pub mod miner;
pub mod model;
pub mod sample;

pub use error::{Error, Result};
pub use microcluster::{build_index, build_index_capped, compression_ratio, BuildParams, Microcluster, MicroclusterIndex};
pub use miner::{mine_baseline, mine_micro, MinerConfig, MiningOutput, PatternResult};
pub use model::{EmbeddingSpace, EventDataset, EventInstance, NeighborhoodParams, NormalizationParams, StPoint};
