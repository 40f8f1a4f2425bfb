//! Information theory for hierarchical partitions.
//!
//! A hierarchical partition splits a universe `{1..n}` recursively: a
//! rooted tree whose nodes own element blocks, each internal node's
//! children partitioning its block. This crate implements a family of
//! information-theoretic quantities for comparing two such partitions —
//! the hierarchical mutual information (HMI) and the entropies, variation
//! of information and metric distance derived from it — together with a
//! permutation null model for chance adjustment, exhaustive and random
//! partition generators, and a hierarchical-clustering application that
//! infers missing boolean features through a completion ensemble.
//!
//! Start with [`hpart::HierPartition::parse`] and the measures in
//! [`infotheory`]; the `examples/` directory has one runnable walk-through
//! per capability, and the `hierinfo` binary exposes the experiment
//! drivers as subcommands.
//!
//! ```
//! use hierinfo::hpart::HierPartition;
//! use hierinfo::infotheory::{hmi_recursive, hvi};
//!
//! let t = HierPartition::parse("[[1,2],[3]]").unwrap();
//! let s = HierPartition::parse("[[1],[2,3]]").unwrap();
//! let shared = hmi_recursive(&t, &s).unwrap();
//! assert!((shared - (27.0f64 / 16.0).ln() / 3.0).abs() < 1e-12);
//! assert!(hvi(&t, &s).unwrap().total > 0.0);
//! ```

pub mod cluster;
pub mod error;
pub mod experiments;
pub mod genpart;
pub mod hpart;
pub mod infotheory;
pub mod nullmodel;

pub use error::{Error, Result};
pub use hpart::HierPartition;
