//! Hypergraph-product quantum LDPC codes: construction, cluster decoding,
//! percolation statistics and closed-form fault-tolerance bounds.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2`] and [`pauli`]: sparse storage and word-packed elimination over GF(2),
//!   plus the symplectic representation of Pauli operators.
//! * [`code`] and [`distance`]: classical seeds, the hypergraph product and
//!   distance estimation.
//! * [`graph`] and [`percolation`]: the qubit connectivity graph and cluster
//!   size statistics on it.
//! * [`bounds`]: percolation, depolarizing, rate, distance and blocklength bounds.
//! * [`decoder`] and [`harness`]: cluster decoders and the Monte Carlo driver.
//! * [`formats`]: alist, dense text, code JSON and seed specifications.

pub mod bounds;
pub mod code;
pub mod decoder;
pub mod distance;
mod error;
pub mod formats;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod pauli;
pub mod percolation;
mod rng;

pub use code::{ClassicalCode, CssCode};
pub use error::{Error, Result};
pub use gf2::{BinaryMatrix, BinaryVector};
pub use graph::ClusterGraph;
pub use pauli::{Pauli, PauliVector};
