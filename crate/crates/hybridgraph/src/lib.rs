//! Dual-engine graph analytics at desk scale.
//!
//! The crate answers connectivity, motif, and ranking queries over typed
//! property graphs through two interchangeable engines with the same
//! observable results:
//!
//! * [`engine::local`]: a single-machine, adjacency-indexed engine. Fast
//!   union-find connectivity, direct index lookups, row-oriented result
//!   materialization. It shines on small and mid-sized graphs and on queries
//!   with tiny outputs (counts).
//! * [`engine::parallel`]: a partitioned engine that runs every query as
//!   barrier-synchronized supersteps over hash-partitioned edge tables with
//!   deterministic merges. Its bulk, column-oriented processing wins once
//!   graphs and result sets grow large.
//!
//! A cost-based [`router`] picks an engine per query from graph size and
//! estimated output size. [`pipelines`] compose the engines into two
//! account-graph workflows (same-user pair detection and combined connected
//! users), [`etl`] handles snapshot ingestion with degree capping and loss
//! accounting, and [`bench`] measures both engines across synthetic scales to
//! locate their crossover and calibrate the router from evidence.

pub mod bench;
pub mod engine;
pub mod error;
pub mod etl;
pub mod graph;
pub mod pipelines;
pub mod router;

pub use error::{Error, Result};
