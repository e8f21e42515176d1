//! Top-k team formation over labeled graphs, in batch and incrementally.
//!
//! A pattern describes a team: labeled roles, required collaborations
//! between roles, and a capacity interval per role. Teams are perfect
//! subgraphs of bounded-radius balls, ranked by density.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod batch;
pub mod fragment;
pub mod graph;
pub mod incremental;
pub mod index;
pub mod pattern;
pub mod quality;
pub mod simulation;

pub use batch::{batch_topk, batch_topk_with, BatchOptions, BatchOutcome, QueryError, TopKList};
pub use fragment::{pfrag, Fragmentation};
pub use graph::{Ball, DataGraph, DataUpdate, Density, GraphError, HopCount, LabelId, NodeId, Subgraph};
pub use incremental::{EngineError, EngineOptions, IncrementalEngine, QueryResult};
pub use index::{build_index, IncIndex};
pub use pattern::{Capacity, PNodeId, PatternError, PatternGraph, PatternUpdate, PatternView};
pub use simulation::{MatchRelation, Team};
