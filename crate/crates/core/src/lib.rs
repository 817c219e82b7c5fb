//! Analytics over typed biomedical knowledge graphs.
//!
//! Entities (proteins, drugs, diseases, taxa) and typed relations are
//! ingested from TSV, frozen into a [`KnowledgeGraph`], and analysed on the
//! collapsed undirected view: Katz centrality ranking, ego subnetworks,
//! type-constrained bounded-hop paths and relation-typed drug lookups. Results
//! render as tables, DOT or GraphML.
//!
//! The numerical routines are generic over [`Scalar`] (`f32`, `f64`); the
//! `*64` aliases below pin the common `f64` case.

pub mod centrality;
pub mod cli;
pub mod export;
pub mod graph;
pub mod ingest;
pub mod query;
pub mod scalar;

pub use centrality::{
    katz_centrality, rank, spectral_radius, CentralityError, CentralityResult, KatzParams,
    RankedEntity,
};
pub use graph::{
    Adjacency, Entity, EntityType, GraphBuilder, GraphError, KnowledgeGraph, Relation, TypeCounts,
};
pub use ingest::{load_graph, load_graph_files, IngestError, IngestReport};
pub use query::{
    ego_subnetwork, induced_subgraph, paths_between, treatments_for, PathConstraint, QueryError,
    Subnetwork, TreatmentHit, TreatmentReport,
};
pub use scalar::Scalar;

pub type KatzParams64 = KatzParams<f64>;
pub type KatzParams32 = KatzParams<f32>;
pub type CentralityResult64 = CentralityResult<f64>;
pub type CentralityResult32 = CentralityResult<f32>;
