//! For-each spectral sketches of weighted undirected graphs.
//!
//! A sketch answers a fixed query `x^T L(G) x` within a factor `1 ± ε` with
//! probability at least `1 − δ`. Two constructions are provided: the basic
//! one samples `α = ⌈c_α ε^{-5/3}⌉` edges per heavy vertex of each
//! expander piece, the improved one samples `β = ⌈c_β ε^{-8/5}⌉` in-arcs
//! per vertex of each degree-class stratum.

pub mod alias;
pub mod basic;
pub mod error;
pub mod generate;
pub mod graph;
pub mod improved;
pub mod orient;
pub mod params;
pub mod partition;
pub mod preprocess;
pub mod s1;
pub mod s2;
pub mod seed;
pub mod sketch;
pub mod sketchfile;
pub mod sparsify;
pub mod spectral;
pub mod textio;

pub use basic::{build_basic, estimate_basic, BasicSketch, BuildOptions};
pub use error::{Result, SketchError};
pub use graph::{quadratic_form, WeightedGraph};
pub use improved::{build_improved, estimate_improved, ImprovedSketch};
pub use params::SketchParams;
pub use sketch::{
    build_sketch, median_query, size_report, Algorithm, QueryReport, Replica, SizeReport, Sketch,
};
pub use sparsify::{SparsifierKind, SparsifyOptions};
