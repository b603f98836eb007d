//! Equivariant weight-zero cohomology of moduli spaces of curves, computed
//! from graph complexes with coefficients in the compactly supported
//! cohomology of configuration spaces of graphs.

pub mod cache;
pub mod config_complex;
pub mod exact_linalg;
pub mod golden;
pub mod graph_complex;
pub mod multigraph;
pub mod pipeline;
pub mod sym_rep;
