//! Geometry of the web in the real plane and along complex paths: leaves,
//! Thomsen hexagons, first integrals and scaling symmetries.

mod closure;
mod integrals;
mod leaf;
mod symmetry;

pub use closure::{thomsen_closure, HexagonReport};
pub use integrals::{first_integrals, FirstIntegralState};
pub use leaf::{integrate_leaf, leaf_point, real_directions, Leaf, LeafOptions, Termination};
pub use symmetry::{flow_point, symmetry_residual};
