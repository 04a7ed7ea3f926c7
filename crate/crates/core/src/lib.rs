//! Exact minimum rectilinear Steiner trees for terminals in a narrow
//! horizontal strip.

pub mod audit;
pub mod coord;
pub mod error;
pub mod fpt;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod patterns;
pub mod points;
pub mod random;
pub mod render;
pub mod solve;
pub mod sparse_dp;
pub mod stats;
pub mod tree;
pub mod walls;

pub use coord::{Coord, DEFAULT_SCALE};
pub use rust_decimal::Decimal;
pub use error::{Error, Result};
pub use grid::{build_hanan_grid, HananGrid};
pub use points::{ingest_points, Point, PointSet, Separator};
pub use tree::{
    classify_vertices, detect_u_shapes, tonicity, tree_length, validate_steiner_tree, RectTree, Segment,
    Tonicity, UShape, ValidationReport, VertexClass,
};
