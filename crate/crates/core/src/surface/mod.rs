//! Half-edge maps on the double cover S² and complement regions on ℝP².

mod chi_oracle;
mod map;
pub(crate) mod raycast;
mod regions;

pub use chi_oracle::chi_oracle;
pub use map::{
    Check, Diagnostics, HalfEdge, HalfEdgeId, LoopInfo, MapBuilder, Provenance, StructureError, SurfaceMap, Vertex, VertexId, VertexMark,
};
pub(crate) use regions::edge_arcs;
pub use regions::{regions, Circle, CurveComponent, Region, RegionError, RegionSet, S2Component, Side};
