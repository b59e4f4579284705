//! Geodesic spaces, exactly evaluable great-arc paths and finite covers.

mod cover;
mod path;
mod space;
pub mod vector;

pub use cover::CoveringMap;
pub use path::{ArcPath, ArcSegment, ArcSurface, GeoPath, PathMeasure, PATH_GRID};
pub use space::{
    canonical_line, circle_distance, projective_distance, sphere_distance, Point, Space, POINT_TOL,
};
