//! Planar geometry: Delaunay triangulations, alpha filtration weights, and
//! Vietoris–Rips complexes for 2-d point clouds.
//!
//! Orientation and circumcircle tests go through sign-exact predicates
//! (`predicates`), so the combinatorics of the triangulation are exact for
//! any finite coordinates; derived quantities (circumradii, distances) are
//! evaluated in f64.

mod alpha;
mod delaunay;
pub mod predicates;
mod rips;

pub use alpha::{alpha_complex, alpha_weights};
pub use delaunay::delaunay_complex;
pub use rips::rips_complex;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("point {second} duplicates point {first}")]
    DuplicatePoints { first: usize, second: usize },
    #[error("points are collinear (or fewer than three); no planar triangulation exists")]
    Collinear,
    #[error("coordinate of point {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("distance threshold is not finite")]
    NonFiniteThreshold,
    #[error("edge simplex {simplex} has no incident triangle to take a weight from")]
    EdgeWithoutCoface { simplex: usize },
    #[error("triangle simplex {simplex} is degenerate (zero area)")]
    DegenerateTriangle { simplex: usize },
    #[error("simplex vertex {vertex} is outside the cloud of {n_points} points")]
    VertexOutOfRange { vertex: usize, n_points: usize },
}

/// Converts a generic cloud to f64 coordinates, rejecting non-finite input.
pub(crate) fn to_f64_cloud<T: crate::scalar::Real>(
    points: &[[T; 2]],
) -> Result<Vec<[f64; 2]>, GeometryError> {
    let mut out = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        let q = [p[0].as_f64(), p[1].as_f64()];
        if !q[0].is_finite() || !q[1].is_finite() {
            return Err(GeometryError::NonFiniteCoordinate { index });
        }
        out.push(q);
    }
    Ok(out)
}

pub(crate) fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}
