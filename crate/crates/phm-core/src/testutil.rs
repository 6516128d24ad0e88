//! Shared fixtures for unit tests.

use crate::complex::{build_complex, SimplicialComplex};
use crate::reduction::{AnnotatedDiagram, AnnotatedPoint, Z2Chain};

/// Two triangles glued along an edge: the running example used across the
/// crate. Simplices in total order:
/// 0:a 1:b 2:c 3:d 4:ab 5:bc 6:cd 7:ad 8:ac 9:abc 10:acd.
pub fn two_triangle_complex() -> SimplicialComplex {
    build_complex(vec![
        vec![0],
        vec![1],
        vec![2],
        vec![3],
        vec![0, 1],
        vec![1, 2],
        vec![2, 3],
        vec![0, 3],
        vec![0, 2],
        vec![0, 1, 2],
        vec![0, 2, 3],
    ])
    .unwrap()
}

/// Interleaved weights for the running example, chosen so that the
/// filtration order differs from the total order.
pub fn two_triangle_weights() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 4.0, 3.0, 6.0, 5.0, 7.0, 8.0, 9.0, 10.0]
}

/// Hand-built diagram point with placeholder chains, for vectorization
/// tests that only look at (birth, death, degree, death simplex).
pub fn point(birth: f64, death: f64, degree: usize, death_simplex: usize) -> AnnotatedPoint<f64> {
    AnnotatedPoint {
        birth,
        death,
        degree,
        birth_simplex: death_simplex + 1000,
        death_simplex: Some(death_simplex),
        rep_cycle: Z2Chain::new(vec![death_simplex + 1000], degree),
        bounding_chain: Some(Z2Chain::new(vec![death_simplex], degree + 1)),
    }
}

pub fn diagram_of(points: Vec<AnnotatedPoint<f64>>) -> AnnotatedDiagram<f64> {
    AnnotatedDiagram::from_points(points)
}
