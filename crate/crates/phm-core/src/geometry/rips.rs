//! Vietoris–Rips complexes up to dimension 2.
//!
//! Every pair within the distance threshold becomes an edge weighted by
//! its length; every triple whose three edges all qualify becomes a
//! triangle weighted by its longest edge. Vertices enter at 0. Unlike the
//! Delaunay path this needs no general-position assumptions, so it serves
//! as the fallback for degenerate clouds.

use super::{dist2, to_f64_cloud, GeometryError};
use crate::complex::{build_complex, SimplicialComplex, WeightVector};
use crate::scalar::Real;

/// Builds the Rips complex and its filtration weights for a planar cloud.
pub fn rips_complex<T: Real>(
    points: &[[T; 2]],
    threshold: T,
) -> Result<(SimplicialComplex, WeightVector<T>), GeometryError> {
    let thr = threshold.as_f64();
    if !thr.is_finite() {
        return Err(GeometryError::NonFiniteThreshold);
    }
    let pf = to_f64_cloud(points)?;
    let n = pf.len();

    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist2(pf[i], pf[j]).sqrt();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    let mut simplices: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut weights: Vec<f64> = vec![0.0; n];

    for i in 0..n {
        for j in (i + 1)..n {
            if dist[i * n + j] <= thr {
                simplices.push(vec![i, j]);
                weights.push(dist[i * n + j]);
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[i * n + j] > thr {
                continue;
            }
            for k in (j + 1)..n {
                if dist[i * n + k] <= thr && dist[j * n + k] <= thr {
                    simplices.push(vec![i, j, k]);
                    weights.push(
                        dist[i * n + j]
                            .max(dist[i * n + k])
                            .max(dist[j * n + k]),
                    );
                }
            }
        }
    }

    let complex = build_complex(simplices).expect("rips construction forms a valid complex");
    Ok((complex, weights.into_iter().map(T::of).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_monotone;

    #[test]
    fn threshold_gates_edges_and_triangles() {
        let pts: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let s = 2.0f64.sqrt();

        let (c, w) = rips_complex(&pts, 1.2).unwrap();
        assert_eq!(c.len(), 5); // 3 vertices + 2 legs, no hypotenuse
        assert!(c.index_of(&[1, 2]).is_none());
        assert_eq!(&w[..3], &[0.0, 0.0, 0.0]);
        assert!((w[3] - 1.0).abs() < 1e-15);
        assert!((w[4] - 1.0).abs() < 1e-15);

        let (c, w) = rips_complex(&pts, 1.5).unwrap();
        assert_eq!(c.len(), 7);
        let hyp = c.index_of(&[1, 2]).unwrap();
        let tri = c.index_of(&[0, 1, 2]).unwrap();
        assert!((w[hyp] - s).abs() < 1e-15);
        assert!((w[tri] - s).abs() < 1e-15, "triangle takes its longest edge");
    }

    #[test]
    fn exact_threshold_distance_is_included() {
        let pts: [[f64; 2]; 2] = [[0.0, 0.0], [2.0, 0.0]];
        let (c, _) = rips_complex(&pts, 2.0).unwrap();
        assert!(c.index_of(&[0, 1]).is_some());
        let (c, _) = rips_complex(&pts, 1.9999999).unwrap();
        assert!(c.index_of(&[0, 1]).is_none());
    }

    #[test]
    fn collinear_and_duplicate_clouds_are_accepted() {
        let pts: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 0.0]];
        let (c, w) = rips_complex(&pts, 1.0).unwrap();
        assert!(validate_monotone(&c, &w).is_ok());
        // The duplicate pair yields a zero-length edge.
        let e = c.index_of(&[1, 3]).unwrap();
        assert_eq!(w[e], 0.0);
    }

    #[test]
    fn weights_are_monotone_on_random_clouds() {
        let mut state = 0xb7e151628aed2a6bu64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let pts: Vec<[f64; 2]> = (0..25).map(|_| [next(), next()]).collect();
        let (c, w) = rips_complex(&pts, 0.4).unwrap();
        assert!(validate_monotone(&c, &w).is_ok());
    }

    #[test]
    fn empty_and_tiny_clouds_build() {
        let none: [[f64; 2]; 0] = [];
        let (c, w) = rips_complex(&none, 1.0).unwrap();
        assert_eq!(c.len(), 0);
        assert!(w.is_empty());
        let one = [[3.0, 4.0]];
        let (c, _) = rips_complex(&one, 1.0).unwrap();
        assert_eq!(c.len(), 1);
    }
}
