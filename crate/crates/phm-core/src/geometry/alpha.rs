//! Alpha filtration weights over a Delaunay complex.
//!
//! Vertices enter at 0. A triangle enters at its squared circumradius. An
//! edge enters at its squared half-length when its closed diametral disc
//! contains no other cloud point (points on the boundary circle count as
//! inside); otherwise it inherits the smallest weight among its incident
//! triangles, which is when it first appears on the boundary of the
//! growing union of discs. The result is monotone, so it is a valid
//! filtration without repair.

use super::{dist2, to_f64_cloud, GeometryError};
use crate::complex::{SimplicialComplex, WeightVector};
use crate::geometry::delaunay_complex;
use crate::scalar::Real;

fn squared_circumradius(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<f64> {
    let det = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]);
    if det == 0.0 {
        return None;
    }
    Some(dist2(a, b) * dist2(b, c) * dist2(c, a) / (4.0 * det * det))
}

/// Computes alpha weights for a triangulated planar complex.
pub fn alpha_weights<T: Real>(
    complex: &SimplicialComplex,
    points: &[[T; 2]],
) -> Result<WeightVector<T>, GeometryError> {
    let pf = to_f64_cloud(points)?;
    for i in 0..complex.len() {
        for &v in complex.simplex(i).vertices() {
            if v >= pf.len() {
                return Err(GeometryError::VertexOutOfRange {
                    vertex: v,
                    n_points: pf.len(),
                });
            }
        }
    }

    let mut w = vec![0.0f64; complex.len()];
    // Smallest incident-triangle weight per edge, filled while scanning
    // triangles; the faces of a triangle are exactly its edges.
    let mut min_coface: Vec<Option<f64>> = vec![None; complex.len()];

    for i in 0..complex.len() {
        if complex.simplex(i).dim() != 2 {
            continue;
        }
        let vs = complex.simplex(i).vertices();
        let r2 = squared_circumradius(pf[vs[0]], pf[vs[1]], pf[vs[2]])
            .ok_or(GeometryError::DegenerateTriangle { simplex: i })?;
        w[i] = r2;
        for &e in complex.faces(i) {
            let cur = &mut min_coface[e];
            *cur = Some(cur.map_or(r2, |m: f64| m.min(r2)));
        }
    }

    for i in 0..complex.len() {
        if complex.simplex(i).dim() != 1 {
            continue;
        }
        let vs = complex.simplex(i).vertices();
        let (u, v) = (vs[0], vs[1]);
        let mid = [(pf[u][0] + pf[v][0]) / 2.0, (pf[u][1] + pf[v][1]) / 2.0];
        let r2 = dist2(pf[u], pf[v]) / 4.0;
        let gabriel = pf
            .iter()
            .enumerate()
            .all(|(j, &q)| j == u || j == v || dist2(q, mid) > r2);
        w[i] = if gabriel {
            r2
        } else {
            min_coface[i].ok_or(GeometryError::EdgeWithoutCoface { simplex: i })?
        };
    }

    Ok(w.into_iter().map(T::of).collect())
}

/// Convenience: Delaunay complex plus its alpha weights.
pub fn alpha_complex<T: Real>(
    points: &[[T; 2]],
) -> Result<(SimplicialComplex, WeightVector<T>), GeometryError> {
    let complex = delaunay_complex(points)?;
    let weights = alpha_weights(&complex, points)?;
    Ok((complex, weights))
}
