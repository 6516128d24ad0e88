//! Incremental Delaunay triangulation of a planar cloud.
//!
//! Points are inserted in lexicographic coordinate order into a mesh that
//! carries one ghost vertex closing off the convex hull, so every insertion
//! is an identical cavity-carve-and-refill step. All side-of-line and
//! in-circle decisions use the sign-exact predicates; cocircular ties are
//! broken deterministically toward the lexicographically smaller diagonal,
//! so the output is a function of the point set alone.

use super::predicates::{in_circle, orient2d};
use super::GeometryError;
use crate::complex::{build_complex, SimplicialComplex};
use crate::scalar::Real;
use std::collections::{BTreeSet, HashMap, HashSet};

const GHOST: usize = usize::MAX;

struct Mesh {
    tris: Vec<[usize; 3]>,
    live: Vec<bool>,
    /// Owner triangle of each directed edge; the reverse edge belongs to
    /// the neighbor.
    owner: HashMap<(usize, usize), usize>,
}

fn directed_edges(t: [usize; 3]) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
}

impl Mesh {
    fn new() -> Self {
        Mesh {
            tris: Vec::new(),
            live: Vec::new(),
            owner: HashMap::new(),
        }
    }

    fn add(&mut self, t: [usize; 3]) {
        let id = self.tris.len();
        self.tris.push(t);
        self.live.push(true);
        for e in directed_edges(t) {
            self.owner.insert(e, id);
        }
    }

    fn kill(&mut self, id: usize) {
        self.live[id] = false;
        for e in directed_edges(self.tris[id]) {
            self.owner.remove(&e);
        }
    }
}

fn lex_less(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] < b[0] || (a[0] == b[0] && a[1] < b[1])
}

/// Orders an unordered point pair lexicographically.
fn sorted_pair(a: [f64; 2], b: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    if lex_less(a, b) {
        (a, b)
    } else {
        (b, a)
    }
}

fn pair_less(p: ([f64; 2], [f64; 2]), q: ([f64; 2], [f64; 2])) -> bool {
    if p.0 != q.0 {
        lex_less(p.0, q.0)
    } else {
        lex_less(p.1, q.1)
    }
}

fn within_closed_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    // Callers guarantee p is collinear with a and b.
    let (lo_x, hi_x) = if a[0] <= b[0] { (a[0], b[0]) } else { (b[0], a[0]) };
    let (lo_y, hi_y) = if a[1] <= b[1] { (a[1], b[1]) } else { (b[1], a[1]) };
    lo_x <= p[0] && p[0] <= hi_x && lo_y <= p[1] && p[1] <= hi_y
}

/// Cocircular tie: the quad formed by triangle t and the new point p admits
/// two diagonals, and the triangulation keeps the lexicographically smaller
/// one. The triangle joins the cavity (is re-triangulated toward p) exactly
/// when the diagonal through p wins.
fn cocircular_tie(t: [usize; 3], p: [f64; 2], pts: &[[f64; 2]]) -> bool {
    let corners = [pts[t[0]], pts[t[1]], pts[t[2]]];
    for i in 0..3 {
        let x = corners[i];
        let y = corners[(i + 1) % 3];
        let opposite = corners[(i + 2) % 3];
        if orient2d(x, y, p) < 0 {
            // Edge (x, y) separates p from the opposite corner.
            return pair_less(sorted_pair(p, opposite), sorted_pair(x, y));
        }
    }
    unreachable!("a cocircular outside point is strictly beyond one edge");
}

fn conflicts(t: [usize; 3], p: [f64; 2], pts: &[[f64; 2]]) -> bool {
    if t[2] == GHOST {
        let v = pts[t[0]];
        let u = pts[t[1]];
        match orient2d(v, u, p) {
            1 => true,
            0 => within_closed_segment(u, v, p),
            _ => false,
        }
    } else {
        match in_circle(pts[t[0]], pts[t[1]], pts[t[2]], p) {
            1 => true,
            0 => cocircular_tie(t, p, pts),
            _ => false,
        }
    }
}

fn insert(mesh: &mut Mesh, pts: &[[f64; 2]], pi: usize) {
    let p = pts[pi];
    let cavity: Vec<usize> = (0..mesh.tris.len())
        .filter(|&t| mesh.live[t] && conflicts(mesh.tris[t], p, pts))
        .collect();
    debug_assert!(!cavity.is_empty(), "every new point conflicts somewhere");
    let in_cavity: HashSet<usize> = cavity.iter().copied().collect();

    let mut boundary: Vec<(usize, usize)> = Vec::new();
    for &t in &cavity {
        for (x, y) in directed_edges(mesh.tris[t]) {
            let neighbor = *mesh
                .owner
                .get(&(y, x))
                .expect("directed edge has a neighbor");
            if !in_cavity.contains(&neighbor) {
                boundary.push((x, y));
            }
        }
    }
    for &t in &cavity {
        mesh.kill(t);
    }
    for (x, y) in boundary {
        // New triangle (x, y, pi) in the same cyclic orientation, rotated
        // so the ghost stays in the last slot.
        let tri = if x == GHOST {
            [y, pi, x]
        } else if y == GHOST {
            [pi, x, y]
        } else {
            [x, y, pi]
        };
        mesh.add(tri);
    }
}

/// Delaunay triangles of the cloud as lexicographically sorted vertex
/// triples; vertices are indices into `pts`.
pub(crate) fn triangulate(pts: &[[f64; 2]]) -> Result<Vec<[usize; 3]>, GeometryError> {
    let n = pts.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        pts[i]
            .partial_cmp(&pts[j])
            .expect("finite coordinates compare")
    });
    for w in order.windows(2) {
        if pts[w[0]] == pts[w[1]] {
            return Err(GeometryError::DuplicatePoints {
                first: w[0],
                second: w[1],
            });
        }
    }
    if n < 3 {
        return Err(GeometryError::Collinear);
    }

    let s0 = order[0];
    let s1 = order[1];
    let mut first_bend = None;
    for (slot, &cand) in order.iter().enumerate().skip(2) {
        if orient2d(pts[s0], pts[s1], pts[cand]) != 0 {
            first_bend = Some(slot);
            break;
        }
    }
    let Some(bend) = first_bend else {
        return Err(GeometryError::Collinear);
    };
    let s2 = order[bend];
    let (a, b) = if orient2d(pts[s0], pts[s1], pts[s2]) > 0 {
        (s0, s1)
    } else {
        (s1, s0)
    };

    let mut mesh = Mesh::new();
    mesh.add([a, b, s2]);
    mesh.add([b, a, GHOST]);
    mesh.add([s2, b, GHOST]);
    mesh.add([a, s2, GHOST]);

    for (slot, &pi) in order.iter().enumerate().skip(2) {
        if slot == bend {
            continue;
        }
        insert(&mut mesh, pts, pi);
    }

    let mut tris: Vec<[usize; 3]> = mesh
        .tris
        .iter()
        .zip(&mesh.live)
        .filter(|&(t, &alive)| alive && t[2] != GHOST)
        .map(|(t, _)| {
            let mut s = *t;
            s.sort_unstable();
            s
        })
        .collect();
    tris.sort_unstable();
    Ok(tris)
}

/// Builds the Delaunay complex of a planar cloud: every point as a vertex
/// (in input order), then the triangulation's edges and triangles in
/// lexicographic vertex order.
pub fn delaunay_complex<T: Real>(points: &[[T; 2]]) -> Result<SimplicialComplex, GeometryError> {
    let pf = super::to_f64_cloud(points)?;
    let tris = triangulate(&pf)?;

    let mut edges: BTreeSet<[usize; 2]> = BTreeSet::new();
    let mut triangles: BTreeSet<[usize; 3]> = BTreeSet::new();
    for t in tris {
        edges.insert([t[0], t[1]]);
        edges.insert([t[0], t[2]]);
        edges.insert([t[1], t[2]]);
        triangles.insert(t);
    }

    let mut simplices: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    simplices.extend(edges.iter().map(|e| e.to_vec()));
    simplices.extend(triangles.iter().map(|t| t.to_vec()));
    Ok(build_complex(simplices).expect("triangulation forms a valid complex"))
}
