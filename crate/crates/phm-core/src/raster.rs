//! Rasterization of simplex heat onto a rectangular grid.
//!
//! Each simplex spreads its heat over the grid cells in proportion to the
//! fraction of its k-dimensional measure inside each cell: vertices by
//! membership, edges by clipped length, triangles by clipped area. Cells
//! are half-open, closed on the grid's top and right rims, so the cells
//! tile the rectangle exactly. Two deliberate exceptions keep boundary
//! cases well defined: a vertex lying on a cell border splits its heat
//! equally among all closed cells containing it, and a segment lying along
//! a grid line is assigned by the half-open rule on its degenerate axis.
//! Degenerate simplices fall back to the rule one dimension down.

use crate::complex::SimplicialComplex;
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RasterError {
    #[error("grid bounds must be finite with x0 < x1 and y0 < y1")]
    InvalidBounds,
    #[error("grid must have at least one cell on each axis")]
    EmptyGrid,
    #[error("heat vector length {got} does not match complex size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("simplex vertex {vertex} is outside the cloud of {n_points} points")]
    VertexOutOfRange { vertex: usize, n_points: usize },
    #[error("coordinate of point {index} is not finite")]
    NonFiniteCoordinate { index: usize },
}

/// A rectangular grid of nx-by-ny cells over [x0, x1] x [y0, y1].
///
/// Cell (ix, iy) owns [x0 + ix*dx, x0 + (ix+1)*dx) x [y0 + iy*dy, ...),
/// with the right column and top row closed. Flat cell index is
/// `iy * nx + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid<T> {
    x0: T,
    x1: T,
    y0: T,
    y1: T,
    nx: usize,
    ny: usize,
}

impl<T: Real> RasterGrid<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T, nx: usize, ny: usize) -> Result<Self, RasterError> {
        let finite = [x0, x1, y0, y1].iter().all(|v| v.as_f64().is_finite());
        if !finite || !(x0 < x1) || !(y0 < y1) {
            return Err(RasterError::InvalidBounds);
        }
        if nx == 0 || ny == 0 {
            return Err(RasterError::EmptyGrid);
        }
        Ok(Self { x0, x1, y0, y1, nx, ny })
    }

    /// Square grid of g-by-g cells.
    pub fn square(x0: T, x1: T, y0: T, y1: T, g: usize) -> Result<Self, RasterError> {
        Self::new(x0, x1, y0, y1, g, g)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }
    pub fn x_bounds(&self) -> (T, T) {
        (self.x0, self.x1)
    }
    pub fn y_bounds(&self) -> (T, T) {
        (self.y0, self.y1)
    }

    pub fn cell_index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    fn fx(&self) -> Axis {
        Axis::new(self.x0.as_f64(), self.x1.as_f64(), self.nx)
    }
    fn fy(&self) -> Axis {
        Axis::new(self.y0.as_f64(), self.y1.as_f64(), self.ny)
    }
}

/// One grid axis in f64, with the half-open / rim-closed locate rule.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    n: usize,
    step: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, n: usize) -> Self {
        Axis {
            lo,
            hi,
            n,
            step: (hi - lo) / n as f64,
        }
    }

    fn bound(&self, i: usize) -> f64 {
        if i == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step
        }
    }

    /// Index of the half-open interval containing v, the last interval
    /// being closed; None outside [lo, hi].
    fn locate(&self, v: f64) -> Option<usize> {
        if v < self.lo || v > self.hi {
            return None;
        }
        let raw = ((v - self.lo) / self.step).floor();
        let mut i = if raw < 0.0 { 0 } else { raw as usize };
        if i >= self.n {
            i = self.n - 1;
        }
        // Floating floor can land one cell high when v sits a hair below a
        // boundary; nudge against the stored bounds.
        while i > 0 && v < self.bound(i) {
            i -= 1;
        }
        while i + 1 < self.n && v >= self.bound(i + 1) {
            i += 1;
        }
        Some(i)
    }

    /// Indices of every closed interval containing v (one or two).
    fn locate_closed(&self, v: f64) -> Vec<usize> {
        let Some(i) = self.locate(v) else {
            return Vec::new();
        };
        if i > 0 && v == self.bound(i) {
            vec![i - 1, i]
        } else {
            vec![i]
        }
    }

    /// Candidate index range [a, b] for values spanning [vmin, vmax],
    /// clipped to the grid; None when the span misses the grid entirely.
    fn span(&self, vmin: f64, vmax: f64) -> Option<(usize, usize)> {
        if vmax < self.lo || vmin > self.hi {
            return None;
        }
        let a = self.locate(vmin.max(self.lo)).unwrap_or(0);
        let b = self.locate(vmax.min(self.hi)).unwrap_or(self.n - 1);
        Some((a, b))
    }
}

/// Rasterizes per-simplex heat into a flat cell vector of length
/// `grid.n_cells()`. Heat on portions of simplices outside the grid
/// rectangle is dropped.
pub fn rasterize<T: Real>(
    complex: &SimplicialComplex,
    points: &[[T; 2]],
    heat: &[T],
    grid: &RasterGrid<T>,
) -> Result<Vec<T>, RasterError> {
    if heat.len() != complex.len() {
        return Err(RasterError::LengthMismatch {
            expected: complex.len(),
            got: heat.len(),
        });
    }
    let mut pf = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        let q = [p[0].as_f64(), p[1].as_f64()];
        if !q[0].is_finite() || !q[1].is_finite() {
            return Err(RasterError::NonFiniteCoordinate { index });
        }
        pf.push(q);
    }

    let ax = grid.fx();
    let ay = grid.fy();
    let mut cells = vec![0.0f64; grid.n_cells()];

    for i in 0..complex.len() {
        let w = heat[i].as_f64();
        if w == 0.0 {
            continue;
        }
        let vs = complex.simplex(i).vertices();
        for &v in vs {
            if v >= pf.len() {
                return Err(RasterError::VertexOutOfRange {
                    vertex: v,
                    n_points: pf.len(),
                });
            }
        }
        let corners: Vec<[f64; 2]> = vs.iter().map(|&v| pf[v]).collect();
        splat(&corners, w, &ax, &ay, grid.nx, &mut cells);
    }

    Ok(cells.into_iter().map(T::of).collect())
}

/// Dispatches on the simplex's actual geometric dimension, falling back a
/// dimension when the realization is degenerate.
fn splat(corners: &[[f64; 2]], w: f64, ax: &Axis, ay: &Axis, nx: usize, cells: &mut [f64]) {
    match corners.len() {
        1 => splat_vertex(corners[0], w, ax, ay, nx, cells),
        2 => {
            if corners[0] == corners[1] {
                splat_vertex(corners[0], w, ax, ay, nx, cells);
            } else {
                splat_segment(corners[0], corners[1], w, ax, ay, nx, cells);
            }
        }
        3 => {
            let [a, b, c] = [corners[0], corners[1], corners[2]];
            let twice_area = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]);
            if twice_area == 0.0 {
                // Collinear: act on the longest spanned segment.
                let d2 = |p: [f64; 2], q: [f64; 2]| {
                    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
                };
                let pairs = [(a, b), (a, c), (b, c)];
                let (p, q) = pairs
                    .iter()
                    .copied()
                    .max_by(|&(p1, q1), &(p2, q2)| {
                        d2(p1, q1).partial_cmp(&d2(p2, q2)).expect("finite")
                    })
                    .expect("three candidate pairs");
                if p == q {
                    splat_vertex(p, w, ax, ay, nx, cells);
                } else {
                    splat_segment(p, q, w, ax, ay, nx, cells);
                }
            } else {
                splat_triangle(a, b, c, twice_area.abs() / 2.0, w, ax, ay, nx, cells);
            }
        }
        _ => unreachable!("planar complexes stop at triangles"),
    }
}

fn splat_vertex(p: [f64; 2], w: f64, ax: &Axis, ay: &Axis, nx: usize, cells: &mut [f64]) {
    let cols = ax.locate_closed(p[0]);
    let rows = ay.locate_closed(p[1]);
    let n = cols.len() * rows.len();
    if n == 0 {
        return;
    }
    let share = w / n as f64;
    for &iy in &rows {
        for &ix in &cols {
            cells[iy * nx + ix] += share;
        }
    }
}

fn splat_segment(p: [f64; 2], q: [f64; 2], w: f64, ax: &Axis, ay: &Axis, nx: usize, cells: &mut [f64]) {
    // Degenerate axis: the segment lies on one grid column's line, so the
    // half-open rule picks a single column (resp. row).
    let col_range = if p[0] == q[0] {
        match ax.locate(p[0]) {
            Some(c) => (c, c),
            None => return,
        }
    } else {
        match ax.span(p[0].min(q[0]), p[0].max(q[0])) {
            Some(r) => r,
            None => return,
        }
    };
    let row_range = if p[1] == q[1] {
        match ay.locate(p[1]) {
            Some(r) => (r, r),
            None => return,
        }
    } else {
        match ay.span(p[1].min(q[1]), p[1].max(q[1])) {
            Some(r) => r,
            None => return,
        }
    };

    // Parametric clipping of p + t*(q-p) to each candidate cell.
    let dx = q[0] - p[0];
    let dy = q[1] - p[1];
    for iy in row_range.0..=row_range.1 {
        for ix in col_range.0..=col_range.1 {
            let mut t0: f64 = 0.0;
            let mut t1: f64 = 1.0;
            if dx != 0.0 {
                let ta = (ax.bound(ix) - p[0]) / dx;
                let tb = (ax.bound(ix + 1) - p[0]) / dx;
                t0 = t0.max(ta.min(tb));
                t1 = t1.min(ta.max(tb));
            }
            if dy != 0.0 {
                let ta = (ay.bound(iy) - p[1]) / dy;
                let tb = (ay.bound(iy + 1) - p[1]) / dy;
                t0 = t0.max(ta.min(tb));
                t1 = t1.min(ta.max(tb));
            }
            if t1 > t0 {
                cells[iy * nx + ix] += w * (t1 - t0);
            }
        }
    }
}

fn splat_triangle(
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    area: f64,
    w: f64,
    ax: &Axis,
    ay: &Axis,
    nx: usize,
    cells: &mut [f64],
) {
    let xs = [a[0], b[0], c[0]];
    let ys = [a[1], b[1], c[1]];
    let min = |v: [f64; 3]| v[0].min(v[1]).min(v[2]);
    let max = |v: [f64; 3]| v[0].max(v[1]).max(v[2]);
    let Some(col_range) = ax.span(min(xs), max(xs)) else {
        return;
    };
    let Some(row_range) = ay.span(min(ys), max(ys)) else {
        return;
    };

    for iy in row_range.0..=row_range.1 {
        for ix in col_range.0..=col_range.1 {
            let clipped = clip_to_rect(
                &[a, b, c],
                ax.bound(ix),
                ax.bound(ix + 1),
                ay.bound(iy),
                ay.bound(iy + 1),
            );
            let part = polygon_area(&clipped);
            if part > 0.0 {
                cells[iy * nx + ix] += w * part / area;
            }
        }
    }
}

/// Sutherland-Hodgman clipping of a convex polygon to an axis-aligned
/// rectangle.
fn clip_to_rect(poly: &[[f64; 2]], lx: f64, hx: f64, ly: f64, hy: f64) -> Vec<[f64; 2]> {
    // inside(p) per half-plane; intersect(p, q) on its boundary.
    fn clip_half(
        poly: &[[f64; 2]],
        inside: impl Fn([f64; 2]) -> bool,
        cross: impl Fn([f64; 2], [f64; 2]) -> [f64; 2],
    ) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(poly.len() + 1);
        for k in 0..poly.len() {
            let cur = poly[k];
            let prev = poly[(k + poly.len() - 1) % poly.len()];
            let cur_in = inside(cur);
            let prev_in = inside(prev);
            if cur_in {
                if !prev_in {
                    out.push(cross(prev, cur));
                }
                out.push(cur);
            } else if prev_in {
                out.push(cross(prev, cur));
            }
        }
        out
    }

    let at_x = |x: f64| {
        move |p: [f64; 2], q: [f64; 2]| {
            let t = (x - p[0]) / (q[0] - p[0]);
            [x, p[1] + t * (q[1] - p[1])]
        }
    };
    let at_y = |y: f64| {
        move |p: [f64; 2], q: [f64; 2]| {
            let t = (y - p[1]) / (q[1] - p[1]);
            [p[0] + t * (q[0] - p[0]), y]
        }
    };

    let mut poly = poly.to_vec();
    poly = clip_half(&poly, |p| p[0] >= lx, at_x(lx));
    if poly.is_empty() {
        return poly;
    }
    poly = clip_half(&poly, |p| p[0] <= hx, at_x(hx));
    if poly.is_empty() {
        return poly;
    }
    poly = clip_half(&poly, |p| p[1] >= ly, at_y(ly));
    if poly.is_empty() {
        return poly;
    }
    clip_half(&poly, |p| p[1] <= hy, at_y(hy))
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    twice.abs() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    fn grid2() -> RasterGrid<f64> {
        RasterGrid::square(0.0, 1.0, 0.0, 1.0, 2).unwrap()
    }

    fn raster_one(
        simplices: Vec<Vec<usize>>,
        points: &[[f64; 2]],
        heat: Vec<f64>,
        grid: &RasterGrid<f64>,
    ) -> Vec<f64> {
        let c = build_complex(simplices).unwrap();
        rasterize(&c, points, &heat, grid).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert_eq!(
            RasterGrid::new(0.0, 0.0, 0.0, 1.0, 2, 2).unwrap_err(),
            RasterError::InvalidBounds
        );
        assert_eq!(
            RasterGrid::new(0.0, 1.0, 0.0, 1.0, 0, 2).unwrap_err(),
            RasterError::EmptyGrid
        );
    }

    #[test]
    fn interior_vertex_lands_in_its_cell() {
        let out = raster_one(vec![vec![0]], &[[0.2, 0.8]], vec![3.0], &grid2());
        // Column 0, row 1.
        assert_eq!(out, vec![0.0, 0.0, 3.0, 0.0]);
    }

    #[test]
    fn vertex_on_interior_corner_splits_four_ways() {
        let out = raster_one(vec![vec![0]], &[[0.5, 0.5]], vec![1.0], &grid2());
        assert_eq!(out, vec![0.25; 4]);
    }

    #[test]
    fn vertex_on_interior_edge_splits_two_ways() {
        let out = raster_one(vec![vec![0]], &[[0.5, 0.25]], vec![1.0], &grid2());
        assert_eq!(out, vec![0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn vertex_on_outer_rim_stays_inside() {
        let out = raster_one(vec![vec![0]], &[[1.0, 1.0]], vec![1.0], &grid2());
        assert_eq!(out, vec![0.0, 0.0, 0.0, 1.0]);
        let out = raster_one(vec![vec![0]], &[[0.0, 0.5]], vec![1.0], &grid2());
        assert_eq!(out, vec![0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn vertex_outside_grid_is_dropped() {
        let out = raster_one(vec![vec![0]], &[[1.5, 0.5]], vec![1.0], &grid2());
        assert_eq!(out, vec![0.0; 4]);
    }

    #[test]
    fn horizontal_segment_splits_by_length() {
        let pts = [[0.25, 0.25], [0.75, 0.25]];
        let out = raster_one(vec![vec![0], vec![1], vec![0, 1]], &pts, vec![0.0, 0.0, 1.0], &grid2());
        assert!((out[0] - 0.5).abs() < 1e-12);
        assert!((out[1] - 0.5).abs() < 1e-12);
        assert_eq!(&out[2..], &[0.0, 0.0]);
    }

    #[test]
    fn segment_on_a_grid_line_uses_the_half_open_column() {
        let pts = [[0.5, 0.0], [0.5, 1.0]];
        let out = raster_one(vec![vec![0], vec![1], vec![0, 1]], &pts, vec![0.0, 0.0, 1.0], &grid2());
        // Column 1 owns the line x = 0.5.
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2], 0.0);
        assert!((out[1] - 0.5).abs() < 1e-12);
        assert!((out[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_segment_splits_between_the_cells_it_crosses() {
        let pts = [[0.0, 0.0], [1.0, 1.0]];
        let out = raster_one(vec![vec![0], vec![1], vec![0, 1]], &pts, vec![0.0, 0.0, 1.0], &grid2());
        assert!((out[0] - 0.5).abs() < 1e-12);
        assert!((out[3] - 0.5).abs() < 1e-12);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[2], 0.0);
    }

    #[test]
    fn triangle_area_fractions_match_hand_values() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let out = raster_one(
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]],
            &pts,
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            &grid2(),
        );
        assert!((out[0] - 0.5).abs() < 1e-12);
        assert!((out[1] - 0.25).abs() < 1e-12);
        assert!((out[2] - 0.25).abs() < 1e-12);
        assert!(out[3].abs() < 1e-12);
    }

    #[test]
    fn degenerate_triangle_falls_back_to_its_longest_segment() {
        let pts = [[0.0, 0.25], [0.5, 0.25], [1.0, 0.25]];
        let tri = raster_one(
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]],
            &pts,
            vec![0.0; 6].into_iter().chain([1.0]).collect(),
            &grid2(),
        );
        let seg = raster_one(
            vec![vec![0], vec![1], vec![0, 1]],
            &[[0.0, 0.25], [1.0, 0.25]],
            vec![0.0, 0.0, 1.0],
            &grid2(),
        );
        assert_eq!(tri, seg);
    }

    #[test]
    fn zero_length_edge_falls_back_to_the_vertex_rule() {
        let out = raster_one(
            vec![vec![0], vec![1], vec![0, 1]],
            &[[0.2, 0.2], [0.2, 0.2]],
            vec![0.0, 0.0, 1.0],
            &grid2(),
        );
        assert_eq!(out, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn heat_is_conserved_for_contained_simplices() {
        let pts = [[0.1, 0.2], [0.9, 0.3], [0.4, 0.85]];
        let grid = RasterGrid::square(0.0, 1.0, 0.0, 1.0, 7).unwrap();
        let out = raster_one(
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]],
            &pts,
            vec![0.3, 0.1, 0.25, 1.5, 2.0, 0.75, 4.0],
            &grid,
        );
        let total: f64 = out.iter().sum();
        let expect = 0.3 + 0.1 + 0.25 + 1.5 + 2.0 + 0.75 + 4.0;
        assert!((total - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn triangle_fractions_match_stratified_sampling() {
        // Oracle: stratified jittered sampling of the triangle against the
        // clipped-area fractions on a 3x3 grid.
        let a = [0.13, 0.08];
        let b = [0.91, 0.44];
        let c = [0.35, 0.93];
        let grid = RasterGrid::square(0.0, 1.0, 0.0, 1.0, 3).unwrap();
        let out = raster_one(
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]],
            &[a, b, c],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            &grid,
        );

        // Deterministic jitter inside an m-by-m stratification of the
        // triangle's bounding box; count hits per raster cell.
        let m = 1000usize;
        let mut state = 0x853c49e6748fea9bu64;
        let mut unit = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let (bx0, bx1) = (0.13, 0.91);
        let (by0, by1) = (0.08, 0.93);
        let inside = |p: [f64; 2]| {
            let s1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            let s2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0]);
            let s3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0]);
            (s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0) || (s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0)
        };
        let mut counts = vec![0u64; 9];
        let mut total = 0u64;
        for i in 0..m {
            for j in 0..m {
                let x = bx0 + (bx1 - bx0) * ((i as f64 + unit()) / m as f64);
                let y = by0 + (by1 - by0) * ((j as f64 + unit()) / m as f64);
                if inside([x, y]) {
                    let ix = ((x * 3.0).floor() as usize).min(2);
                    let iy = ((y * 3.0).floor() as usize).min(2);
                    counts[iy * 3 + ix] += 1;
                    total += 1;
                }
            }
        }
        for cell in 0..9 {
            let sampled = counts[cell] as f64 / total as f64;
            assert!(
                (sampled - out[cell]).abs() < 2e-3,
                "cell {cell}: sampled {sampled} vs clipped {}",
                out[cell]
            );
        }
    }
}
