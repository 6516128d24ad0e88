//! Boundary-matrix reduction over Z2 and annotated persistence diagrams.
//!
//! The boundary matrix `D` is assembled in filtration positions and reduced
//! left to right by the standard column algorithm: while a column shares its
//! pivot (largest nonzero row) with an earlier column, add that column into
//! it. Additions are mirrored in `V`, so `D * V = R` holds over Z2 with `V`
//! unit upper triangular.
//!
//! The decomposition is then read off into an annotated diagram: each
//! nonzero `R` column pairs a birth simplex (its pivot row) with a death
//! simplex (the column), carries the representative cycle (the `R` column)
//! and a bounding chain (the `V` column, death simplex included, so that the
//! boundary of the bounding chain is exactly the representative cycle).
//! Zero columns whose index is never a pivot row are essential classes; the
//! corresponding `V` column is their representative cycle.

use crate::complex::{FiltrationOrder, SimplicialComplex, WeightVector};
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("boundary of a degree-0 chain is not defined")]
    DimZero,
    #[error("chain refers to simplex {simplex} outside the complex")]
    OutOfRange { simplex: usize },
}

/// A Z2 chain: strictly increasing total-order indices of simplices, all of
/// the same dimension. The zero chain has no simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Z2Chain {
    simplices: Vec<usize>,
    dim: usize,
}

impl Z2Chain {
    pub fn new(mut simplices: Vec<usize>, dim: usize) -> Self {
        simplices.sort_unstable();
        simplices.dedup();
        Self { simplices, dim }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            simplices: Vec::new(),
            dim,
        }
    }

    pub fn simplices(&self) -> &[usize] {
        &self.simplices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Z2 sum: symmetric difference of the supports.
    pub fn add(&self, other: &Z2Chain) -> Z2Chain {
        Z2Chain {
            simplices: sym_diff(&self.simplices, &other.simplices),
            dim: self.dim,
        }
    }
}

/// Boundary of a chain: Z2 sum of the codim-1 faces of its simplices.
pub fn boundary_of(complex: &SimplicialComplex, chain: &Z2Chain) -> Result<Z2Chain, ChainError> {
    if chain.dim() == 0 {
        return Err(ChainError::DimZero);
    }
    let mut acc: Vec<usize> = Vec::new();
    for &s in chain.simplices() {
        if s >= complex.len() {
            return Err(ChainError::OutOfRange { simplex: s });
        }
        acc = sym_diff(&acc, complex.faces(s));
    }
    Ok(Z2Chain {
        simplices: acc,
        dim: chain.dim() - 1,
    })
}

/// Symmetric difference of two strictly increasing index lists.
fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse column-major matrix over Z2. Each column is a strictly increasing
/// list of row indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseZ2Matrix {
    cols: Vec<Vec<usize>>,
    rows: usize,
}

impl SparseZ2Matrix {
    pub fn new(rows: usize, cols: Vec<Vec<usize>>) -> Self {
        debug_assert!(cols
            .iter()
            .all(|c| c.windows(2).all(|w| w[0] < w[1]) && c.iter().all(|&r| r < rows)));
        Self { cols, rows }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: (0..n).map(|j| vec![j]).collect(),
            rows: n,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    /// Largest nonzero row index of column `j`, if any.
    pub fn pivot(&self, j: usize) -> Option<usize> {
        self.cols[j].last().copied()
    }

    /// Adds column `src` into column `dst` over Z2.
    pub fn add_col(&mut self, dst: usize, src: usize) {
        let merged = sym_diff(&self.cols[dst], &self.cols[src]);
        self.cols[dst] = merged;
    }

    /// Dense Z2 matrix product, for small-scale verification.
    pub fn multiply(&self, rhs: &SparseZ2Matrix) -> SparseZ2Matrix {
        assert_eq!(self.n_cols(), rhs.n_rows());
        let cols = (0..rhs.n_cols())
            .map(|j| {
                let mut acc: Vec<usize> = Vec::new();
                for &k in rhs.col(j) {
                    acc = sym_diff(&acc, self.col(k));
                }
                acc
            })
            .collect();
        SparseZ2Matrix {
            cols,
            rows: self.rows,
        }
    }
}

/// Boundary matrix in filtration positions: column `p` lists the filtration
/// positions of the codim-1 faces of the simplex entering at position `p`.
pub fn boundary_matrix(complex: &SimplicialComplex, order: &FiltrationOrder) -> SparseZ2Matrix {
    let n = complex.len();
    let cols = (0..n)
        .map(|p| {
            let simplex = order.simplex_at(p);
            let mut col: Vec<usize> = complex
                .faces(simplex)
                .iter()
                .map(|&f| order.position_of(f))
                .collect();
            col.sort_unstable();
            col
        })
        .collect();
    SparseZ2Matrix { cols, rows: n }
}

/// Result of the column reduction: `R = D * V` over Z2.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    r: SparseZ2Matrix,
    v: SparseZ2Matrix,
    /// For each row, the column whose pivot it is.
    pivot_owner: Vec<Option<usize>>,
}

impl ReductionResult {
    pub fn r(&self) -> &SparseZ2Matrix {
        &self.r
    }

    pub fn v(&self) -> &SparseZ2Matrix {
        &self.v
    }

    /// Column whose reduced pivot is row `p`, if any.
    pub fn pivot_owner(&self, p: usize) -> Option<usize> {
        self.pivot_owner[p]
    }
}

/// Standard left-to-right column reduction with V tracking.
pub fn reduce(d: &SparseZ2Matrix) -> ReductionResult {
    let n = d.n_cols();
    let mut r = d.clone();
    let mut v = SparseZ2Matrix::identity(n);
    let mut pivot_owner: Vec<Option<usize>> = vec![None; d.n_rows()];

    for j in 0..n {
        while let Some(p) = r.pivot(j) {
            match pivot_owner[p] {
                Some(owner) => {
                    r.add_col(j, owner);
                    v.add_col(j, owner);
                }
                None => {
                    pivot_owner[p] = Some(j);
                    break;
                }
            }
        }
    }

    ReductionResult { r, v, pivot_owner }
}

/// One point of an annotated persistence diagram.
///
/// `death` is positive infinity for essential classes, which then have no
/// death simplex and no bounding chain.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedPoint<T> {
    pub birth: T,
    pub death: T,
    pub degree: usize,
    /// Total-order index of the simplex that creates the class.
    pub birth_simplex: usize,
    /// Total-order index of the simplex that kills the class.
    pub death_simplex: Option<usize>,
    /// Cycle representing the class, born with the birth simplex.
    pub rep_cycle: Z2Chain,
    /// Chain one dimension up whose boundary is `rep_cycle`; contains the
    /// death simplex.
    pub bounding_chain: Option<Z2Chain>,
}

impl<T: Real> AnnotatedPoint<T> {
    pub fn is_essential(&self) -> bool {
        self.death == T::infinity()
    }

    pub fn persistence(&self) -> T {
        self.death - self.birth
    }
}

/// Annotated persistence diagram across all degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedDiagram<T> {
    points: Vec<AnnotatedPoint<T>>,
    /// Largest simplex weight in the originating filtration; stands in for
    /// the death of essential degree-0 classes in death vectors.
    max_weight: T,
}

impl<T: Real> AnnotatedDiagram<T> {
    /// Wraps externally produced points; `max_weight` falls back to the
    /// largest finite death.
    pub fn from_points(points: Vec<AnnotatedPoint<T>>) -> Self {
        let max_weight = points
            .iter()
            .filter(|p| !p.is_essential())
            .map(|p| p.death)
            .fold(T::zero(), T::max);
        Self { points, max_weight }
    }

    pub fn points(&self) -> &[AnnotatedPoint<T>] {
        &self.points
    }

    pub fn max_weight(&self) -> T {
        self.max_weight
    }

    pub fn set_max_weight(&mut self, w: T) {
        self.max_weight = w;
    }

    pub fn points_of_degree(&self, degree: usize) -> impl Iterator<Item = &AnnotatedPoint<T>> {
        self.points.iter().filter(move |p| p.degree == degree)
    }

    pub fn max_degree(&self) -> usize {
        self.points.iter().map(|p| p.degree).max().unwrap_or(0)
    }
}

/// Reads the reduced decomposition into an annotated diagram.
///
/// Scans columns in filtration order: a nonzero `R` column yields a finite
/// point, a zero column that never becomes a pivot row yields an essential
/// point. Chains are translated back to total-order indices.
pub fn annotate<T: Real>(
    complex: &SimplicialComplex,
    weights: &WeightVector<T>,
    order: &FiltrationOrder,
    reduction: &ReductionResult,
) -> AnnotatedDiagram<T> {
    let n = complex.len();
    let to_chain = |positions: &[usize], dim: usize| {
        let simplices: Vec<usize> = positions.iter().map(|&p| order.simplex_at(p)).collect();
        Z2Chain::new(simplices, dim)
    };

    let mut points = Vec::new();
    for j in 0..n {
        let col = reduction.r().col(j);
        if let Some(&p) = col.last() {
            let birth_simplex = order.simplex_at(p);
            let death_simplex = order.simplex_at(j);
            let degree = complex.simplex(birth_simplex).dim();
            points.push(AnnotatedPoint {
                birth: weights[birth_simplex],
                death: weights[death_simplex],
                degree,
                birth_simplex,
                death_simplex: Some(death_simplex),
                rep_cycle: to_chain(col, degree),
                bounding_chain: Some(to_chain(reduction.v().col(j), degree + 1)),
            });
        } else if reduction.pivot_owner(j).is_none() {
            let birth_simplex = order.simplex_at(j);
            let degree = complex.simplex(birth_simplex).dim();
            points.push(AnnotatedPoint {
                birth: weights[birth_simplex],
                death: T::infinity(),
                degree,
                birth_simplex,
                death_simplex: None,
                rep_cycle: to_chain(reduction.v().col(j), degree),
                bounding_chain: None,
            });
        }
    }

    let max_weight = weights.iter().copied().fold(T::zero(), T::max);
    AnnotatedDiagram { points, max_weight }
}

/// Full pipeline from a monotone weight vector to the annotated diagram.
pub fn persistence_diagram<T: Real>(
    complex: &SimplicialComplex,
    weights: &WeightVector<T>,
) -> Result<AnnotatedDiagram<T>, crate::complex::ComplexError> {
    let order = crate::complex::filtration_order(complex, weights)?;
    let d = boundary_matrix(complex, &order);
    let reduction = reduce(&d);
    Ok(annotate(complex, weights, &order, &reduction))
}
