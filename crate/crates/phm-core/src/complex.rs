//! Finite simplicial complexes with a fixed total order on simplices.
//!
//! The total order is the backbone of everything downstream: weight vectors
//! are indexed by it, filtration ties are broken by it, and chains refer to
//! simplices through it. Faces always precede cofaces in the order, which
//! lets monotone repair run as a single forward pass.

use crate::scalar::Real;
use std::collections::HashMap;
use thiserror::Error;

/// Errors from complex construction and weight validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("simplex {simplex} is missing codim-1 face {face:?} (faces must appear earlier in the order)")]
    MissingFace { simplex: usize, face: Vec<usize> },
    #[error("duplicate simplex {vertices:?} at positions {first} and {second}")]
    DuplicateSimplex {
        vertices: Vec<usize>,
        first: usize,
        second: usize,
    },
    #[error("invalid simplex {vertices:?}: repeated vertex id")]
    InvalidSimplex { vertices: Vec<usize> },
    #[error("weight vector length {got} does not match complex size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight of simplex {simplex} is below weight of its face {face}")]
    NotMonotone { simplex: usize, face: usize },
    #[error("weight of simplex {simplex} is not finite")]
    NonFiniteWeight { simplex: usize },
}

/// A single simplex: strictly increasing vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Builds a simplex from an arbitrary vertex list; sorts and rejects
    /// repeated ids.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::InvalidSimplex { vertices });
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::InvalidSimplex { vertices });
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Dimension: one less than the vertex count.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codim-1 faces, each obtained by dropping one vertex. Empty for
    /// vertices.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        if self.vertices.len() == 1 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|skip| {
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect()
    }
}

/// A simplicial complex whose simplices carry a fixed total order.
///
/// `face_table[i]` lists the total-order indices of the codim-1 faces of
/// simplex `i`, in ascending order; all of them are `< i`.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    simplices: Vec<Simplex>,
    face_table: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl SimplicialComplex {
    /// Number of simplices.
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, i: usize) -> &Simplex {
        &self.simplices[i]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Codim-1 face indices of simplex `i`.
    pub fn faces(&self, i: usize) -> &[usize] {
        &self.face_table[i]
    }

    /// Index of a simplex given its sorted vertex list.
    pub fn index_of(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }
}

/// Builds a complex from vertex lists given in the intended total order.
///
/// Every codim-1 face must itself be listed, and earlier than its cofaces;
/// otherwise `MissingFace` is returned. Duplicate simplices are rejected.
pub fn build_complex(simplex_lists: Vec<Vec<usize>>) -> Result<SimplicialComplex, ComplexError> {
    let mut simplices = Vec::with_capacity(simplex_lists.len());
    let mut face_table = Vec::with_capacity(simplex_lists.len());
    let mut index: HashMap<Vec<usize>, usize> = HashMap::with_capacity(simplex_lists.len());

    for (pos, vertices) in simplex_lists.into_iter().enumerate() {
        let simplex = Simplex::new(vertices)?;
        if let Some(&first) = index.get(simplex.vertices()) {
            return Err(ComplexError::DuplicateSimplex {
                vertices: simplex.vertices().to_vec(),
                first,
                second: pos,
            });
        }
        let mut faces = Vec::with_capacity(simplex.vertices().len());
        for facet in simplex.facets() {
            match index.get(&facet) {
                Some(&fi) => faces.push(fi),
                None => {
                    return Err(ComplexError::MissingFace {
                        simplex: pos,
                        face: facet,
                    })
                }
            }
        }
        faces.sort_unstable();
        index.insert(simplex.vertices().to_vec(), pos);
        simplices.push(simplex);
        face_table.push(faces);
    }

    Ok(SimplicialComplex {
        simplices,
        face_table,
        index,
    })
}

/// Weights aligned with the total order of a complex.
pub type WeightVector<T> = Vec<T>;

/// Checks that every simplex weighs at least as much as each of its faces.
///
/// Also rejects NaN weights, which would poison the filtration order.
pub fn validate_monotone<T: Real>(
    complex: &SimplicialComplex,
    weights: &[T],
) -> Result<(), ComplexError> {
    if weights.len() != complex.len() {
        return Err(ComplexError::LengthMismatch {
            expected: complex.len(),
            got: weights.len(),
        });
    }
    for (i, &w) in weights.iter().enumerate() {
        if w.is_nan() {
            return Err(ComplexError::NonFiniteWeight { simplex: i });
        }
        for &f in complex.faces(i) {
            if w < weights[f] {
                return Err(ComplexError::NotMonotone { simplex: i, face: f });
            }
        }
    }
    Ok(())
}

/// Smallest monotone weight vector dominating `x`:
/// `w(s) = max(x(s), max over codim-1 faces w(f))`.
///
/// One forward pass suffices because faces precede cofaces in the total
/// order. The map is idempotent, order preserving, and fixes every already
/// monotone vector.
pub fn monotone_repair<T: Real>(complex: &SimplicialComplex, x: &[T]) -> WeightVector<T> {
    assert_eq!(x.len(), complex.len(), "weight vector length mismatch");
    let mut w = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut v = x[i];
        for &f in complex.faces(i) {
            let fw: T = w[f];
            if fw > v {
                v = fw;
            }
        }
        w.push(v);
    }
    w
}

/// Order in which simplices enter the sublevel filtration of a monotone
/// weight vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationOrder {
    /// `order[p]` is the total-order index of the simplex at filtration
    /// position `p`.
    order: Vec<usize>,
    /// Inverse permutation: `position[i]` is the filtration position of
    /// simplex `i`.
    position: Vec<usize>,
}

impl FiltrationOrder {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Total-order index of the simplex at filtration position `p`.
    pub fn simplex_at(&self, p: usize) -> usize {
        self.order[p]
    }

    /// Filtration position of simplex `i`.
    pub fn position_of(&self, i: usize) -> usize {
        self.position[i]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Sorts simplices by weight, breaking exact-equality ties by total-order
/// index ascending. Fails if the weights are not monotone.
pub fn filtration_order<T: Real>(
    complex: &SimplicialComplex,
    weights: &[T],
) -> Result<FiltrationOrder, ComplexError> {
    validate_monotone(complex, weights)?;
    let mut order: Vec<usize> = (0..complex.len()).collect();
    // Stable sort on the weight alone keeps ties in total-order sequence.
    order.sort_by(|&a, &b| weights[a].partial_cmp(&weights[b]).expect("no NaN after validation"));
    let mut position = vec![0usize; order.len()];
    for (p, &i) in order.iter().enumerate() {
        position[i] = p;
    }
    Ok(FiltrationOrder { order, position })
}
