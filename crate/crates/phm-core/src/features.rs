//! Diagram vectorizations: ordered diagrams, lifetime maps, death vectors,
//! and structured persistence landscapes with per-cell attribution.
//!
//! The structured landscape keeps, for every sampled `(level, t)` cell, the
//! index of the ordered-diagram point whose tent attains the k-th largest
//! value there. Masking the value matrix by attribution index recovers the
//! per-point parts, and the parts sum back to the plain landscape. That
//! attribution is what later lets learned model coefficients flow back onto
//! individual diagram points and their chains.

use crate::reduction::AnnotatedDiagram;
use crate::scalar::Real;

/// One entry of an ordered diagram, keeping a handle to its source point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedPoint<T> {
    pub birth: T,
    pub death: T,
    /// Index of the source point in the annotated diagram.
    pub point_index: usize,
    /// Total-order index of the death simplex, the tie-break key.
    pub death_simplex: usize,
}

impl<T: Real> OrderedPoint<T> {
    pub fn persistence(&self) -> T {
        self.death - self.birth
    }
}

/// Diagram points of one degree sorted by persistence descending, ties
/// broken by death-simplex total-order index ascending. Essential points
/// are excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedDiagram<T> {
    degree: usize,
    points: Vec<OrderedPoint<T>>,
}

impl<T: Real> OrderedDiagram<T> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[OrderedPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Sorts the finite points of one degree into an ordered diagram.
pub fn order_diagram<T: Real>(diagram: &AnnotatedDiagram<T>, degree: usize) -> OrderedDiagram<T> {
    let mut points: Vec<OrderedPoint<T>> = diagram
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.degree == degree && !p.is_essential())
        .map(|(i, p)| OrderedPoint {
            birth: p.birth,
            death: p.death,
            point_index: i,
            death_simplex: p.death_simplex.expect("finite point has a death simplex"),
        })
        .collect();
    points.sort_by(|a, b| {
        b.persistence()
            .partial_cmp(&a.persistence())
            .expect("finite persistence")
            .then(a.death_simplex.cmp(&b.death_simplex))
    });
    OrderedDiagram { degree, points }
}

/// Lifetimes `d - b` in ordered-diagram order.
pub fn lifetime_map<T: Real>(od: &OrderedDiagram<T>) -> Vec<T> {
    od.points().iter().map(OrderedPoint::persistence).collect()
}

/// Sampling grid for landscapes: `n_t` points on `[t_min, t_max]` and
/// `n_levels` landscape levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeGrid<T> {
    pub t_min: T,
    pub t_max: T,
    pub n_t: usize,
    pub n_levels: usize,
}

impl<T: Real> LandscapeGrid<T> {
    pub fn new(t_min: T, t_max: T, n_t: usize, n_levels: usize) -> Self {
        assert!(t_min < t_max, "t_min must be below t_max");
        assert!(n_t >= 2, "need at least two sample points");
        assert!(n_levels >= 1, "need at least one level");
        Self {
            t_min,
            t_max,
            n_t,
            n_levels,
        }
    }

    /// j-th sample point, linearly spaced with both endpoints included.
    pub fn t(&self, j: usize) -> T {
        let frac = T::of(j as f64) / T::of((self.n_t - 1) as f64);
        self.t_min + (self.t_max - self.t_min) * frac
    }

    pub fn cells(&self) -> usize {
        self.n_t * self.n_levels
    }
}

/// Landscape values plus per-cell attribution, level-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredFeatureVector<T> {
    n_levels: usize,
    n_t: usize,
    values: Vec<T>,
    attribution: Vec<Option<usize>>,
}

impl<T: Real> StructuredFeatureVector<T> {
    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn value(&self, level: usize, j: usize) -> T {
        self.values[level * self.n_t + j]
    }

    pub fn attribution_at(&self, level: usize, j: usize) -> Option<usize> {
        self.attribution[level * self.n_t + j]
    }

    /// Flattened values, level-major: level 0 samples first.
    pub fn values_flat(&self) -> &[T] {
        &self.values
    }

    pub fn attribution_flat(&self) -> &[Option<usize>] {
        &self.attribution
    }

    /// Part of point `i`: values masked to cells attributed to `i`.
    pub fn phi(&self, i: usize) -> Vec<T> {
        self.values
            .iter()
            .zip(&self.attribution)
            .map(|(&v, &a)| if a == Some(i) { v } else { T::zero() })
            .collect()
    }
}

/// Tent function of a diagram point: rises from the birth, peaks at the
/// midpoint, falls to the death, zero outside the open interval.
fn tent<T: Real>(birth: T, death: T, t: T) -> T {
    let two = T::of(2.0);
    let mid = (birth + death) / two;
    if t > birth && t <= mid {
        t - birth
    } else if t > mid && t < death {
        death - t
    } else {
        T::zero()
    }
}

/// Structured persistence landscape on a grid.
///
/// At each sample t the tent values of all points are ranked by value
/// descending with ties going to the smaller ordered-diagram index; level k
/// takes the k-th entry. Cells whose value is zero, including all levels
/// beyond the point count, carry no attribution.
pub fn landscape<T: Real>(
    od: &OrderedDiagram<T>,
    grid: &LandscapeGrid<T>,
) -> StructuredFeatureVector<T> {
    let n_t = grid.n_t;
    let n_levels = grid.n_levels;
    let mut values = vec![T::zero(); n_levels * n_t];
    let mut attribution = vec![None; n_levels * n_t];

    let mut ranked: Vec<(T, usize)> = Vec::with_capacity(od.len());
    for j in 0..n_t {
        let t = grid.t(j);
        ranked.clear();
        ranked.extend(
            od.points()
                .iter()
                .enumerate()
                .map(|(i, p)| (tent(p.birth, p.death, t), i)),
        );
        ranked.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("tent values are finite")
                .then(a.1.cmp(&b.1))
        });
        for k in 0..n_levels.min(ranked.len()) {
            let (v, i) = ranked[k];
            if v > T::zero() {
                values[k * n_t + j] = v;
                attribution[k * n_t + j] = Some(i);
            }
        }
    }

    StructuredFeatureVector {
        n_levels,
        n_t,
        values,
        attribution,
    }
}

/// Fixed-length vector of degree-0 deaths sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct DeathVector<T> {
    entries: Vec<T>,
    attribution: Vec<Option<usize>>,
}

impl<T: Real> DeathVector<T> {
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// Ordered-diagram (degree 0) index backing each entry; `None` for
    /// padding and for essential classes.
    pub fn attribution(&self) -> &[Option<usize>] {
        &self.attribution
    }
}

/// Death vector of the degree-0 part of a diagram.
///
/// Essential classes contribute the maximum filtration weight so the full
/// component is represented; they carry no attribution since they have no
/// ordered-diagram position. Truncation keeps the largest deaths.
pub fn death_vector<T: Real>(diagram: &AnnotatedDiagram<T>, len: usize) -> DeathVector<T> {
    let od = order_diagram(diagram, 0);
    let mut raw: Vec<(T, Option<usize>)> = od
        .points()
        .iter()
        .enumerate()
        .map(|(j, p)| (p.death, Some(j)))
        .collect();
    for p in diagram.points_of_degree(0) {
        if p.is_essential() {
            raw.push((diagram.max_weight(), None));
        }
    }
    raw.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite deaths")
            .then_with(|| match (a.1, b.1) {
                (Some(x), Some(y)) => x.cmp(&y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
    });
    raw.truncate(len);
    while raw.len() < len {
        raw.push((T::zero(), None));
    }
    let (entries, attribution) = raw.into_iter().unzip();
    DeathVector {
        entries,
        attribution,
    }
}
