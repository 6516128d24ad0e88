//! Persistence heatmaps: spreading per-point weights onto simplices.
//!
//! A heatmap assigns each simplex the total weight it receives from diagram
//! points: point i contributes F(b_i, d_i), split equally over the simplices
//! of its selected chain. The result is a vector indexed by the total order,
//! the object the expectation and rasterization stages operate on.

use crate::features::{order_diagram, OrderedDiagram};
use crate::reduction::AnnotatedDiagram;
use crate::scalar::Real;
use thiserror::Error;

/// Which chain of an annotated point receives its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSelector {
    BirthSimplex,
    DeathSimplex,
    RepCycle,
    BoundingChain,
}

impl ChainSelector {
    /// Death-side selectors need a death simplex, so essential points are
    /// always skipped for them.
    pub fn is_death_side(self) -> bool {
        matches!(self, ChainSelector::DeathSimplex | ChainSelector::BoundingChain)
    }
}

/// Weight function F on diagram points.
///
/// The learned form carries one precomputed weight per ordered-diagram
/// point (see `model_to_f`); builtin forms only look at birth and death.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction<T> {
    Constant(T),
    Persistence,
    Learned { per_point: Vec<T> },
}

/// Inclusion switches; the defaults keep zero-persistence points and drop
/// essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeatmapOptions {
    pub include_zero_persistence: bool,
    pub include_essential: bool,
    pub track_provenance: bool,
}

impl Default for HeatmapOptions {
    fn default() -> Self {
        Self {
            include_zero_persistence: true,
            include_essential: false,
            track_provenance: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeatmapError {
    #[error("selected chain of diagram point {point} is empty (corrupt annotation)")]
    EmptyChain { point: usize },
    #[error("chain of diagram point {point} references simplex {simplex} outside the complex of size {k}")]
    OutOfRange { point: usize, simplex: usize, k: usize },
    #[error("learned weight vector has {got} entries for {expected} ordered points")]
    LengthMismatch { expected: usize, got: usize },
}

/// Per-simplex heat, plus optional provenance diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapWeights<T> {
    w: Vec<T>,
    /// Sum of F over the included points, for mass accounting.
    mass: T,
    provenance: Option<Vec<Vec<(usize, T)>>>,
}

impl<T: Real> HeatmapWeights<T> {
    pub fn zero(k: usize) -> Self {
        Self {
            w: vec![T::zero(); k],
            mass: T::zero(),
            provenance: None,
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.w
    }

    /// The heatmap as a point of R^k; same data, the reading used by the
    /// convolution stage.
    pub fn as_point(&self) -> &[T] {
        &self.w
    }

    pub fn into_vec(self) -> Vec<T> {
        self.w
    }

    /// Sum of F over the points that actually contributed.
    pub fn mass(&self) -> T {
        self.mass
    }

    /// Contributions per simplex as (diagram point index, amount) lists;
    /// present only when tracking was requested.
    pub fn provenance(&self) -> Option<&[Vec<(usize, T)>]> {
        self.provenance.as_deref()
    }
}

/// Precomputed heat sources for one diagram and degree, reusable across
/// evaluations.
struct Inclusion<'a, T> {
    ordered: OrderedDiagram<T>,
    diagram: &'a AnnotatedDiagram<T>,
}

/// Builds the heatmap of one homology degree.
///
/// Finite points are traversed in ordered-diagram order, which is what the
/// learned weight form is indexed by. Essential points join only when
/// requested, and never for death-side selectors or weight forms that
/// cannot evaluate them (persistence is infinite there, learned weights
/// have no index for them).
pub fn heatmap<T: Real>(
    diagram: &AnnotatedDiagram<T>,
    degree: usize,
    f: &WeightFunction<T>,
    sel: ChainSelector,
    k: usize,
    opts: &HeatmapOptions,
) -> Result<HeatmapWeights<T>, HeatmapError> {
    let inc = Inclusion {
        ordered: order_diagram(diagram, degree),
        diagram,
    };
    if let WeightFunction::Learned { per_point } = f {
        if per_point.len() != inc.ordered.len() {
            return Err(HeatmapError::LengthMismatch {
                expected: inc.ordered.len(),
                got: per_point.len(),
            });
        }
    }

    let mut w = vec![T::zero(); k];
    let mut mass = T::zero();
    let mut provenance = if opts.track_provenance {
        Some(vec![Vec::new(); k])
    } else {
        None
    };

    let deposit = |point_index: usize,
                       f_val: T,
                       chain: &[usize],
                       w: &mut Vec<T>,
                       mass: &mut T,
                       provenance: &mut Option<Vec<Vec<(usize, T)>>>|
     -> Result<(), HeatmapError> {
        if chain.is_empty() {
            return Err(HeatmapError::EmptyChain { point: point_index });
        }
        let share = f_val / T::of(chain.len() as f64);
        for &s in chain {
            if s >= k {
                return Err(HeatmapError::OutOfRange {
                    point: point_index,
                    simplex: s,
                    k,
                });
            }
            w[s] += share;
            if let Some(p) = provenance {
                p[s].push((point_index, share));
            }
        }
        *mass += f_val;
        Ok(())
    };

    for (j, op) in inc.ordered.points().iter().enumerate() {
        if !opts.include_zero_persistence && op.birth == op.death {
            continue;
        }
        let f_val = match f {
            WeightFunction::Constant(c) => *c,
            WeightFunction::Persistence => op.death - op.birth,
            WeightFunction::Learned { per_point } => per_point[j],
        };
        let ann = &inc.diagram.points()[op.point_index];
        let birth_chain;
        let death_chain;
        let chain: &[usize] = match sel {
            ChainSelector::BirthSimplex => {
                birth_chain = [ann.birth_simplex];
                &birth_chain
            }
            ChainSelector::DeathSimplex => {
                death_chain = [ann.death_simplex.expect("finite point")];
                &death_chain
            }
            ChainSelector::RepCycle => ann.rep_cycle.simplices(),
            ChainSelector::BoundingChain => ann
                .bounding_chain
                .as_ref()
                .expect("finite point has a bounding chain")
                .simplices(),
        };
        deposit(op.point_index, f_val, chain, &mut w, &mut mass, &mut provenance)?;
    }

    if opts.include_essential && !sel.is_death_side() {
        for (i, ann) in inc.diagram.points().iter().enumerate() {
            if ann.degree != degree || !ann.is_essential() {
                continue;
            }
            // Only a constant F is evaluable at infinite death.
            let f_val = match f {
                WeightFunction::Constant(c) => *c,
                WeightFunction::Persistence | WeightFunction::Learned { .. } => continue,
            };
            let birth_chain = [ann.birth_simplex];
            let chain: &[usize] = match sel {
                ChainSelector::BirthSimplex => &birth_chain,
                ChainSelector::RepCycle => ann.rep_cycle.simplices(),
                _ => unreachable!("death-side selectors filtered above"),
            };
            deposit(i, f_val, chain, &mut w, &mut mass, &mut provenance)?;
        }
    }

    Ok(HeatmapWeights {
        w,
        mass,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::persistence_diagram;
    use crate::testutil::{two_triangle_complex, two_triangle_weights};

    fn example_diagram() -> AnnotatedDiagram<f64> {
        persistence_diagram(&two_triangle_complex(), &two_triangle_weights()).unwrap()
    }

    #[test]
    fn rep_cycle_persistence_heat_on_degree_one() {
        let d = example_diagram();
        let hw = heatmap(
            &d,
            1,
            &WeightFunction::Persistence,
            ChainSelector::RepCycle,
            11,
            &HeatmapOptions::default(),
        )
        .unwrap();
        // (7,10) spreads 3 over {ab,bc,cd,ad}; (8,9) spreads 1 over {ab,bc,ac}.
        let third = 1.0 / 3.0;
        let expect = vec![
            0.0,
            0.0,
            0.0,
            0.0,
            0.75 + third,
            0.75 + third,
            0.75,
            0.75,
            third,
            0.0,
            0.0,
        ];
        assert_eq!(hw.weights(), expect.as_slice());
        assert!((hw.mass() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn birth_simplex_constant_marks_generators() {
        let d = example_diagram();
        let hw = heatmap(
            &d,
            1,
            &WeightFunction::Constant(1.0),
            ChainSelector::BirthSimplex,
            11,
            &HeatmapOptions::default(),
        )
        .unwrap();
        let mut expect = vec![0.0; 11];
        expect[7] = 1.0; // ad
        expect[8] = 1.0; // ac
        assert_eq!(hw.weights(), expect.as_slice());
    }

    #[test]
    fn bounding_chain_heat_lands_on_triangles() {
        let d = example_diagram();
        let hw = heatmap(
            &d,
            1,
            &WeightFunction::Constant(1.0),
            ChainSelector::BoundingChain,
            11,
            &HeatmapOptions::default(),
        )
        .unwrap();
        // (8,9) bound by {abc}; (7,10) bound by {abc,acd}.
        assert_eq!(hw.weights()[9], 1.0 + 0.5);
        assert_eq!(hw.weights()[10], 0.5);
        assert_eq!(hw.weights().iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn empty_degree_gives_zero_vector() {
        let d = example_diagram();
        let hw = heatmap(
            &d,
            2,
            &WeightFunction::Persistence,
            ChainSelector::RepCycle,
            11,
            &HeatmapOptions::default(),
        )
        .unwrap();
        assert!(hw.weights().iter().all(|&x| x == 0.0));
        assert_eq!(hw.mass(), 0.0);
    }

    #[test]
    fn mass_accounting_over_all_selectors() {
        let d = example_diagram();
        for sel in [
            ChainSelector::BirthSimplex,
            ChainSelector::DeathSimplex,
            ChainSelector::RepCycle,
            ChainSelector::BoundingChain,
        ] {
            for degree in [0usize, 1] {
                let hw = heatmap(
                    &d,
                    degree,
                    &WeightFunction::Persistence,
                    sel,
                    11,
                    &HeatmapOptions::default(),
                )
                .unwrap();
                let total: f64 = hw.weights().iter().sum();
                assert!(
                    (total - hw.mass()).abs() <= 1e-12 * hw.mass().abs().max(1.0),
                    "mass accounting failed for {sel:?} degree {degree}"
                );
            }
        }
    }

    #[test]
    fn learned_weights_are_linear() {
        let d = example_diagram();
        let a = vec![0.5, -1.0];
        let b = vec![2.0, 0.25];
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let opts = HeatmapOptions::default();
        let run = |pp: Vec<f64>| {
            heatmap(
                &d,
                1,
                &WeightFunction::Learned { per_point: pp },
                ChainSelector::RepCycle,
                11,
                &opts,
            )
            .unwrap()
            .into_vec()
        };
        let ha = run(a);
        let hb = run(b);
        let hsum = run(sum);
        for i in 0..11 {
            assert!((ha[i] + hb[i] - hsum[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn learned_weights_length_is_checked() {
        let d = example_diagram();
        let err = heatmap(
            &d,
            1,
            &WeightFunction::Learned {
                per_point: vec![1.0],
            },
            ChainSelector::RepCycle,
            11,
            &HeatmapOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, HeatmapError::LengthMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn support_containment() {
        let d = example_diagram();
        let hw = heatmap(
            &d,
            0,
            &WeightFunction::Persistence,
            ChainSelector::RepCycle,
            11,
            &HeatmapOptions::default(),
        )
        .unwrap();
        let mut support: Vec<usize> = Vec::new();
        for p in d.points_of_degree(0) {
            if !p.is_essential() {
                support.extend_from_slice(p.rep_cycle.simplices());
            }
        }
        for (i, &w) in hw.weights().iter().enumerate() {
            if w != 0.0 {
                assert!(support.contains(&i));
            }
        }
    }

    #[test]
    fn essential_points_join_only_birth_side_constant() {
        let d = example_diagram();
        let opts = HeatmapOptions {
            include_essential: true,
            ..Default::default()
        };
        let hw = heatmap(
            &d,
            0,
            &WeightFunction::Constant(1.0),
            ChainSelector::RepCycle,
            11,
            &opts,
        )
        .unwrap();
        // Three finite components spread 1 over vertex pairs, essential adds
        // 1 on its single-vertex cycle {a}.
        assert_eq!(hw.mass(), 4.0);
        assert!(hw.weights()[0] >= 1.0);

        let death_side = heatmap(
            &d,
            0,
            &WeightFunction::Constant(1.0),
            ChainSelector::DeathSimplex,
            11,
            &opts,
        )
        .unwrap();
        assert_eq!(death_side.mass(), 3.0); // essential skipped

        let persistence = heatmap(
            &d,
            0,
            &WeightFunction::Persistence,
            ChainSelector::RepCycle,
            11,
            &opts,
        )
        .unwrap();
        assert!(persistence.mass().is_finite()); // essential skipped, not infinite
    }

    #[test]
    fn zero_persistence_flag_drops_instant_pairs() {
        // Vertex and edge enter together: pair (3,3).
        let c = crate::complex::build_complex(vec![vec![0], vec![1], vec![0, 1]]).unwrap();
        let w = vec![0.0, 3.0, 3.0];
        let d = persistence_diagram(&c, &w).unwrap();
        let keep = heatmap(
            &d,
            0,
            &WeightFunction::Constant(1.0),
            ChainSelector::DeathSimplex,
            3,
            &HeatmapOptions::default(),
        )
        .unwrap();
        assert_eq!(keep.weights()[2], 1.0);
        let drop = heatmap(
            &d,
            0,
            &WeightFunction::Constant(1.0),
            ChainSelector::DeathSimplex,
            3,
            &HeatmapOptions {
                include_zero_persistence: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(drop.weights().iter().all(|&x| x == 0.0));
    }
}
