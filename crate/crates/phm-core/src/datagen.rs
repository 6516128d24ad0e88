//! Synthetic planar point clouds and the expected-heat experiment driver.
//!
//! The samplers draw uniformly from simple regions (disc, annulus, pair of
//! annuli) by rejection from the bounding box, then add isotropic Gaussian
//! jitter. The twist-map generator is deterministic: it returns an orbit
//! of a chaotic recurrence on the unit square.

use crate::features::{death_vector, landscape, order_diagram, LandscapeGrid};
use crate::geometry::{alpha_complex, GeometryError};
use crate::heatmap::{heatmap, ChainSelector, HeatmapError, HeatmapOptions, WeightFunction};
use crate::kernel::{perturbation_stream, summarize_rows, ExpectedVector};
use crate::raster::{rasterize, RasterError, RasterGrid};
use crate::reduction::{persistence_diagram, AnnotatedDiagram};
use crate::scalar::Real;
use crate::svm::{model_to_f, LinearModel, SvmError};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("region radii must be finite, nonnegative, and properly nested")]
    InvalidRadii,
    #[error("noise level must be finite and nonnegative")]
    InvalidNoise,
    #[error("orbit seed coordinates must lie in [0, 1)")]
    SeedOutOfRange,
}

/// Recipe for one synthetic point cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Uniform points between two circles around `center`, jittered by
    /// `sigma`.
    Annulus {
        n: usize,
        r_in: f64,
        r_out: f64,
        center: [f64; 2],
        sigma: f64,
    },
    /// An even mixture of two annuli with shared radii.
    DoubleAnnulus {
        n: usize,
        r_in: f64,
        r_out: f64,
        centers: [[f64; 2]; 2],
        sigma: f64,
    },
    /// Uniform points in a disc, jittered by `sigma`.
    Disc {
        n: usize,
        radius: f64,
        center: [f64; 2],
        sigma: f64,
    },
    /// The first n iterates (after the seed point) of the recurrence
    ///   x' = x + r y (1 - y)  (mod 1)
    ///   y' = y + r x'(1 - x') (mod 1)
    /// starting from `start` on the unit square.
    TwistOrbit { n: usize, r: f64, start: [f64; 2] },
}

impl GeneratorSpec {
    /// One ring: inner radius 0.8, outer radius 1.0, centered at the
    /// origin.
    pub fn class_a(n: usize, sigma: f64) -> Self {
        GeneratorSpec::Annulus {
            n,
            r_in: 0.8,
            r_out: 1.0,
            center: [0.0, 0.0],
            sigma,
        }
    }

    /// Two smaller rings: inner radius 0.4, outer radius 0.5, centered at
    /// (-0.5, 0) and (0.5, 0).
    pub fn class_b(n: usize, sigma: f64) -> Self {
        GeneratorSpec::DoubleAnnulus {
            n,
            r_in: 0.4,
            r_out: 0.5,
            centers: [[-0.5, 0.0], [0.5, 0.0]],
            sigma,
        }
    }

    pub fn n_points(&self) -> usize {
        match *self {
            GeneratorSpec::Annulus { n, .. }
            | GeneratorSpec::DoubleAnnulus { n, .. }
            | GeneratorSpec::Disc { n, .. }
            | GeneratorSpec::TwistOrbit { n, .. } => n,
        }
    }

    fn validate(&self) -> Result<(), GeneratorError> {
        let check_ring = |r_in: f64, r_out: f64| {
            if r_in.is_finite() && r_out.is_finite() && 0.0 <= r_in && r_in < r_out {
                Ok(())
            } else {
                Err(GeneratorError::InvalidRadii)
            }
        };
        let check_sigma = |sigma: f64| {
            if sigma.is_finite() && sigma >= 0.0 {
                Ok(())
            } else {
                Err(GeneratorError::InvalidNoise)
            }
        };
        match *self {
            GeneratorSpec::Annulus {
                r_in, r_out, sigma, ..
            }
            | GeneratorSpec::DoubleAnnulus {
                r_in, r_out, sigma, ..
            } => {
                check_ring(r_in, r_out)?;
                check_sigma(sigma)
            }
            GeneratorSpec::Disc { radius, sigma, .. } => {
                check_ring(0.0, radius)?;
                check_sigma(sigma)
            }
            GeneratorSpec::TwistOrbit { r, start, .. } => {
                if !r.is_finite() {
                    return Err(GeneratorError::InvalidRadii);
                }
                if start.iter().all(|c| (0.0..1.0).contains(c)) {
                    Ok(())
                } else {
                    Err(GeneratorError::SeedOutOfRange)
                }
            }
        }
    }

    /// Draws the cloud. All randomness comes from `rng`; the same RNG
    /// state always yields the same cloud.
    pub fn generate<T: Real>(&self, rng: &mut ChaCha8Rng) -> Result<Vec<[T; 2]>, GeneratorError> {
        self.validate()?;
        let cloud = match *self {
            GeneratorSpec::Annulus {
                n,
                r_in,
                r_out,
                center,
                sigma,
            } => (0..n)
                .map(|_| jitter(ring_point(rng, center, r_in, r_out), sigma, rng))
                .collect(),
            GeneratorSpec::DoubleAnnulus {
                n,
                r_in,
                r_out,
                centers,
                sigma,
            } => (0..n)
                .map(|_| {
                    let c = centers[usize::from(rng.random::<f64>() >= 0.5)];
                    jitter(ring_point(rng, c, r_in, r_out), sigma, rng)
                })
                .collect(),
            GeneratorSpec::Disc {
                n,
                radius,
                center,
                sigma,
            } => (0..n)
                .map(|_| jitter(ring_point(rng, center, 0.0, radius), sigma, rng))
                .collect(),
            GeneratorSpec::TwistOrbit { n, r, start } => {
                let mut x = start[0];
                let mut y = start[1];
                let mut orbit = Vec::with_capacity(n);
                for _ in 0..n {
                    x = (x + r * y * (1.0 - y)).rem_euclid(1.0);
                    y = (y + r * x * (1.0 - x)).rem_euclid(1.0);
                    orbit.push([x, y]);
                }
                orbit
            }
        };
        Ok(cloud
            .into_iter()
            .map(|p: [f64; 2]| [T::of(p[0]), T::of(p[1])])
            .collect())
    }
}

/// Uniform point with r_in <= |p - center| <= r_out, by rejection from
/// the bounding square.
fn ring_point(rng: &mut ChaCha8Rng, center: [f64; 2], r_in: f64, r_out: f64) -> [f64; 2] {
    loop {
        let x = (2.0 * rng.random::<f64>() - 1.0) * r_out;
        let y = (2.0 * rng.random::<f64>() - 1.0) * r_out;
        let r2 = x * x + y * y;
        if r2 <= r_out * r_out && r2 >= r_in * r_in {
            return [center[0] + x, center[1] + y];
        }
    }
}

fn jitter(p: [f64; 2], sigma: f64, rng: &mut ChaCha8Rng) -> [f64; 2] {
    if sigma == 0.0 {
        return p;
    }
    let dx: f64 = rng.sample(StandardNormal);
    let dy: f64 = rng.sample(StandardNormal);
    [p[0] + sigma * dx, p[1] + sigma * dy]
}

/// Which feature vector a learned weight function is defined over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureRecipe {
    Landscape {
        degree: usize,
        t_min: f64,
        t_max: f64,
        n_t: usize,
        n_levels: usize,
    },
    DeathVector {
        len: usize,
    },
}

impl FeatureRecipe {
    /// Feature values and per-cell attribution into the ordered diagram
    /// of the feature's own degree.
    pub fn evaluate<T: Real>(
        &self,
        diagram: &AnnotatedDiagram<T>,
    ) -> (Vec<T>, Vec<Option<usize>>, usize) {
        match *self {
            FeatureRecipe::Landscape {
                degree,
                t_min,
                t_max,
                n_t,
                n_levels,
            } => {
                let od = order_diagram(diagram, degree);
                let n_points = od.points().len();
                let grid = LandscapeGrid {
                    t_min: T::of(t_min),
                    t_max: T::of(t_max),
                    n_t,
                    n_levels,
                };
                let sfv = landscape(&od, &grid);
                (
                    sfv.values_flat().to_vec(),
                    sfv.attribution_flat().to_vec(),
                    n_points,
                )
            }
            FeatureRecipe::DeathVector { len } => {
                let dv = death_vector(diagram, len);
                let n_points = order_diagram(diagram, 0).points().len();
                (dv.entries().to_vec(), dv.attribution().to_vec(), n_points)
            }
        }
    }

    /// The degree of the ordered diagram the attribution indexes into.
    pub fn degree(&self) -> usize {
        match *self {
            FeatureRecipe::Landscape { degree, .. } => degree,
            FeatureRecipe::DeathVector { .. } => 0,
        }
    }
}

/// How to weight diagram points when building each cloud's heat.
#[derive(Debug, Clone, PartialEq)]
pub enum HeatWeightRecipe<T> {
    Constant(T),
    Persistence,
    /// Resolve a per-point weight for every cloud by folding the model's
    /// coefficients through that cloud's own feature vector.
    Learned {
        model: LinearModel<T>,
        features: FeatureRecipe,
        absolute: bool,
    },
}

/// Full description of the heat computed for each cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatRecipe<T> {
    pub degree: usize,
    pub selector: ChainSelector,
    pub weight: HeatWeightRecipe<T>,
    pub options: HeatmapOptions,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
    #[error(transparent)]
    Heatmap(#[from] HeatmapError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Model(#[from] SvmError),
    #[error("at least one cloud is required")]
    NoClouds,
    #[error("a learned weight was requested for degree {heat} but the features attribute degree {features}")]
    DegreeMismatch { heat: usize, features: usize },
}

/// Turns a weight recipe into a concrete weight function for one diagram;
/// learned recipes fold the model through the diagram's own features.
pub fn resolve_weight_function<T: Real>(
    recipe: &HeatWeightRecipe<T>,
    heat_degree: usize,
    diagram: &AnnotatedDiagram<T>,
) -> Result<WeightFunction<T>, ExperimentError> {
    match recipe {
        HeatWeightRecipe::Constant(c) => Ok(WeightFunction::Constant(*c)),
        HeatWeightRecipe::Persistence => Ok(WeightFunction::Persistence),
        HeatWeightRecipe::Learned {
            model,
            features,
            absolute,
        } => {
            if features.degree() != heat_degree {
                return Err(ExperimentError::DegreeMismatch {
                    heat: heat_degree,
                    features: features.degree(),
                });
            }
            let (values, attribution, n_points) = features.evaluate(diagram);
            let per_point = model_to_f(model, &values, &attribution, n_points, *absolute)?;
            Ok(WeightFunction::Learned { per_point })
        }
    }
}

/// One cloud's journey from generator to raster row.
fn cloud_heat_row<T: Real>(
    gen: &GeneratorSpec,
    seed: u64,
    cloud_index: u64,
    recipe: &HeatRecipe<T>,
    grid: &RasterGrid<T>,
) -> Result<Vec<T>, ExperimentError> {
    let mut rng = perturbation_stream(seed, cloud_index);
    let points = gen.generate::<T>(&mut rng)?;
    let (complex, weights) = alpha_complex(&points)?;
    let diagram = persistence_diagram(&complex, &weights)?;
    let f = resolve_weight_function(&recipe.weight, recipe.degree, &diagram)?;
    let heat = heatmap(
        &diagram,
        recipe.degree,
        &f,
        recipe.selector,
        complex.len(),
        &recipe.options,
    )?;
    Ok(rasterize(&complex, &points, heat.weights(), grid)?)
}

/// Builds `n_clouds` independent clouds from the generator (cloud j uses
/// RNG stream (seed, j)), computes each one's heat raster on the shared
/// grid, and returns the componentwise mean and standard error.
///
/// Clouds are processed in parallel; the summary is accumulated in a
/// fixed order, so the result depends only on (gen, n_clouds, seed,
/// recipe, grid).
pub fn experiment_expected_phm<T: Real>(
    gen: &GeneratorSpec,
    n_clouds: usize,
    seed: u64,
    recipe: &HeatRecipe<T>,
    grid: &RasterGrid<T>,
) -> Result<ExpectedVector<T>, ExperimentError> {
    if n_clouds == 0 {
        return Err(ExperimentError::NoClouds);
    }
    let rows: Result<Vec<Vec<T>>, ExperimentError> = (0..n_clouds)
        .into_par_iter()
        .map(|j| cloud_heat_row(gen, seed, j as u64, recipe, grid))
        .collect();
    Ok(summarize_rows(&rows?))
}

/// Convenience wrapper: generate one cloud from stream (seed, index).
pub fn generate_cloud<T: Real>(
    gen: &GeneratorSpec,
    seed: u64,
    index: u64,
) -> Result<Vec<[T; 2]>, GeneratorError> {
    let mut rng = perturbation_stream(seed, index);
    gen.generate(&mut rng)
}

/// Deterministically reorders a cloud using stream (seed, 0).
pub fn shuffle_cloud<T: Real>(points: &mut [[T; 2]], seed: u64) {
    use rand::seq::SliceRandom;
    let mut rng = perturbation_stream(seed, 0);
    points.shuffle(&mut rng);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radius(p: &[f64; 2], c: [f64; 2]) -> f64 {
        ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
    }

    #[test]
    fn twist_orbit_fixed_point_stays_put() {
        // At (0.5, 0.5) with r = 4: x' = 0.5 + 4 * 0.25 = 1.5 = 0.5 mod 1.
        let gen = GeneratorSpec::TwistOrbit {
            n: 10,
            r: 4.0,
            start: [0.5, 0.5],
        };
        let orbit: Vec<[f64; 2]> = generate_cloud(&gen, 0, 0).unwrap();
        for p in &orbit {
            assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn twist_orbit_first_step_matches_hand_computation() {
        // From (0.1, 0.2) with r = 4: x' = 0.1 + 4*0.2*0.8 = 0.74,
        // y' = 0.2 + 4*0.74*0.26 = 0.9696.
        let gen = GeneratorSpec::TwistOrbit {
            n: 2,
            r: 4.0,
            start: [0.1, 0.2],
        };
        let orbit: Vec<[f64; 2]> = generate_cloud(&gen, 0, 0).unwrap();
        assert!((orbit[0][0] - 0.74).abs() < 1e-12);
        assert!((orbit[0][1] - 0.9696).abs() < 1e-12);
        // The orbit stays on the unit square.
        for p in &orbit {
            assert!((0.0..1.0).contains(&p[0]) && (0.0..1.0).contains(&p[1]));
        }
    }

    #[test]
    fn annulus_respects_radii_without_noise() {
        let gen = GeneratorSpec::Annulus {
            n: 500,
            r_in: 0.8,
            r_out: 1.0,
            center: [2.0, -1.0],
            sigma: 0.0,
        };
        let cloud: Vec<[f64; 2]> = generate_cloud(&gen, 7, 0).unwrap();
        assert_eq!(cloud.len(), 500);
        for p in &cloud {
            let r = radius(p, [2.0, -1.0]);
            assert!((0.8..=1.0).contains(&r), "radius {r}");
        }
    }

    #[test]
    fn annulus_mean_radius_matches_the_area_law() {
        // Uniform on the ring: E[R] = (2/3)(r_out^3 - r_in^3)/(r_out^2 - r_in^2).
        let gen = GeneratorSpec::class_a(20_000, 0.0);
        let cloud: Vec<[f64; 2]> = generate_cloud(&gen, 1, 0).unwrap();
        let mean_r: f64 =
            cloud.iter().map(|p| radius(p, [0.0, 0.0])).sum::<f64>() / cloud.len() as f64;
        let expected = 2.0 / 3.0 * (1.0 - 0.8f64.powi(3)) / (1.0 - 0.8f64.powi(2));
        assert!(
            (mean_r - expected).abs() < 5e-3,
            "mean radius {mean_r} vs {expected}"
        );
    }

    #[test]
    fn double_annulus_puts_every_point_on_one_ring_and_balances() {
        let gen = GeneratorSpec::class_b(4000, 0.0);
        let cloud: Vec<[f64; 2]> = generate_cloud(&gen, 3, 0).unwrap();
        let mut left = 0usize;
        for p in &cloud {
            let rl = radius(p, [-0.5, 0.0]);
            let rr = radius(p, [0.5, 0.0]);
            let on_left = (0.4..=0.5).contains(&rl);
            let on_right = (0.4..=0.5).contains(&rr);
            assert!(on_left || on_right, "point {p:?} on neither ring");
            if on_left {
                left += 1;
            }
        }
        let frac = left as f64 / cloud.len() as f64;
        assert!((frac - 0.5).abs() < 0.03, "left fraction {frac}");
    }

    #[test]
    fn disc_respects_radius_and_noise_spreads_points() {
        let gen = GeneratorSpec::Disc {
            n: 300,
            radius: 0.7,
            center: [0.0, 0.0],
            sigma: 0.0,
        };
        let cloud: Vec<[f64; 2]> = generate_cloud(&gen, 5, 0).unwrap();
        assert!(cloud.iter().all(|p| radius(p, [0.0, 0.0]) <= 0.7));

        let noisy_gen = GeneratorSpec::Disc {
            n: 300,
            radius: 0.7,
            center: [0.0, 0.0],
            sigma: 0.2,
        };
        let noisy: Vec<[f64; 2]> = generate_cloud(&noisy_gen, 5, 0).unwrap();
        assert!(noisy.iter().any(|p| radius(p, [0.0, 0.0]) > 0.7));
    }

    #[test]
    fn generation_is_deterministic_per_stream() {
        let gen = GeneratorSpec::class_a(50, 0.05);
        let a: Vec<[f64; 2]> = generate_cloud(&gen, 11, 0).unwrap();
        let b: Vec<[f64; 2]> = generate_cloud(&gen, 11, 0).unwrap();
        let c: Vec<[f64; 2]> = generate_cloud(&gen, 11, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad = GeneratorSpec::Annulus {
            n: 10,
            r_in: 1.0,
            r_out: 0.5,
            center: [0.0, 0.0],
            sigma: 0.0,
        };
        assert_eq!(
            generate_cloud::<f64>(&bad, 0, 0).unwrap_err(),
            GeneratorError::InvalidRadii
        );
        let bad = GeneratorSpec::Disc {
            n: 10,
            radius: 1.0,
            center: [0.0, 0.0],
            sigma: -1.0,
        };
        assert_eq!(
            generate_cloud::<f64>(&bad, 0, 0).unwrap_err(),
            GeneratorError::InvalidNoise
        );
        let bad = GeneratorSpec::TwistOrbit {
            n: 10,
            r: 4.0,
            start: [1.5, 0.0],
        };
        assert_eq!(
            generate_cloud::<f64>(&bad, 0, 0).unwrap_err(),
            GeneratorError::SeedOutOfRange
        );
    }

    fn ring_recipe() -> HeatRecipe<f64> {
        HeatRecipe {
            degree: 1,
            selector: ChainSelector::RepCycle,
            weight: HeatWeightRecipe::Persistence,
            options: HeatmapOptions::default(),
        }
    }

    #[test]
    fn experiment_sees_the_ring_cycle() {
        let gen = GeneratorSpec::class_a(40, 0.01);
        let grid = RasterGrid::square(-1.5, 1.5, -1.5, 1.5, 8).unwrap();
        let out = experiment_expected_phm(&gen, 3, 21, &ring_recipe(), &grid).unwrap();
        assert_eq!(out.mean.len(), 64);
        assert_eq!(out.n_samples, 3);
        let total: f64 = out.mean.iter().sum();
        assert!(total > 0.0, "a ring should carry positive 1-cycle heat");
        assert!(out.stderr.iter().all(|s| s.is_finite()));
    }

    #[test]
    fn experiment_is_deterministic_and_seed_sensitive() {
        let gen = GeneratorSpec::class_a(30, 0.02);
        let grid = RasterGrid::square(-1.5, 1.5, -1.5, 1.5, 6).unwrap();
        let a = experiment_expected_phm(&gen, 4, 5, &ring_recipe(), &grid).unwrap();
        let b = experiment_expected_phm(&gen, 4, 5, &ring_recipe(), &grid).unwrap();
        let c = experiment_expected_phm(&gen, 4, 6, &ring_recipe(), &grid).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn experiment_is_invariant_to_thread_count() {
        let gen = GeneratorSpec::class_b(25, 0.02);
        let grid = RasterGrid::square(-1.2, 1.2, -0.8, 0.8, 5).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| experiment_expected_phm(&gen, 6, 13, &ring_recipe(), &grid).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.mean, four.mean);
        assert_eq!(one.stderr, four.stderr);
    }

    #[test]
    fn experiment_resolves_learned_weights_per_cloud() {
        let gen = GeneratorSpec::class_a(30, 0.01);
        let grid = RasterGrid::square(-1.5, 1.5, -1.5, 1.5, 6).unwrap();
        let n_cells = 3 * 20;
        let model = LinearModel {
            f: vec![0.1; n_cells],
            b: 0.5,
            lambda: 1e-3,
            epochs: 1,
            seed: 0,
        };
        let recipe = HeatRecipe {
            degree: 1,
            selector: ChainSelector::RepCycle,
            weight: HeatWeightRecipe::Learned {
                model,
                features: FeatureRecipe::Landscape {
                    degree: 1,
                    t_min: 0.0,
                    t_max: 0.5,
                    n_t: 20,
                    n_levels: 3,
                },
                absolute: false,
            },
            options: HeatmapOptions::default(),
        };
        let a = experiment_expected_phm(&gen, 2, 9, &recipe, &grid).unwrap();
        let b = experiment_expected_phm(&gen, 2, 9, &recipe, &grid).unwrap();
        assert_eq!(a.mean, b.mean);
        assert!(a.mean.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn experiment_rejects_mismatched_learned_degrees() {
        let gen = GeneratorSpec::class_a(20, 0.0);
        let grid = RasterGrid::square(-1.5, 1.5, -1.5, 1.5, 4).unwrap();
        let recipe = HeatRecipe {
            degree: 1,
            selector: ChainSelector::BirthSimplex,
            weight: HeatWeightRecipe::Learned {
                model: LinearModel {
                    f: vec![1.0; 5],
                    b: 0.0,
                    lambda: 1e-3,
                    epochs: 1,
                    seed: 0,
                },
                features: FeatureRecipe::DeathVector { len: 5 },
                absolute: false,
            },
            options: HeatmapOptions::default(),
        };
        assert!(matches!(
            experiment_expected_phm(&gen, 1, 0, &recipe, &grid).unwrap_err(),
            ExperimentError::DegreeMismatch { heat: 1, features: 0 }
        ));
    }
}
