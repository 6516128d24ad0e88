//! Smoothing kernels and Monte-Carlo estimation of expected heat.
//!
//! A kernel is an isotropic density on R^k with bandwidth alpha. The
//! expectation engine averages a target map over kernel perturbations of
//! its argument, drawing each sample from its own counter-mode RNG stream
//! keyed by (seed, sample index) and combining samples by fixed-shape
//! pairwise summation — so results are bit-identical regardless of how
//! many worker threads participate.

use crate::complex::SimplicialComplex;
use crate::heatmap::{ChainSelector, HeatmapOptions, WeightFunction};
use crate::pipeline::{heat_of_weights, theta, PipelineError};
use crate::raster::RasterGrid;
use crate::scalar::Real;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("kernel bandwidth must be finite and positive")]
    InvalidBandwidth,
    #[error("kernel dimension must be at least 1")]
    ZeroDimension,
    #[error("kernel dimension {kernel} does not match the perturbed space dimension {space}")]
    DimensionMismatch { kernel: usize, space: usize },
    #[error("at least one Monte-Carlo sample is required")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Triangular,
    Epanechnikov,
    Gaussian,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Triangular => "triangular",
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Gaussian => "gaussian",
        }
    }
}

/// Isotropic kernel on R^dim with bandwidth alpha: the triangular and
/// Epanechnikov profiles are supported on the alpha-ball, the Gaussian has
/// per-axis standard deviation alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec<T> {
    family: KernelFamily,
    alpha: T,
    dim: usize,
}

/// log Gamma(k/2 + 1), exactly accumulated over the half-integer
/// recursion.
fn ln_gamma_half_plus_one(k: usize) -> f64 {
    if k % 2 == 0 {
        // Gamma(m + 1) = m!
        (1..=k / 2).map(|i| (i as f64).ln()).sum()
    } else {
        // Gamma(m + 1/2) with m = (k + 1) / 2: repeatedly peel half-integer
        // factors down to Gamma(1/2) = sqrt(pi).
        let mut ln = 0.5 * std::f64::consts::PI.ln();
        let mut twice = k as i64; // Gamma((twice + 2) / 2)
        while twice >= 1 {
            ln += (twice as f64 / 2.0).ln();
            twice -= 2;
        }
        ln
    }
}

/// log of the unit-ball volume in R^k.
fn ln_unit_ball_volume(k: usize) -> f64 {
    (k as f64 / 2.0) * std::f64::consts::PI.ln() - ln_gamma_half_plus_one(k)
}

impl<T: Real> KernelSpec<T> {
    pub fn new(family: KernelFamily, alpha: T, dim: usize) -> Result<Self, KernelError> {
        let a = alpha.as_f64();
        if !a.is_finite() || a <= 0.0 {
            return Err(KernelError::InvalidBandwidth);
        }
        if dim == 0 {
            return Err(KernelError::ZeroDimension);
        }
        Ok(Self { family, alpha, dim })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Density at x (length must equal `dim`).
    pub fn density(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.dim, "density argument dimension");
        let a = self.alpha.as_f64();
        let k = self.dim;
        let r2: f64 = x.iter().map(|&v| v.as_f64() * v.as_f64()).sum();
        let r = r2.sqrt();
        let value = match self.family {
            KernelFamily::Triangular => {
                if r >= a {
                    0.0
                } else {
                    let ln_c = ((k + 1) as f64).ln()
                        - k as f64 * a.ln()
                        - ln_unit_ball_volume(k);
                    ln_c.exp() * (1.0 - r / a)
                }
            }
            KernelFamily::Epanechnikov => {
                if r >= a {
                    0.0
                } else {
                    let ln_c = ((k + 2) as f64).ln()
                        - 2f64.ln()
                        - k as f64 * a.ln()
                        - ln_unit_ball_volume(k);
                    ln_c.exp() * (1.0 - r2 / (a * a))
                }
            }
            KernelFamily::Gaussian => {
                let ln_c = -(k as f64) * a.ln()
                    - (k as f64 / 2.0) * (2.0 * std::f64::consts::PI).ln();
                (ln_c - r2 / (2.0 * a * a)).exp()
            }
        };
        T::of(value)
    }

    /// Largest slope of the density, i.e. its Lipschitz constant as a map
    /// R^dim -> R.
    pub fn component_lipschitz(&self) -> T {
        let a = self.alpha.as_f64();
        let k = self.dim;
        let value = match self.family {
            KernelFamily::Triangular => {
                (((k + 1) as f64).ln() - (k + 1) as f64 * a.ln() - ln_unit_ball_volume(k)).exp()
            }
            KernelFamily::Epanechnikov => {
                (((k + 2) as f64).ln() - (k + 1) as f64 * a.ln() - ln_unit_ball_volume(k)).exp()
            }
            KernelFamily::Gaussian => {
                ((-0.5f64)
                    - (k + 1) as f64 * a.ln()
                    - (k as f64 / 2.0) * (2.0 * std::f64::consts::PI).ln())
                .exp()
            }
        };
        T::of(value)
    }

    /// A priori Lipschitz bound for the kernel-smoothed version of any map
    /// bounded by `sup_norm` in the max norm.
    pub fn expected_lipschitz_bound(&self, sup_norm: T) -> T {
        let a = self.alpha.as_f64();
        let k = self.dim as f64;
        let m = sup_norm.as_f64();
        let value = match self.family {
            KernelFamily::Triangular => 2.0 * m * (k + 1.0) * k.sqrt() / a,
            KernelFamily::Epanechnikov => 2.0 * m * (k + 2.0) * k.sqrt() / a,
            KernelFamily::Gaussian => {
                2.0 * m * k.sqrt() / (a * (2.0 * std::f64::consts::PI).sqrt())
            }
        };
        T::of(value)
    }

    /// CDF of the radius fraction s = r / alpha for the compactly
    /// supported families.
    fn radial_cdf(&self, s: f64) -> Option<f64> {
        let k = self.dim as i32;
        match self.family {
            KernelFamily::Triangular => {
                Some((k + 1) as f64 * s.powi(k) - k as f64 * s.powi(k + 1))
            }
            KernelFamily::Epanechnikov => {
                Some(((k + 2) as f64 * s.powi(k) - k as f64 * s.powi(k + 2)) / 2.0)
            }
            KernelFamily::Gaussian => None,
        }
    }

    /// Radius below which a fraction `u` of the kernel's mass lies; None
    /// for the Gaussian, whose radial law is not inverted in closed form
    /// here.
    pub fn radial_quantile(&self, u: T) -> Option<T> {
        let uu = u.as_f64().clamp(0.0, 1.0);
        self.radial_cdf(0.0)?;
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..80 {
            let mid = (lo + hi) / 2.0;
            if self.radial_cdf(mid).expect("compact family") < uu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(T::of((lo + hi) / 2.0 * self.alpha.as_f64()))
    }

    /// Draws one perturbation vector. All arithmetic runs in f64 and is a
    /// pure function of the RNG state.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<T> {
        let k = self.dim;
        let a = self.alpha.as_f64();
        match self.family {
            KernelFamily::Gaussian => (0..k)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    T::of(z * a)
                })
                .collect(),
            KernelFamily::Triangular | KernelFamily::Epanechnikov => {
                // Uniform direction from a normalized Gaussian draw, radius
                // from the inverse radial CDF.
                let mut dir: Vec<f64>;
                loop {
                    dir = (0..k).map(|_| rng.sample(StandardNormal)).collect();
                    let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        for d in &mut dir {
                            *d /= norm;
                        }
                        break;
                    }
                }
                let u: f64 = rng.random();
                let r = self
                    .radial_quantile(T::of(u))
                    .expect("compact family")
                    .as_f64();
                dir.into_iter().map(|d| T::of(d * r)).collect()
            }
        }
    }
}

/// The RNG for Monte-Carlo sample `j` under `seed`: one ChaCha stream per
/// sample, independent of scheduling.
pub fn perturbation_stream(seed: u64, j: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j);
    rng
}

/// Monte-Carlo mean with per-component standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedVector<T> {
    pub mean: Vec<T>,
    pub stderr: Vec<T>,
    pub n_samples: usize,
}

/// Sum of the rows in fixed pairwise (binary-tree) order: the result
/// depends only on the row values, never on evaluation interleaving.
fn pairwise_sum<T: Real>(rows: &[Vec<T>]) -> Vec<T> {
    fn go<T: Real>(rows: &[Vec<T>], lo: usize, hi: usize) -> Vec<T> {
        if hi - lo == 1 {
            return rows[lo].clone();
        }
        let mid = lo + (hi - lo) / 2;
        let mut left = go(rows, lo, mid);
        let right = go(rows, mid, hi);
        for (l, r) in left.iter_mut().zip(&right) {
            *l += *r;
        }
        left
    }
    assert!(!rows.is_empty());
    go(rows, 0, rows.len())
}

/// Estimates `E[eta(x0 - eps)]` over `n_samples` kernel draws.
///
/// Samples are evaluated in parallel but combined in a fixed order, so the
/// output is a deterministic function of (x0, kernel, n_samples, seed).
/// The standard error is the per-component sample standard deviation over
/// sqrt(n); it is zero when n_samples is 1.
///
/// Panics if the kernel dimension does not match `x0` or if `n_samples`
/// is zero; the typed wrappers below report those as errors instead.
pub fn expected_map<T, E, F>(
    x0: &[T],
    eta: F,
    kernel: &KernelSpec<T>,
    n_samples: usize,
    seed: u64,
) -> Result<ExpectedVector<T>, E>
where
    T: Real,
    E: Send,
    F: Fn(&[T]) -> Result<Vec<T>, E> + Sync,
{
    assert_eq!(kernel.dim(), x0.len(), "kernel dimension vs perturbed space");
    assert!(n_samples >= 1, "need at least one sample");

    let rows: Result<Vec<Vec<T>>, E> = (0..n_samples)
        .into_par_iter()
        .map(|j| {
            let mut rng = perturbation_stream(seed, j as u64);
            let eps = kernel.sample(&mut rng);
            let x: Vec<T> = x0.iter().zip(&eps).map(|(&a, &e)| a - e).collect();
            eta(&x)
        })
        .collect();
    Ok(summarize_rows(&rows?))
}

/// Componentwise mean and standard error of a batch of equal-length rows,
/// accumulated pairwise so the result is independent of how the rows were
/// produced. A single row gets zero standard error.
pub(crate) fn summarize_rows<T: Real>(rows: &[Vec<T>]) -> ExpectedVector<T> {
    let n_samples = rows.len();
    let m = rows[0].len();
    for r in rows {
        assert_eq!(r.len(), m, "rows must have a fixed dimension");
    }

    let n = T::of(n_samples as f64);
    let mut mean = pairwise_sum(rows);
    for v in &mut mean {
        *v = *v / n;
    }

    let stderr = if n_samples == 1 {
        vec![T::zero(); m]
    } else {
        let centered_sq: Vec<Vec<T>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&mean)
                    .map(|(&v, &mu)| (v - mu) * (v - mu))
                    .collect()
            })
            .collect();
        let mut ss = pairwise_sum(&centered_sq);
        let nm1 = T::of((n_samples - 1) as f64);
        for v in &mut ss {
            *v = (*v / nm1 / n).sqrt();
        }
        ss
    };

    ExpectedVector {
        mean,
        stderr,
        n_samples,
    }
}

/// Expected heat vector under kernel perturbation of the filtration
/// weights: each sample repairs the perturbed weights to monotone and
/// recomputes the diagram from scratch.
#[allow(clippy::too_many_arguments)]
pub fn expected_heatmap<T: Real>(
    complex: &SimplicialComplex,
    weights: &[T],
    degree: usize,
    f: &WeightFunction<T>,
    sel: ChainSelector,
    opts: &HeatmapOptions,
    kernel: &KernelSpec<T>,
    n_samples: usize,
    seed: u64,
) -> Result<ExpectedVector<T>, PipelineError> {
    if kernel.dim() != weights.len() {
        return Err(KernelError::DimensionMismatch {
            kernel: kernel.dim(),
            space: weights.len(),
        }
        .into());
    }
    if n_samples == 0 {
        return Err(KernelError::NoSamples.into());
    }
    expected_map(
        weights,
        |x| heat_of_weights(complex, x, degree, f, sel, opts).map(|h| h.into_vec()),
        kernel,
        n_samples,
        seed,
    )
}

/// Expected raster image under joint kernel perturbation of the filtration
/// weights and the vertex coordinates; the perturbed space is
/// R^(k + 2 * n_points), weights first, then coordinates in point order.
#[allow(clippy::too_many_arguments)]
pub fn expected_theta<T: Real>(
    complex: &SimplicialComplex,
    weights: &[T],
    points: &[[T; 2]],
    degree: usize,
    f: &WeightFunction<T>,
    sel: ChainSelector,
    opts: &HeatmapOptions,
    grid: &RasterGrid<T>,
    kernel: &KernelSpec<T>,
    n_samples: usize,
    seed: u64,
) -> Result<ExpectedVector<T>, PipelineError> {
    let k = weights.len();
    let space = k + 2 * points.len();
    if kernel.dim() != space {
        return Err(KernelError::DimensionMismatch {
            kernel: kernel.dim(),
            space,
        }
        .into());
    }
    if n_samples == 0 {
        return Err(KernelError::NoSamples.into());
    }
    let x0: Vec<T> = weights
        .iter()
        .copied()
        .chain(points.iter().flat_map(|p| [p[0], p[1]]))
        .collect();
    expected_map(
        &x0,
        |x| {
            let w = &x[..k];
            let pts: Vec<[T; 2]> = x[k..].chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            theta(complex, w, &pts, degree, f, sel, opts, grid)
        },
        kernel,
        n_samples,
        seed,
    )
}

/// How `lipschitz_probe` picks its evaluation points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeMode {
    /// Midpoints of a per-axis subdivision of the probe box; evaluation
    /// count is per_axis^|active|.
    TensorGrid { per_axis: usize },
    /// Uniformly random point pairs in the probe box.
    RandomPairs { n_pairs: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport<T> {
    /// Largest observed ||f(x) - f(y)|| / ||x - y|| over evaluated pairs.
    pub max_ratio: T,
    /// Largest sup-norm of any evaluated target value.
    pub sup_norm: T,
    /// Number of target evaluations performed.
    pub evaluations: usize,
}

/// Empirically probes the Lipschitz behavior of `target` around `base`,
/// varying only the `active` coordinates within a box of half-width
/// `radius`. Evaluations run in parallel; results are deterministic.
pub fn lipschitz_probe<T, E, F>(
    target: F,
    base: &[T],
    active: &[usize],
    radius: T,
    mode: &ProbeMode,
) -> Result<ProbeReport<T>, E>
where
    T: Real,
    E: Send,
    F: Fn(&[T]) -> Result<Vec<T>, E> + Sync,
{
    assert!(!active.is_empty(), "need at least one active coordinate");
    for &a in active {
        assert!(a < base.len(), "active coordinate in range");
    }

    // Build the evaluation points in the active-coordinate subspace.
    let a = active.len();
    let pts: Vec<Vec<f64>> = match mode {
        ProbeMode::TensorGrid { per_axis } => {
            let m = *per_axis;
            assert!(m >= 2, "a tensor probe needs at least two points per axis");
            assert!(
                m.checked_pow(a as u32).is_some_and(|total| total <= 200_000),
                "tensor probe too large"
            );
            let r = radius.as_f64();
            let mut out = Vec::with_capacity(m.pow(a as u32));
            let mut counter = vec![0usize; a];
            loop {
                out.push(
                    counter
                        .iter()
                        .enumerate()
                        .map(|(axis, &t)| {
                            let lo = base[active[axis]].as_f64() - r;
                            lo + (t as f64 + 0.5) * (2.0 * r / m as f64)
                        })
                        .collect(),
                );
                let mut axis = 0;
                loop {
                    if axis == a {
                        return probe_over_points(target, base, active, out);
                    }
                    counter[axis] += 1;
                    if counter[axis] < m {
                        break;
                    }
                    counter[axis] = 0;
                    axis += 1;
                }
            }
        }
        ProbeMode::RandomPairs { n_pairs, seed } => {
            assert!(*n_pairs >= 1, "need at least one pair");
            let r = radius.as_f64();
            let mut rng = perturbation_stream(*seed, 0);
            let mut out = Vec::with_capacity(2 * n_pairs);
            for _ in 0..2 * n_pairs {
                out.push(
                    active
                        .iter()
                        .map(|&idx| {
                            let lo = base[idx].as_f64() - r;
                            lo + 2.0 * r * rng.random::<f64>()
                        })
                        .collect(),
                );
            }
            out
        }
    };

    probe_over_points(target, base, active, pts)
}

fn probe_over_points<T, E, F>(
    target: F,
    base: &[T],
    active: &[usize],
    pts: Vec<Vec<f64>>,
) -> Result<ProbeReport<T>, E>
where
    T: Real,
    E: Send,
    F: Fn(&[T]) -> Result<Vec<T>, E> + Sync,
{
    let values: Result<Vec<Vec<T>>, E> = pts
        .par_iter()
        .map(|coords| {
            let mut x: Vec<T> = base.to_vec();
            for (axis, &idx) in active.iter().enumerate() {
                x[idx] = T::of(coords[axis]);
            }
            target(&x)
        })
        .collect();
    let values = values?;

    let mut sup = 0.0f64;
    for v in &values {
        for &c in v {
            sup = sup.max(c.as_f64().abs());
        }
    }

    let mut max_ratio = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let dx2: f64 = pts[i]
                .iter()
                .zip(&pts[j])
                .map(|(p, q)| (p - q) * (p - q))
                .sum();
            if dx2 == 0.0 {
                continue;
            }
            let df2: f64 = values[i]
                .iter()
                .zip(&values[j])
                .map(|(&p, &q)| {
                    let d = p.as_f64() - q.as_f64();
                    d * d
                })
                .sum();
            max_ratio = max_ratio.max((df2 / dx2).sqrt());
        }
    }

    Ok(ProbeReport {
        max_ratio: T::of(max_ratio),
        sup_norm: T::of(sup),
        evaluations: values.len(),
    })
}
