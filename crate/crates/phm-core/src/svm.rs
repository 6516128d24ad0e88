//! Linear models trained by primal subgradient descent.
//!
//! Two losses are supported: the hinge loss for binary classification and
//! the epsilon-insensitive loss for regression, both with an L2 penalty on
//! the weights (never on the bias). Training standardizes features
//! internally (and centers targets for regression) but folds the affine
//! change of variables back into the returned coefficients, so the model
//! always scores raw, unstandardized inputs. The step schedule is
//! 1 / (lambda * t) and the returned model is the average of all iterates,
//! which keeps the objective trace stable.

use crate::scalar::Real;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SvmError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("sample {index} has {got} features, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("labels must include both classes (+1 and -1)")]
    DegenerateLabels,
    #[error("classification labels must be +1 or -1")]
    InvalidLabel { index: usize },
    #[error("target or feature value is not finite")]
    NonFiniteValue,
    #[error("lambda must be positive and epochs at least 1")]
    InvalidParameter,
    #[error("model has {model} coefficients but the feature vector has {features} cells")]
    ModelSizeMismatch { model: usize, features: usize },
    #[error("attribution index {index} is out of range for {n_points} diagram points")]
    AttributionOutOfRange { index: usize, n_points: usize },
}

/// A trained linear scorer on raw (unstandardized) feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<T> {
    /// One coefficient per feature cell.
    pub f: Vec<T>,
    /// Additive bias.
    pub b: T,
    /// L2 penalty strength used in training.
    pub lambda: T,
    /// Number of passes over the data used in training.
    pub epochs: usize,
    /// Seed of the epoch-shuffling RNG used in training.
    pub seed: u64,
}

impl<T: Real> LinearModel<T> {
    /// Raw score f . x + b.
    pub fn score(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.f.len(), "feature dimension");
        let mut s = self.b;
        for (&w, &v) in self.f.iter().zip(x) {
            s += w * v;
        }
        s
    }

    /// Classification output: +1 on nonnegative score, -1 otherwise.
    pub fn classify(&self, x: &[T]) -> i8 {
        if self.score(x) >= T::zero() {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig<T> {
    pub lambda: T,
    pub epochs: usize,
    pub seed: u64,
}

impl<T: Real> Default for SvmConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::of(1e-3),
            epochs: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrConfig<T> {
    pub lambda: T,
    pub epochs: usize,
    pub seed: u64,
    /// Half-width of the insensitive tube around the target.
    pub epsilon: T,
}

impl<T: Real> Default for SvrConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::of(1e-3),
            epochs: 200,
            seed: 0,
            epsilon: T::of(0.01),
        }
    }
}

/// A trained model together with the objective value of the averaged
/// iterate after each epoch (computed in the standardized coordinates the
/// optimizer works in).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome<T> {
    pub model: LinearModel<T>,
    pub objective_trace: Vec<T>,
}

struct Standardized<T> {
    /// Rows in standardized coordinates.
    zs: Vec<Vec<T>>,
    mean: Vec<T>,
    scale: Vec<T>,
}

fn validate_rows<T: Real>(xs: &[Vec<T>]) -> Result<usize, SvmError> {
    if xs.is_empty() {
        return Err(SvmError::EmptyTrainingSet);
    }
    let d = xs[0].len();
    for (i, row) in xs.iter().enumerate() {
        if row.len() != d {
            return Err(SvmError::DimensionMismatch {
                index: i,
                expected: d,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.as_f64().is_finite()) {
            return Err(SvmError::NonFiniteValue);
        }
    }
    Ok(d)
}

/// Per-feature z-scoring; constant features get scale 1 so they map to 0.
fn standardize<T: Real>(xs: &[Vec<T>]) -> Standardized<T> {
    let n = T::of(xs.len() as f64);
    let d = xs[0].len();
    let mut mean = vec![T::zero(); d];
    for row in xs {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m = *m / n;
    }
    let mut var = vec![T::zero(); d];
    for row in xs {
        for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let scale: Vec<T> = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > T::zero() {
                sd
            } else {
                T::one()
            }
        })
        .collect();
    let zs = xs
        .iter()
        .map(|row| {
            row.iter()
                .zip(&mean)
                .zip(&scale)
                .map(|((&v, &m), &s)| (v - m) / s)
                .collect()
        })
        .collect();
    Standardized { zs, mean, scale }
}

enum Loss<T> {
    Hinge,
    Tube { epsilon: T },
}

/// Subgradient loop shared by both losses, in standardized coordinates.
///
/// The bias rides along as one more regularized coordinate against a
/// constant 1 feature, each step is followed by the usual projection onto
/// the ball of radius 1/sqrt(lambda), and the returned solution is the
/// average of the iterates after the first epoch (all iterates when there
/// is only one epoch) — the first pass is dominated by the very large
/// early steps of the 1/(lambda t) schedule.
///
/// Returns the averaged weights, the averaged bias, and the per-epoch
/// objective of the solution-so-far.
fn optimize<T: Real>(
    zs: &[Vec<T>],
    ys: &[T],
    loss: &Loss<T>,
    lambda: T,
    epochs: usize,
    seed: u64,
) -> (Vec<T>, T, Vec<T>) {
    let n = zs.len();
    let d = zs[0].len();
    let radius = T::one() / lambda.sqrt();
    let mut w = vec![T::zero(); d];
    let mut b = T::zero();
    let mut w_sum = vec![T::zero(); d];
    let mut b_sum = T::zero();
    let mut averaged = 0usize;
    let mut steps = 0usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::with_capacity(epochs);

    for epoch in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            steps += 1;
            let eta = T::one() / (lambda * T::of(steps as f64));
            let keep = T::one() - eta * lambda;
            let margin_term = score(&w, b, &zs[i]);
            // The negative subgradient direction of the data term at
            // sample i, or None where the loss is flat.
            let pull: Option<T> = match loss {
                Loss::Hinge => {
                    if ys[i] * margin_term < T::one() {
                        Some(ys[i])
                    } else {
                        None
                    }
                }
                Loss::Tube { epsilon } => {
                    let err = margin_term - ys[i];
                    if err > *epsilon {
                        Some(-T::one())
                    } else if -err > *epsilon {
                        Some(T::one())
                    } else {
                        None
                    }
                }
            };
            for v in &mut w {
                *v = *v * keep;
            }
            b *= keep;
            if let Some(p) = pull {
                for (v, &z) in w.iter_mut().zip(&zs[i]) {
                    *v += eta * p * z;
                }
                b += eta * p;
            }
            let norm2 = b * b
                + w.iter().map(|&v| v * v).fold(T::zero(), |a, v| a + v);
            if norm2 > radius * radius {
                let shrink = radius / norm2.sqrt();
                for v in &mut w {
                    *v = *v * shrink;
                }
                b *= shrink;
            }
            if epoch > 0 || epochs == 1 {
                averaged += 1;
                for (s, &v) in w_sum.iter_mut().zip(&w) {
                    *s += v;
                }
                b_sum += b;
            }
        }
        if averaged == 0 {
            trace.push(objective(zs, ys, loss, lambda, &w, b));
        } else {
            let inv = T::one() / T::of(averaged as f64);
            let w_avg: Vec<T> = w_sum.iter().map(|&s| s * inv).collect();
            trace.push(objective(zs, ys, loss, lambda, &w_avg, b_sum * inv));
        }
    }

    let inv = T::one() / T::of(averaged as f64);
    let w_avg: Vec<T> = w_sum.iter().map(|&s| s * inv).collect();
    (w_avg, b_sum * inv, trace)
}

fn score<T: Real>(w: &[T], b: T, z: &[T]) -> T {
    let mut s = b;
    for (&a, &v) in w.iter().zip(z) {
        s += a * v;
    }
    s
}

fn objective<T: Real>(zs: &[Vec<T>], ys: &[T], loss: &Loss<T>, lambda: T, w: &[T], b: T) -> T {
    let two = T::of(2.0);
    let norm2 = b * b + w.iter().map(|&v| v * v).fold(T::zero(), |a, v| a + v);
    let mut j = lambda / two * norm2;
    let n = T::of(zs.len() as f64);
    let mut data = T::zero();
    for (z, &y) in zs.iter().zip(ys) {
        let s = score(w, b, z);
        let l = match loss {
            Loss::Hinge => (T::one() - y * s).max(T::zero()),
            Loss::Tube { epsilon } => ((s - y).abs() - *epsilon).max(T::zero()),
        };
        data += l;
    }
    j += data / n;
    j
}

/// Expresses standardized-space coefficients in raw coordinates:
/// w . (x - mu) / sigma + b  ==  (w / sigma) . x + (b - w . (mu / sigma)).
fn fold_back<T: Real>(w: &[T], b: T, st: &Standardized<T>) -> (Vec<T>, T) {
    let f: Vec<T> = w.iter().zip(&st.scale).map(|(&v, &s)| v / s).collect();
    let mut bias = b;
    for ((&v, &m), &s) in w.iter().zip(&st.mean).zip(&st.scale) {
        bias -= v * m / s;
    }
    (f, bias)
}

/// Trains a binary classifier with the hinge loss. Labels must be +1 or
/// -1 and both classes must be present.
pub fn train_svm<T: Real>(
    xs: &[Vec<T>],
    ys: &[T],
    cfg: &SvmConfig<T>,
) -> Result<TrainOutcome<T>, SvmError> {
    let d = validate_rows(xs)?;
    if ys.len() != xs.len() {
        return Err(SvmError::DimensionMismatch {
            index: 0,
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if cfg.lambda.as_f64() <= 0.0 || !cfg.lambda.as_f64().is_finite() || cfg.epochs == 0 {
        return Err(SvmError::InvalidParameter);
    }
    let mut pos = false;
    let mut neg = false;
    for (i, &y) in ys.iter().enumerate() {
        let v = y.as_f64();
        if v == 1.0 {
            pos = true;
        } else if v == -1.0 {
            neg = true;
        } else {
            return Err(SvmError::InvalidLabel { index: i });
        }
    }
    if !(pos && neg) {
        return Err(SvmError::DegenerateLabels);
    }

    let st = standardize(xs);
    let (w, b, trace) = optimize(&st.zs, ys, &Loss::Hinge, cfg.lambda, cfg.epochs, cfg.seed);
    let (f, bias) = fold_back(&w, b, &st);
    let _ = d;
    Ok(TrainOutcome {
        model: LinearModel {
            f,
            b: bias,
            lambda: cfg.lambda,
            epochs: cfg.epochs,
            seed: cfg.seed,
        },
        objective_trace: trace,
    })
}

/// Trains a regressor with the epsilon-insensitive loss. Targets are
/// centered internally; the returned bias absorbs the centering.
pub fn train_svr<T: Real>(
    xs: &[Vec<T>],
    ys: &[T],
    cfg: &SvrConfig<T>,
) -> Result<TrainOutcome<T>, SvmError> {
    validate_rows(xs)?;
    if ys.len() != xs.len() {
        return Err(SvmError::DimensionMismatch {
            index: 0,
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if cfg.lambda.as_f64() <= 0.0
        || !cfg.lambda.as_f64().is_finite()
        || cfg.epochs == 0
        || cfg.epsilon.as_f64() < 0.0
        || !cfg.epsilon.as_f64().is_finite()
    {
        return Err(SvmError::InvalidParameter);
    }
    if ys.iter().any(|y| !y.as_f64().is_finite()) {
        return Err(SvmError::NonFiniteValue);
    }

    let st = standardize(xs);
    let n = T::of(ys.len() as f64);
    let y_mean = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let centered: Vec<T> = ys.iter().map(|&y| y - y_mean).collect();
    let (w, b, trace) = optimize(
        &st.zs,
        &centered,
        &Loss::Tube {
            epsilon: cfg.epsilon,
        },
        cfg.lambda,
        cfg.epochs,
        cfg.seed,
    );
    let (f, bias) = fold_back(&w, b, &st);
    Ok(TrainOutcome {
        model: LinearModel {
            f,
            b: bias + y_mean,
            lambda: cfg.lambda,
            epochs: cfg.epochs,
            seed: cfg.seed,
        },
        objective_trace: trace,
    })
}

/// Folds a trained model back onto diagram points.
///
/// Cell c of a feature vector carries value v_c and is attributed to at
/// most one diagram point. Point j receives the sum of f_c * v_c over its
/// attributed cells plus an equal share of the bias per attributed cell
/// (b * count_j / N, where N is the total number of attributed cells).
/// With `absolute` set, the per-point sums are replaced by their absolute
/// values and the bias is omitted. When no cell is attributed, the result
/// is all zeros.
pub fn model_to_f<T: Real>(
    model: &LinearModel<T>,
    values: &[T],
    attribution: &[Option<usize>],
    n_points: usize,
    absolute: bool,
) -> Result<Vec<T>, SvmError> {
    if model.f.len() != values.len() || values.len() != attribution.len() {
        return Err(SvmError::ModelSizeMismatch {
            model: model.f.len(),
            features: values.len().min(attribution.len()),
        });
    }
    let mut out = vec![T::zero(); n_points];
    let mut counts = vec![0usize; n_points];
    let mut attributed = 0usize;
    for ((&c, &v), &attr) in model.f.iter().zip(values).zip(attribution) {
        if let Some(j) = attr {
            if j >= n_points {
                return Err(SvmError::AttributionOutOfRange {
                    index: j,
                    n_points,
                });
            }
            out[j] += c * v;
            counts[j] += 1;
            attributed += 1;
        }
    }
    if attributed == 0 {
        return Ok(vec![T::zero(); n_points]);
    }
    if absolute {
        for v in &mut out {
            *v = v.abs();
        }
    } else {
        let share = model.b / T::of(attributed as f64);
        for (v, &cnt) in out.iter_mut().zip(&counts) {
            *v += share * T::of(cnt as f64);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two separable blobs around (+2, +2) and (-2, -2) on a deterministic
    /// jittered grid.
    fn blobs() -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..20 {
            let dx = (i % 5) as f64 * 0.1;
            let dy = (i / 5) as f64 * 0.1;
            xs.push(vec![2.0 + dx, 2.0 + dy]);
            ys.push(1.0);
            xs.push(vec![-2.0 - dx, -2.0 - dy]);
            ys.push(-1.0);
        }
        (xs, ys)
    }

    #[test]
    fn svm_separates_disjoint_blobs() {
        let (xs, ys) = blobs();
        let out = train_svm(&xs, &ys, &SvmConfig::default()).unwrap();
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(out.model.classify(x) as f64, y, "misclassified {x:?}");
        }
    }

    #[test]
    fn label_flip_mirrors_the_model_exactly() {
        let (xs, ys) = blobs();
        let flipped: Vec<f64> = ys.iter().map(|y| -y).collect();
        let a = train_svm(&xs, &ys, &SvmConfig::default()).unwrap().model;
        let b = train_svm(&xs, &flipped, &SvmConfig::default()).unwrap().model;
        for (&p, &q) in a.f.iter().zip(&b.f) {
            assert_eq!(p, -q, "coefficients must mirror bitwise");
        }
        assert_eq!(a.b, -b.b);
    }

    /// The averaged iterate's objective may wobble while the 1/(lambda t)
    /// steps are still large, but must settle: no increase above 1e-4 over
    /// the second half of training, and a strict overall decrease.
    fn assert_trace_settles(trace: &[f64]) {
        let half = trace.len() / 2;
        for pair in trace[half..].windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-4,
                "late objective rose from {} to {}",
                pair[0],
                pair[1]
            );
        }
        assert!(
            trace[trace.len() - 1] < trace[0],
            "objective did not decrease: {} -> {}",
            trace[0],
            trace[trace.len() - 1]
        );
    }

    #[test]
    fn svm_objective_trace_settles() {
        let (xs, ys) = blobs();
        for seed in [0, 3, 11] {
            let out = train_svm(
                &xs,
                &ys,
                &SvmConfig {
                    lambda: 1e-2,
                    epochs: 100,
                    seed,
                },
            )
            .unwrap();
            assert_trace_settles(&out.objective_trace);
        }
    }

    #[test]
    fn svr_objective_trace_settles() {
        let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 * 0.1]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.7 * x[0] + 0.3).collect();
        for seed in [0, 4, 11] {
            let out = train_svr(
                &xs,
                &ys,
                &SvrConfig {
                    lambda: 1e-2,
                    epochs: 100,
                    seed,
                    epsilon: 0.01,
                },
            )
            .unwrap();
            assert_trace_settles(&out.objective_trace);
        }
    }

    #[test]
    fn svr_recovers_a_noiseless_linear_trend() {
        let xs: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 0.2 - 5.0]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x[0] - 1.0).collect();
        let out = train_svr(
            &xs,
            &ys,
            &SvrConfig {
                lambda: 1e-4,
                epochs: 800,
                seed: 0,
                epsilon: 0.01,
            },
        )
        .unwrap();
        for (x, &y) in xs.iter().zip(&ys) {
            let err = (out.model.score(x) - y).abs();
            assert!(err < 0.2, "prediction off by {err} at {x:?}");
        }
    }

    #[test]
    fn training_is_invariant_to_feature_scaling() {
        // Rescaling a column is absorbed by standardization: the optimizer
        // sees identical data, so predictions agree up to fold-back
        // rounding.
        let (xs, ys) = blobs();
        let scaled: Vec<Vec<f64>> = xs
            .iter()
            .map(|r| vec![r[0] * 1000.0, r[1]])
            .collect();
        let a = train_svm(&xs, &ys, &SvmConfig::default()).unwrap().model;
        let b = train_svm(&scaled, &ys, &SvmConfig::default()).unwrap().model;
        for (x, s) in xs.iter().zip(&scaled) {
            assert!((a.score(x) - b.score(s)).abs() < 1e-9);
        }
    }

    #[test]
    fn fold_back_scores_raw_inputs() {
        // Features on wildly different scales still train to a working
        // classifier whose score acts on raw inputs directly.
        let xs: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let t = i as f64;
                vec![1e6 + t * 1e4, t * 1e-5]
            })
            .collect();
        let ys: Vec<f64> = (0..30).map(|i| if i < 15 { -1.0 } else { 1.0 }).collect();
        let out = train_svm(&xs, &ys, &SvmConfig::default()).unwrap();
        let correct = xs
            .iter()
            .zip(&ys)
            .filter(|(x, &y)| out.model.classify(x) as f64 == y)
            .count();
        assert_eq!(correct, 30);
    }

    #[test]
    fn degenerate_and_invalid_inputs_are_rejected() {
        let xs = vec![vec![1.0], vec![2.0]];
        assert_eq!(
            train_svm(&xs, &[1.0, 1.0], &SvmConfig::default()).unwrap_err(),
            SvmError::DegenerateLabels
        );
        assert_eq!(
            train_svm(&xs, &[1.0, 0.5], &SvmConfig::default()).unwrap_err(),
            SvmError::InvalidLabel { index: 1 }
        );
        assert_eq!(
            train_svm::<f64>(&[], &[], &SvmConfig::default()).unwrap_err(),
            SvmError::EmptyTrainingSet
        );
        assert_eq!(
            train_svm(&vec![vec![1.0], vec![1.0, 2.0]], &[1.0, -1.0], &SvmConfig::default())
                .unwrap_err(),
            SvmError::DimensionMismatch {
                index: 1,
                expected: 1,
                got: 2
            }
        );
        assert_eq!(
            train_svr(
                &xs,
                &[1.0, 2.0],
                &SvrConfig {
                    lambda: 0.0,
                    ..SvrConfig::default()
                }
            )
            .unwrap_err(),
            SvmError::InvalidParameter
        );
    }

    #[test]
    fn model_to_f_distributes_coefficients_and_bias() {
        let model: LinearModel<f64> = LinearModel {
            f: vec![1.0, 2.0, 3.0, 4.0],
            b: 6.0,
            lambda: 1e-3,
            epochs: 1,
            seed: 0,
        };
        let values = [10.0, 20.0, 30.0, 40.0];
        let attribution = [Some(0), Some(1), Some(0), None];
        let f = model_to_f(&model, &values, &attribution, 3, false).unwrap();
        // Point 0: 1*10 + 3*30 = 100 plus bias share 6 * 2/3 = 4.
        // Point 1: 2*20 = 40 plus 6 * 1/3 = 2. Point 2: nothing.
        assert!((f[0] - 104.0).abs() < 1e-12);
        assert!((f[1] - 42.0).abs() < 1e-12);
        assert_eq!(f[2], 0.0);

        let abs = model_to_f(&model, &values, &attribution, 3, true).unwrap();
        assert_eq!(abs, vec![100.0, 40.0, 0.0]);
    }

    #[test]
    fn model_to_f_handles_edge_cases() {
        let model: LinearModel<f64> = LinearModel {
            f: vec![5.0, -7.0],
            b: 3.0,
            lambda: 1e-3,
            epochs: 1,
            seed: 0,
        };
        // No attributed cells: zeros, bias dropped.
        let f = model_to_f(&model, &[1.0, 2.0], &[None, None], 2, false).unwrap();
        assert_eq!(f, vec![0.0, 0.0]);
        // Negative sums keep their sign without the absolute flag.
        let f = model_to_f(&model, &[1.0, 2.0], &[None, Some(1)], 2, false).unwrap();
        assert_eq!(f[0], 0.0);
        assert!((f[1] - (-14.0 + 3.0)).abs() < 1e-12);
        // Size and range errors.
        assert!(matches!(
            model_to_f(&model, &[1.0], &[None], 1, false).unwrap_err(),
            SvmError::ModelSizeMismatch { .. }
        ));
        assert!(matches!(
            model_to_f(&model, &[1.0, 2.0], &[Some(5), None], 2, false).unwrap_err(),
            SvmError::AttributionOutOfRange {
                index: 5,
                n_points: 2
            }
        ));
    }

    #[test]
    fn identical_configs_reproduce_the_model_bitwise() {
        let (xs, ys) = blobs();
        let a = train_svm(&xs, &ys, &SvmConfig::default()).unwrap().model;
        let b = train_svm(&xs, &ys, &SvmConfig::default()).unwrap().model;
        assert_eq!(a, b);
        let c = train_svm(
            &xs,
            &ys,
            &SvmConfig {
                seed: 9,
                ..SvmConfig::default()
            },
        )
        .unwrap()
        .model;
        assert_ne!(a.f, c.f);
    }
}
