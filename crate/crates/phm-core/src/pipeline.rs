//! End-to-end maps from raw weight assignments to heat and raster vectors.
//!
//! These are the functions the expectation machinery evaluates pointwise:
//! both accept an arbitrary vector in place of filtration weights and first
//! project it to the nearest dominating monotone vector, so they are total
//! on R^k and agree with the direct pipeline on already-monotone input.

use crate::complex::{monotone_repair, ComplexError, SimplicialComplex};
use crate::heatmap::{
    heatmap, ChainSelector, HeatmapError, HeatmapOptions, HeatmapWeights, WeightFunction,
};
use crate::raster::{rasterize, RasterError, RasterGrid};
use crate::reduction::persistence_diagram;
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Heatmap(#[from] HeatmapError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
}

/// Heat vector of an arbitrary weight assignment: repair to monotone,
/// recompute the annotated diagram from scratch, spread heat.
pub fn heat_of_weights<T: Real>(
    complex: &SimplicialComplex,
    weights: &[T],
    degree: usize,
    f: &WeightFunction<T>,
    sel: ChainSelector,
    opts: &HeatmapOptions,
) -> Result<HeatmapWeights<T>, PipelineError> {
    let repaired = monotone_repair(complex, weights);
    let diagram = persistence_diagram(complex, &repaired)?;
    Ok(heatmap(&diagram, degree, f, sel, complex.len(), opts)?)
}

/// Raster image of the heat of an arbitrary weight assignment, with the
/// cloud realizing the complex in the plane.
pub fn theta<T: Real>(
    complex: &SimplicialComplex,
    weights: &[T],
    points: &[[T; 2]],
    degree: usize,
    f: &WeightFunction<T>,
    sel: ChainSelector,
    opts: &HeatmapOptions,
    grid: &RasterGrid<T>,
) -> Result<Vec<T>, PipelineError> {
    let heat = heat_of_weights(complex, weights, degree, f, sel, opts)?;
    Ok(rasterize(complex, points, heat.weights(), grid)?)
}
