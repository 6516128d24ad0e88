//! Persistence heatmaps for filtered simplicial complexes.
//!
//! The crate computes annotated persistence diagrams (representative cycles
//! and bounding chains) by Z2 boundary-matrix reduction, turns diagrams into
//! feature vectors (structured landscapes, death vectors) with per-cell
//! attribution, spreads learned or builtin point weights back onto simplices
//! as heatmaps, stabilizes heatmaps by kernel-convolution expectation, and
//! rasterizes simplex heat onto pixel grids. Linear SVM/SVR training closes
//! the loop from features back to heatmap weight functions.
//!
//! Core math is generic over the scalar (`scalar::Real`); `f64` aliases for
//! the common pipeline live at the crate root. Geometric predicates use
//! adaptive f64 filters with an exact rational fallback internally.

pub mod complex;
pub mod datagen;
pub mod features;
pub mod geometry;
pub mod heatmap;
pub mod io;
pub mod kernel;
pub mod pipeline;
pub mod raster;
pub mod reduction;
pub mod scalar;
pub mod svm;

#[cfg(test)]
pub(crate) mod testutil;

pub use complex::{
    build_complex, filtration_order, monotone_repair, validate_monotone, ComplexError,
    FiltrationOrder, Simplex, SimplicialComplex,
};
pub use datagen::{
    experiment_expected_phm, generate_cloud, resolve_weight_function, shuffle_cloud,
    ExperimentError, FeatureRecipe, GeneratorError, GeneratorSpec, HeatRecipe, HeatWeightRecipe,
};
pub use features::{
    death_vector, landscape, lifetime_map, order_diagram, DeathVector, LandscapeGrid,
    OrderedDiagram, OrderedPoint, StructuredFeatureVector,
};
pub use geometry::{alpha_complex, alpha_weights, delaunay_complex, rips_complex, GeometryError};
pub use pipeline::{heat_of_weights, theta, PipelineError};
pub use raster::{rasterize, RasterError, RasterGrid};
pub use heatmap::{heatmap, ChainSelector, HeatmapError, HeatmapOptions, HeatmapWeights, WeightFunction};
pub use io::{ExpectedHeatFile, IoError, KernelDescriptor};
pub use kernel::{
    expected_heatmap, expected_map, expected_theta, lipschitz_probe, perturbation_stream,
    ExpectedVector, KernelError, KernelFamily, KernelSpec, ProbeMode, ProbeReport,
};
pub use reduction::{
    annotate, boundary_matrix, boundary_of, persistence_diagram, reduce, AnnotatedDiagram,
    AnnotatedPoint, ChainError, ReductionResult, SparseZ2Matrix, Z2Chain,
};
pub use scalar::Real;
pub use svm::{
    model_to_f, train_svm, train_svr, LinearModel, SvmConfig, SvmError, SvrConfig, TrainOutcome,
};

/// Weight vector over the common double-precision scalar.
pub type WeightVectorF64 = complex::WeightVector<f64>;
/// Annotated diagram over the common double-precision scalar.
pub type AnnotatedDiagramF64 = reduction::AnnotatedDiagram<f64>;
