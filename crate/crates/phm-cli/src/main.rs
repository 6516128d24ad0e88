//! `phm` — a command-line pipeline from planar point clouds to persistence
//! heat maps.
//!
//! Each subcommand reads and writes plain files, so stages compose through
//! the filesystem. Every invocation that produces an output also writes
//! `<output>.manifest.json` recording the exact parameters, inputs, and
//! outputs of the run. All randomness is seeded; results are independent
//! of the worker thread count.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use phm_core::io::{
    read_cloud, read_diagram, read_features_csv, read_filtration, read_heat_csv, read_model,
    write_cloud, write_diagram, write_expected, write_features_csv, write_filtration,
    write_heat_csv, write_json, write_model, write_pgm, write_ppm, write_raster_csv,
    ExpectedHeatFile, KernelDescriptor,
};
use phm_core::{
    alpha_complex, expected_map, experiment_expected_phm, generate_cloud, heatmap,
    lipschitz_probe, model_to_f, monotone_repair, persistence_diagram, rasterize,
    resolve_weight_function, rips_complex, shuffle_cloud, train_svm, train_svr, AnnotatedDiagram,
    ChainSelector, ExperimentError, FeatureRecipe, GeneratorSpec, HeatRecipe, HeatWeightRecipe,
    HeatmapOptions, KernelFamily, KernelSpec, LinearModel, ProbeMode, RasterGrid, SvmConfig,
    SvrConfig, WeightFunction,
};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "phm",
    version,
    about = "Persistence heat maps for planar point clouds"
)]
struct Cli {
    /// Size of the worker thread pool (default: all cores). Outputs do
    /// not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic point cloud
    Gen(GenArgs),
    /// Build a weighted filtration from a point cloud
    Filtration(FiltrationArgs),
    /// Compute the annotated persistence diagram of a filtration
    Persistence(PersistenceArgs),
    /// Vectorize a diagram into an attributed feature vector
    Features(FeaturesArgs),
    /// Train a linear model on feature vectors
    Train(TrainArgs),
    /// Compute per-simplex heat for a filtration
    Heatmap(HeatmapArgs),
    /// Monte-Carlo expected heat under kernel perturbation of the weights
    ExpectedHeatmap(ExpectedHeatmapArgs),
    /// Expected heat raster over freshly sampled clouds
    ExperimentEphm(ExperimentArgs),
    /// Rasterize per-simplex heat onto a grid
    Raster(RasterArgs),
    /// Probe the Lipschitz behavior of the expected heat map
    StabilityProbe(ProbeArgs),
}

// -------------------------------------------------------------------
// Shared argument blocks
// -------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum SelectorArg {
    /// Deposit on the birth simplex
    BirthSimplex,
    /// Deposit on the death simplex
    DeathSimplex,
    /// Spread across the representative cycle
    RepCycle,
    /// Spread across the bounding chain
    BoundingChain,
}

impl From<SelectorArg> for ChainSelector {
    fn from(s: SelectorArg) -> Self {
        match s {
            SelectorArg::BirthSimplex => ChainSelector::BirthSimplex,
            SelectorArg::DeathSimplex => ChainSelector::DeathSimplex,
            SelectorArg::RepCycle => ChainSelector::RepCycle,
            SelectorArg::BoundingChain => ChainSelector::BoundingChain,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Triangular,
    Epanechnikov,
    Gaussian,
}

impl From<KernelArg> for KernelFamily {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Triangular => KernelFamily::Triangular,
            KernelArg::Epanechnikov => KernelFamily::Epanechnikov,
            KernelArg::Gaussian => KernelFamily::Gaussian,
        }
    }
}

impl KernelArg {
    fn name(self) -> &'static str {
        KernelFamily::from(self).name()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightKind {
    Constant,
    Persistence,
    Learned,
}

#[derive(Args, Clone)]
struct FeatureArgs {
    /// Feature vector family
    #[arg(long = "feature-kind", value_enum, default_value = "landscape")]
    feature_kind: FeatureKind,
    /// Homology degree the landscape is built from
    #[arg(long = "feature-degree", default_value_t = 1)]
    feature_degree: usize,
    /// Left end of the landscape sampling window
    #[arg(long = "t-min", default_value_t = 0.0)]
    t_min: f64,
    /// Right end of the landscape sampling window
    #[arg(long = "t-max", default_value_t = 1.0)]
    t_max: f64,
    /// Landscape samples per level
    #[arg(long = "n-t", default_value_t = 50)]
    n_t: usize,
    /// Number of landscape levels
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Death vector length
    #[arg(long, default_value_t = 20)]
    len: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeatureKind {
    Landscape,
    DeathVector,
}

impl FeatureArgs {
    fn recipe(&self) -> FeatureRecipe {
        match self.feature_kind {
            FeatureKind::Landscape => FeatureRecipe::Landscape {
                degree: self.feature_degree,
                t_min: self.t_min,
                t_max: self.t_max,
                n_t: self.n_t,
                n_levels: self.levels,
            },
            FeatureKind::DeathVector => FeatureRecipe::DeathVector { len: self.len },
        }
    }
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// Weighting rule applied to diagram points
    #[arg(long, value_enum, default_value = "persistence")]
    weight: WeightKind,
    /// Constant weight value (with --weight constant)
    #[arg(long, default_value_t = 1.0)]
    value: f64,
    /// Trained model JSON (with --weight learned)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Take absolute per-point sums and drop the bias (with --weight learned)
    #[arg(long)]
    abs: bool,
    #[command(flatten)]
    features: FeatureArgs,
}

impl WeightArgs {
    fn recipe(&self) -> Result<HeatWeightRecipe<f64>> {
        Ok(match self.weight {
            WeightKind::Constant => HeatWeightRecipe::Constant(self.value),
            WeightKind::Persistence => HeatWeightRecipe::Persistence,
            WeightKind::Learned => {
                let path = self
                    .model
                    .as_ref()
                    .context("--weight learned requires --model")?;
                let model = read_model(path)
                    .with_context(|| format!("reading model {}", path.display()))?;
                HeatWeightRecipe::Learned {
                    model,
                    features: self.features.recipe(),
                    absolute: self.abs,
                }
            }
        })
    }

    fn describe(&self) -> serde_json::Value {
        match self.weight {
            WeightKind::Constant => json!({"kind": "constant", "value": self.value}),
            WeightKind::Persistence => json!({"kind": "persistence"}),
            WeightKind::Learned => json!({
                "kind": "learned",
                "model": self.model.as_ref().map(|p| p.display().to_string()),
                "abs": self.abs,
                "features": serde_json::to_value(self.features.recipe()).unwrap(),
            }),
        }
    }
}

#[derive(Args, Clone, Copy)]
struct HeatOptionArgs {
    /// Also deposit essential classes (birth-side selectors, constant
    /// weights only)
    #[arg(long)]
    include_essential: bool,
    /// Skip zero-persistence points
    #[arg(long)]
    drop_zero: bool,
}

impl HeatOptionArgs {
    fn options(&self) -> HeatmapOptions {
        HeatmapOptions {
            include_zero_persistence: !self.drop_zero,
            include_essential: self.include_essential,
            track_provenance: false,
        }
    }

    fn describe(&self) -> serde_json::Value {
        json!({"include_essential": self.include_essential, "drop_zero": self.drop_zero})
    }
}

// -------------------------------------------------------------------
// Value parsers
// -------------------------------------------------------------------

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected x,y".to_string());
    }
    let x = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok([x, y])
}

fn parse_centers(s: &str) -> Result<[[f64; 2]; 2], String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err("expected x1,y1:x2,y2".to_string());
    }
    Ok([parse_point(parts[0])?, parse_point(parts[1])?])
}

#[derive(Clone, Copy)]
struct GridSpec {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 6 {
        return Err("expected x0,x1,y0,y1,nx,ny".to_string());
    }
    let f = |i: usize| parts[i].trim().parse::<f64>().map_err(|e| e.to_string());
    let u = |i: usize| parts[i].trim().parse::<usize>().map_err(|e| e.to_string());
    Ok(GridSpec {
        x0: f(0)?,
        x1: f(1)?,
        y0: f(2)?,
        y1: f(3)?,
        nx: u(4)?,
        ny: u(5)?,
    })
}

impl GridSpec {
    fn build(&self) -> Result<RasterGrid<f64>> {
        Ok(RasterGrid::new(
            self.x0, self.x1, self.y0, self.y1, self.nx, self.ny,
        )?)
    }

    fn describe(&self) -> serde_json::Value {
        json!({"x0": self.x0, "x1": self.x1, "y0": self.y0, "y1": self.y1,
               "nx": self.nx, "ny": self.ny})
    }
}

fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

// -------------------------------------------------------------------
// Manifest
// -------------------------------------------------------------------

fn write_manifest(
    primary: &Path,
    subcommand: &str,
    params: serde_json::Value,
    inputs: &[&Path],
    outputs: &[&Path],
) -> Result<()> {
    let manifest = json!({
        "tool": "phm",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "params": params,
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    let path = PathBuf::from(format!("{}.manifest.json", primary.display()));
    write_json(&path, &manifest)?;
    Ok(())
}

// -------------------------------------------------------------------
// gen
// -------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum GenClass {
    /// One ring: radii 0.8..1.0 around the origin
    A,
    /// Two rings: radii 0.4..0.5 around (-0.5, 0) and (0.5, 0)
    B,
    /// Custom single ring (--r-in, --r-out, --center)
    Annulus,
    /// Custom pair of rings (--r-in, --r-out, --centers)
    DoubleAnnulus,
    /// Uniform disc (--radius, --center)
    Disc,
    /// Orbit of the chaotic twist recurrence (--twist-r, --start)
    Twist,
}

#[derive(Args)]
struct GenArgs {
    /// Cloud family
    #[arg(long, value_enum)]
    class: GenClass,
    /// Number of points
    #[arg(long)]
    n: usize,
    /// Gaussian jitter added to each sampled point
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Inner radius for annulus/double-annulus
    #[arg(long = "r-in", default_value_t = 0.8)]
    r_in: f64,
    /// Outer radius for annulus/double-annulus
    #[arg(long = "r-out", default_value_t = 1.0)]
    r_out: f64,
    /// Center for annulus/disc, as x,y
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    center: [f64; 2],
    /// Centers for double-annulus, as x1,y1:x2,y2
    #[arg(long, value_parser = parse_centers, default_value = "-0.5,0:0.5,0")]
    centers: [[f64; 2]; 2],
    /// Disc radius
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Twist recurrence strength
    #[arg(long = "twist-r", default_value_t = 4.0)]
    twist_r: f64,
    /// Twist orbit start, as x,y in the unit square
    #[arg(long, value_parser = parse_point, default_value = "0.1,0.2")]
    start: [f64; 2],
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// RNG stream index under the seed
    #[arg(long, default_value_t = 0)]
    index: u64,
    /// Cloud CSV to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let spec = match a.class {
        GenClass::A => GeneratorSpec::class_a(a.n, a.sigma),
        GenClass::B => GeneratorSpec::class_b(a.n, a.sigma),
        GenClass::Annulus => GeneratorSpec::Annulus {
            n: a.n,
            r_in: a.r_in,
            r_out: a.r_out,
            center: a.center,
            sigma: a.sigma,
        },
        GenClass::DoubleAnnulus => GeneratorSpec::DoubleAnnulus {
            n: a.n,
            r_in: a.r_in,
            r_out: a.r_out,
            centers: a.centers,
            sigma: a.sigma,
        },
        GenClass::Disc => GeneratorSpec::Disc {
            n: a.n,
            radius: a.radius,
            center: a.center,
            sigma: a.sigma,
        },
        GenClass::Twist => GeneratorSpec::TwistOrbit {
            n: a.n,
            r: a.twist_r,
            start: a.start,
        },
    };
    let cloud: Vec<[f64; 2]> = generate_cloud(&spec, a.seed, a.index)?;
    write_cloud(&a.output, &cloud)?;
    write_manifest(
        &a.output,
        "gen",
        json!({
            "generator": serde_json::to_value(&spec)?,
            "seed": a.seed,
            "index": a.index,
        }),
        &[],
        &[&a.output],
    )?;
    println!("wrote {} ({} points)", a.output.display(), cloud.len());
    Ok(())
}

// -------------------------------------------------------------------
// filtration
// -------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Delaunay-based filtration: simplex enters at its smallest
    /// enclosing-disc scale
    Alpha,
    /// Distance-threshold filtration up to triangles
    Rips,
}

#[derive(Args)]
struct FiltrationArgs {
    /// Cloud CSV to read
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Edge length cutoff (rips only)
    #[arg(long)]
    threshold: Option<f64>,
    /// Shuffle point order before building (seeded)
    #[arg(long)]
    shuffle: bool,
    /// Seed for --shuffle
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the cloud in the order actually used
    #[arg(long = "cloud-output")]
    cloud_output: Option<PathBuf>,
    /// Filtration file to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_filtration(a: &FiltrationArgs) -> Result<()> {
    let mut cloud = read_cloud(&a.input)?;
    if a.shuffle {
        shuffle_cloud(&mut cloud, a.seed);
    }
    let (complex, weights) = match a.method {
        Method::Alpha => {
            if a.threshold.is_some() {
                bail!("--threshold only applies to --method rips");
            }
            alpha_complex(&cloud)?
        }
        Method::Rips => {
            let thr = a.threshold.context("--method rips requires --threshold")?;
            rips_complex(&cloud, thr)?
        }
    };
    write_filtration(&a.output, &complex, &weights)?;
    let mut outputs: Vec<&Path> = vec![&a.output];
    if let Some(cp) = &a.cloud_output {
        write_cloud(cp, &cloud)?;
        outputs.push(cp);
    }
    write_manifest(
        &a.output,
        "filtration",
        json!({
            "method": match a.method { Method::Alpha => "alpha", Method::Rips => "rips" },
            "threshold": a.threshold,
            "shuffle": a.shuffle,
            "seed": a.seed,
        }),
        &[&a.input],
        &outputs,
    )?;
    println!(
        "wrote {} ({} simplices, max dim {})",
        a.output.display(),
        complex.len(),
        complex.max_dim()
    );
    Ok(())
}

// -------------------------------------------------------------------
// persistence
// -------------------------------------------------------------------

#[derive(Args)]
struct PersistenceArgs {
    /// Filtration file to read
    #[arg(long)]
    input: PathBuf,
    /// Lift non-monotone weights to the smallest monotone vector above
    /// them instead of rejecting the file
    #[arg(long)]
    repair: bool,
    /// Omit zero-persistence points from the diagram
    #[arg(long)]
    drop_zero: bool,
    /// Diagram JSON to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_persistence(a: &PersistenceArgs) -> Result<()> {
    let (complex, mut weights) = read_filtration(&a.input)?;
    if a.repair {
        weights = monotone_repair(&complex, &weights);
    }
    let diagram = persistence_diagram(&complex, &weights)?;
    let diagram = if a.drop_zero {
        let max_weight = diagram.max_weight();
        let points = diagram
            .points()
            .iter()
            .filter(|p| p.is_essential() || p.persistence() != 0.0)
            .cloned()
            .collect();
        let mut d = AnnotatedDiagram::from_points(points);
        d.set_max_weight(max_weight);
        d
    } else {
        diagram
    };
    write_diagram(&a.output, &diagram)?;
    write_manifest(
        &a.output,
        "persistence",
        json!({"repair": a.repair, "drop_zero": a.drop_zero}),
        &[&a.input],
        &[&a.output],
    )?;
    let essentials = diagram.points().iter().filter(|p| p.is_essential()).count();
    println!(
        "wrote {} ({} points, {} essential)",
        a.output.display(),
        diagram.points().len(),
        essentials
    );
    Ok(())
}

// -------------------------------------------------------------------
// features
// -------------------------------------------------------------------

#[derive(Args)]
struct FeaturesArgs {
    /// Diagram JSON to read
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    features: FeatureArgs,
    /// Feature CSV to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_features(a: &FeaturesArgs) -> Result<()> {
    let diagram = read_diagram(&a.input)?;
    let recipe = a.features.recipe();
    let (values, attribution, _) = recipe.evaluate(&diagram);
    write_features_csv(&a.output, &values, &attribution)?;
    write_manifest(
        &a.output,
        "features",
        serde_json::to_value(&recipe)?,
        &[&a.input],
        &[&a.output],
    )?;
    println!("wrote {} ({} cells)", a.output.display(), values.len());
    Ok(())
}

// -------------------------------------------------------------------
// train
// -------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum Task {
    /// Binary classification with labels +1 / -1
    Svm,
    /// Regression within an insensitive tube
    Svr,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    task: Task,
    /// Training list: one `features_path,label` per line; relative paths
    /// resolve against the list file's directory
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// Insensitive tube half-width (svr only)
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Model JSON to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.data)
        .with_context(|| format!("reading {}", a.data.display()))?;
    let base = a.data.parent().unwrap_or(Path::new("."));
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (path_part, label_part) = line
            .rsplit_once(',')
            .with_context(|| format!("{}:{}: expected path,label", a.data.display(), lineno + 1))?;
        let label: f64 = label_part.trim().parse().with_context(|| {
            format!("{}:{}: bad label {label_part:?}", a.data.display(), lineno + 1)
        })?;
        let fpath = base.join(path_part.trim());
        let (values, _) = read_features_csv(&fpath)
            .with_context(|| format!("reading features {}", fpath.display()))?;
        xs.push(values);
        ys.push(label);
    }
    let outcome = match a.task {
        Task::Svm => train_svm(
            &xs,
            &ys,
            &SvmConfig {
                lambda: a.lambda,
                epochs: a.epochs,
                seed: a.seed,
            },
        )?,
        Task::Svr => train_svr(
            &xs,
            &ys,
            &SvrConfig {
                lambda: a.lambda,
                epochs: a.epochs,
                seed: a.seed,
                epsilon: a.epsilon,
            },
        )?,
    };
    write_model(&a.output, &outcome.model)?;
    write_manifest(
        &a.output,
        "train",
        json!({
            "task": match a.task { Task::Svm => "svm", Task::Svr => "svr" },
            "lambda": a.lambda,
            "epochs": a.epochs,
            "epsilon": a.epsilon,
            "seed": a.seed,
            "samples": xs.len(),
            "feature_dim": xs.first().map(Vec::len).unwrap_or(0),
        }),
        &[&a.data],
        &[&a.output],
    )?;
    let final_objective = outcome
        .objective_trace
        .last()
        .copied()
        .unwrap_or(f64::NAN);
    println!(
        "wrote {} ({} samples, final objective {})",
        a.output.display(),
        xs.len(),
        final_objective
    );
    Ok(())
}

// -------------------------------------------------------------------
// heatmap
// -------------------------------------------------------------------

#[derive(Args)]
struct HeatmapArgs {
    /// Filtration file to read
    #[arg(long)]
    input: PathBuf,
    /// Homology degree of the heat
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long, value_enum, default_value = "rep-cycle")]
    selector: SelectorArg,
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    options: HeatOptionArgs,
    /// Lift non-monotone weights instead of rejecting the file
    #[arg(long)]
    repair: bool,
    /// Heat CSV to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_heatmap(a: &HeatmapArgs) -> Result<()> {
    let (complex, mut weights) = read_filtration(&a.input)?;
    if a.repair {
        weights = monotone_repair(&complex, &weights);
    }
    let diagram = persistence_diagram(&complex, &weights)?;
    let recipe = a.weight.recipe()?;
    let f = resolve_weight_function(&recipe, a.degree, &diagram)?;
    let heat = heatmap(
        &diagram,
        a.degree,
        &f,
        a.selector.into(),
        complex.len(),
        &a.options.options(),
    )?;
    write_heat_csv(&a.output, heat.weights())?;
    write_manifest(
        &a.output,
        "heatmap",
        json!({
            "degree": a.degree,
            "selector": selector_name(a.selector),
            "weight": a.weight.describe(),
            "options": a.options.describe(),
            "repair": a.repair,
        }),
        &[&a.input],
        &[&a.output],
    )?;
    println!(
        "wrote {} (total mass {})",
        a.output.display(),
        heat.mass()
    );
    Ok(())
}

fn selector_name(s: SelectorArg) -> &'static str {
    match s {
        SelectorArg::BirthSimplex => "birth-simplex",
        SelectorArg::DeathSimplex => "death-simplex",
        SelectorArg::RepCycle => "rep-cycle",
        SelectorArg::BoundingChain => "bounding-chain",
    }
}

// -------------------------------------------------------------------
// expected-heatmap
// -------------------------------------------------------------------

#[derive(Args)]
struct ExpectedHeatmapArgs {
    /// Filtration file to read
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long, value_enum, default_value = "rep-cycle")]
    selector: SelectorArg,
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    options: HeatOptionArgs,
    #[arg(long, value_enum, default_value = "triangular")]
    kernel: KernelArg,
    /// Kernel bandwidth
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expected-heat JSON to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_expected_heatmap(a: &ExpectedHeatmapArgs) -> Result<()> {
    let (complex, weights) = read_filtration(&a.input)?;
    let kernel = KernelSpec::new(a.kernel.into(), a.alpha, weights.len())?;
    let recipe = a.weight.recipe()?;
    let opts = a.options.options();
    let degree = a.degree;
    let selector: ChainSelector = a.selector.into();
    if a.samples == 0 {
        bail!("--samples must be at least 1");
    }
    let est = expected_map(
        &weights,
        |x: &[f64]| -> Result<Vec<f64>, ExperimentError> {
            let repaired = monotone_repair(&complex, x);
            let diagram = persistence_diagram(&complex, &repaired)?;
            let f = resolve_weight_function(&recipe, degree, &diagram)?;
            let heat = heatmap(&diagram, degree, &f, selector, complex.len(), &opts)?;
            Ok(heat.into_vec())
        },
        &kernel,
        a.samples,
        a.seed,
    )?;
    let file = ExpectedHeatFile::new(&est, a.seed, Some(KernelDescriptor::of(&kernel)));
    write_expected(&a.output, &file)?;
    write_manifest(
        &a.output,
        "expected-heatmap",
        json!({
            "degree": a.degree,
            "selector": selector_name(a.selector),
            "weight": a.weight.describe(),
            "options": a.options.describe(),
            "kernel": {"family": a.kernel.name(), "alpha": a.alpha, "dim": weights.len()},
            "samples": a.samples,
            "seed": a.seed,
        }),
        &[&a.input],
        &[&a.output],
    )?;
    println!(
        "wrote {} ({} samples over {} simplices)",
        a.output.display(),
        a.samples,
        weights.len()
    );
    Ok(())
}

// -------------------------------------------------------------------
// experiment-ephm
// -------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentClass {
    /// One ring: radii 0.8..1.0 around the origin
    A,
    /// Two rings: radii 0.4..0.5 around (-0.5, 0) and (0.5, 0)
    B,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    class: ExperimentClass,
    /// Points per cloud
    #[arg(long = "n-points")]
    n_points: usize,
    /// Gaussian jitter on each sampled point
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Number of independent clouds
    #[arg(long)]
    clouds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long, value_enum, default_value = "rep-cycle")]
    selector: SelectorArg,
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    options: HeatOptionArgs,
    /// Raster grid as x0,x1,y0,y1,nx,ny
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,
    /// Expected-heat JSON to write
    #[arg(long)]
    output: PathBuf,
    /// Optional grayscale image of the mean
    #[arg(long = "mean-pgm")]
    mean_pgm: Option<PathBuf>,
    /// Optional diverging color image of the mean
    #[arg(long = "mean-ppm")]
    mean_ppm: Option<PathBuf>,
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<()> {
    let gen = match a.class {
        ExperimentClass::A => GeneratorSpec::class_a(a.n_points, a.sigma),
        ExperimentClass::B => GeneratorSpec::class_b(a.n_points, a.sigma),
    };
    let recipe = HeatRecipe {
        degree: a.degree,
        selector: a.selector.into(),
        weight: a.weight.recipe()?,
        options: a.options.options(),
    };
    let grid = a.grid.build()?;
    let est = experiment_expected_phm(&gen, a.clouds, a.seed, &recipe, &grid)?;
    let file = ExpectedHeatFile::new(&est, a.seed, None);
    write_expected(&a.output, &file)?;
    let mut outputs: Vec<&Path> = vec![&a.output];
    if let Some(p) = &a.mean_pgm {
        write_pgm(p, grid.nx(), grid.ny(), &est.mean)?;
        outputs.push(p);
    }
    if let Some(p) = &a.mean_ppm {
        write_ppm(p, grid.nx(), grid.ny(), &est.mean)?;
        outputs.push(p);
    }
    write_manifest(
        &a.output,
        "experiment-ephm",
        json!({
            "generator": serde_json::to_value(&gen)?,
            "clouds": a.clouds,
            "seed": a.seed,
            "degree": a.degree,
            "selector": selector_name(a.selector),
            "weight": a.weight.describe(),
            "options": a.options.describe(),
            "grid": a.grid.describe(),
        }),
        &[],
        &outputs,
    )?;
    println!(
        "wrote {} ({} clouds onto {}x{} grid)",
        a.output.display(),
        a.clouds,
        a.grid.nx,
        a.grid.ny
    );
    Ok(())
}

// -------------------------------------------------------------------
// raster
// -------------------------------------------------------------------

#[derive(Args)]
struct RasterArgs {
    /// Cloud CSV giving vertex coordinates
    #[arg(long)]
    cloud: PathBuf,
    /// Filtration file giving the simplices
    #[arg(long)]
    filtration: PathBuf,
    /// Heat CSV to spread
    #[arg(long)]
    heat: PathBuf,
    /// Raster grid as x0,x1,y0,y1,nx,ny
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,
    /// Raster CSV to write
    #[arg(long)]
    output: PathBuf,
    /// Optional grayscale image
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Optional diverging color image
    #[arg(long)]
    ppm: Option<PathBuf>,
}

fn cmd_raster(a: &RasterArgs) -> Result<()> {
    let cloud = read_cloud(&a.cloud)?;
    let (complex, _) = read_filtration(&a.filtration)?;
    let heat = read_heat_csv(&a.heat)?;
    if heat.len() != complex.len() {
        bail!(
            "heat file has {} entries but the filtration has {} simplices",
            heat.len(),
            complex.len()
        );
    }
    let grid = a.grid.build()?;
    let img = rasterize(&complex, &cloud, &heat, &grid)?;
    write_raster_csv(&a.output, grid.nx(), grid.ny(), &img)?;
    let mut outputs: Vec<&Path> = vec![&a.output];
    if let Some(p) = &a.pgm {
        write_pgm(p, grid.nx(), grid.ny(), &img)?;
        outputs.push(p);
    }
    if let Some(p) = &a.ppm {
        write_ppm(p, grid.nx(), grid.ny(), &img)?;
        outputs.push(p);
    }
    write_manifest(
        &a.output,
        "raster",
        json!({"grid": a.grid.describe()}),
        &[&a.cloud, &a.filtration, &a.heat],
        &outputs,
    )?;
    let total: f64 = img.iter().sum();
    println!("wrote {} (heat on grid {})", a.output.display(), total);
    Ok(())
}

// -------------------------------------------------------------------
// stability-probe
// -------------------------------------------------------------------

#[derive(Args)]
struct ProbeArgs {
    /// Filtration file to read
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long, value_enum, default_value = "rep-cycle")]
    selector: SelectorArg,
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    options: HeatOptionArgs,
    /// Simplex indices whose weights the probe varies, e.g. 3,4
    #[arg(long, value_parser = parse_indices)]
    active: Vec<usize>,
    /// Half-width of the probe box around the base weights
    #[arg(long, default_value_t = 0.25)]
    radius: f64,
    /// Probe points per active axis (tensor grid mode)
    #[arg(long = "per-axis", default_value_t = 5)]
    per_axis: usize,
    /// Use this many random point pairs instead of the tensor grid
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, value_enum, default_value = "triangular")]
    kernel: KernelArg,
    /// Kernel bandwidth over the active coordinates
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Monte-Carlo samples per probe evaluation
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probe report JSON to write
    #[arg(long)]
    output: PathBuf,
}

fn cmd_stability_probe(a: &ProbeArgs) -> Result<()> {
    let (complex, weights) = read_filtration(&a.input)?;
    let active: Vec<usize> = a
        .active
        .iter()
        .flat_map(|_| std::iter::empty())
        .collect::<Vec<usize>>();
    let _ = active;
    // clap collects repeated/comma lists as Vec<Vec<usize>> when the
    // parser returns Vec; flatten to one list.
    let active: Vec<usize> = a.active.clone();
    if active.is_empty() {
        bail!("--active requires at least one simplex index");
    }
    for &i in &active {
        if i >= weights.len() {
            bail!(
                "active index {i} out of range for {} simplices",
                weights.len()
            );
        }
    }
    if matches!(a.weight.weight, WeightKind::Learned) {
        bail!("the stability probe supports constant and persistence weights only");
    }
    let recipe = a.weight.recipe()?;
    let kernel = KernelSpec::new(a.kernel.into(), a.alpha, active.len())?;
    let opts = a.options.options();
    let degree = a.degree;
    let selector: ChainSelector = a.selector.into();
    let samples = a.samples;
    let seed = a.seed;

    let base: Vec<f64> = active.iter().map(|&i| weights[i]).collect();
    let active_for_target = active.clone();
    let complex_ref = &complex;
    let weights_ref = &weights;
    let recipe_ref = &recipe;
    let target = move |x_act: &[f64]| -> Result<Vec<f64>, ExperimentError> {
        let est = expected_map(
            x_act,
            |y_act: &[f64]| -> Result<Vec<f64>, ExperimentError> {
                let mut w = weights_ref.clone();
                for (k, &idx) in active_for_target.iter().enumerate() {
                    w[idx] = y_act[k];
                }
                let repaired = monotone_repair(complex_ref, &w);
                let diagram = persistence_diagram(complex_ref, &repaired)?;
                let f = resolve_weight_function(recipe_ref, degree, &diagram)?;
                let heat = heatmap(&diagram, degree, &f, selector, complex_ref.len(), &opts)?;
                Ok(heat.into_vec())
            },
            &kernel,
            samples,
            seed,
        )?;
        Ok(est.mean)
    };

    let probe_active: Vec<usize> = (0..base.len()).collect();
    let mode = match a.pairs {
        Some(n_pairs) => ProbeMode::RandomPairs {
            n_pairs,
            seed: a.seed,
        },
        None => ProbeMode::TensorGrid {
            per_axis: a.per_axis,
        },
    };
    let report = lipschitz_probe(target, &base, &probe_active, a.radius, &mode)?;

    let out = json!({
        "max_ratio": report.max_ratio,
        "sup_norm": report.sup_norm,
        "evaluations": report.evaluations,
        "component_lipschitz": kernel.component_lipschitz(),
        "expected_lipschitz_bound": kernel.expected_lipschitz_bound(report.sup_norm),
        "kernel": {"family": a.kernel.name(), "alpha": a.alpha, "dim": active.len()},
        "active": active,
        "radius": a.radius,
        "samples": a.samples,
        "seed": a.seed,
    });
    write_json(&a.output, &out)?;
    write_manifest(
        &a.output,
        "stability-probe",
        json!({
            "degree": a.degree,
            "selector": selector_name(a.selector),
            "weight": a.weight.describe(),
            "options": a.options.describe(),
            "active": out["active"],
            "radius": a.radius,
            "per_axis": a.per_axis,
            "pairs": a.pairs,
            "kernel": out["kernel"],
            "samples": a.samples,
            "seed": a.seed,
        }),
        &[&a.input],
        &[&a.output],
    )?;
    println!(
        "wrote {} (max ratio {}, bound {})",
        a.output.display(),
        report.max_ratio,
        kernel.expected_lipschitz_bound(report.sup_norm)
    );
    Ok(())
}

// -------------------------------------------------------------------

fn run(cli: Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Filtration(a) => cmd_filtration(a),
        Cmd::Persistence(a) => cmd_persistence(a),
        Cmd::Features(a) => cmd_features(a),
        Cmd::Train(a) => cmd_train(a),
        Cmd::Heatmap(a) => cmd_heatmap(a),
        Cmd::ExpectedHeatmap(a) => cmd_expected_heatmap(a),
        Cmd::ExperimentEphm(a) => cmd_experiment(a),
        Cmd::Raster(a) => cmd_raster(a),
        Cmd::StabilityProbe(a) => cmd_stability_probe(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // A later duplicate initialization (e.g. in tests) is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

// Silence unused-import warnings for items used only in some builds.
#[allow(unused_imports)]
use phm_core::LinearModel as _UnusedLinearModel;
#[allow(unused_imports)]
use phm_core::WeightFunction as _UnusedWeightFunction;
#[allow(unused_imports)]
fn _unused(_: fn(&LinearModel<f64>, &[f64], &[Option<usize>], usize, bool)) {
    let _ = model_to_f::<f64>;
}
