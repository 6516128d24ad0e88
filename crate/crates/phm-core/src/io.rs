//! File formats for every artifact the library produces.
//!
//! Text formats use Rust's shortest round-tripping float display, so a
//! write/read cycle reproduces f64 values exactly.
//!
//! - filtration: one simplex per line, `v0 v1 ... ; weight`, faces listed
//!   before cofaces; `#` starts a comment.
//! - cloud: CSV `x,y` per point.
//! - diagram: JSON; essential deaths appear as the string "inf".
//! - features: CSV `value,attribution` with -1 for unattributed cells.
//! - heat: CSV `simplex,heat` in simplex order.
//! - raster: CSV `row,col,heat`, row-major from the bottom row up.
//! - images: PGM (P2, min-max grayscale) and PPM (P3, blue/white/orange
//!   diverging, symmetric about zero).
//! - model / expected heat: JSON.

use crate::complex::{build_complex, ComplexError, SimplicialComplex};
use crate::kernel::{ExpectedVector, KernelSpec};
use crate::reduction::{AnnotatedDiagram, AnnotatedPoint, Z2Chain};
use crate::scalar::Real;
use crate::svm::LinearModel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn invalid(path: &Path, msg: impl Into<String>) -> IoError {
    IoError::Invalid {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

/// Data lines of a text file with comments and blanks removed, keeping
/// original 1-based line numbers.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>, IoError> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.to_string()))
        .collect())
}

// ---------------------------------------------------------------------
// Filtration text format
// ---------------------------------------------------------------------

pub fn write_filtration(
    path: impl AsRef<Path>,
    complex: &SimplicialComplex,
    weights: &[f64],
) -> Result<(), IoError> {
    let mut out = String::new();
    out.push_str("# vertex ids ; weight\n");
    for (i, w) in weights.iter().enumerate() {
        let verts = complex.simplex(i).vertices();
        let ids: Vec<String> = verts.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{} ; {}", ids.join(" "), w).expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_filtration(
    path: impl AsRef<Path>,
) -> Result<(SimplicialComplex, Vec<f64>), IoError> {
    let path = path.as_ref();
    let mut simplices = Vec::new();
    let mut weights = Vec::new();
    for (lineno, line) in data_lines(path)? {
        let mut parts = line.splitn(2, ';');
        let verts_part = parts.next().unwrap_or("");
        let weight_part = parts
            .next()
            .ok_or_else(|| parse_err(path, lineno, "missing ';' separator"))?;
        let verts: Vec<usize> = verts_part
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(path, lineno, format!("bad vertex id {t:?}")))
            })
            .collect::<Result<_, _>>()?;
        if verts.is_empty() {
            return Err(parse_err(path, lineno, "empty simplex"));
        }
        let w: f64 = weight_part
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad weight {weight_part:?}")))?;
        simplices.push(verts);
        weights.push(w);
    }
    let complex = build_complex(simplices)?;
    Ok((complex, weights))
}

// ---------------------------------------------------------------------
// Point cloud CSV
// ---------------------------------------------------------------------

pub fn write_cloud(path: impl AsRef<Path>, points: &[[f64; 2]]) -> Result<(), IoError> {
    let mut out = String::new();
    for p in points {
        writeln!(out, "{},{}", p[0], p[1]).expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<Vec<[f64; 2]>, IoError> {
    let path = path.as_ref();
    let mut points = Vec::new();
    for (lineno, line) in data_lines(path)? {
        let mut it = line.split(',');
        let x = it
            .next()
            .and_then(|t| t.trim().parse::<f64>().ok())
            .ok_or_else(|| parse_err(path, lineno, "bad x coordinate"))?;
        let y = it
            .next()
            .and_then(|t| t.trim().parse::<f64>().ok())
            .ok_or_else(|| parse_err(path, lineno, "bad y coordinate"))?;
        if it.next().is_some() {
            return Err(parse_err(path, lineno, "expected exactly two columns"));
        }
        points.push([x, y]);
    }
    Ok(points)
}

// ---------------------------------------------------------------------
// Diagram JSON
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DeathField {
    Finite(f64),
    Marker(String),
}

#[derive(Serialize, Deserialize)]
struct PointFile {
    birth: f64,
    death: DeathField,
    degree: usize,
    birth_simplex: usize,
    death_simplex: Option<usize>,
    rep_cycle: Vec<usize>,
    bounding_chain: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct DiagramFile {
    max_weight: f64,
    points: Vec<PointFile>,
}

pub fn write_diagram(
    path: impl AsRef<Path>,
    diagram: &AnnotatedDiagram<f64>,
) -> Result<(), IoError> {
    let file = DiagramFile {
        max_weight: diagram.max_weight(),
        points: diagram
            .points()
            .iter()
            .map(|p| PointFile {
                birth: p.birth,
                death: if p.is_essential() {
                    DeathField::Marker("inf".to_string())
                } else {
                    DeathField::Finite(p.death)
                },
                degree: p.degree,
                birth_simplex: p.birth_simplex,
                death_simplex: p.death_simplex,
                rep_cycle: p.rep_cycle.simplices().to_vec(),
                bounding_chain: p.bounding_chain.as_ref().map(|c| c.simplices().to_vec()),
            })
            .collect(),
    };
    write_json(path, &file)
}

pub fn read_diagram(path: impl AsRef<Path>) -> Result<AnnotatedDiagram<f64>, IoError> {
    let path = path.as_ref();
    let file: DiagramFile = read_json(path)?;
    let mut points = Vec::with_capacity(file.points.len());
    for (i, p) in file.points.into_iter().enumerate() {
        let death = match p.death {
            DeathField::Finite(d) if d.is_finite() => d,
            DeathField::Finite(_) => {
                return Err(invalid(path, format!("point {i}: non-finite death number")))
            }
            DeathField::Marker(s) if s == "inf" => f64::INFINITY,
            DeathField::Marker(s) => {
                return Err(invalid(path, format!("point {i}: unknown death marker {s:?}")))
            }
        };
        let essential = death == f64::INFINITY;
        if essential != p.death_simplex.is_none() || essential != p.bounding_chain.is_none() {
            return Err(invalid(
                path,
                format!("point {i}: death, death_simplex, and bounding_chain disagree"),
            ));
        }
        points.push(AnnotatedPoint {
            birth: p.birth,
            death,
            degree: p.degree,
            birth_simplex: p.birth_simplex,
            death_simplex: p.death_simplex,
            rep_cycle: Z2Chain::new(p.rep_cycle, p.degree),
            bounding_chain: p.bounding_chain.map(|c| Z2Chain::new(c, p.degree + 1)),
        });
    }
    let mut diagram = AnnotatedDiagram::from_points(points);
    diagram.set_max_weight(file.max_weight);
    Ok(diagram)
}

// ---------------------------------------------------------------------
// Feature / heat / raster CSV
// ---------------------------------------------------------------------

pub fn write_features_csv(
    path: impl AsRef<Path>,
    values: &[f64],
    attribution: &[Option<usize>],
) -> Result<(), IoError> {
    assert_eq!(values.len(), attribution.len(), "feature vector shape");
    let mut out = String::new();
    for (v, a) in values.iter().zip(attribution) {
        match a {
            Some(j) => writeln!(out, "{},{}", v, j),
            None => writeln!(out, "{},-1", v),
        }
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_features_csv(
    path: impl AsRef<Path>,
) -> Result<(Vec<f64>, Vec<Option<usize>>), IoError> {
    let path = path.as_ref();
    let mut values = Vec::new();
    let mut attribution = Vec::new();
    for (lineno, line) in data_lines(path)? {
        let mut it = line.split(',');
        let v = it
            .next()
            .and_then(|t| t.trim().parse::<f64>().ok())
            .ok_or_else(|| parse_err(path, lineno, "bad value"))?;
        let a = it
            .next()
            .and_then(|t| t.trim().parse::<i64>().ok())
            .ok_or_else(|| parse_err(path, lineno, "bad attribution"))?;
        if it.next().is_some() {
            return Err(parse_err(path, lineno, "expected exactly two columns"));
        }
        values.push(v);
        attribution.push(if a < 0 { None } else { Some(a as usize) });
    }
    Ok((values, attribution))
}

pub fn write_heat_csv(path: impl AsRef<Path>, heat: &[f64]) -> Result<(), IoError> {
    let mut out = String::new();
    for (i, h) in heat.iter().enumerate() {
        writeln!(out, "{},{}", i, h).expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_heat_csv(path: impl AsRef<Path>) -> Result<Vec<f64>, IoError> {
    let path = path.as_ref();
    let mut entries = Vec::new();
    for (lineno, line) in data_lines(path)? {
        let mut it = line.split(',');
        let i = it
            .next()
            .and_then(|t| t.trim().parse::<usize>().ok())
            .ok_or_else(|| parse_err(path, lineno, "bad simplex index"))?;
        let h = it
            .next()
            .and_then(|t| t.trim().parse::<f64>().ok())
            .ok_or_else(|| parse_err(path, lineno, "bad heat value"))?;
        entries.push((i, h, lineno));
    }
    let mut heat = vec![f64::NAN; entries.len()];
    for (i, h, lineno) in entries {
        if i >= heat.len() || !heat[i].is_nan() {
            return Err(parse_err(
                path,
                lineno,
                "simplex indices must cover 0..n exactly once",
            ));
        }
        heat[i] = h;
    }
    Ok(heat)
}

/// `row,col,heat` lines; row iy (0 = bottom), column ix (0 = left), in
/// row-major order. `values` is indexed iy * nx + ix.
pub fn write_raster_csv(
    path: impl AsRef<Path>,
    nx: usize,
    ny: usize,
    values: &[f64],
) -> Result<(), IoError> {
    let path_ref = path.as_ref();
    if values.len() != nx * ny {
        return Err(invalid(
            path_ref,
            format!("raster has {} cells, expected {nx} x {ny}", values.len()),
        ));
    }
    let mut out = String::new();
    for iy in 0..ny {
        for ix in 0..nx {
            writeln!(out, "{},{},{}", iy, ix, values[iy * nx + ix]).expect("string write");
        }
    }
    fs::write(path_ref, out)?;
    Ok(())
}

pub fn read_raster_csv(
    path: impl AsRef<Path>,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, IoError> {
    let path = path.as_ref();
    let mut values = vec![f64::NAN; nx * ny];
    let mut seen = 0usize;
    for (lineno, line) in data_lines(path)? {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(parse_err(path, lineno, "expected row,col,heat"));
        }
        let iy: usize = cols[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad row"))?;
        let ix: usize = cols[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad col"))?;
        let h: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad heat"))?;
        if iy >= ny || ix >= nx {
            return Err(parse_err(path, lineno, "cell out of range"));
        }
        values[iy * nx + ix] = h;
        seen += 1;
    }
    if seen != nx * ny || values.iter().any(|v| v.is_nan()) {
        return Err(invalid(path, "raster file does not cover the grid exactly"));
    }
    Ok(values)
}

// ---------------------------------------------------------------------
// Images
// ---------------------------------------------------------------------

/// Grayscale PGM (P2). Values are min-max normalized to 0..255; a
/// constant image maps to all zeros. Rows are written top-down, so row
/// iy = ny - 1 comes first.
pub fn write_pgm(
    path: impl AsRef<Path>,
    nx: usize,
    ny: usize,
    values: &[f64],
) -> Result<(), IoError> {
    let path_ref = path.as_ref();
    if values.len() != nx * ny {
        return Err(invalid(
            path_ref,
            format!("raster has {} cells, expected {nx} x {ny}", values.len()),
        ));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    let mut out = format!("P2\n{nx} {ny}\n255\n");
    for iy in (0..ny).rev() {
        let row: Vec<String> = (0..nx)
            .map(|ix| {
                let v = values[iy * nx + ix];
                let g = if span > 0.0 {
                    ((v - lo) / span * 255.0).round() as u32
                } else {
                    0
                };
                g.min(255).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path_ref, out)?;
    Ok(())
}

const DIVERGING_BLUE: [f64; 3] = [38.0, 98.0, 214.0];
const DIVERGING_ORANGE: [f64; 3] = [236.0, 120.0, 22.0];

/// Color PPM (P3) with a diverging map symmetric about zero: negative
/// values blend white toward blue, positive toward orange, and the
/// extreme is the largest absolute value present. An all-zero image is
/// white.
pub fn write_ppm(
    path: impl AsRef<Path>,
    nx: usize,
    ny: usize,
    values: &[f64],
) -> Result<(), IoError> {
    let path_ref = path.as_ref();
    if values.len() != nx * ny {
        return Err(invalid(
            path_ref,
            format!("raster has {} cells, expected {nx} x {ny}", values.len()),
        ));
    }
    let scale = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut out = format!("P3\n{nx} {ny}\n255\n");
    for iy in (0..ny).rev() {
        let mut row: Vec<String> = Vec::with_capacity(nx * 3);
        for ix in 0..nx {
            let v = values[iy * nx + ix];
            let t = if scale > 0.0 { v / scale } else { 0.0 };
            let target = if t >= 0.0 {
                DIVERGING_ORANGE
            } else {
                DIVERGING_BLUE
            };
            let a = t.abs().min(1.0);
            for c in target {
                let channel = (255.0 + a * (c - 255.0)).round() as u32;
                row.push(channel.min(255).to_string());
            }
        }
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path_ref, out)?;
    Ok(())
}

// ---------------------------------------------------------------------
// JSON artifacts
// ---------------------------------------------------------------------

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, IoError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_model(path: impl AsRef<Path>, model: &LinearModel<f64>) -> Result<(), IoError> {
    write_json(path, model)
}

pub fn read_model(path: impl AsRef<Path>) -> Result<LinearModel<f64>, IoError> {
    read_json(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDescriptor {
    pub family: String,
    pub alpha: f64,
    pub dim: usize,
}

impl KernelDescriptor {
    pub fn of<T: Real>(spec: &KernelSpec<T>) -> Self {
        Self {
            family: spec.family().name().to_string(),
            alpha: spec.alpha().as_f64(),
            dim: spec.dim(),
        }
    }
}

/// Serialized Monte-Carlo estimate; `kernel` is null when the randomness
/// came from resampling clouds rather than kernel perturbations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedHeatFile {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub kernel: Option<KernelDescriptor>,
}

impl ExpectedHeatFile {
    pub fn new(est: &ExpectedVector<f64>, seed: u64, kernel: Option<KernelDescriptor>) -> Self {
        Self {
            mean: est.mean.clone(),
            stderr: est.stderr.clone(),
            n_samples: est.n_samples,
            seed,
            kernel,
        }
    }
}

pub fn write_expected(path: impl AsRef<Path>, file: &ExpectedHeatFile) -> Result<(), IoError> {
    write_json(path, file)
}

pub fn read_expected(path: impl AsRef<Path>) -> Result<ExpectedHeatFile, IoError> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::persistence_diagram;
    use crate::testutil::{two_triangle_complex, two_triangle_weights};
    use tempfile::tempdir;

    #[test]
    fn filtration_round_trips_exactly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("filtration.txt");
        let complex = two_triangle_complex();
        // Weights with non-terminating binary expansions stress the
        // shortest round-trip display.
        let weights: Vec<f64> = (0..complex.len())
            .map(|i| 0.1 + 0.2 * i as f64)
            .collect();
        write_filtration(&path, &complex, &weights).unwrap();
        let (back_complex, back_weights) = read_filtration(&path).unwrap();
        assert_eq!(back_weights, weights);
        assert_eq!(back_complex.len(), complex.len());
        for i in 0..complex.len() {
            assert_eq!(back_complex.simplex(i), complex.simplex(i));
        }
    }

    #[test]
    fn filtration_reader_reports_malformed_lines() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "0 ; 0\n1 1.5\n").unwrap();
        let err = read_filtration(&path).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }), "{err}");

        std::fs::write(&path, "0 ; 0\nx ; 1\n").unwrap();
        assert!(matches!(
            read_filtration(&path).unwrap_err(),
            IoError::Parse { line: 2, .. }
        ));

        // Face ordering violations surface as complex construction errors.
        std::fs::write(&path, "0 1 ; 1\n").unwrap();
        assert!(matches!(
            read_filtration(&path).unwrap_err(),
            IoError::Complex(_)
        ));
    }

    #[test]
    fn cloud_round_trips_and_skips_comments() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("cloud.csv");
        let pts = vec![[0.1, -2.5], [1e-9, 3.25], [-0.30000000000000004, 7.0]];
        write_cloud(&path, &pts).unwrap();
        assert_eq!(read_cloud(&path).unwrap(), pts);

        std::fs::write(&path, "# cloud\n1.5, 2.5\n\n-3,4\n").unwrap();
        assert_eq!(read_cloud(&path).unwrap(), vec![[1.5, 2.5], [-3.0, 4.0]]);
    }

    #[test]
    fn diagram_round_trips_with_essential_markers() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("diagram.json");
        let complex = two_triangle_complex();
        let diagram = persistence_diagram(&complex, &two_triangle_weights()).unwrap();
        write_diagram(&path, &diagram).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"inf\""), "essential death marker present");
        let back = read_diagram(&path).unwrap();
        assert_eq!(back, diagram);
    }

    #[test]
    fn diagram_reader_rejects_inconsistent_points() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("diagram.json");
        let json = r#"{
            "max_weight": 1.0,
            "points": [{
                "birth": 0.0, "death": "inf", "degree": 0,
                "birth_simplex": 0, "death_simplex": 2,
                "rep_cycle": [0], "bounding_chain": null
            }]
        }"#;
        std::fs::write(&path, json).unwrap();
        assert!(matches!(
            read_diagram(&path).unwrap_err(),
            IoError::Invalid { .. }
        ));
    }

    #[test]
    fn features_round_trip_with_missing_attribution() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let values = vec![0.5, 0.0, 1.25];
        let attribution = vec![Some(2), None, Some(0)];
        write_features_csv(&path, &values, &attribution).unwrap();
        let (v, a) = read_features_csv(&path).unwrap();
        assert_eq!(v, values);
        assert_eq!(a, attribution);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains(",-1"), "missing attribution encoded as -1");
    }

    #[test]
    fn heat_round_trips_and_validates_indices() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("heat.csv");
        let heat = vec![0.0, 1.5, 0.75];
        write_heat_csv(&path, &heat).unwrap();
        assert_eq!(read_heat_csv(&path).unwrap(), heat);

        std::fs::write(&path, "0,1.0\n0,2.0\n").unwrap();
        assert!(read_heat_csv(&path).is_err());
    }

    #[test]
    fn raster_csv_layout_is_row_col_heat() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("raster.csv");
        // nx = 3, ny = 2; cell (ix, iy) holds iy * 3 + ix.
        let values: Vec<f64> = (0..6).map(|i| i as f64).collect();
        write_raster_csv(&path, 3, 2, &values).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "0,0,0\n0,1,1\n0,2,2\n1,0,3\n1,1,4\n1,2,5\n");
        assert_eq!(read_raster_csv(&path, 3, 2).unwrap(), values);
    }

    #[test]
    fn pgm_normalizes_min_to_max_and_flips_rows() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        // 2x2: bottom row (0, 1), top row (2, 3).
        write_pgm(&path, 2, 2, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "P2\n2 2\n255\n170 255\n0 85\n");

        write_pgm(&path, 2, 1, &[4.0, 4.0]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "P2\n2 1\n255\n0 0\n");
    }

    #[test]
    fn ppm_diverges_blue_white_orange() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("img.ppm");
        // One row: strongest negative, zero, strongest positive.
        write_ppm(&path, 3, 1, &[-2.0, 0.0, 2.0]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "P3\n3 1\n255\n38 98 214 255 255 255 236 120 22\n"
        );
        // Half-intensity positive blends halfway to orange.
        write_ppm(&path, 2, 1, &[1.0, 2.0]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let halfway = [
            (255.0 + 0.5 * (236.0 - 255.0_f64)).round() as u32,
            (255.0 + 0.5 * (120.0 - 255.0_f64)).round() as u32,
            (255.0 + 0.5 * (22.0 - 255.0_f64)).round() as u32,
        ];
        assert_eq!(
            text,
            format!(
                "P3\n2 1\n255\n{} {} {} 236 120 22\n",
                halfway[0], halfway[1], halfway[2]
            )
        );
    }

    #[test]
    fn model_and_expected_round_trip() {
        let dir = tempdir().unwrap();
        let model_path = dir.path().join("model.json");
        let model = LinearModel {
            f: vec![0.1, -0.30000000000000004, 2.5e-17],
            b: 1.75,
            lambda: 1e-3,
            epochs: 200,
            seed: 42,
        };
        write_model(&model_path, &model).unwrap();
        assert_eq!(read_model(&model_path).unwrap(), model);

        let exp_path = dir.path().join("expected.json");
        let est = ExpectedVector {
            mean: vec![1.0, 0.5],
            stderr: vec![0.01, 0.02],
            n_samples: 64,
        };
        let spec = KernelSpec::new(crate::kernel::KernelFamily::Gaussian, 0.25, 7).unwrap();
        let file = ExpectedHeatFile::new(&est, 9, Some(KernelDescriptor::of(&spec)));
        write_expected(&exp_path, &file).unwrap();
        let back = read_expected(&exp_path).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.kernel.as_ref().unwrap().family, "gaussian");

        let file = ExpectedHeatFile::new(&est, 9, None);
        write_expected(&exp_path, &file).unwrap();
        assert_eq!(read_expected(&exp_path).unwrap().kernel, None);
    }
}
