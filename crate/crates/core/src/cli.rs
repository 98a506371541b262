//! The `ni` command-line front end.
//!
//! Configuration is a flat TOML file; the shape keys sit at the top level:
//!
//! ```toml
//! kind = "ellipse"
//! a = 1.25
//! b = 0.75
//! mode = "calibrated"
//! nodes = 512
//! truncation = 128
//! grid = [-4.0, 4.0, -4.0, 4.0]
//! grid_resolution = 81
//! out = "out"
//! ```
//!
//! Command-line flags override the file.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bem::{self, beta_at_nodes, BoundaryMesh, DensitySolution, Grading, ImperfectSystem, PerfectSystem};
use crate::conformal::{Admissibility, ConformalMap, ShapeSpec};
use crate::disk_spectral::{self, GammaModes};
use crate::error::Error;
use crate::interface::{beta_csv, InterfaceParameter, ParameterRecord, Provenance, DEFAULT_TRUNCATION};
use crate::tensor::{PolarizationTensor, Solver};
use crate::verify::decay::{farfield_decay, DecayFit};
use crate::verify::gap::DEFAULT_RADII;
use crate::verify::geometry::{best_fit_residual, curve_samples, GeometryResidual, SurfaceSpec};
use crate::verify::suite::{run_suite, SuiteConfig};
use crate::B_MAX;

/// Grid cells closer than this to a corner are masked.
pub const CORNER_SECTOR_RADIUS: f64 = 0.25;

/// Boundary samples used by `check-geometry` for curves.
pub const CURVE_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[value(name = "closed_form")]
    ClosedForm,
    Calibrated,
    /// Perfect bonding only.
    Perfect,
    /// `beta` equal to `beta0` everywhere.
    Constant,
}

fn default_mode() -> Mode {
    Mode::Calibrated
}
fn default_beta0() -> f64 {
    1.0
}
fn default_direction() -> [f64; 2] {
    [1.0, 0.0]
}
fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}
fn default_nodes() -> usize {
    512
}
fn default_grid() -> [f64; 4] {
    [-4.0, 4.0, -4.0, 4.0]
}
fn default_resolution() -> usize {
    81
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub shape: ShapeSpec,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_beta0")]
    pub beta0: f64,
    /// Field direction used for the decay report of `compare`.
    #[serde(default = "default_direction")]
    pub direction: [f64; 2],
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// `[xmin, xmax, ymin, ymax]`.
    #[serde(default = "default_grid")]
    pub grid: [f64; 4],
    #[serde(default = "default_resolution")]
    pub grid_resolution: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            shape: ShapeSpec::Ellipse { a: 1.25, b: 0.75 },
            mode: default_mode(),
            beta0: default_beta0(),
            direction: default_direction(),
            truncation: default_truncation(),
            nodes: default_nodes(),
            grid: default_grid(),
            grid_resolution: default_resolution(),
            out: default_out(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> crate::Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Checks shared by the solving commands.
    pub fn validate(&self) -> crate::Result<()> {
        if self.truncation < 64 {
            return Err(Error::InvalidArgument(format!("truncation N must be at least 64, got {}", self.truncation)));
        }
        if self.nodes < 128 {
            return Err(Error::InvalidArgument(format!("node count n must be at least 128, got {}", self.nodes)));
        }
        let [x0, x1, y0, y1] = self.grid;
        if !(x1 > x0 && y1 > y0) || self.grid_resolution < 2 {
            return Err(Error::InvalidArgument("grid window must be non-empty with resolution of at least 2".into()));
        }
        if !(self.beta0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("beta0 must be non-negative, got {}", self.beta0)));
        }
        Ok(())
    }
}

/// `ellipse:a,b`, `droplet`, `disk` or `laurent:FILE` (a shape file).
pub fn parse_shape(s: &str) -> anyhow::Result<ShapeSpec> {
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (s, None),
    };
    match (kind, rest) {
        ("disk" | "circle", None) => Ok(ShapeSpec::Disk),
        ("droplet", None) => Ok(ShapeSpec::Droplet),
        ("ellipse", Some(r)) => {
            let v: Vec<f64> = r
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("bad ellipse axes '{r}'"))?;
            match v[..] {
                [a, b] => Ok(ShapeSpec::Ellipse { a, b }),
                _ => bail!("ellipse needs two axes, e.g. ellipse:1.25,0.75"),
            }
        }
        ("laurent", Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading shape file {path}"))?;
            Ok(ShapeSpec::from_toml(&text)?)
        }
        _ => bail!("unknown shape '{s}' (expected ellipse:a,b | droplet | disk | laurent:FILE)"),
    }
}

/// `xmin,xmax,ymin,ymax,res`.
pub fn parse_grid(s: &str) -> anyhow::Result<([f64; 4], usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        bail!("grid must be xmin,xmax,ymin,ymax,res");
    }
    let mut w = [0.0; 4];
    for (slot, p) in w.iter_mut().zip(&parts) {
        *slot = p.parse().with_context(|| format!("bad grid bound '{p}'"))?;
    }
    let res = parts[4].parse().with_context(|| format!("bad grid resolution '{}'", parts[4]))?;
    Ok((w, res))
}

#[derive(Debug, Parser)]
#[command(name = "ni", version, about = "Weakly neutral inclusions with imperfect interfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the interface parameter and write beta samples.
    Design(RunArgs),
    /// Polarization tensors from both solvers.
    Pt(RunArgs),
    /// Field grids and far-field decay, perfect against imperfect interface.
    Compare(RunArgs),
    /// Ellipse/ellipsoid residual of a curve or surface.
    CheckGeometry(GeometryArgs),
    /// Run the verification suite; exits nonzero on a failed check.
    Verify(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// ellipse:a,b | droplet | disk | laurent:FILE
    #[arg(long)]
    pub shape: Option<String>,
    /// Interface design
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Constant beta for `--mode constant`
    #[arg(long)]
    pub beta0: Option<f64>,
    /// Boundary nodes.
    #[arg(long = "n")]
    pub nodes: Option<usize>,
    /// Spectral truncation.
    #[arg(long = "N")]
    pub truncation: Option<usize>,
    /// xmin,xmax,ymin,ymax,res
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

impl RunArgs {
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                RunConfig::from_toml(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(s) = &self.shape {
            cfg.shape = parse_shape(s)?;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(b) = self.beta0 {
            cfg.beta0 = b;
        }
        if let Some(n) = self.nodes {
            cfg.nodes = n;
        }
        if let Some(n) = self.truncation {
            cfg.truncation = n;
        }
        if let Some(g) = &self.grid {
            let (w, res) = parse_grid(g)?;
            cfg.grid = w;
            cfg.grid_resolution = res;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GeometryArgs {
    /// ellipse:a,b | droplet | disk | laurent:FILE
    #[arg(long)]
    pub shape: Option<String>,
    /// Surface file (`kind = "ellipsoid" | "superellipsoid"`).
    #[arg(long)]
    pub surface: Option<PathBuf>,
    /// TOML run configuration (its shape is used)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// The interface design selected by `mode`; `None` for perfect bonding and constant `beta`.
fn design(map: &ConformalMap, cfg: &RunConfig) -> anyhow::Result<Option<InterfaceParameter>> {
    match cfg.mode {
        Mode::ClosedForm => match InterfaceParameter::closed_form(map) {
            Ok(p) => Ok(Some(p)),
            Err(Error::Inadmissible(b)) => Err(anyhow!(
                "closed-form parameter is negative somewhere for |b| = {b:.6} > 2 - sqrt(3) = {B_MAX:.6}; \
                 try --mode calibrated"
            )),
            Err(e) => Err(e.into()),
        },
        Mode::Calibrated => Ok(Some(InterfaceParameter::calibrated(map, cfg.truncation)?)),
        Mode::Perfect | Mode::Constant => Ok(None),
    }
}

fn node_beta(mesh: &BoundaryMesh, param: Option<&InterfaceParameter>, cfg: &RunConfig) -> anyhow::Result<Vec<f64>> {
    match (cfg.mode, param) {
        (Mode::Constant, _) => Ok(vec![cfg.beta0; mesh.len()]),
        (_, Some(p)) => Ok(beta_at_nodes(mesh, p)?),
        _ => bail!("mode {:?} has no interface parameter", cfg.mode),
    }
}

#[derive(Debug, Serialize)]
pub struct DesignReport {
    pub shape: String,
    pub mode: Mode,
    pub admissibility: Admissibility,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<ParameterRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    /// Minimum of `gamma` on the circle.
    pub min_gamma: f64,
    pub samples: usize,
}

pub fn cmd_design(cfg: &RunConfig) -> anyhow::Result<String> {
    cfg.validate()?;
    let map = cfg.shape.build()?;
    let adm = map.admissibility();
    let mut lines = vec![
        format!("shape: {}", map.label()),
        format!("b = {:.6} + {:.6}i, |b| = {:.6}, phase = {:.6}", adm.b_re, adm.b_im, adm.b_abs, adm.phase),
        format!(
            "closed form admissible: {} (|b| <= {B_MAX:.6})",
            if adm.closed_form_ok { "yes" } else { "no" }
        ),
    ];
    let samples = cfg.nodes;
    let (report, csv) = match cfg.mode {
        Mode::Perfect => bail!("design needs an interface mode (closed_form, calibrated or constant)"),
        Mode::Constant => {
            let rows: Vec<(f64, f64)> =
                (0..samples).map(|q| (2.0 * PI * q as f64 / samples as f64, cfg.beta0)).collect();
            let report = DesignReport {
                shape: map.label().to_string(),
                mode: cfg.mode,
                admissibility: adm,
                parameter: None,
                beta0: Some(cfg.beta0),
                min_gamma: f64::NAN,
                samples,
            };
            (report, beta_csv(&rows))
        }
        Mode::ClosedForm | Mode::Calibrated => {
            let p = design(&map, cfg)?.expect("interface mode");
            lines.push(format!("gamma0 = {:.15}, gamma2 = {:.15}", p.gamma0, p.gamma2));
            let report = DesignReport {
                shape: map.label().to_string(),
                mode: cfg.mode,
                admissibility: adm,
                parameter: Some(p.record()),
                beta0: None,
                min_gamma: p.min_gamma(),
                samples,
            };
            (report, beta_csv(&p.beta_samples(samples)))
        }
    };
    let a = write_json(&cfg.out, "parameters.json", &report)?;
    let b = write_text(&cfg.out, "beta.csv", &csv)?;
    lines.push(format!("wrote {} and {}", a.display(), b.display()));
    Ok(lines.join("\n"))
}

#[derive(Debug, Serialize)]
pub struct PtReport {
    pub shape: String,
    pub mode: Mode,
    pub nodes: usize,
    pub truncation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<ParameterRecord>,
    /// Tensor of the pulled-back problem on the unit disk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_disk: Option<PolarizationTensor>,
    /// Shape tensor from the disk tensor, `T_disk - 2 pi [[b', b''], [b'', -b']]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<PolarizationTensor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bem: Option<PolarizationTensor>,
    /// `||T_bem - T_spectral||`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
    pub perfect: PolarizationTensor,
    /// `||T_bem|| / ||T_perfect||`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

/// Shape tensor implied by the disk tensor of the pulled-back problem.
pub fn shape_tensor_from_disk(disk: &PolarizationTensor, b: Complex64) -> PolarizationTensor {
    let c = 2.0 * PI;
    let t = disk.t;
    PolarizationTensor::new(
        [[t[0][0] - c * b.re, t[0][1] - c * b.im], [t[1][0] - c * b.im, t[1][1] + c * b.re]],
        Solver::Spectral,
        disk.resolution,
    )
}

pub fn cmd_pt(cfg: &RunConfig) -> anyhow::Result<String> {
    cfg.validate()?;
    let map = cfg.shape.build()?;
    let mesh = BoundaryMesh::discretize(&map, cfg.nodes, Grading::for_map(&map))?;
    let perfect = PerfectSystem::assemble(&mesh)?.polarization()?;
    let param = design(&map, cfg)?;
    let gamma: Option<GammaModes> = match (cfg.mode, &param) {
        (_, Some(p)) => Some(p.gamma_modes()),
        (Mode::Constant, None) if map.tail().iter().all(|c| c.norm() == 0.0) => Some(GammaModes::constant(cfg.beta0)),
        _ => None,
    };
    let spectral_disk = gamma.map(|g| disk_spectral::polarization(&g, cfg.truncation)).transpose()?;
    let spectral = spectral_disk.as_ref().map(|t| shape_tensor_from_disk(t, map.b_omega()));
    let bem = match cfg.mode {
        Mode::Perfect => None,
        _ => Some(ImperfectSystem::assemble(&mesh, &node_beta(&mesh, param.as_ref(), cfg)?)?.polarization()?),
    };
    let difference = match (&bem, &spectral) {
        (Some(b), Some(s)) => Some(b.distance(&s.t)),
        _ => None,
    };
    let ratio = bem.as_ref().map(|b| b.norm() / perfect.norm());
    let report = PtReport {
        shape: map.label().to_string(),
        mode: cfg.mode,
        nodes: cfg.nodes,
        truncation: cfg.truncation,
        parameter: param.as_ref().map(InterfaceParameter::record),
        spectral_disk,
        spectral,
        bem,
        difference,
        perfect,
        ratio,
    };
    let mut lines = vec![format!("shape: {}", report.shape)];
    let fmt = |t: &PolarizationTensor| format!("[[{:.12e}, {:.12e}], [{:.12e}, {:.12e}]]", t.t[0][0], t.t[0][1], t.t[1][0], t.t[1][1]);
    if let Some(t) = &report.spectral_disk {
        lines.push(format!("T disk (spectral)  = {}", fmt(t)));
    }
    if let Some(t) = &report.spectral {
        lines.push(format!("T shape (spectral) = {}", fmt(t)));
    }
    if let Some(t) = &report.bem {
        lines.push(format!("T shape (bem)      = {}", fmt(t)));
    }
    lines.push(format!("T perfect (bem)    = {}", fmt(&report.perfect)));
    if let Some(d) = report.difference {
        lines.push(format!("|T_bem - T_spectral| = {d:.3e}"));
    }
    if let Some(r) = report.ratio {
        lines.push(format!("ratio |T|/|T_perfect| = {r:.3e}"));
    }
    let path = write_json(&cfg.out, "pt.json", &report)?;
    lines.push(format!("wrote {}", path.display()));
    Ok(lines.join("\n"))
}

/// Grid cells: `(x, y, Some((u, perturbation)))`, `None` where masked.
pub type GridCells = Vec<(f64, f64, Option<(f64, f64)>)>;

/// Evaluates `solution` on the configured window, masking points inside the
/// inclusion, too close to the boundary or within the corner sector.
pub fn field_grid(map: &ConformalMap, mesh: &BoundaryMesh, sol: &DensitySolution, cfg: &RunConfig) -> GridCells {
    let [x0, x1, y0, y1] = cfg.grid;
    let res = cfg.grid_resolution;
    let corners: Vec<Complex64> = (0..map.corners().len()).map(|i| map.corner_point(i)).collect();
    let pts: Vec<(f64, f64)> = (0..res)
        .flat_map(|j| {
            (0..res).map(move |i| {
                let t = |k: usize, lo: f64, hi: f64| lo + (hi - lo) * k as f64 / (res - 1) as f64;
                (t(i, x0, x1), t(j, y0, y1))
            })
        })
        .collect();
    pts.par_iter()
        .map(|&(x, y)| {
            let z = Complex64::new(x, y);
            if corners.iter().any(|c| (z - c).norm() < CORNER_SECTOR_RADIUS) {
                return (x, y, None);
            }
            match bem::eval_perturbation(mesh, sol, z) {
                Ok(p) => (x, y, Some((sol.direction[0] * x + sol.direction[1] * y + p, p))),
                Err(_) => (x, y, None),
            }
        })
        .collect()
}

/// CSV with header `x,y,u,pert,masked`; masked rows leave `u` and `pert` empty.
pub fn grid_csv(cells: &GridCells) -> String {
    let mut out = String::from("x,y,u,pert,masked\n");
    for (x, y, v) in cells {
        match v {
            Some((u, p)) => out.push_str(&format!("{x:.17e},{y:.17e},{u:.17e},{p:.17e},0\n")),
            None => out.push_str(&format!("{x:.17e},{y:.17e},,,1\n")),
        }
    }
    out
}

/// Largest `|perturbation|` over unmasked cells on the window's outer edge.
pub fn edge_maximum(cells: &GridCells, cfg: &RunConfig) -> f64 {
    let [x0, x1, y0, y1] = cfg.grid;
    cells
        .iter()
        .filter(|(x, y, _)| *x == x0 || *x == x1 || *y == y0 || *y == y1)
        .filter_map(|(_, _, v)| v.map(|(_, p)| p.abs()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Serialize)]
pub struct GridSummary {
    pub file: String,
    pub masked: usize,
    pub edge_max_perturbation: f64,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub shape: String,
    pub mode: Mode,
    pub nodes: usize,
    pub direction: [f64; 2],
    pub grids: Vec<GridSummary>,
    pub perfect_decay: DecayFit,
    pub imperfect_decay: DecayFit,
}

pub fn cmd_compare(cfg: &RunConfig) -> anyhow::Result<String> {
    cfg.validate()?;
    if cfg.mode == Mode::Perfect {
        bail!("compare needs an interface mode (closed_form, calibrated or constant)");
    }
    let map = cfg.shape.build()?;
    let mesh = BoundaryMesh::discretize(&map, cfg.nodes, Grading::for_map(&map))?;
    let param = design(&map, cfg)?;
    let imperfect = ImperfectSystem::assemble(&mesh, &node_beta(&mesh, param.as_ref(), cfg)?)?;
    let perfect = PerfectSystem::assemble(&mesh)?;
    let mut grids = Vec::new();
    let mut lines = vec![format!("shape: {}", map.label())];
    for (label, imp) in [("perfect", false), ("imperfect", true)] {
        for (k, a) in [(1, [1.0, 0.0]), (2, [0.0, 1.0])] {
            let sol = if imp { imperfect.solve(a)? } else { perfect.solve(a)? };
            let cells = field_grid(&map, &mesh, &sol, cfg);
            let name = format!("{label}_a{k}.csv");
            write_text(&cfg.out, &name, &grid_csv(&cells))?;
            let summary = GridSummary {
                file: name,
                masked: cells.iter().filter(|c| c.2.is_none()).count(),
                edge_max_perturbation: edge_maximum(&cells, cfg),
            };
            lines.push(format!("{}: edge max |u - a.x| = {:.3e}", summary.file, summary.edge_max_perturbation));
            grids.push(summary);
        }
    }
    let a = cfg.direction;
    let ps = perfect.solve(a)?;
    let is = imperfect.solve(a)?;
    let perfect_decay = farfield_decay(|x| bem::eval_perturbation(&mesh, &ps, x), &DEFAULT_RADII)?;
    let imperfect_decay = farfield_decay(|x| bem::eval_perturbation(&mesh, &is, x), &DEFAULT_RADII)?;
    lines.push(format!("decay perfect: {}", perfect_decay.verdict()));
    lines.push(format!("decay imperfect: {}", imperfect_decay.verdict()));
    let report = CompareReport {
        shape: map.label().to_string(),
        mode: cfg.mode,
        nodes: cfg.nodes,
        direction: a,
        grids,
        perfect_decay,
        imperfect_decay,
    };
    let path = write_json(&cfg.out, "decay.json", &report)?;
    lines.push(format!("wrote 4 grids and {}", path.display()));
    Ok(lines.join("\n"))
}

#[derive(Debug, Serialize)]
pub struct GeometryReport {
    pub source: String,
    pub dimension: usize,
    #[serde(flatten)]
    pub fit: GeometryResidual,
    pub verdict: String,
}

pub fn cmd_check_geometry(args: &GeometryArgs) -> anyhow::Result<String> {
    let (source, samples) = match (&args.surface, &args.shape) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading surface {}", path.display()))?;
            let spec = SurfaceSpec::from_toml(&text)?;
            (path.display().to_string(), spec.samples(48, 96)?)
        }
        (None, Some(s)) => {
            let map = parse_shape(s)?.build()?;
            (map.label().to_string(), curve_samples(&map, CURVE_SAMPLES))
        }
        (None, None) => {
            let shape = match &args.config {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                    RunConfig::from_toml(&text)?.shape
                }
                None => RunConfig::default().shape,
            };
            let map = shape.build()?;
            (map.label().to_string(), curve_samples(&map, CURVE_SAMPLES))
        }
    };
    let dimension = samples.first().map_or(0, |s| s.point.len());
    let fit = best_fit_residual(&samples)?;
    let verdict = match (fit.is_ellipsoid(), dimension) {
        (true, 2) => "ellipse",
        (true, _) => "ellipsoid",
        (false, 2) => "not an ellipse",
        (false, _) => "not an ellipsoid",
    }
    .to_string();
    let line = format!("{source}: residual {:.3e} with a = {:?}: {verdict}", fit.residual, fit.constants);
    let report = GeometryReport { source, dimension, fit, verdict };
    let out = args.out.clone().unwrap_or_else(default_out);
    let path = write_json(&out, "geometry.json", &report)?;
    Ok(format!("{line}\nwrote {}", path.display()))
}

pub fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    SuiteConfig {
        shape: cfg.shape.clone(),
        provenance: if cfg.mode == Mode::ClosedForm { Provenance::ClosedForm } else { Provenance::Calibrated },
        nodes: cfg.nodes,
        truncation: cfg.truncation,
    }
}

/// Runs the suite; `Ok(false)` when a gating check failed.
pub fn cmd_verify(cfg: &RunConfig) -> anyhow::Result<(String, bool)> {
    let start = Instant::now();
    let report = run_suite(&suite_config(cfg))?;
    let mut lines: Vec<String> = report.checks.iter().map(|c| c.line()).collect();
    let path = write_json(&cfg.out, "verify.json", &report)?;
    lines.push(format!(
        "{}: {} gating failure(s) in {} checks, {:.1} s; wrote {}",
        if report.passed { "PASSED" } else { "FAILED" },
        report.gating_failures,
        report.checks.len(),
        start.elapsed().as_secs_f64(),
        path.display()
    ));
    Ok((lines.join("\n"), report.passed))
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (text, ok) = match &cli.command {
        Command::Design(a) => (cmd_design(&a.resolve()?)?, true),
        Command::Pt(a) => (cmd_pt(&a.resolve()?)?, true),
        Command::Compare(a) => (cmd_compare(&a.resolve()?)?, true),
        Command::CheckGeometry(a) => (cmd_check_geometry(a)?, true),
        Command::Verify(a) => cmd_verify(&a.resolve()?)?,
    };
    // a closed pipe (e.g. `ni verify | head`) is not an error of the command
    let _ = writeln!(std::io::stdout(), "{text}");
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_from_flags() {
        assert_eq!(parse_shape("ellipse:1.25,0.75").unwrap(), ShapeSpec::Ellipse { a: 1.25, b: 0.75 });
        assert_eq!(parse_shape("droplet").unwrap(), ShapeSpec::Droplet);
        assert_eq!(parse_shape("disk").unwrap(), ShapeSpec::Disk);
        assert!(parse_shape("ellipse:1").is_err());
        assert!(parse_shape("square").is_err());
        assert!(parse_shape("laurent:/nonexistent/shape.toml").is_err());
    }

    #[test]
    fn grid_flag() {
        let (w, r) = parse_grid("-3,3,-2,2,11").unwrap();
        assert_eq!(w, [-3.0, 3.0, -2.0, 2.0]);
        assert_eq!(r, 11);
        assert!(parse_grid("1,2,3").is_err());
    }

    #[test]
    fn config_round_trip_and_defaults() {
        let cfg = RunConfig::from_toml("kind = \"droplet\"\nnodes = 1024\n").unwrap();
        assert_eq!(cfg.shape, ShapeSpec::Droplet);
        assert_eq!(cfg.nodes, 1024);
        assert_eq!(cfg.truncation, 128);
        assert_eq!(cfg.mode, Mode::Calibrated);
        let laurent = RunConfig {
            shape: ShapeSpec::Laurent { tail: vec![[0.1, 0.0], [0.0, 0.02]] },
            mode: Mode::ClosedForm,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_toml(&laurent.to_toml()).unwrap(), laurent);
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { nodes: 64, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { truncation: 32, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { grid: [1.0, 0.0, 0.0, 1.0], ..RunConfig::default() }.validate().is_err());
    }

    #[test]
    fn flags_override_file() {
        let args = RunArgs {
            shape: Some("droplet".into()),
            nodes: Some(256),
            truncation: Some(64),
            grid: Some("-1,1,-1,1,5".into()),
            ..RunArgs::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.shape, ShapeSpec::Droplet);
        assert_eq!((cfg.nodes, cfg.truncation, cfg.grid_resolution), (256, 64, 5));
    }

    #[test]
    fn spectral_shape_tensor_for_the_ellipse() {
        let map = ConformalMap::ellipse(1.25, 0.75).unwrap();
        let p = InterfaceParameter::closed_form(&map).unwrap();
        let disk = disk_spectral::polarization(&p.gamma_modes(), 128).unwrap();
        let shape = shape_tensor_from_disk(&disk, map.b_omega());
        let mesh = BoundaryMesh::discretize(&map, 256, Grading::None).unwrap();
        let bem = ImperfectSystem::assemble(&mesh, &beta_at_nodes(&mesh, &p).unwrap()).unwrap().polarization().unwrap();
        assert!(bem.distance(&shape.t) < 1e-10);
        assert!(shape.norm() > 0.1);
    }
}
