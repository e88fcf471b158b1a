//! Command-line front end: run configs, batch evaluation over (t, x) grids,
//! oracle comparison, a kernel property suite, and CSV/JSON artifacts with
//! optional gnuplot script emission.
//!
//! Configs are flat JSON objects; command-line flags override file values.
//! Output is deterministic: rows follow the Cartesian product of the
//! configured lists in config order, numbers print with 17 significant
//! digits (round-trip exact for binary64), and no artifact contains
//! wall-clock content. In `compare-oracle` tables, `rel_err` is `abs_err`
//! normalized by the largest |u_oracle| of the run, so its maximum is the
//! scaled sup-norm disagreement.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fd_oracle::{fd_solve_1d, fd_solve_radial_3d, Grid1D, SolutionSlice};
use crate::fields::FieldSpec;
use crate::kernels::{
    characteristic_trace_defect, kernel_adjoint_residual, kernel_e, kernel_k0, kernel_k1,
    kernel_pde_residual, kernel_symmetry_defect, KernelPoint,
};
use crate::model::{CauchyData, ModelParams};
use crate::quadrature::QuadratureConfig;
use crate::representation::{solve, EvalRequest};

/// What a run does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tabulate E (and K0/K1 on b = 0 rows) over a (t, x, b, y) grid.
    EvalKernel,
    /// Tabulate u(t, x) through the representation solvers.
    Solve,
    /// Run the matching finite-difference oracle and report pointwise and
    /// maximal errors.
    CompareOracle,
    /// Check the kernel identities (base equation, adjoint equation,
    /// characteristic traces, argument-swap symmetry) on built-in sample
    /// grids covering delta in {0, 0.25, 1, 4}.
    PropertySuite,
    /// Map |u| over a (t, r) grid for support and Huygens analysis.
    HuygensScan,
}

impl Command {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "eval-kernel" => Ok(Command::EvalKernel),
            "solve" => Ok(Command::Solve),
            "compare-oracle" => Ok(Command::CompareOracle),
            "property-suite" => Ok(Command::PropertySuite),
            "huygens-scan" => Ok(Command::HuygensScan),
            other => Err(Error::Config(format!(
                "unknown command '{other}'; expected eval-kernel, solve, compare-oracle, \
                 property-suite, or huygens-scan"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_dim() -> usize {
    1
}

/// One run, as read from a flat JSON config file (plus flag overrides).
/// Unknown keys are rejected. Fields irrelevant to the chosen command are
/// ignored; grid lists the command does need must be nonempty.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub nu2: f64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub u0: FieldSpec,
    #[serde(default)]
    pub u1: FieldSpec,
    #[serde(default)]
    pub f: FieldSpec,
    #[serde(default)]
    pub t_values: Vec<f64>,
    /// Evaluation points. Scalar entries are shorthand for one-coordinate
    /// points; `compare-oracle` in dim 3 also reads them as radii.
    #[serde(default, deserialize_with = "scalar_or_point_list")]
    pub x_values: Vec<Vec<f64>>,
    /// Kernel base times b (eval-kernel only).
    #[serde(default)]
    pub b_values: Vec<f64>,
    /// Kernel integration abscissae y (eval-kernel only).
    #[serde(default)]
    pub y_values: Vec<f64>,
    /// Radii for huygens-scan.
    #[serde(default)]
    pub r_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_interval_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_interval_panels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_sphere_polar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_sphere_azimuthal: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_ball_radial: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_ball_angular: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_t_derivative_step: Option<f64>,
    /// Oracle grid spacing (compare-oracle). Defaults: 5e-4 in dim 1,
    /// 1e-3 in dim 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_dx: Option<f64>,
    /// Extra spatial padding beyond the cone of dependence of the probes
    /// (compare-oracle). Default 0.5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_padding: Option<f64>,
    /// Pass/fail bound on the maximal rel_err (compare-oracle). Without it
    /// the comparison is purely observational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub emit_plot: bool,
}

fn scalar_or_point_list<'de, D>(de: D) -> std::result::Result<Vec<Vec<f64>>, D::Error>
where
    D: Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Scalar(f64),
        Point(Vec<f64>),
    }
    let entries = Vec::<Entry>::deserialize(de)?;
    Ok(entries
        .into_iter()
        .map(|e| match e {
            Entry::Scalar(v) => vec![v],
            Entry::Point(p) => p,
        })
        .collect())
}

impl RunConfig {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.mu, self.nu2).map_err(|e| Error::Config(e.to_string()))
    }

    /// Defaults with the quad_* overrides applied.
    pub fn quadrature(&self) -> QuadratureConfig {
        let mut q = QuadratureConfig::default();
        if let Some(v) = self.quad_interval_order {
            q.interval_order = v;
        }
        if let Some(v) = self.quad_interval_panels {
            q.interval_panels = v;
        }
        if let Some(v) = self.quad_sphere_polar {
            q.sphere_polar = v;
        }
        if let Some(v) = self.quad_sphere_azimuthal {
            q.sphere_azimuthal = v;
        }
        if let Some(v) = self.quad_ball_radial {
            q.ball_radial = v;
        }
        if let Some(v) = self.quad_ball_angular {
            q.ball_angular = v;
        }
        if let Some(v) = self.quad_t_derivative_step {
            q.t_derivative_step = v;
        }
        q
    }

    pub fn data(&self) -> Result<CauchyData> {
        CauchyData::new(
            self.u0.build(self.dim)?,
            self.u1.build(self.dim)?,
            self.f.build_source(self.dim)?,
        )
    }

    fn validate(&self) -> Result<()> {
        self.params()?;
        if !(1..=3).contains(&self.dim) {
            return Err(Error::Config(format!(
                "dim must be 1, 2, or 3, got {}",
                self.dim
            )));
        }
        self.quadrature()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) {
                return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
            }
        }
        if self.emit_plot {
            if self.out.is_none() {
                return Err(Error::Config(
                    "emit_plot needs an output path for the CSV the script references".into(),
                ));
            }
            if self.format != OutputFormat::Csv {
                return Err(Error::Config("emit_plot needs format = csv".into()));
            }
        }
        let need_times = |name: &str| -> Result<()> {
            if self.t_values.is_empty() {
                return Err(Error::Config(format!("{name} needs a nonempty t_values")));
            }
            if self.t_values.iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(Error::Config("t_values must be finite and >= 0".into()));
            }
            Ok(())
        };
        match self.command {
            Command::EvalKernel => {
                need_times("eval-kernel")?;
                for (list, name) in [
                    (&self.b_values, "b_values"),
                    (&self.y_values, "y_values"),
                ] {
                    if list.is_empty() {
                        return Err(Error::Config(format!("eval-kernel needs a nonempty {name}")));
                    }
                }
                if self.x_values.is_empty() {
                    return Err(Error::Config("eval-kernel needs a nonempty x_values".into()));
                }
                if self.x_values.iter().any(|p| p.len() != 1) {
                    return Err(Error::Config(
                        "eval-kernel x_values entries are scalar 1-d coordinates".into(),
                    ));
                }
            }
            Command::Solve => {
                need_times("solve")?;
                if self.x_values.is_empty() {
                    return Err(Error::Config("solve needs a nonempty x_values".into()));
                }
                for p in &self.x_values {
                    if p.len() != self.dim {
                        return Err(Error::Config(format!(
                            "solve point {p:?} has {} coordinates but dim = {}",
                            p.len(),
                            self.dim
                        )));
                    }
                }
                self.data()?;
            }
            Command::CompareOracle => {
                need_times("compare-oracle")?;
                if self.t_values.iter().cloned().fold(0.0, f64::max) <= 0.0 {
                    return Err(Error::Config(
                        "compare-oracle needs at least one positive time".into(),
                    ));
                }
                if self.x_values.is_empty() {
                    return Err(Error::Config("compare-oracle needs a nonempty x_values".into()));
                }
                match self.dim {
                    1 => {
                        if self.x_values.iter().any(|p| p.len() != 1) {
                            return Err(Error::Config(
                                "compare-oracle in dim 1 takes scalar x_values".into(),
                            ));
                        }
                    }
                    3 => {
                        if self.x_values.iter().any(|p| p.len() != 1 && p.len() != 3) {
                            return Err(Error::Config(
                                "compare-oracle in dim 3 takes radii or 3-d points".into(),
                            ));
                        }
                        for (spec, name) in
                            [(&self.u0, "u0"), (&self.u1, "u1"), (&self.f, "f")]
                        {
                            if !spec.is_radially_symmetric() {
                                return Err(Error::Config(format!(
                                    "the dim-3 oracle is radial; {name} is not radially symmetric"
                                )));
                            }
                        }
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "compare-oracle supports dim 1 and 3, got {other}"
                        )));
                    }
                }
                if let Some(dx) = self.oracle_dx {
                    if !(dx > 0.0) {
                        return Err(Error::Config(format!(
                            "oracle_dx must be positive, got {dx}"
                        )));
                    }
                }
                self.data()?;
            }
            Command::PropertySuite => {}
            Command::HuygensScan => {
                need_times("huygens-scan")?;
                if self.r_values.is_empty() {
                    return Err(Error::Config("huygens-scan needs a nonempty r_values".into()));
                }
                if self.r_values.iter().any(|r| !r.is_finite() || *r < 0.0) {
                    return Err(Error::Config("r_values must be finite and >= 0".into()));
                }
                self.data()?;
            }
        }
        Ok(())
    }
}

enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt17(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

struct CommandOutcome {
    table: Table,
    passed: bool,
    max_abs_err: Option<f64>,
    max_rel_err: Option<f64>,
    summary: Vec<String>,
}

/// 17 significant digits: exact round trip for binary64.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn render_csv(table: &Table) -> String {
    let mut out = String::with_capacity(32 * (table.rows.len() + 1));
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonSummary {
    passed: bool,
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_rel_err: Option<f64>,
}

#[derive(Serialize)]
struct JsonArtifact<'a> {
    config: &'a RunConfig,
    quadrature: QuadratureConfig,
    columns: &'a [String],
    rows: Vec<Vec<serde_json::Value>>,
    summary: JsonSummary,
}

fn render_json(config: &RunConfig, outcome: &CommandOutcome) -> Result<String> {
    let artifact = JsonArtifact {
        config,
        quadrature: config.quadrature(),
        columns: &outcome.table.columns,
        rows: outcome
            .table
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::json).collect())
            .collect(),
        summary: JsonSummary {
            passed: outcome.passed,
            rows: outcome.table.rows.len(),
            max_abs_err: outcome.max_abs_err,
            max_rel_err: outcome.max_rel_err,
        },
    };
    let mut text = serde_json::to_string_pretty(&artifact)
        .map_err(|e| Error::Config(format!("artifact serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Outcome of a run, with whatever the command measured. `rendered` holds
/// the artifact text when no output path was configured.
#[derive(Debug)]
pub struct RunReport {
    pub passed: bool,
    pub rows: usize,
    pub max_abs_err: Option<f64>,
    pub max_rel_err: Option<f64>,
    pub summary: Vec<String>,
    pub artifacts: Vec<PathBuf>,
    pub rendered: Option<String>,
}

/// Validate and execute one run, writing artifacts as configured.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let outcome = match config.command {
        Command::EvalKernel => eval_kernel(config)?,
        Command::Solve => solve_grid(config)?,
        Command::CompareOracle => compare_oracle(config)?,
        Command::PropertySuite => property_suite(config)?,
        Command::HuygensScan => huygens_scan(config)?,
    };
    let text = match config.format {
        OutputFormat::Csv => render_csv(&outcome.table),
        OutputFormat::Json => render_json(config, &outcome)?,
    };
    let mut artifacts = Vec::new();
    let mut rendered = None;
    if let Some(path) = &config.out {
        std::fs::write(path, &text)?;
        artifacts.push(path.clone());
        if config.emit_plot {
            let gp = path.with_extension("gp");
            std::fs::write(&gp, plot_script(config, path))?;
            artifacts.push(gp);
        }
    } else {
        rendered = Some(text);
    }
    Ok(RunReport {
        passed: outcome.passed,
        rows: outcome.table.rows.len(),
        max_abs_err: outcome.max_abs_err,
        max_rel_err: outcome.max_rel_err,
        summary: outcome.summary,
        artifacts,
        rendered,
    })
}

fn eval_kernel(config: &RunConfig) -> Result<CommandOutcome> {
    let params = config.params()?;
    let mut rows = Vec::new();
    let mut skipped = 0_usize;
    for &t in &config.t_values {
        for xp in &config.x_values {
            let x = xp[0];
            for &b in &config.b_values {
                for &y in &config.y_values {
                    let Ok(p) = KernelPoint::new(t, x, b, y) else {
                        skipped += 1;
                        continue;
                    };
                    let e = kernel_e(&p, &params)?;
                    let (k0, k1) = if b == 0.0 {
                        (
                            Cell::Num(kernel_k0(t, x, y, &params)?),
                            Cell::Num(kernel_k1(t, x, y, &params)?),
                        )
                    } else {
                        (Cell::Empty, Cell::Empty)
                    };
                    rows.push(vec![
                        Cell::Num(t),
                        Cell::Num(x),
                        Cell::Num(b),
                        Cell::Num(y),
                        Cell::Num(e),
                        k0,
                        k1,
                    ]);
                }
            }
        }
    }
    let summary = vec![format!(
        "eval-kernel: {} rows ({} grid points outside the kernel domain skipped)",
        rows.len(),
        skipped
    )];
    Ok(CommandOutcome {
        table: Table {
            columns: ["t", "x", "b", "y", "E", "K0", "K1"]
                .map(String::from)
                .to_vec(),
            rows,
        },
        passed: true,
        max_abs_err: None,
        max_rel_err: None,
        summary,
    })
}

fn point_columns(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

fn solve_grid(config: &RunConfig) -> Result<CommandOutcome> {
    let params = config.params()?;
    let data = config.data()?;
    let quad = config.quadrature();
    let mut rows = Vec::new();
    for &t in &config.t_values {
        for x in &config.x_values {
            let u = solve(&EvalRequest {
                t,
                x,
                data: &data,
                params: &params,
                quad: &quad,
            })?;
            let mut row = Vec::with_capacity(config.dim + 2);
            row.push(Cell::Num(t));
            row.extend(x.iter().map(|&c| Cell::Num(c)));
            row.push(Cell::Num(u));
            rows.push(row);
        }
    }
    let mut columns = vec!["t".to_string()];
    columns.extend(point_columns(config.dim));
    columns.push("u".to_string());
    let summary = vec![format!("solve: {} rows in dim {}", rows.len(), config.dim)];
    Ok(CommandOutcome {
        table: Table { columns, rows },
        passed: true,
        max_abs_err: None,
        max_rel_err: None,
        summary,
    })
}

fn closest_slice(slices: &[SolutionSlice], t: f64) -> &SolutionSlice {
    slices
        .iter()
        .min_by(|a, b| {
            (a.t - t)
                .abs()
                .partial_cmp(&(b.t - t).abs())
                .expect("finite slice times")
        })
        .expect("oracle produced no slices")
}

fn compare_oracle(config: &RunConfig) -> Result<CommandOutcome> {
    let params = config.params()?;
    let data = config.data()?;
    let quad = config.quadrature();
    let radial = config.dim == 3;
    let t_end = config.t_values.iter().cloned().fold(0.0, f64::max);
    let pad = config.oracle_padding.unwrap_or(0.5);
    let dx_req = config.oracle_dx.unwrap_or(if radial { 1e-3 } else { 5e-4 });

    // Probe coordinates: x in dim 1, r in dim 3.
    let probes: Vec<f64> = config
        .x_values
        .iter()
        .map(|p| {
            if radial {
                p.iter().map(|c| c * c).sum::<f64>().sqrt()
            } else {
                p[0]
            }
        })
        .collect();
    let lo = probes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = probes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (x_min, x_max) = if radial {
        (0.0, hi + t_end + pad)
    } else {
        (lo - t_end - pad, hi + t_end + pad)
    };
    let nx = ((x_max - x_min) / dx_req).ceil() as usize + 1;
    if nx > 2_000_001 {
        return Err(Error::Config(format!(
            "oracle grid would need {nx} nodes; raise oracle_dx or shrink the probe range"
        )));
    }
    let grid = Grid1D::with_auto_dt(x_min, x_max, nx, t_end);
    let slices = if radial {
        fd_solve_radial_3d(&data, &params, &grid, &config.t_values)?
    } else {
        fd_solve_1d(&data, &params, &grid, &config.t_values)?
    };

    let dxg = grid.dx();
    // (t, coordinate, formula, oracle); the scale for rel_err needs a full
    // pass before rows render.
    let mut recs = Vec::with_capacity(config.t_values.len() * probes.len());
    let mut scale = 0.0_f64;
    for &t_req in &config.t_values {
        let slice = closest_slice(&slices, t_req);
        for &p in &probes {
            let j = (((p - grid.x_min) / dxg).round().max(0.0) as usize).min(grid.nx - 1);
            let coord = grid.x_min + j as f64 * dxg;
            let u_oracle = slice.values[j];
            let point = if radial {
                vec![coord, 0.0, 0.0]
            } else {
                vec![coord]
            };
            let u_formula = solve(&EvalRequest {
                t: slice.t,
                x: &point,
                data: &data,
                params: &params,
                quad: &quad,
            })?;
            scale = scale.max(u_oracle.abs());
            recs.push((slice.t, coord, u_formula, u_oracle));
        }
    }
    let denom = if scale > 0.0 { scale } else { 1.0 };
    let mut max_abs = 0.0_f64;
    let mut rows = Vec::with_capacity(recs.len());
    for (t, coord, u_formula, u_oracle) in recs {
        let abs_err = (u_formula - u_oracle).abs();
        max_abs = max_abs.max(abs_err);
        let mut row = vec![Cell::Num(t), Cell::Num(coord)];
        if radial {
            row.push(Cell::Num(0.0));
            row.push(Cell::Num(0.0));
        }
        row.extend([
            Cell::Num(u_formula),
            Cell::Num(u_oracle),
            Cell::Num(abs_err),
            Cell::Num(abs_err / denom),
        ]);
        rows.push(row);
    }
    let max_rel = max_abs / denom;
    let passed = config.tolerance.is_none_or(|tol| max_rel <= tol);
    let mut columns = vec!["t".to_string()];
    columns.extend(point_columns(config.dim));
    columns.extend(
        ["u_formula", "u_oracle", "abs_err", "rel_err"].map(String::from),
    );
    let mut summary = vec![format!(
        "compare-oracle: max abs err {:.3e}, max rel err {:.3e} over {} points \
         (oracle dx {:.3e}, scale {:.3e})",
        max_abs,
        max_rel,
        rows.len(),
        dxg,
        scale
    )];
    if let Some(tol) = config.tolerance {
        summary.push(format!(
            "tolerance {:.3e}: {}",
            tol,
            if passed { "pass" } else { "FAIL" }
        ));
    }
    Ok(CommandOutcome {
        table: Table { columns, rows },
        passed,
        max_abs_err: Some(max_abs),
        max_rel_err: Some(max_rel),
        summary,
    })
}

/// Coefficient pairs with delta = 0, 0.25, 1, 4.
const SUITE_CASES: [(f64, f64); 4] = [(3.0, 1.0), (2.5, 0.5), (4.0, 2.0), (5.0, 3.0)];
const SUITE_SEED: u64 = 0x5ca1e_u64;

fn property_suite(_config: &RunConfig) -> Result<CommandOutcome> {
    let h_residual = 5e-4;
    let h_trace = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (mu, nu2) in SUITE_CASES {
        let m = ModelParams::new(mu, nu2)?;
        // Interior sample with stencil margin: b and |y - x| stay away
        // from the cone by fixed fractions of the available ranges.
        let interior = |rng: &mut ChaCha8Rng| {
            let t = rng.gen_range(0.5..3.0);
            let b = t * rng.gen_range(0.12..0.85);
            let x = rng.gen_range(-1.0..1.0);
            let y = x + (t - b) * rng.gen_range(-0.8..0.8);
            (t, x, b, y)
        };
        let mut checks: Vec<(&str, usize, f64, f64)> = Vec::new();

        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let (t, x, b, y) = interior(&mut rng);
            worst = worst.max(kernel_pde_residual(t, x, b, y, &m, h_residual)?.abs());
        }
        checks.push(("pde-residual", 20, worst, 1e-5));

        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let (t, x, b, y) = interior(&mut rng);
            worst = worst.max(kernel_adjoint_residual(t, x, b, y, &m, h_residual)?.abs());
        }
        checks.push(("adjoint-residual", 20, worst, 1e-5));

        let mut worst = 0.0_f64;
        for _ in 0..50 {
            let t = rng.gen_range(0.3..3.0);
            let b = t * rng.gen_range(0.05..0.9);
            worst = worst.max(characteristic_trace_defect(t, b, &m, h_trace)?);
        }
        checks.push(("characteristic-trace", 50, worst, 1e-6));

        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let (t, x, b, y) = interior(&mut rng);
            let p = KernelPoint::new(t, x, b, y)?;
            worst = worst.max(kernel_symmetry_defect(&p, &m)?);
        }
        checks.push(("symmetry", 100, worst, 1e-12));

        for (name, samples, max_defect, tol) in checks {
            let ok = max_defect <= tol;
            if !ok {
                failures.push(format!(
                    "{name} at mu = {mu}, nu2 = {nu2}: {max_defect:.3e} > {tol:.1e}"
                ));
            }
            rows.push(vec![
                Cell::Text(name.to_string()),
                Cell::Num(mu),
                Cell::Num(nu2),
                Cell::Num(m.delta()),
                Cell::Num(samples as f64),
                Cell::Num(max_defect),
                Cell::Num(tol),
                Cell::Text(if ok { "pass" } else { "fail" }.to_string()),
            ]);
        }
    }
    let passed = failures.is_empty();
    let mut summary = vec![format!(
        "property-suite: {} checks across delta in {{0, 0.25, 1, 4}}, {}",
        rows.len(),
        if passed {
            "all tolerances met".to_string()
        } else {
            format!("{} FAILED", failures.len())
        }
    )];
    summary.extend(failures);
    Ok(CommandOutcome {
        table: Table {
            columns: [
                "check",
                "mu",
                "nu2",
                "delta",
                "samples",
                "max_defect",
                "tolerance",
                "result",
            ]
            .map(String::from)
            .to_vec(),
            rows,
        },
        passed,
        max_abs_err: None,
        max_rel_err: None,
        summary,
    })
}

fn huygens_scan(config: &RunConfig) -> Result<CommandOutcome> {
    let params = config.params()?;
    let data = config.data()?;
    let quad = config.quadrature();
    let mut rows = Vec::new();
    let mut max_u = 0.0_f64;
    for &t in &config.t_values {
        for &r in &config.r_values {
            let mut x = vec![0.0; config.dim];
            x[0] = r;
            let u = solve(&EvalRequest {
                t,
                x: &x,
                data: &data,
                params: &params,
                quad: &quad,
            })?;
            max_u = max_u.max(u.abs());
            rows.push(vec![Cell::Num(t), Cell::Num(r), Cell::Num(u.abs())]);
        }
    }
    let summary = vec![format!(
        "huygens-scan: {} points in dim {}, max |u| = {:.3e}",
        rows.len(),
        config.dim,
        max_u
    )];
    Ok(CommandOutcome {
        table: Table {
            columns: ["t", "r", "abs_u"].map(String::from).to_vec(),
            rows,
        },
        passed: true,
        max_abs_err: None,
        max_rel_err: None,
        summary,
    })
}

fn plot_script(config: &RunConfig, csv: &Path) -> String {
    let file = csv
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv.display().to_string());
    let mut s = String::new();
    let _ = writeln!(s, "# companion plot for {file}; run: gnuplot -p <this file>");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set grid");
    let plot = match config.command {
        Command::Solve => format!("plot '{file}' using 2:{} with points pt 7", config.dim + 2),
        Command::CompareOracle => format!(
            "plot '{file}' using 2:{} with points pt 7, '' using 2:{} with points pt 6",
            config.dim + 2,
            config.dim + 3
        ),
        Command::EvalKernel => format!("plot '{file}' using 4:5 with points pt 7"),
        Command::HuygensScan => format!("plot '{file}' using 2:3 with linespoints pt 7"),
        Command::PropertySuite => format!("plot '{file}' using 6 with histeps"),
    };
    let _ = writeln!(s, "{plot}");
    s
}

#[derive(Parser, Debug)]
#[command(
    name = "scalewave",
    version,
    about = "Semi-analytic solver for the wave equation with scale-invariant damping and mass"
)]
struct Args {
    /// eval-kernel | solve | compare-oracle | property-suite | huygens-scan.
    /// Optional when the config file already names one.
    command: Option<String>,
    /// Flat JSON run config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Damping coefficient mu.
    #[arg(long)]
    mu: Option<f64>,
    /// Squared mass coefficient nu2.
    #[arg(long)]
    nu2: Option<f64>,
    /// Spatial dimension (1, 2, or 3).
    #[arg(long)]
    dim: Option<usize>,
    /// Artifact path; without it the table prints to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Also write a gnuplot script next to the CSV artifact.
    #[arg(long)]
    emit_plot: bool,
}

/// Merge the config file (if any) with flag overrides into one RunConfig.
fn resolve_config(args: &Args) -> Result<RunConfig> {
    let mut value = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<serde_json::Value>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => serde_json::Value::Object(Default::default()),
    };
    let map = value
        .as_object_mut()
        .ok_or_else(|| Error::Config("config root must be a JSON object".into()))?;
    if let Some(cmd) = &args.command {
        Command::parse(cmd)?;
        map.insert("command".into(), json!(cmd));
    }
    if let Some(v) = args.mu {
        map.insert("mu".into(), json!(v));
    }
    if let Some(v) = args.nu2 {
        map.insert("nu2".into(), json!(v));
    }
    if let Some(v) = args.dim {
        map.insert("dim".into(), json!(v));
    }
    if let Some(v) = &args.out {
        map.insert("out".into(), json!(v));
    }
    if let Some(v) = &args.format {
        map.insert("format".into(), json!(v));
    }
    if args.emit_plot {
        map.insert("emit_plot".into(), json!(true));
    }
    serde_json::from_value::<RunConfig>(value).map_err(|e| Error::Config(e.to_string()))
}

/// Entry point for the binary: parse flags, run, print, map the exit code.
/// 0 all requested checks pass, 2 config/i-o problems, 3 numeric failures,
/// 4 a check ran cleanly but missed its tolerance.
pub fn cli_main() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match resolve_config(&args).and_then(|config| run(&config)) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            if let Some(text) = &report.rendered {
                print!("{text}");
            }
            for artifact in &report.artifacts {
                println!("wrote {}", artifact.display());
            }
            if report.passed {
                0
            } else {
                4
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(command: Command) -> RunConfig {
        RunConfig {
            command,
            mu: 0.0,
            nu2: 0.0,
            dim: 1,
            u0: FieldSpec::Zero,
            u1: FieldSpec::Zero,
            f: FieldSpec::Zero,
            t_values: vec![],
            x_values: vec![],
            b_values: vec![],
            y_values: vec![],
            r_values: vec![],
            quad_interval_order: None,
            quad_interval_panels: None,
            quad_sphere_polar: None,
            quad_sphere_azimuthal: None,
            quad_ball_radial: None,
            quad_ball_angular: None,
            quad_t_derivative_step: None,
            oracle_dx: None,
            oracle_padding: None,
            tolerance: None,
            out: None,
            format: OutputFormat::Csv,
            emit_plot: false,
        }
    }

    #[test]
    fn config_parses_with_defaults_and_shorthand() {
        let text = r#"{
            "command": "solve",
            "mu": 2.0,
            "nu2": 0.25,
            "u0": {"family": "gaussian", "width": 0.5},
            "t_values": [0.5, 1.0],
            "x_values": [-0.25, 0.0, [0.5]]
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(config.command, Command::Solve);
        assert_eq!(config.dim, 1);
        assert_eq!(config.format, OutputFormat::Csv);
        assert_eq!(config.x_values, vec![vec![-0.25], vec![0.0], vec![0.5]]);
        assert_eq!(config.u1, FieldSpec::Zero);
        assert!(config.validate().is_ok());
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        let unknown = r#"{"command": "solve", "mu": 1.0, "nux": 3}"#;
        assert!(serde_json::from_str::<RunConfig>(unknown).is_err());

        let mut config = base_config(Command::Solve);
        config.t_values = vec![0.5];
        config.x_values = vec![vec![0.0]];
        config.dim = 4;
        assert!(matches!(config.validate(), Err(Error::Config(_))));

        let mut config = base_config(Command::Solve);
        config.t_values = vec![0.5];
        config.x_values = vec![vec![0.0, 1.0]];
        assert!(config.validate().is_err(), "point length vs dim");

        // Negative discriminant is a config-level failure here.
        let mut config = base_config(Command::Solve);
        config.mu = 2.0;
        config.nu2 = 0.5;
        config.t_values = vec![0.5];
        config.x_values = vec![vec![0.0]];
        assert!(matches!(config.validate(), Err(Error::Config(_))));

        let mut config = base_config(Command::Solve);
        config.t_values = vec![0.5];
        config.x_values = vec![vec![0.0]];
        config.emit_plot = true;
        assert!(config.validate().is_err(), "emit_plot without out");

        let mut config = base_config(Command::CompareOracle);
        config.dim = 2;
        config.t_values = vec![0.5];
        config.x_values = vec![vec![0.0, 0.0]];
        assert!(config.validate().is_err(), "no 2-d oracle");

        let mut config = base_config(Command::CompareOracle);
        config.dim = 3;
        config.t_values = vec![0.5];
        config.x_values = vec![vec![0.4]];
        config.u0 = FieldSpec::Sine { k: 1.0 };
        assert!(config.validate().is_err(), "dim-3 oracle needs radial data");
    }

    #[test]
    fn csv_formatting_is_fixed_width_17_digits() {
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt17(-3.0), "-3.0000000000000000e0");
        assert_eq!(fmt17(1.0 / 3.0), "3.3333333333333331e-1");
        let table = Table {
            columns: ["a", "b"].map(String::from).to_vec(),
            rows: vec![vec![Cell::Num(1.0), Cell::Empty]],
        };
        assert_eq!(render_csv(&table), "a,b\n1.0000000000000000e0,\n");
    }

    #[test]
    fn eval_kernel_populates_boundary_columns_only_at_b_zero() {
        let mut config = base_config(Command::EvalKernel);
        config.mu = 3.0;
        config.nu2 = 1.0;
        config.t_values = vec![2.0];
        config.x_values = vec![vec![0.0]];
        config.b_values = vec![0.0, 0.5];
        config.y_values = vec![-0.4, 0.3, 5.0];
        let outcome = eval_kernel(&config).unwrap();
        // y = 5.0 lies outside both triangles: 4 valid rows remain.
        assert_eq!(outcome.table.rows.len(), 4);
        for row in &outcome.table.rows {
            let b = match row[2] {
                Cell::Num(v) => v,
                _ => unreachable!(),
            };
            let boundary = matches!(row[5], Cell::Num(_)) && matches!(row[6], Cell::Num(_));
            assert_eq!(boundary, b == 0.0, "K0/K1 exactly on b = 0 rows");
        }
        let m = ModelParams::new(3.0, 1.0).unwrap();
        match (&outcome.table.rows[0][4], &outcome.table.rows[0][6]) {
            (Cell::Num(e), Cell::Num(k1)) => {
                let p = KernelPoint::new(2.0, 0.0, 0.0, -0.4).unwrap();
                assert_eq!(*e, kernel_e(&p, &m).unwrap());
                assert_eq!(*k1, kernel_k1(2.0, 0.0, -0.4, &m).unwrap());
            }
            _ => panic!("expected numeric E and K1"),
        }
    }

    #[test]
    fn solve_rows_follow_config_order_and_zero_data_gives_zero() {
        let mut config = base_config(Command::Solve);
        config.t_values = vec![1.0, 0.25];
        config.x_values = vec![vec![0.5], vec![-0.5]];
        let outcome = solve_grid(&config).unwrap();
        assert_eq!(outcome.table.columns, vec!["t", "x1", "u"]);
        assert_eq!(outcome.table.rows.len(), 4);
        let ts: Vec<f64> = outcome
            .table
            .rows
            .iter()
            .map(|r| match r[0] {
                Cell::Num(v) => v,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(ts, vec![1.0, 1.0, 0.25, 0.25], "outer t, inner x, config order");
        for row in &outcome.table.rows {
            match row[2] {
                Cell::Num(u) => assert_eq!(u, 0.0),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn identical_configs_render_identical_artifacts() {
        let mut config = base_config(Command::Solve);
        config.mu = 3.0;
        config.nu2 = 0.5;
        config.u0 = FieldSpec::Gaussian {
            center: vec![],
            width: 0.5,
            amplitude: 1.0,
        };
        config.t_values = vec![0.5, 1.0];
        config.x_values = vec![vec![-0.3], vec![0.2]];
        let a = render_csv(&solve_grid(&config).unwrap().table);
        let b = render_csv(&solve_grid(&config).unwrap().table);
        assert_eq!(a, b);
        config.format = OutputFormat::Json;
        let ja = render_json(&config, &solve_grid(&config).unwrap()).unwrap();
        let jb = render_json(&config, &solve_grid(&config).unwrap()).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn json_artifact_embeds_resolved_config() {
        let mut config = base_config(Command::EvalKernel);
        config.mu = 4.0;
        config.nu2 = 2.0;
        config.t_values = vec![1.0];
        config.x_values = vec![vec![0.0]];
        config.b_values = vec![0.0, 0.4];
        config.y_values = vec![0.2];
        config.format = OutputFormat::Json;
        let outcome = eval_kernel(&config).unwrap();
        let text = render_json(&config, &outcome).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["config"]["mu"], json!(4.0));
        assert_eq!(v["config"]["command"], json!("eval-kernel"));
        assert_eq!(v["quadrature"]["interval_order"], json!(16));
        assert_eq!(v["summary"]["passed"], json!(true));
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 2);
        // The b = 0.4 row carries nulls in the K0/K1 slots.
        assert!(rows[1][5].is_null() && rows[1][6].is_null());
        // Round trip: the embedded config parses back to the same run.
        let back: RunConfig = serde_json::from_value(v["config"].clone()).unwrap();
        assert_eq!(back.mu, config.mu);
        assert_eq!(back.b_values, config.b_values);
    }

    #[test]
    fn property_suite_is_green_across_the_delta_grid() {
        let outcome = property_suite(&base_config(Command::PropertySuite)).unwrap();
        assert!(outcome.passed, "summary: {:?}", outcome.summary);
        assert_eq!(outcome.table.rows.len(), 16, "4 checks x 4 delta cases");
        for row in &outcome.table.rows {
            match (&row[5], &row[6]) {
                (Cell::Num(defect), Cell::Num(tol)) => {
                    assert!(defect <= tol, "row {:?}", row.iter().map(Cell::csv).collect::<Vec<_>>())
                }
                _ => panic!("numeric defect and tolerance expected"),
            }
        }
    }

    #[test]
    fn compare_oracle_reports_small_errors_on_a_coarse_grid() {
        let mut config = base_config(Command::CompareOracle);
        config.mu = 3.0;
        config.nu2 = 0.5;
        config.u0 = FieldSpec::Gaussian {
            center: vec![],
            width: 0.5,
            amplitude: 1.0,
        };
        config.t_values = vec![0.5];
        config.x_values = vec![vec![-0.2], vec![0.1]];
        config.oracle_dx = Some(5e-3);
        config.tolerance = Some(1e-2);
        let outcome = compare_oracle(&config).unwrap();
        assert!(outcome.passed, "summary: {:?}", outcome.summary);
        assert_eq!(outcome.table.rows.len(), 2);
        assert_eq!(
            outcome.table.columns,
            vec!["t", "x1", "u_formula", "u_oracle", "abs_err", "rel_err"]
        );
        let max_rel = outcome.max_rel_err.unwrap();
        assert!(max_rel > 0.0 && max_rel <= 1e-2, "max rel err {max_rel}");
    }

    #[test]
    fn plot_script_references_the_csv() {
        let mut config = base_config(Command::HuygensScan);
        config.out = Some(PathBuf::from("scan.csv"));
        let script = plot_script(&config, config.out.as_ref().unwrap());
        assert!(script.contains("set datafile separator ','"));
        assert!(script.contains("plot 'scan.csv' using 2:3"));
    }

    #[test]
    fn huygens_scan_sees_the_support_shell() {
        // 1-d bump of radius 1 at delta = 0 (no Huygens clearing): signal
        // fills the cone interior and cuts off exactly at |x| = 1 + t.
        let mut config = base_config(Command::HuygensScan);
        config.mu = 3.0;
        config.nu2 = 1.0;
        config.u0 = FieldSpec::Bump { r: 1.0 };
        config.t_values = vec![1.5];
        config.r_values = vec![0.0, 2.0, 3.0];
        let outcome = huygens_scan(&config).unwrap();
        let u = |i: usize| match outcome.table.rows[i][2] {
            Cell::Num(v) => v,
            _ => unreachable!(),
        };
        assert!(u(0) != 0.0, "interior point carries signal");
        assert!(u(1) != 0.0, "r = 2.0 sits inside the light cone shell");
        assert_eq!(u(2), 0.0, "r = 3.0 > 1 + 1.5 is silent");
    }
}
