//! Batch front end: one experiment config in, a CSV or JSON table out.
//!
//! | command       | columns |
//! |---------------|---------|
//! | `capacity`    | `quantity,value` (rows `capacity`, `robin`, `pw_sum`, 9 decimals) |
//! | `green`       | `x,green_value,green_derivative` |
//! | `cantor`      | `level,gap_count,measure,capacity,pw_sum,pw_increment` |
//! | `coeffs`      | `n,a_n,b_n` |
//! | `sumrule`     | [`SumRuleReport::CSV_HEADER`], one row per step count `1..=n` |
//! | `theorem`     | `n_max,entropy,window_min,window_max,c_stated,c_observed,c_prime,bound,passed` |
//! | `homogeneity` | `t_samples,delta_count,margin` |

mod config;

use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

pub use config::{parse_jacobi, parse_measure, parse_set, Args, Command, ExperimentConfig, Format};

use crate::error::{Error, Result};
use crate::jacobi::{
    coefficients_from_measure, equilibrium_coefficients, JacobiCoeffs, MeasureModel, STABILITY_TOL,
};
use crate::potential::{default_quad_order, solve_green, GreenModel};
use crate::realset::{fat_cantor, geometric_deltas, homogeneity_margin, lebesgue_measure, GapSet};
use crate::sumrule::{
    n_step_sum_rule, szego_product, theorem_upper_bound, SumRuleReport, SzegoPolicy, BOUND_TOL,
    DEFAULT_EIGEN_BASE, DEFAULT_SUBDIVISIONS,
};

/// One table cell. Reals print as `{:.15e}`, fixed cells with their own decimals.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Fixed(f64, usize),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // adding 0.0 turns -0.0 into 0.0
            Cell::Real(x) => format!("{:.15e}", x + 0.0),
            Cell::Fixed(x, d) => {
                let v = format!("{x:.d$}");
                match v.strip_prefix('-') {
                    Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
                    _ => v,
                }
            }
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Real(x) | Cell::Fixed(x, _) if x.is_finite() => s.serialize_f64(*x),
            Cell::Real(x) | Cell::Fixed(x, _) => s.serialize_str(&x.to_string()),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

fn int(n: usize) -> Cell {
    Cell::Int(n as i64)
}

/// A named `(x, y)` sequence for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Value,
    pub series: Vec<Series>,
}

impl Output {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, config: &ExperimentConfig) -> Result<String> {
        let v = json!({
            "tool": "potlab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": config.command,
            "config": config,
            "tolerances": tolerances(),
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, config: &ExperimentConfig) -> Result<String> {
        match config.format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(config),
        }
    }
}

fn tolerances() -> Value {
    json!({
        "stability_tol": STABILITY_TOL,
        "bound_tol": BOUND_TOL,
        "eigen_base": DEFAULT_EIGEN_BASE,
        "entropy_quadrature": { "kind": "edge-corrected", "subdivisions": DEFAULT_SUBDIVISIONS },
        "divergence_policy": SzegoPolicy::default(),
    })
}

/// Writes each series as a block of `x y` lines headed by `# name`, blocks
/// separated by two blank lines.
pub fn emit_plotdata(series: &[Series], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for (i, s) in series.iter().enumerate() {
        if s.x.len() != s.y.len() {
            return Err(Error::InvalidInput(format!(
                "series {} has {} x values and {} y values",
                s.name,
                s.x.len(),
                s.y.len()
            )));
        }
        if i > 0 {
            writeln!(f, "\n")?;
        }
        writeln!(f, "# {}", s.name)?;
        for (x, y) in s.x.iter().zip(&s.y) {
            writeln!(f, "{x:.15e} {y:.15e}")?;
        }
    }
    f.flush()?;
    Ok(())
}

fn require_set(config: &ExperimentConfig) -> Result<GapSet> {
    config
        .set()?
        .ok_or_else(|| Error::InvalidInput("this command needs a set".into()))
}

fn green_for(config: &ExperimentConfig, set: &GapSet) -> Result<GreenModel> {
    solve_green(set, config.quad_order.unwrap_or_else(|| default_quad_order(set)))
}

/// `count` coefficients of `mu`: exact for the equilibrium measure of an
/// interval, Lanczos otherwise, doubling the nodes per band until the
/// weight is positive on at least `4 count` of them.
fn coefficients_for(mu: &MeasureModel, model: &GreenModel, count: usize) -> Result<JacobiCoeffs> {
    if mu.is_equilibrium() {
        return equilibrium_coefficients(model, count);
    }
    let per_band = (4 * count).div_ceil(model.set().band_count()) + 16;
    let mut order = model.quad_order().max(per_band);
    while order < MAX_LANCZOS_ORDER {
        let support = mu.discretize(order)?.iter().filter(|p| p.1 > 0.0).count();
        if support >= 4 * count {
            break;
        }
        order *= 2;
    }
    coefficients_from_measure(mu, count, order)
}

const MAX_LANCZOS_ORDER: usize = 1 << 14;

/// Runs one config and returns its table; does not touch the filesystem
/// beyond reading `@file` references.
pub fn run(config: &ExperimentConfig) -> Result<Output> {
    config.validate()?;
    match config.command {
        Command::Capacity => capacity(config),
        Command::Green => green(config),
        Command::Cantor => cantor(config),
        Command::Coeffs => coeffs(config),
        Command::Sumrule => sumrule(config),
        Command::Theorem => theorem(config),
        Command::Homogeneity => homogeneity(config),
    }
}

fn columns(names: &str) -> Vec<String> {
    names.split(',').map(str::to_string).collect()
}

fn capacity(config: &ExperimentConfig) -> Result<Output> {
    let set = require_set(config)?;
    let g = green_for(config, &set)?;
    let rows = vec![
        vec![Cell::Text("capacity".into()), Cell::Fixed(g.capacity(), 9)],
        vec![Cell::Text("robin".into()), Cell::Fixed(g.robin(), 9)],
        vec![Cell::Text("pw_sum".into()), Cell::Fixed(g.pw_sum(), 9)],
    ];
    Ok(Output {
        columns: columns("quantity,value"),
        rows,
        metadata: json!({ "set_hash": set.content_hash(), "quad_order": g.quad_order() }),
        series: vec![],
    })
}

fn green(config: &ExperimentConfig) -> Result<Output> {
    let set = require_set(config)?;
    let g = green_for(config, &set)?;
    let m = config.samples.unwrap_or(400);
    let pad = 0.25 * set.diam();
    let (lo, hi) = (set.alpha() - pad, set.beta() + pad);
    let xs: Vec<f64> = (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).collect();
    let gv: Vec<f64> = xs.iter().map(|&x| g.green_value(x)).collect();
    let rows = xs
        .iter()
        .zip(&gv)
        .map(|(&x, &v)| vec![Cell::Real(x), Cell::Real(v), Cell::Real(g.green_derivative(x))])
        .collect();
    Ok(Output {
        columns: columns("x,green_value,green_derivative"),
        rows,
        metadata: json!({
            "set_hash": set.content_hash(),
            "quad_order": g.quad_order(),
            "capacity": g.capacity(),
            "critical_points": g.critical_points(),
        }),
        series: vec![Series { name: "green_value".into(), x: xs, y: gv }],
    })
}

fn cantor(config: &ExperimentConfig) -> Result<Output> {
    let top = config.n.unwrap_or(6) as u32;
    let mut rows = Vec::new();
    let mut pw = Vec::new();
    for level in 1..=top {
        let set = fat_cantor(level)?;
        let g = green_for(config, &set)?;
        let inc = pw.last().map_or(f64::NAN, |p| g.pw_sum() - p);
        pw.push(g.pw_sum());
        rows.push(vec![
            Cell::Int(level as i64),
            int(set.gap_count()),
            Cell::Real(lebesgue_measure(&set)),
            Cell::Real(g.capacity()),
            Cell::Real(g.pw_sum()),
            Cell::Real(inc),
        ]);
    }
    let levels = (1..=top).map(f64::from).collect();
    Ok(Output {
        columns: columns("level,gap_count,measure,capacity,pw_sum,pw_increment"),
        rows,
        metadata: json!({ "levels": top }),
        series: vec![Series { name: "pw_sum".into(), x: levels, y: pw }],
    })
}

fn coeffs(config: &ExperimentConfig) -> Result<Output> {
    let set = require_set(config)?;
    let g = green_for(config, &set)?;
    let mu = MeasureModel::new(&g, config.measure()?)?;
    let n = config.n.unwrap_or(50);
    let j = coefficients_for(&mu, &g, n)?;
    let rows = (0..n)
        .map(|k| {
            let a = j.a_at(k).unwrap_or(f64::NAN);
            let b = j.b_at(k).unwrap_or(f64::NAN);
            vec![int(k + 1), Cell::Real(a), Cell::Real(b)]
        })
        .collect();
    Ok(Output {
        columns: columns("n,a_n,b_n"),
        rows,
        metadata: json!({
            "set_hash": set.content_hash(),
            "measure_hash": mu.content_hash(),
            "normalization": mu.normalization(),
            "quad_order": g.quad_order(),
        }),
        series: vec![],
    })
}

/// Coefficients from the config, or computed from the measure with room for
/// `n` strips plus the stable-eigenvalue sizes.
fn jacobi_for(config: &ExperimentConfig, mu: &MeasureModel, g: &GreenModel, n: usize) -> Result<JacobiCoeffs> {
    match config.jacobi()? {
        Some(j) => Ok(j),
        None => coefficients_for(mu, g, n + 2 * DEFAULT_EIGEN_BASE + 2),
    }
}

fn sumrule(config: &ExperimentConfig) -> Result<Output> {
    let set = require_set(config)?;
    let g = green_for(config, &set)?;
    let mu = MeasureModel::new(&g, config.measure()?)?;
    let n = config.n.unwrap_or(1);
    let j = jacobi_for(config, &mu, &g, n)?;
    let reports: Vec<SumRuleReport> = (1..=n).map(|k| n_step_sum_rule(&j, &mu, &g, k)).collect::<Result<_>>()?;
    let rows = reports
        .iter()
        .map(|r| {
            let p = &r.provenance;
            let mut row = vec![int(r.n)];
            row.extend(
                [
                    r.lhs,
                    r.green_sum_j,
                    r.green_sum_strip,
                    r.entropy_mu,
                    r.entropy_strip,
                    r.rhs,
                    r.residual,
                    r.bound_c,
                    r.bound_cprime,
                ]
                .map(Cell::Real),
            );
            row.push(Cell::Text(p.set_hash.clone()));
            row.push(Cell::Text(p.measure_hash.clone()));
            row.push(Cell::Text(match p.quadrature {
                crate::potential::QuadratureKind::GaussChebyshev { order } => format!("gauss-chebyshev:{order}"),
                crate::potential::QuadratureKind::EdgeCorrected { subdivisions } => {
                    format!("edge-corrected:{subdivisions}")
                }
            }));
            row.push(int(p.quad_order));
            row.push(int(p.eigen_base));
            row
        })
        .collect();
    let xs = (1..=n).map(|k| k as f64).collect();
    let ys = reports.iter().map(|r| r.residual).collect();
    Ok(Output {
        columns: columns(SumRuleReport::CSV_HEADER),
        rows,
        metadata: json!({ "normalization": mu.normalization(), "coefficients": j.len() }),
        series: vec![Series { name: "residual".into(), x: xs, y: ys }],
    })
}

fn theorem(config: &ExperimentConfig) -> Result<Output> {
    let set = require_set(config)?;
    let g = green_for(config, &set)?;
    let mu = MeasureModel::new(&g, config.measure()?)?;
    let n_max = config.n.unwrap_or(100);
    let j = jacobi_for(config, &mu, &g, n_max)?;
    let r = theorem_upper_bound(&j, &mu, &g, n_max)?;
    let prod = szego_product(&j, g.capacity(), n_max)?;
    let row = vec![
        int(r.n_max),
        Cell::Real(r.entropy),
        Cell::Real(prod.window_min),
        Cell::Real(r.window_max),
        Cell::Real(r.c_stated),
        Cell::Real(r.c_observed),
        Cell::Real(r.c_prime),
        Cell::Real(r.bound),
        Cell::Bool(r.passed),
    ];
    let xs = (1..=n_max).map(|k| k as f64).collect();
    Ok(Output {
        columns: columns("n_max,entropy,window_min,window_max,c_stated,c_observed,c_prime,bound,passed"),
        rows: vec![row],
        metadata: json!({
            "set_hash": set.content_hash(),
            "measure_hash": mu.content_hash(),
            "window_start": prod.window_start,
            "capacity": g.capacity(),
        }),
        series: vec![Series { name: "u_n".into(), x: xs, y: prod.u() }],
    })
}

/// Radii of the homogeneity grid: 12 halvings from `0.9 diam`.
pub const HOMOGENEITY_DELTAS: usize = 12;

fn homogeneity(config: &ExperimentConfig) -> Result<Output> {
    let set = require_set(config)?;
    let base = config.samples.unwrap_or(16);
    let deltas = geometric_deltas(&set, HOMOGENEITY_DELTAS, 0.5);
    let mut rows = Vec::new();
    for t in [base, 2 * base, 4 * base] {
        let m = homogeneity_margin(&set, t, &deltas)?;
        rows.push(vec![int(t), int(deltas.len()), Cell::Real(m)]);
    }
    Ok(Output {
        columns: columns("t_samples,delta_count,margin"),
        rows,
        metadata: json!({ "set_hash": set.content_hash(), "deltas": deltas }),
        series: vec![],
    })
}

/// Runs a config and writes its table and plot data; returns the rendered text.
pub fn execute(config: &ExperimentConfig) -> Result<String> {
    let out = run(config)?;
    let text = out.render(config)?;
    match &config.out {
        Some(p) => std::fs::write(p, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    if let Some(p) = &config.plot {
        emit_plotdata(&out.series, p)?;
    }
    Ok(text)
}

/// Process entry point; returns the exit code (0 ok, 1 invalid input, 2 numerical failure).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = args.into_config().and_then(|c| execute(&c));
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("potlab: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}
