//! Szegő integrals, relative entropies and the step-by-step sum rules.
//!
//! For a Jacobi matrix `J` with spectral measure `μ` on a gap set `E`,
//!
//! ```text
//! log(a_1 ... a_n / cap^n) = Σ g(x_k) - Σ g(x_{n,k}) + ½ (S(μ) - S(μ_n))
//! ```
//!
//! with `x_k` the eigenvalues of `J` off `E`, `x_{n,k}` those of the n-times
//! stripped matrix, `μ_n` its spectral measure and
//! `S(μ) = ∫ log(f / f_E) dμ_E` the relative entropy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::{
    eigenvalue_green_sum, equilibrium_coefficients, gap_eigenvalues, glue_head,
    stable_gap_eigenvalues, strip, stripped_boundary_density, JacobiCoeffs, MeasureModel,
    STABILITY_TOL,
};
use crate::potential::{EquilibriumQuadrature, GreenModel, QuadratureKind};

/// Largest base size `N` used for stable eigenvalues (sizes `N, N+1, 2N, 2N+1`).
pub const DEFAULT_EIGEN_BASE: usize = 100;

/// Panel subdivisions of the edge-corrected rule used by default for entropies.
pub const DEFAULT_SUBDIVISIONS: usize = 2;

/// Relative tolerance of the bound comparisons.
pub const BOUND_TOL: f64 = 1e-9;

/// When a finite quadrature value is declared a divergent `-∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SzegoPolicy {
    /// Number of successive refinements compared.
    pub refinements: usize,
    /// A drop larger than this, at every refinement, signals divergence...
    pub drop_nats: f64,
    /// ...provided the finest value is below this floor.
    pub floor: f64,
}

impl Default for SzegoPolicy {
    fn default() -> Self {
        SzegoPolicy {
            refinements: 2,
            drop_nats: 1.0,
            floor: -50.0,
        }
    }
}

/// `Σ w_i F(t_i)`; a single `-∞` value makes the whole integral `-∞`.
fn log_integral<F>(quad: &EquilibriumQuadrature, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut s = 0.0;
    for (t, w) in quad.iter() {
        let v = f(t)?;
        if v == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        s += w * v;
    }
    Ok(s)
}

fn with_divergence_check<F>(
    model: &GreenModel,
    quad: &EquilibriumQuadrature,
    policy: &SzegoPolicy,
    eval: F,
) -> Result<f64>
where
    F: Fn(&EquilibriumQuadrature) -> Result<f64>,
{
    let v0 = eval(quad)?;
    if !v0.is_finite() || policy.refinements == 0 {
        return Ok(v0);
    }
    let mut vals = vec![v0];
    let mut q = quad.clone();
    for _ in 0..policy.refinements {
        q = model.refine_quadrature(&q)?;
        vals.push(eval(&q)?);
    }
    let drops = vals.windows(2).all(|w| w[0] - w[1] > policy.drop_nats);
    if drops && *vals.last().unwrap() < policy.floor {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok(v0)
    }
}

/// `∫ log f dμ_E`, or `-∞`.
pub fn szego_integral(mu: &MeasureModel, quad: &EquilibriumQuadrature) -> Result<f64> {
    szego_integral_with(mu, quad, &SzegoPolicy::default())
}

pub fn szego_integral_with(mu: &MeasureModel, quad: &EquilibriumQuadrature, policy: &SzegoPolicy) -> Result<f64> {
    with_divergence_check(mu.green(), quad, policy, |q| {
        log_integral(q, |t| Ok(mu.density(t)?.ln()))
    })
}

/// `S(dμ_E | dμ) = -∫ log(f_E / f) dμ_E`, or `-∞`. Point masses do not enter.
pub fn relative_entropy(mu: &MeasureModel, model: &GreenModel, quad: &EquilibriumQuadrature) -> Result<f64> {
    relative_entropy_with(mu, model, quad, &SzegoPolicy::default())
}

pub fn relative_entropy_with(
    mu: &MeasureModel,
    model: &GreenModel,
    quad: &EquilibriumQuadrature,
    policy: &SzegoPolicy,
) -> Result<f64> {
    check_same_set(mu, model)?;
    with_divergence_check(model, quad, policy, |q| {
        log_integral(q, |t| mu.log_ratio_to_equilibrium(t))
    })
}

fn check_same_set(mu: &MeasureModel, model: &GreenModel) -> Result<()> {
    if mu.set() != model.set() {
        return Err(Error::InvalidInput("measure and model live on different sets".into()));
    }
    Ok(())
}

/// Where a report's numbers came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub set_hash: String,
    pub measure_hash: String,
    pub quadrature: QuadratureKind,
    pub quad_order: usize,
    pub eigen_base: usize,
    pub version: String,
}

/// One evaluation of the n-step sum rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumRuleReport {
    pub n: usize,
    pub lhs: f64,
    pub green_sum_j: f64,
    pub green_sum_strip: f64,
    pub entropy_mu: f64,
    pub entropy_strip: f64,
    pub rhs: f64,
    pub residual: f64,
    pub bound_c: f64,
    pub bound_cprime: f64,
    pub provenance: Provenance,
}

impl SumRuleReport {
    pub const CSV_HEADER: &'static str = "n,lhs,green_sum_j,green_sum_strip,entropy_mu,entropy_strip,rhs,residual,bound_c,bound_cprime,set_hash,measure_hash,quadrature,quad_order,eigen_base";

    pub fn csv_row(&self) -> String {
        let p = &self.provenance;
        let quad = match p.quadrature {
            QuadratureKind::GaussChebyshev { order } => format!("gauss-chebyshev:{order}"),
            QuadratureKind::EdgeCorrected { subdivisions } => format!("edge-corrected:{subdivisions}"),
        };
        format!(
            "{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{},{},{},{},{}",
            self.n,
            self.lhs,
            self.green_sum_j,
            self.green_sum_strip,
            self.entropy_mu,
            self.entropy_strip,
            self.rhs,
            self.residual,
            self.bound_c,
            self.bound_cprime,
            p.set_hash,
            p.measure_hash,
            quad,
            p.quad_order,
            p.eigen_base
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Base size for stable eigenvalues of `j`: [`DEFAULT_EIGEN_BASE`] or what
/// the stored coefficients allow.
fn eigen_base(j: &JacobiCoeffs) -> Result<usize> {
    match j.max_size() {
        None => Ok(DEFAULT_EIGEN_BASE),
        Some(len) => {
            let n = ((len.saturating_sub(1)) / 2).min(DEFAULT_EIGEN_BASE);
            if n == 0 {
                Err(Error::InvalidInput(format!(
                    "{len} coefficients are too few for stable eigenvalue estimates"
                )))
            } else {
                Ok(n)
            }
        }
    }
}

/// `Σ g` over the stable gap eigenvalues of `j`.
fn stable_green_sum(j: &JacobiCoeffs, model: &GreenModel, base: usize) -> Result<f64> {
    let eigs: Vec<f64> = stable_gap_eigenvalues(j, model, base, STABILITY_TOL)?
        .iter()
        .map(|e| e.value)
        .collect();
    eigenvalue_green_sum(&eigs, model)
}

/// Relative entropies of `μ` and of its n-times stripped measure on `quad`,
/// the latter from boundary values of `m` pushed through `n` stripping steps.
fn entropy_pair(
    j: &JacobiCoeffs,
    mu: &MeasureModel,
    model: &GreenModel,
    quad: &EquilibriumQuadrature,
    n: usize,
) -> Result<(f64, f64)> {
    let mut s_mu = 0.0;
    let mut s_n = 0.0;
    for (t, w) in quad.iter() {
        let log_fe = model.equilibrium_density(t)?.ln();
        let lr = mu.log_ratio_to_equilibrium(t)?;
        s_mu += w * lr;
        let mut m = mu.m_boundary(t)?;
        let mut dead = false;
        for k in 0..n {
            let a = j.a_at(k).ok_or_else(|| Error::InvalidInput(format!("a_{} missing", k + 1)))?;
            let b = j.b_at(k).ok_or_else(|| Error::InvalidInput(format!("b_{} missing", k + 1)))?;
            if !(m.im > 0.0) {
                dead = true;
                break;
            }
            m = stripped_boundary_density(m, a, b, t)?.0;
        }
        if dead || !(m.im > 0.0) {
            s_n = f64::NEG_INFINITY;
        } else {
            s_n += w * ((m.im / std::f64::consts::PI).ln() - log_fe);
        }
    }
    if s_mu.is_nan() {
        s_mu = f64::NEG_INFINITY;
    }
    Ok((s_mu, s_n))
}

fn log_product(j: &JacobiCoeffs, n: usize) -> Result<f64> {
    (0..n)
        .map(|k| {
            j.a_at(k)
                .map(f64::ln)
                .ok_or_else(|| Error::InvalidInput(format!("a_{} missing", k + 1)))
        })
        .sum()
}

/// The n-step sum rule with entropies on the default edge-corrected rule.
pub fn n_step_sum_rule(j: &JacobiCoeffs, mu: &MeasureModel, model: &GreenModel, n: usize) -> Result<SumRuleReport> {
    let quad = model.edge_corrected_quadrature(DEFAULT_SUBDIVISIONS)?;
    n_step_sum_rule_with(j, mu, model, n, &quad)
}

/// The one-step rule `log(a_1 / cap) = Σ g(x_k) - Σ g(x_{1,k}) + ½ ∫ log(f / f_1) dμ_E`.
pub fn step_sum_rule(j: &JacobiCoeffs, mu: &MeasureModel, model: &GreenModel) -> Result<SumRuleReport> {
    n_step_sum_rule(j, mu, model, 1)
}

pub fn n_step_sum_rule_with(
    j: &JacobiCoeffs,
    mu: &MeasureModel,
    model: &GreenModel,
    n: usize,
    quad: &EquilibriumQuadrature,
) -> Result<SumRuleReport> {
    check_same_set(mu, model)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if let Some(len) = j.max_size() {
        if n >= len {
            return Err(Error::InvalidInput(format!("n = {n} needs more than {len} coefficients")));
        }
    }
    let lhs = log_product(j, n)? - n as f64 * model.capacity().ln();
    let base_j = eigen_base(j)?;
    let stripped = strip(j, n)?;
    let base_s = eigen_base(&stripped)?;
    let green_sum_j = stable_green_sum(j, model, base_j)?;
    let green_sum_strip = stable_green_sum(&stripped, model, base_s)?;
    let (entropy_mu, entropy_strip) = entropy_pair(j, mu, model, quad, n)?;
    if entropy_mu == f64::NEG_INFINITY && entropy_strip == f64::NEG_INFINITY {
        return Err(Error::Inapplicable(
            "both relative entropies are -inf; the sum rule carries no information".into(),
        ));
    }
    let rhs = green_sum_j - green_sum_strip + 0.5 * (entropy_mu - entropy_strip);
    let bound_c = 2.0 * green_sum_j + model.pw_sum();
    Ok(SumRuleReport {
        n,
        lhs,
        green_sum_j,
        green_sum_strip,
        entropy_mu,
        entropy_strip,
        rhs,
        residual: lhs - rhs,
        bound_c,
        bound_cprime: bound_c.exp(),
        provenance: Provenance {
            set_hash: model.set().content_hash(),
            measure_hash: mu.content_hash(),
            quadrature: quad.kind(),
            quad_order: model.quad_order(),
            eigen_base: base_j,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

/// `u_n = a_1 ... a_n / cap^n` for `n = 1..=n_max`, with trailing-window extremes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzegoProduct {
    pub capacity: f64,
    pub log_u: Vec<f64>,
    /// First `n` (1-based) of the trailing window, the last quarter of the range.
    pub window_start: usize,
    pub window_min: f64,
    pub window_max: f64,
}

impl SzegoProduct {
    pub fn u(&self) -> Vec<f64> {
        self.log_u.iter().map(|l| l.exp()).collect()
    }

    /// Whether `log u_n` strictly decreases over the last half of the range.
    pub fn trailing_half_decreasing(&self) -> bool {
        let half = self.log_u.len() / 2;
        self.log_u[half..].windows(2).all(|w| w[1] < w[0])
    }
}

pub fn szego_product(j: &JacobiCoeffs, capacity: f64, n_max: usize) -> Result<SzegoProduct> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if !(capacity > 0.0) {
        return Err(Error::InvalidInput(format!("capacity {capacity} must be positive")));
    }
    let lc = capacity.ln();
    let mut log_u = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for k in 0..n_max {
        let a = j
            .a_at(k)
            .ok_or_else(|| Error::InvalidInput(format!("a_{} missing for n_max = {n_max}", k + 1)))?;
        acc += a.ln() - lc;
        log_u.push(acc);
    }
    let window_start = (n_max - n_max / 4 + 1).min(n_max);
    let window = &log_u[window_start - 1..];
    let window_min = window.iter().fold(f64::INFINITY, |m, v| m.min(*v)).exp();
    let window_max = window.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)).exp();
    Ok(SzegoProduct {
        capacity,
        log_u,
        window_start,
        window_min,
        window_max,
    })
}

/// The three eigenvalue sums at one size `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    /// Stable eigenvalues of the n-times stripped matrix.
    pub strip_sum: f64,
    /// Eigenvalues of the `n x n` corner.
    pub corner_sum: f64,
    /// Stable eigenvalues of the head of `J` glued onto the equilibrium matrix.
    pub glued_sum: f64,
    /// Part of `glued_sum` from eigenvalues outside `[alpha, beta]`.
    pub glued_outer_sum: f64,
    pub strip_ok: bool,
    pub corner_ok: bool,
    pub glued_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    /// `Σ g(x_k)` over the stable gap eigenvalues of `J`.
    pub eigen_sum: f64,
    /// `Σ_j g(c_j)`.
    pub critical_sum: f64,
    /// `C = 2 Σ g(x_k) + Σ g(c_j)`, the bound for strips and corners.
    pub bound_c: f64,
    /// `C + 2 Σ g(c_j)`, the bound for the glued matrices.
    pub bound_glued: f64,
    pub rows: Vec<BoundRow>,
}

impl BoundCheck {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for r in &self.rows {
            if !r.strip_ok {
                v.push(format!("n={}: strip sum {} > C = {}", r.n, r.strip_sum, self.bound_c));
            }
            if !r.corner_ok {
                v.push(format!("n={}: corner sum {} > C = {}", r.n, r.corner_sum, self.bound_c));
            }
            if !r.glued_ok {
                v.push(format!(
                    "n={}: glued sum {} > C + 2 Σ g(c_j) = {} ({} from outside [alpha, beta])",
                    r.n, r.glued_sum, self.bound_glued, r.glued_outer_sum
                ));
            }
        }
        v
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

fn within(x: f64, bound: f64) -> bool {
    x <= bound + BOUND_TOL * bound.abs().max(1.0)
}

/// Stable gap eigenvalues of `head(J, n) ⊕_{a_n} J_E` and their Green sums (total, outside `[alpha, beta]`).
fn glued_sums(j: &JacobiCoeffs, model: &GreenModel, n: usize, eq: &JacobiCoeffs) -> Result<(f64, f64)> {
    let (d, e) = j.truncation(n)?;
    let head = JacobiCoeffs::finite(e, d)?;
    let junction = j
        .a_at(n - 1)
        .ok_or_else(|| Error::InvalidInput(format!("a_{n} missing for the junction")))?;
    let glued = glue_head(&head, junction, eq)?;
    let base = match glued.max_size() {
        None => n + DEFAULT_EIGEN_BASE,
        Some(len) => ((len - 1) / 2).min(n + DEFAULT_EIGEN_BASE),
    };
    let eigs = stable_gap_eigenvalues(&glued, model, base, STABILITY_TOL)?;
    let set = model.set();
    let total = eigenvalue_green_sum(&eigs.iter().map(|e| e.value).collect::<Vec<_>>(), model)?;
    let outer: f64 = eigs
        .iter()
        .filter(|e| e.value < set.alpha() || e.value > set.beta())
        .map(|e| model.green_value(e.value))
        .sum();
    Ok((total, outer))
}

/// Equilibrium coefficients long enough for glued matrices up to size `n_max`.
fn equilibrium_for(model: &GreenModel, n_max: usize) -> Result<JacobiCoeffs> {
    equilibrium_coefficients(model, n_max + 2 * DEFAULT_EIGEN_BASE + 2)
}

/// Checks the three eigenvalue-sum families against their bounds at each size.
pub fn eigenvalue_bound_check(j: &JacobiCoeffs, model: &GreenModel, sizes: &[usize]) -> Result<BoundCheck> {
    let largest = *sizes
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidInput("no sizes given".into()))?;
    if sizes.contains(&0) {
        return Err(Error::InvalidInput("sizes must be positive".into()));
    }
    let base = match j.max_size() {
        None => largest,
        Some(len) => largest.min((len.saturating_sub(1)) / 2).max(1),
    };
    let eigen_sum = stable_green_sum(j, model, base)?;
    let critical_sum = model.pw_sum();
    let bound_c = 2.0 * eigen_sum + critical_sum;
    let bound_glued = bound_c + 2.0 * critical_sum;
    let eq = equilibrium_for(model, largest)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let stripped = strip(j, n)?;
        let strip_sum = stable_green_sum(&stripped, model, eigen_base(&stripped)?)?;
        let corner: Vec<f64> = gap_eigenvalues(j, model, n)?.iter().map(|e| e.value).collect();
        let corner_sum = eigenvalue_green_sum(&corner, model)?;
        let (glued_sum, glued_outer_sum) = glued_sums(j, model, n, &eq)?;
        rows.push(BoundRow {
            n,
            strip_sum,
            corner_sum,
            glued_sum,
            glued_outer_sum,
            strip_ok: within(strip_sum, bound_c),
            corner_ok: within(corner_sum, bound_c),
            glued_ok: within(glued_sum, bound_glued),
        });
    }
    Ok(BoundCheck {
        eigen_sum,
        critical_sum,
        bound_c,
        bound_glued,
        rows,
    })
}

/// Upper bound `limsup u_n <= C' exp(½ S(μ))` on a trailing window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub n_max: usize,
    pub entropy: f64,
    pub window_max: f64,
    /// `2 Σ g(x_k) + 3 Σ g(c_j)`.
    pub c_stated: f64,
    /// Largest glued-matrix eigenvalue sum seen over the window.
    pub c_observed: f64,
    /// `exp(max(c_stated, c_observed))`.
    pub c_prime: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Sizes sampled from the trailing window for the observed glued sums.
pub const WINDOW_SAMPLES: usize = 5;

pub fn theorem_upper_bound(
    j: &JacobiCoeffs,
    mu: &MeasureModel,
    model: &GreenModel,
    n_max: usize,
) -> Result<TheoremReport> {
    check_same_set(mu, model)?;
    let quad = model.edge_corrected_quadrature(DEFAULT_SUBDIVISIONS)?;
    let entropy = relative_entropy(mu, model, &quad)?;
    if entropy == f64::NEG_INFINITY {
        return Err(Error::Inapplicable("relative entropy is -inf".into()));
    }
    let prod = szego_product(j, model.capacity(), n_max)?;
    let eigen_sum = stable_green_sum(j, model, eigen_base(j)?)?;
    let c_stated = 2.0 * eigen_sum + 3.0 * model.pw_sum();
    let eq = equilibrium_for(model, n_max)?;
    let lo = prod.window_start;
    let mut ns: Vec<usize> = (0..WINDOW_SAMPLES)
        .map(|i| lo + (n_max - lo) * i / (WINDOW_SAMPLES - 1).max(1))
        .collect();
    ns.dedup();
    let mut c_observed = 0.0_f64;
    for n in ns {
        c_observed = c_observed.max(glued_sums(j, model, n, &eq)?.0);
    }
    let c_prime = c_stated.max(c_observed).exp();
    let bound = c_prime * (0.5 * entropy).exp();
    Ok(TheoremReport {
        n_max,
        entropy,
        window_max: prod.window_max,
        c_stated,
        c_observed,
        c_prime,
        bound,
        passed: prod.window_max <= bound * (1.0 + 1e-6),
    })
}
