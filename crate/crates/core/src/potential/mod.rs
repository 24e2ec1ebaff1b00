//! Green's function with pole at infinity for the complement of a [`GapSet`].
//!
//! On `R \ E` the derivative of the Green's function is `P(x) / sqrt(R(x))`,
//! where `R(x) = prod_k (x - e_k)` runs over all band edges and `P` is the
//! monic polynomial of degree `N` (the number of gaps) fixed by requiring
//! `g` to vanish at both ends of every gap:
//!
//! ```text
//! ∫_{α_j}^{β_j} P(t) / sqrt|R(t)| dt = 0,   j = 0..N
//! ```
//!
//! Each gap integral is evaluated after the substitution
//! `t = m + h cos θ`, which absorbs both inverse square-root endpoint
//! singularities. The roots of `P` are the critical points `c_j`, one per gap.

mod equilibrium;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    chebyshev_derivative, chebyshev_eval, chebyshev_interpolate, composite_rule, graded_breaks,
    integrate_breaks,
};
use crate::realset::{GapSet, Location};

pub use equilibrium::{BandRule, EquilibriumQuadrature, QuadratureKind};
pub(crate) use equilibrium::{stieltjes_boundary, stieltjes_off_set};

/// Smallest accepted `quad_order` for [`solve_green`].
pub const MIN_QUAD_ORDER: usize = 32;

/// Offset of the probe point `beta + 1` used for the Robin constant.
const ROBIN_PROBE_OFFSET: f64 = 1.0;

/// Default nodes per band: 200 for up to 15 gaps, 80 above.
pub fn default_quad_order(set: &GapSet) -> usize {
    if set.gap_count() <= 15 {
        200
    } else {
        80
    }
}

/// Solved potential-theoretic data for a gap set.
#[derive(Debug, Clone)]
pub struct GreenModel {
    set: GapSet,
    edges: Vec<f64>,
    critical_points: Vec<f64>,
    robin: f64,
    capacity: f64,
    quad_order: usize,
    quadrature: EquilibriumQuadrature,
}

/// Edge indices dropped from `sqrt|R|` because the substitution absorbed them.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Skip {
    edges: [usize; 2],
    root: Option<usize>,
}

impl Skip {
    pub(crate) const NONE: Skip = Skip {
        edges: [usize::MAX, usize::MAX],
        root: None,
    };

    pub(crate) fn gap(j: usize) -> Skip {
        Skip {
            edges: [2 * j + 1, 2 * j + 2],
            root: None,
        }
    }

    pub(crate) fn band(k: usize) -> Skip {
        Skip {
            edges: [2 * k, 2 * k + 1],
            root: None,
        }
    }

    fn edge(k: usize) -> Skip {
        Skip {
            edges: [k, usize::MAX],
            root: None,
        }
    }

    fn without_root(mut self, j: usize) -> Skip {
        self.root = Some(j);
        self
    }

    #[inline]
    fn has(&self, k: usize) -> bool {
        self.edges[0] == k || self.edges[1] == k
    }
}

/// `prod_j (t - c_j) / sqrt(prod_k |t - e_k|)` with the skipped factors
/// removed, accumulated gap by gap so intermediate products stay near unity.
pub(crate) fn kernel(edges: &[f64], roots: &[f64], t: f64, skip: Skip) -> f64 {
    let last = edges.len() - 1;
    let mut v = 1.0;
    for (j, &c) in roots.iter().enumerate() {
        if skip.root != Some(j) {
            v *= t - c;
        }
        let mut d = 1.0;
        for k in [2 * j + 1, 2 * j + 2] {
            if !skip.has(k) {
                d *= (t - edges[k]).abs();
            }
        }
        v /= d.sqrt();
    }
    let mut d = 1.0;
    for k in [0, last] {
        if !skip.has(k) {
            d *= (t - edges[k]).abs();
        }
    }
    v / d.sqrt()
}

/// Angular width of the first panel next to an endpoint whose nearest foreign
/// edge lies `dist` away, for the map `t = m + half * cos θ`.
fn angular_scale(dist: f64, half: f64) -> f64 {
    if dist.is_finite() {
        (1.0 + dist / half).acosh().min(PI)
    } else {
        PI
    }
}

/// Geometry of gap `j` under `t = mid + half * cos θ`.
#[derive(Debug, Clone)]
pub(crate) struct GapChart {
    pub mid: f64,
    pub half: f64,
    pub breaks: Vec<f64>,
}

impl GapChart {
    fn new(edges: &[f64], j: usize) -> Self {
        let (a, b) = (edges[2 * j + 1], edges[2 * j + 2]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let left_band = a - edges[2 * j];
        let right_band = edges[2 * j + 3] - b;
        // θ = 0 is the right end b
        let breaks = graded_breaks(
            0.0,
            PI,
            angular_scale(right_band, half),
            angular_scale(left_band, half),
        );
        GapChart { mid, half, breaks }
    }

    #[inline]
    pub fn point(&self, theta: f64) -> f64 {
        self.mid + self.half * theta.cos()
    }

    pub fn angle(&self, t: f64) -> f64 {
        ((t - self.mid) / self.half).clamp(-1.0, 1.0).acos()
    }
}

/// Chart for band `k` under `t = mid + half * cos θ`.
#[derive(Debug, Clone)]
pub(crate) struct BandChart {
    pub mid: f64,
    pub half: f64,
    pub breaks: Vec<f64>,
}

impl BandChart {
    pub(crate) fn new(edges: &[f64], k: usize) -> Self {
        let (a, b) = (edges[2 * k], edges[2 * k + 1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let left_gap = if k == 0 { f64::INFINITY } else { a - edges[2 * k - 1] };
        let right_gap = if 2 * k + 2 < edges.len() {
            edges[2 * k + 2] - b
        } else {
            f64::INFINITY
        };
        let breaks = graded_breaks(
            0.0,
            PI,
            angular_scale(right_gap, half),
            angular_scale(left_gap, half),
        );
        BandChart { mid, half, breaks }
    }

    #[inline]
    pub fn point(&self, theta: f64) -> f64 {
        self.mid + self.half * theta.cos()
    }

    pub fn angle(&self, t: f64) -> f64 {
        ((t - self.mid) / self.half).clamp(-1.0, 1.0).acos()
    }
}

/// `∫_gap P / sqrt|R| dt` for gap `j`, the quantity the period conditions zero out.
fn period(edges: &[f64], roots: &[f64], chart: &GapChart, j: usize) -> f64 {
    integrate_breaks(&chart.breaks, 0.0, PI, |th| {
        kernel(edges, roots, chart.point(th), Skip::gap(j))
    })
}

/// Moment matrix in the Chebyshev basis on the normalized set, with each row
/// scaled to unit maximum (row scaling leaves the solution unchanged).
fn chebyshev_moments(norm_edges: &[f64], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n + 1);
    for j in 0..n {
        let chart = GapChart::new(norm_edges, j);
        // log of 1/sqrt|Q_j| at each node, rescaled before exponentiating
        let nodes: Vec<(f64, f64, f64)> = composite_rule(&chart.breaks, 0.0, PI)
            .into_iter()
            .map(|(th, w)| {
                let u = chart.point(th);
                let logq: f64 = norm_edges
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != 2 * j + 1 && k != 2 * j + 2)
                    .map(|(_, &e)| (u - e).abs().ln())
                    .sum();
                (u, w, -0.5 * logq)
            })
            .collect();
        let lmax = nodes.iter().map(|x| x.2).fold(f64::NEG_INFINITY, f64::max);
        for &(u, w, l) in &nodes {
            let scale = w * (l - lmax).exp();
            let (mut prev, mut cur) = (1.0, u);
            m[(j, 0)] += scale;
            if n >= 1 {
                m[(j, 1)] += scale * u;
            }
            for i in 2..=n {
                let next = 2.0 * u * cur - prev;
                m[(j, i)] += scale * next;
                prev = cur;
                cur = next;
            }
        }
        let rmax = (0..=n).map(|i| m[(j, i)].abs()).fold(0.0, f64::max);
        if rmax > 0.0 {
            for i in 0..=n {
                m[(j, i)] /= rmax;
            }
        }
    }
    m
}

/// Root of a Chebyshev series in `[lo, hi]`: 60 bisection steps, then 3 Newton
/// steps kept only while they stay inside the bracket.
fn bracketed_root(coeffs: &[f64], deriv: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = chebyshev_eval(coeffs, a);
    let fb = chebyshev_eval(coeffs, b);
    if !(fa * fb < 0.0) {
        return None;
    }
    let sa = fa.signum();
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        let fm = chebyshev_eval(coeffs, m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let d = chebyshev_eval(deriv, x);
        if d == 0.0 {
            break;
        }
        let nx = x - chebyshev_eval(coeffs, x) / d;
        if nx > lo && nx < hi && nx.is_finite() {
            x = nx;
        }
    }
    Some(x)
}

/// Damped Newton on the period conditions with the roots as unknowns.
fn polish_roots(edges: &[f64], roots: &mut [f64], charts: &[GapChart]) -> Result<f64> {
    let n = roots.len();
    let mut resid = period_residuals(edges, roots, charts);
    let mut norm = resid.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    for _ in 0..40 {
        if norm < 1e-15 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for (j, chart) in charts.iter().enumerate() {
            let mut row = vec![0.0; n];
            for (th, w) in composite_rule(&chart.breaks, 0.0, PI) {
                let t = chart.point(th);
                let full = kernel(edges, roots, t, Skip::gap(j));
                for (i, r) in row.iter_mut().enumerate() {
                    if i == j {
                        *r -= w * kernel(edges, roots, t, Skip::gap(j).without_root(j));
                    } else {
                        *r -= w * full / (t - roots[i]);
                    }
                }
            }
            for i in 0..n {
                jac[(j, i)] = row[i];
            }
        }
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&resid))
            .ok_or_else(|| Error::Solver("singular Jacobian in period-condition Newton step".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = roots
                .iter()
                .zip(step.iter())
                .map(|(&c, &s)| c - lambda * s)
                .collect();
            let inside = trial
                .iter()
                .enumerate()
                .all(|(j, &c)| c > edges[2 * j + 1] && c < edges[2 * j + 2]);
            if inside {
                let r = period_residuals(edges, &trial, charts);
                let nn = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                if nn < norm || nn < 1e-15 {
                    roots.copy_from_slice(&trial);
                    resid = r;
                    norm = nn;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(norm)
}

fn period_residuals(edges: &[f64], roots: &[f64], charts: &[GapChart]) -> Vec<f64> {
    charts
        .iter()
        .enumerate()
        .map(|(j, ch)| period(edges, roots, ch, j))
        .collect()
}

/// Solves for the Green's function of `set`.
///
/// The Chebyshev-basis moment system on the set rescaled to `[-1, 1]` gives
/// the numerator; its roots are bracketed per gap and then refined by Newton
/// iteration on the period conditions in product form.
pub fn solve_green(set: &GapSet, quad_order: usize) -> Result<GreenModel> {
    if quad_order < MIN_QUAD_ORDER {
        return Err(Error::InvalidInput(format!(
            "quad_order {quad_order} below the minimum {MIN_QUAD_ORDER}"
        )));
    }
    let edges = set.edges();
    let n = set.gap_count();
    let mut roots = Vec::with_capacity(n);
    if n > 0 {
        let (mid, half) = (0.5 * (set.alpha() + set.beta()), 0.5 * set.diam());
        let norm_edges: Vec<f64> = edges.iter().map(|&e| (e - mid) / half).collect();
        let m = chebyshev_moments(&norm_edges, n);
        let lhs = m.columns(0, n).into_owned();
        let rhs = -m.column(n).into_owned();
        let x = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Solver("singular moment matrix (degenerate set)".into()))?;
        let mut coeffs: Vec<f64> = x.iter().copied().collect();
        coeffs.push(1.0);
        let deriv = chebyshev_derivative(&coeffs);
        for j in 0..n {
            let (a, b) = (norm_edges[2 * j + 1], norm_edges[2 * j + 2]);
            // Cancellation in the Chebyshev sum can hide the sign change for
            // very many gaps; the midpoint is then a safe start for Newton.
            let u = bracketed_root(&coeffs, &deriv, a, b).unwrap_or(0.5 * (a + b));
            roots.push(mid + half * u);
        }
        let charts: Vec<GapChart> = (0..n).map(|j| GapChart::new(&edges, j)).collect();
        let resid = polish_roots(&edges, &mut roots, &charts)?;
        if !(resid <= 1e-10) {
            return Err(Error::Solver(format!(
                "period conditions not met: max residual {resid:e}"
            )));
        }
    }
    GreenModel::assemble(set.clone(), edges, roots, quad_order)
}

impl GreenModel {
    fn assemble(set: GapSet, edges: Vec<f64>, roots: Vec<f64>, quad_order: usize) -> Result<Self> {
        let quadrature = EquilibriumQuadrature::build(&edges, &roots, quad_order);
        let mut model = GreenModel {
            set,
            edges,
            critical_points: roots,
            robin: 0.0,
            capacity: 1.0,
            quad_order,
            quadrature,
        };
        let x0 = model.set.beta() + ROBIN_PROBE_OFFSET;
        let potential = model.quadrature.integrate(|t| (t - x0).abs().ln());
        model.robin = model.green_value(x0) - potential;
        model.capacity = (-model.robin).exp();
        if !(model.capacity > 0.0 && model.capacity.is_finite()) {
            return Err(Error::Solver(format!(
                "nonpositive capacity {} from Robin constant {}",
                model.capacity, model.robin
            )));
        }
        Ok(model)
    }

    /// Rebuilds a model from exported data without re-solving the period conditions.
    pub fn from_export(export: &GreenExport) -> Result<Self> {
        let set = export.set.clone();
        let edges = set.edges();
        if export.critical_points.len() != set.gap_count() {
            return Err(Error::InvalidInput(format!(
                "{} critical points for {} gaps",
                export.critical_points.len(),
                set.gap_count()
            )));
        }
        for (j, &c) in export.critical_points.iter().enumerate() {
            if !(c > edges[2 * j + 1] && c < edges[2 * j + 2]) {
                return Err(Error::InvalidInput(format!(
                    "critical point {c} outside gap {j}"
                )));
            }
        }
        let quadrature = EquilibriumQuadrature::build(&edges, &export.critical_points, export.quad_order);
        Ok(GreenModel {
            set,
            edges,
            critical_points: export.critical_points.clone(),
            robin: export.robin,
            capacity: export.capacity,
            quad_order: export.quad_order,
            quadrature,
        })
    }

    pub fn set(&self) -> &GapSet {
        &self.set
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn gap_count(&self) -> usize {
        self.critical_points.len()
    }

    pub fn robin(&self) -> f64 {
        self.robin
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// The equilibrium quadrature built at the model's own order.
    pub fn quadrature(&self) -> &EquilibriumQuadrature {
        &self.quadrature
    }

    /// One critical point per gap, in gap order.
    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    /// The monic numerator `P(x) = prod_j (x - c_j)`.
    pub fn numerator(&self, x: f64) -> f64 {
        self.critical_points.iter().map(|&c| x - c).product()
    }

    /// Chebyshev coefficients of `prod_j (u - u_j)` in the variable
    /// `u = (t - mid) / half` normalized to `[alpha, beta] -> [-1, 1]`.
    pub fn numerator_chebyshev(&self) -> Vec<f64> {
        let (mid, half) = (0.5 * (self.set.alpha() + self.set.beta()), 0.5 * self.set.diam());
        let us: Vec<f64> = self.critical_points.iter().map(|&c| (c - mid) / half).collect();
        let mut c = chebyshev_interpolate(us.len(), |u| us.iter().map(|&r| u - r).product());
        // exact zeros above the degree
        c.truncate(us.len() + 1);
        c
    }

    /// Monomial coefficients of `P` in ascending order (ill-conditioned for many gaps).
    pub fn numerator_monomial(&self) -> Vec<f64> {
        let mut p = vec![1.0];
        for &c in &self.critical_points {
            let mut q = vec![0.0; p.len() + 1];
            for (i, &a) in p.iter().enumerate() {
                q[i + 1] += a;
                q[i] -= c * a;
            }
            p = q;
        }
        p
    }

    pub(crate) fn kernel(&self, t: f64, skip: Skip) -> f64 {
        kernel(&self.edges, &self.critical_points, t, skip)
    }

    pub(crate) fn gap_chart(&self, j: usize) -> GapChart {
        GapChart::new(&self.edges, j)
    }

    pub(crate) fn band_chart(&self, k: usize) -> BandChart {
        BandChart::new(&self.edges, k)
    }

    /// `g(x)`: zero on the set, otherwise the integral of `|g'|` from the
    /// nearest band edge along the real axis.
    pub fn green_value(&self, x: f64) -> f64 {
        let loc = match self.set.locate(x) {
            Ok(l) => l,
            Err(_) => return f64::NAN,
        };
        match loc {
            Location::InBand(_) | Location::Edge(_) => 0.0,
            Location::InGap(j) => {
                let chart = self.gap_chart(j);
                let th = chart.angle(x);
                let f = |t: f64| self.kernel(chart.point(t), Skip::gap(j));
                let v = if x >= chart.mid {
                    integrate_breaks(&chart.breaks, 0.0, th, f)
                } else {
                    integrate_breaks(&chart.breaks, th, PI, f)
                };
                v.abs()
            }
            Location::RightOfSet => self.outer_integral(x, true),
            Location::LeftOfSet => self.outer_integral(x, false),
        }
    }

    /// `t = beta + s^2` (or `alpha - s^2`) removes the edge singularity.
    fn outer_integral(&self, x: f64, right: bool) -> f64 {
        let last = self.edges.len() - 1;
        let (edge, idx, band) = if right {
            (self.edges[last], last, self.edges[last] - self.edges[last - 1])
        } else {
            (self.edges[0], 0, self.edges[1] - self.edges[0])
        };
        let smax = (x - edge).abs().sqrt();
        let first = band.sqrt();
        let breaks = graded_breaks(0.0, smax, first, smax);
        let sign = if right { 1.0 } else { -1.0 };
        integrate_breaks(&breaks, 0.0, smax, |s| {
            let t = edge + sign * s * s;
            2.0 * self.kernel(t, Skip::edge(idx)).abs()
        })
    }

    /// Signed `g'(x)` for `x` off the set; `NaN` on the set.
    pub fn green_derivative(&self, x: f64) -> f64 {
        let n = self.gap_count() as i64;
        let component = match self.set.locate(x) {
            Ok(Location::InGap(j)) => j as i64,
            Ok(Location::RightOfSet) => n,
            Ok(Location::LeftOfSet) => -1,
            _ => return f64::NAN,
        };
        let sign = if (n - component) % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.kernel(x, Skip::NONE)
    }

    /// Sum of `g` over the critical points (the Parreau–Widom sum of the set).
    pub fn pw_sum(&self) -> f64 {
        self.critical_points.iter().map(|&c| self.green_value(c)).sum()
    }

    /// `∫_gap |g'(t)| dt` for gap `j`, split at the critical point.
    pub fn gap_area(&self, j: usize) -> f64 {
        let chart = self.gap_chart(j);
        let thc = chart.angle(self.critical_points[j]);
        let f = |t: f64| self.kernel(chart.point(t), Skip::gap(j)).abs();
        integrate_breaks(&chart.breaks, 0.0, thc, f) + integrate_breaks(&chart.breaks, thc, PI, f)
    }

    /// Period integrals `∫_gap P / sqrt|R| dt`, one per gap.
    pub fn period_residuals(&self) -> Vec<f64> {
        let charts: Vec<GapChart> = (0..self.gap_count()).map(|j| self.gap_chart(j)).collect();
        period_residuals(&self.edges, &self.critical_points, &charts)
    }

    /// Density `|P(t)| / (π sqrt|R(t)|)` of the equilibrium measure at a band-interior point.
    pub fn equilibrium_density(&self, t: f64) -> Result<f64> {
        match self.set.locate(t)? {
            Location::InBand(_) => Ok(self.kernel(t, Skip::NONE).abs() / PI),
            Location::Edge(_) => Err(Error::Domain(format!(
                "equilibrium density is unbounded at the band edge {t}"
            ))),
            _ => Err(Error::Domain(format!("{t} is not inside a band"))),
        }
    }

    /// Equilibrium quadrature with `order` Gauss-Chebyshev nodes per band.
    pub fn equilibrium_quadrature(&self, order: usize) -> Result<EquilibriumQuadrature> {
        if order < 16 {
            return Err(Error::InvalidInput(format!(
                "equilibrium quadrature order {order} below 16"
            )));
        }
        Ok(EquilibriumQuadrature::build(&self.edges, &self.critical_points, order))
    }

    /// Edge-corrected equilibrium quadrature for integrands with logarithmic
    /// singularities at band edges.
    pub fn edge_corrected_quadrature(&self, subdivisions: usize) -> Result<EquilibriumQuadrature> {
        if subdivisions == 0 || subdivisions > 64 {
            return Err(Error::InvalidInput(format!(
                "edge-corrected subdivisions {subdivisions} outside 1..=64"
            )));
        }
        Ok(EquilibriumQuadrature::build_edge_corrected(
            &self.edges,
            &self.critical_points,
            subdivisions,
        ))
    }

    /// The next finer rule of the same kind.
    pub fn refine_quadrature(&self, q: &EquilibriumQuadrature) -> Result<EquilibriumQuadrature> {
        match q.kind() {
            QuadratureKind::GaussChebyshev { order } => self.equilibrium_quadrature(2 * order),
            QuadratureKind::EdgeCorrected { subdivisions } => {
                self.edge_corrected_quadrature(2 * subdivisions)
            }
        }
    }

    /// Real-valued `m_E(x) = -g'(x)` for `x` off the set.
    pub fn equilibrium_m_real(&self, x: f64) -> f64 {
        -self.green_derivative(x)
    }

    pub fn export(&self) -> GreenExport {
        GreenExport {
            set: self.set.clone(),
            edges: self.edges.clone(),
            numerator: NumeratorExport {
                basis: "chebyshev".into(),
                interval: (self.set.alpha(), self.set.beta()),
                scale: (0.5 * self.set.diam()).powi(self.gap_count() as i32),
                coefficients: self.numerator_chebyshev(),
            },
            critical_points: self.critical_points.clone(),
            robin: self.robin,
            capacity: self.capacity,
            quad_order: self.quad_order,
        }
    }
}

/// `P(t) = scale * sum_k coefficients[k] * T_k(u)`, `u` the affine image of
/// `t` from `interval` onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumeratorExport {
    pub basis: String,
    pub interval: (f64, f64),
    pub scale: f64,
    pub coefficients: Vec<f64>,
}

/// JSON export of a solved model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenExport {
    pub set: GapSet,
    pub edges: Vec<f64>,
    pub numerator: NumeratorExport,
    pub critical_points: Vec<f64>,
    pub robin: f64,
    pub capacity: f64,
    pub quad_order: usize,
}
