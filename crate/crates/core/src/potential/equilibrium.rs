//! Discretized equilibrium measure and boundary values of Stieltjes transforms.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use super::{angular_scale, kernel, BandChart, GreenModel, Skip};
use crate::error::{Error, Result};
use crate::quadrature::{chebyshev_angles, composite_rule, graded_breaks, integrate_breaks};
use crate::realset::Location;

/// Nodes and weights of one band, nodes ascending.
#[derive(Debug, Clone, Serialize)]
pub struct BandRule {
    pub lo: f64,
    pub hi: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Construction of an [`EquilibriumQuadrature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QuadratureKind {
    /// `order` midpoint nodes per band in the angle `θ` of `t = c + r cos θ`.
    /// Spectral for integrands smooth up to the band edges.
    GaussChebyshev { order: usize },
    /// Graded composite Gauss-Legendre in `θ` with each panel split
    /// `subdivisions` times, and end caps exact for `A log θ + B + C θ^2`.
    /// Meant for integrands with logarithmic singularities at band edges,
    /// such as `log f`.
    EdgeCorrected { subdivisions: usize },
}

/// Quadrature for integration against the equilibrium measure.
///
/// On each band `t = c + r cos θ`; the inverse square root of the density at
/// the band edges cancels against `dt = -r sin θ dθ`.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumQuadrature {
    kind: QuadratureKind,
    bands: Vec<BandRule>,
}

/// Width of the end caps in `θ`, relative to the first chart panel.
const CAP_FRACTION: f64 = 1e-3;

/// Weights at `θ = h, h/2, h/4` integrating `log θ`, `1` and `θ^2` exactly over `[0, h]`.
fn cap_weights(h: f64) -> [(f64, f64); 3] {
    let th = [h, 0.5 * h, 0.25 * h];
    let v = Matrix3::from_fn(|i, j| match i {
        0 => th[j].ln(),
        1 => 1.0,
        _ => th[j] * th[j],
    });
    let m = Vector3::new(h * (h.ln() - 1.0), h, h * h * h / 3.0);
    let c = v.lu().solve(&m).expect("cap system is regular");
    [(th[0], c[0]), (th[1], c[1]), (th[2], c[2])]
}

impl EquilibriumQuadrature {
    pub(crate) fn build(edges: &[f64], roots: &[f64], order: usize) -> Self {
        let bands = (0..edges.len() / 2)
            .map(|k| {
                let (lo, hi) = (edges[2 * k], edges[2 * k + 1]);
                let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let mut pts: Vec<(f64, f64)> = chebyshev_angles(order)
                    .map(|th| {
                        let t = c + r * th.cos();
                        (t, kernel(edges, roots, t, Skip::band(k)).abs() / order as f64)
                    })
                    .collect();
                pts.reverse();
                let (nodes, weights) = pts.into_iter().unzip();
                BandRule { lo, hi, nodes, weights }
            })
            .collect();
        EquilibriumQuadrature {
            kind: QuadratureKind::GaussChebyshev { order },
            bands,
        }
    }

    pub(crate) fn build_edge_corrected(edges: &[f64], roots: &[f64], subdivisions: usize) -> Self {
        let subdivisions = subdivisions.max(1);
        let bands = (0..edges.len() / 2)
            .map(|k| {
                let chart = BandChart::new(edges, k);
                let (lo, hi) = (edges[2 * k], edges[2 * k + 1]);
                let nb = chart.breaks.len();
                let h0 = CAP_FRACTION * (chart.breaks[1] - chart.breaks[0]).min(1.0);
                let h1 = CAP_FRACTION * (chart.breaks[nb - 1] - chart.breaks[nb - 2]).min(1.0);
                let mut br: Vec<f64> = graded_breaks(h0, PI - h1, h0, h1);
                br.extend(chart.breaks.iter().copied().filter(|&x| x > h0 && x < PI - h1));
                br.sort_by(f64::total_cmp);
                br.dedup();
                let mut fine = Vec::with_capacity(br.len() * subdivisions);
                for w in br.windows(2) {
                    for i in 0..subdivisions {
                        fine.push(w[0] + (w[1] - w[0]) * i as f64 / subdivisions as f64);
                    }
                }
                fine.push(PI - h1);
                let mut ang = composite_rule(&fine, h0, PI - h1);
                ang.extend(cap_weights(h0));
                ang.extend(cap_weights(h1).iter().map(|&(th, w)| (PI - th, w)));
                let mut pts: Vec<(f64, f64)> = ang
                    .into_iter()
                    .map(|(th, w)| {
                        let t = chart.point(th);
                        (t, w * kernel(edges, roots, t, Skip::band(k)).abs() / PI)
                    })
                    .collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let (nodes, weights) = pts.into_iter().unzip();
                BandRule { lo, hi, nodes, weights }
            })
            .collect();
        EquilibriumQuadrature {
            kind: QuadratureKind::EdgeCorrected { subdivisions },
            bands,
        }
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    /// Midpoint nodes per band for the Gauss-Chebyshev kind, panel
    /// subdivisions for the edge-corrected kind.
    pub fn order(&self) -> usize {
        match self.kind {
            QuadratureKind::GaussChebyshev { order } => order,
            QuadratureKind::EdgeCorrected { subdivisions } => subdivisions,
        }
    }

    pub fn bands(&self) -> &[BandRule] {
        &self.bands
    }

    /// All `(node, weight)` pairs, band by band.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.bands
            .iter()
            .flat_map(|b| b.nodes.iter().copied().zip(b.weights.iter().copied()))
    }

    pub fn len(&self) -> usize {
        self.bands.iter().map(|b| b.nodes.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> f64 {
        self.iter().map(|(_, w)| w).sum()
    }

    /// `∫ f dμ_E`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(t, w)| w * f(t)).sum()
    }
}

/// `∫ dν(s) / (s - (t + i0))` for a measure given band by band through its
/// angular density `dν = density(k, θ) dθ` in the chart of band `k`.
///
/// The containing band uses `PV ∫ dθ / (cos θ - cos φ) = 0` on `[0, π]` to
/// subtract the singularity, leaving a smooth remainder.
pub(crate) fn stieltjes_boundary<D>(model: &GreenModel, t: f64, density: D) -> Result<Complex64>
where
    D: Fn(usize, f64) -> f64,
{
    let own = match model.set().locate(t)? {
        Location::InBand(k) => k,
        Location::Edge(_) => {
            return Err(Error::Domain(format!("boundary value requested at band edge {t}")))
        }
        _ => {
            return Err(Error::Domain(format!(
                "{t} is not inside a band; use the real-valued transform off the set"
            )))
        }
    };
    let mut re = 0.0;
    for k in 0..model.set().band_count() {
        let chart = model.band_chart(k);
        if k == own {
            continue;
        }
        re += integrate_breaks(&chart.breaks, 0.0, PI, |th| {
            density(k, th) / (chart.point(th) - t)
        });
    }
    let chart: BandChart = model.band_chart(own);
    let phi = chart.angle(t);
    let h_phi = density(own, phi);
    let cphi = phi.cos();
    let mut breaks = graded_breaks(0.0, PI, 0.5 * phi, 0.5 * (PI - phi));
    breaks.extend_from_slice(&chart.breaks);
    breaks.push(phi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let remainder = |th: f64| {
        let d = th.cos() - cphi;
        if d == 0.0 {
            0.0
        } else {
            (density(own, th) - h_phi) / d
        }
    };
    re += (integrate_breaks(&breaks, 0.0, phi, remainder)
        + integrate_breaks(&breaks, phi, PI, remainder))
        / chart.half;
    let im = PI * h_phi / (chart.half * phi.sin());
    Ok(Complex64::new(re, im))
}

/// `∫ dν(s) / (s - x)` for real `x` off the set, `ν` as in [`stieltjes_boundary`].
pub(crate) fn stieltjes_off_set<D>(model: &GreenModel, x: f64, density: D) -> Result<f64>
where
    D: Fn(usize, f64) -> f64,
{
    if model.set().locate(x)?.is_on_set() {
        return Err(Error::Domain(format!("{x} lies on the set")));
    }
    let mut v = 0.0;
    for k in 0..model.set().band_count() {
        let chart = model.band_chart(k);
        // grade toward the band end nearest x
        let dist_hi = (x - (chart.mid + chart.half)).abs();
        let dist_lo = (x - (chart.mid - chart.half)).abs();
        let br = graded_breaks(
            0.0,
            PI,
            angular_scale(dist_hi, chart.half),
            angular_scale(dist_lo, chart.half),
        );
        let merged = merge_breaks(&chart.breaks, &br);
        v += integrate_breaks(&merged, 0.0, PI, |th| density(k, th) / (chart.point(th) - x));
    }
    Ok(v)
}

fn merge_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

impl GreenModel {
    /// Angular density of `μ_E` in the chart of band `k`.
    pub(crate) fn equilibrium_angular_density(&self, k: usize, theta: f64) -> f64 {
        let chart = self.band_chart(k);
        self.kernel(chart.point(theta), Skip::band(k)).abs() / PI
    }

    /// `m_E(t + i0) = PV ∫ f_E(s) / (s - t) ds + i π f_E(t)` for `t` strictly inside a band.
    pub fn equilibrium_m_boundary(&self, t: f64) -> Result<Complex64> {
        stieltjes_boundary(self, t, |k, th| self.equilibrium_angular_density(k, th))
    }
}

#[cfg(test)]
mod tests {
    use crate::potential::solve_green;
    use crate::realset::GapSet;
    use std::f64::consts::PI;

    #[test]
    fn arcsine_moments() {
        let m = solve_green(&GapSet::interval(-2.0, 2.0).unwrap(), 64).unwrap();
        let q = m.equilibrium_quadrature(64).unwrap();
        assert!((q.total_weight() - 1.0).abs() < 1e-14);
        assert!((q.integrate(|t| t * t) - 2.0).abs() < 1e-13);
        assert!(q.integrate(|t| t).abs() < 1e-14);
        assert_eq!(q.len(), 64);
    }

    #[test]
    fn edge_corrected_log_integrals() {
        let m = solve_green(&GapSet::interval(-2.0, 2.0).unwrap(), 64).unwrap();
        let q = m.edge_corrected_quadrature(1).unwrap();
        assert!((q.total_weight() - 1.0).abs() < 1e-13);
        // ∫ log(4 - t^2) dμ_E = 0 and ∫ log f_E dμ_E = -log π
        let v = q.integrate(|t| (4.0 - t * t).ln());
        assert!(v.abs() < 1e-10, "{v}");
        let v = q.integrate(|t| m.equilibrium_density(t).unwrap().ln());
        assert!((v + PI.ln()).abs() < 1e-10, "{v}");
        let two = solve_green(&GapSet::new(-2.0, 2.0, vec![(-1.0, 1.0)]).unwrap(), 64).unwrap();
        let q = two.edge_corrected_quadrature(2).unwrap();
        let v = q.integrate(|t| two.equilibrium_density(t).unwrap().ln());
        let want = two.pw_sum() - PI.ln() - two.capacity().ln();
        assert!((v - want).abs() < 1e-9, "{v} vs {want}");
    }

    #[test]
    fn arcsine_boundary_values() {
        let m = solve_green(&GapSet::interval(-2.0, 2.0).unwrap(), 64).unwrap();
        for &t in &[0.0, 1.0, -1.7, 1.99] {
            let z = m.equilibrium_m_boundary(t).unwrap();
            let want = 1.0 / (4.0 - t * t).sqrt();
            assert!(z.re.abs() < 1e-12, "t={t} re={}", z.re);
            assert!((z.im - want).abs() < 1e-12 * want.max(1.0), "t={t}");
        }
        assert!(m.equilibrium_m_boundary(2.0).is_err());
        assert!(m.equilibrium_m_boundary(3.0).is_err());
    }
}
