//! Model measures `dμ = f(t) dt + Σ mass_k δ_{x_k}` on a gap set.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{stieltjes_boundary, stieltjes_off_set, EquilibriumQuadrature, GreenModel};
use crate::quadrature::chebyshev_angles;
use crate::realset::{GapSet, Location};

/// A nonnegative weight factor `w(t)`, built from named forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Weight {
    Constant { value: f64 },
    /// Polynomial with coefficients in ascending order.
    Polynomial { coeffs: Vec<f64> },
    Rational { num: Vec<f64>, den: Vec<f64> },
    /// `exp(num(t) / den(t))`.
    ExpRational { num: Vec<f64>, den: Vec<f64> },
    /// 1 on the union of the closed intervals, 0 elsewhere.
    Indicator { intervals: Vec<(f64, f64)> },
    /// `|t - center|^exponent`.
    AbsPower { center: f64, exponent: f64 },
    /// `|p(t)|^exponent`, `p` in ascending coefficients.
    AbsPolyPower { coeffs: Vec<f64>, exponent: f64 },
    /// `exp(-scale / |t - center|)`, which vanishes to infinite order at `center`.
    ExpInvDistance { center: f64, scale: f64 },
    Product { factors: Vec<Weight> },
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

impl Weight {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Weight::Constant { value } => *value,
            Weight::Polynomial { coeffs } => horner(coeffs, t),
            Weight::Rational { num, den } => horner(num, t) / horner(den, t),
            Weight::ExpRational { num, den } => (horner(num, t) / horner(den, t)).exp(),
            Weight::Indicator { intervals } => {
                if intervals.iter().any(|&(a, b)| t >= a && t <= b) {
                    1.0
                } else {
                    0.0
                }
            }
            Weight::AbsPower { center, exponent } => (t - center).abs().powf(*exponent),
            Weight::AbsPolyPower { coeffs, exponent } => horner(coeffs, t).abs().powf(*exponent),
            Weight::ExpInvDistance { center, scale } => {
                let d = (t - center).abs();
                if d == 0.0 {
                    0.0
                } else {
                    (-scale / d).exp()
                }
            }
            Weight::Product { factors } => factors.iter().map(|f| f.eval(t)).product(),
        }
    }
}

/// How `w` turns into the density `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// `f = w f_E`.
    #[default]
    Relative,
    /// `f = w`.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub x: f64,
    pub mass: f64,
}

/// Serializable description of a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    /// Optional set reference; must agree with the model the measure is built on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<GapSet>,
    pub weight: Weight,
    #[serde(default)]
    pub mode: WeightMode,
    #[serde(default)]
    pub point_masses: Vec<PointMass>,
}

impl MeasureSpec {
    /// The equilibrium measure itself.
    pub fn equilibrium() -> Self {
        MeasureSpec {
            set: None,
            weight: Weight::Constant { value: 1.0 },
            mode: WeightMode::Relative,
            point_masses: Vec::new(),
        }
    }
}

/// A normalized measure on a solved gap set.
#[derive(Debug, Clone)]
pub struct MeasureModel {
    spec: MeasureSpec,
    green: GreenModel,
    normalization: f64,
}

impl MeasureModel {
    pub fn new(green: &GreenModel, spec: MeasureSpec) -> Result<Self> {
        if let Some(set) = &spec.set {
            if set != green.set() {
                return Err(Error::InvalidInput(
                    "measure refers to a different set than the model".into(),
                ));
            }
        }
        let mut xs: Vec<f64> = Vec::with_capacity(spec.point_masses.len());
        for pm in &spec.point_masses {
            if !(pm.mass > 0.0 && pm.mass.is_finite()) {
                return Err(Error::InvalidInput(format!("point mass at {} has mass {}", pm.x, pm.mass)));
            }
            if green.set().locate(pm.x)?.is_on_set() {
                return Err(Error::InvalidInput(format!(
                    "point mass at {} lies on the set",
                    pm.x
                )));
            }
            if xs.contains(&pm.x) {
                return Err(Error::InvalidInput(format!("two point masses at {}", pm.x)));
            }
            xs.push(pm.x);
        }
        let mut model = MeasureModel {
            spec,
            green: green.clone(),
            normalization: 1.0,
        };
        let ac: f64 = model.raw_ac_rule(green.quad_order())?.iter().map(|&(_, w)| w).sum();
        let total = ac + model.spec.point_masses.iter().map(|p| p.mass).sum::<f64>();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidInput(format!("total mass {total} is not positive")));
        }
        model.normalization = 1.0 / total;
        Ok(model)
    }

    /// The equilibrium measure of the model's set.
    pub fn equilibrium(green: &GreenModel) -> Self {
        MeasureModel {
            spec: MeasureSpec::equilibrium(),
            green: green.clone(),
            normalization: 1.0,
        }
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    pub fn green(&self) -> &GreenModel {
        &self.green
    }

    pub fn set(&self) -> &GapSet {
        self.green.set()
    }

    /// Factor applied to `w` and to the masses so the total mass is 1.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Point masses after normalization.
    pub fn point_masses(&self) -> Vec<PointMass> {
        self.spec
            .point_masses
            .iter()
            .map(|p| PointMass {
                x: p.x,
                mass: p.mass * self.normalization,
            })
            .collect()
    }

    pub fn is_equilibrium(&self) -> bool {
        self.spec.mode == WeightMode::Relative
            && self.spec.weight == (Weight::Constant { value: 1.0 })
            && self.spec.point_masses.is_empty()
    }

    /// SHA-256 of the measure description together with the set.
    pub fn content_hash(&self) -> String {
        crate::hash_json(&(self.green.set(), &self.spec))
    }

    /// Unnormalized a.c. rule: `order` nodes per band with weights `w · (dμ_E or dt)`.
    fn raw_ac_rule(&self, order: usize) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        match self.spec.mode {
            WeightMode::Relative => {
                let q: EquilibriumQuadrature = self.green.equilibrium_quadrature(order)?;
                for (t, w) in q.iter() {
                    out.push((t, w * self.checked_weight(t)?));
                }
            }
            WeightMode::Absolute => {
                if order < 16 {
                    return Err(Error::InvalidInput(format!("quadrature order {order} below 16")));
                }
                for (lo, hi) in self.green.set().bands() {
                    let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                    for th in chebyshev_angles(order) {
                        let t = c + r * th.cos();
                        let dt = r * th.sin() * PI / order as f64;
                        out.push((t, dt * self.checked_weight(t)?));
                    }
                }
            }
        }
        Ok(out)
    }

    fn checked_weight(&self, t: f64) -> Result<f64> {
        let w = self.spec.weight.eval(t);
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidInput(format!("weight is {w} at t = {t}")));
        }
        Ok(w)
    }

    /// Normalized discretization: a.c. nodes with `order` per band, then the atoms.
    pub fn discretize(&self, order: usize) -> Result<Vec<(f64, f64)>> {
        let mut out: Vec<(f64, f64)> = self
            .raw_ac_rule(order)?
            .into_iter()
            .map(|(t, w)| (t, w * self.normalization))
            .collect();
        out.extend(self.point_masses().iter().map(|p| (p.x, p.mass)));
        Ok(out)
    }

    /// Whether the measure has an absolutely continuous part at all.
    pub fn has_ac_part(&self) -> bool {
        self.spec.weight != (Weight::Constant { value: 0.0 })
    }

    /// Normalized density `f(t)` at a band-interior point.
    pub fn density(&self, t: f64) -> Result<f64> {
        let w = self.checked_weight(t)? * self.normalization;
        match self.spec.mode {
            WeightMode::Relative => Ok(w * self.green.equilibrium_density(t)?),
            WeightMode::Absolute => match self.green.set().locate(t)? {
                Location::InBand(_) => Ok(w),
                _ => Err(Error::Domain(format!("{t} is not inside a band"))),
            },
        }
    }

    /// `log(f(t) / f_E(t))` at a band-interior point.
    pub fn log_ratio_to_equilibrium(&self, t: f64) -> Result<f64> {
        let w = self.checked_weight(t)? * self.normalization;
        Ok(match self.spec.mode {
            WeightMode::Relative => w.ln(),
            WeightMode::Absolute => w.ln() - self.green.equilibrium_density(t)?.ln(),
        })
    }

    /// Angular density `f(t(θ)) |dt/dθ|` in the chart of band `k`.
    fn angular_density(&self, k: usize, theta: f64) -> f64 {
        let chart = self.green.band_chart(k);
        let t = chart.point(theta);
        let w = self.spec.weight.eval(t) * self.normalization;
        match self.spec.mode {
            WeightMode::Relative => w * self.green.equilibrium_angular_density(k, theta),
            WeightMode::Absolute => w * chart.half * theta.sin(),
        }
    }

    /// `m_μ(t + i0)` at a band-interior point.
    pub fn m_boundary(&self, t: f64) -> Result<Complex64> {
        let ac = stieltjes_boundary(&self.green, t, |k, th| self.angular_density(k, th))?;
        let atoms: f64 = self.point_masses().iter().map(|p| p.mass / (p.x - t)).sum();
        Ok(ac + atoms)
    }

    /// Real `m_μ(x)` for `x` off the set and away from the atoms.
    pub fn m_real(&self, x: f64) -> Result<f64> {
        let pms = self.point_masses();
        if pms.iter().any(|p| p.x == x) {
            return Err(Error::Domain(format!("{x} is a point mass")));
        }
        let ac = stieltjes_off_set(&self.green, x, |k, th| self.angular_density(k, th))?;
        Ok(ac + pms.iter().map(|p| p.mass / (p.x - x)).sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::solve_green;

    fn semicircle_spec() -> MeasureSpec {
        MeasureSpec {
            set: None,
            weight: Weight::AbsPolyPower {
                coeffs: vec![4.0, 0.0, -1.0],
                exponent: 0.5,
            },
            mode: WeightMode::Absolute,
            point_masses: vec![],
        }
    }

    #[test]
    fn normalization_and_density() {
        let g = solve_green(&GapSet::interval(-2.0, 2.0).unwrap(), 200).unwrap();
        let mu = MeasureModel::new(&g, semicircle_spec()).unwrap();
        // ∫ sqrt(4 - t^2) dt = 2π
        assert!((mu.normalization() - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((mu.density(1.0).unwrap() - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-12);
        let total: f64 = mu.discretize(100).unwrap().iter().map(|p| p.1).sum();
        assert!((total - 1.0).abs() < 1e-10);
        // semicircle m(t + i0) = (-t + i sqrt(4 - t^2)) / 2
        let m = mu.m_boundary(0.6).unwrap();
        assert!((m - Complex64::new(-0.3, 0.5 * (4.0f64 - 0.36).sqrt())).norm() < 1e-10, "{m}");
        let x = 3.0;
        assert!((mu.m_real(x).unwrap() - (-x + (x * x - 4.0f64).sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_validation() {
        let g = solve_green(&GapSet::interval(-1.0, 1.0).unwrap(), 64).unwrap();
        let mut spec = MeasureSpec::equilibrium();
        spec.point_masses = vec![PointMass { x: 0.5, mass: 1.0 }];
        assert!(MeasureModel::new(&g, spec.clone()).is_err());
        spec.point_masses = vec![PointMass { x: 2.0, mass: 1.0 }, PointMass { x: 2.0, mass: 1.0 }];
        assert!(MeasureModel::new(&g, spec.clone()).is_err());
        spec.point_masses = vec![PointMass { x: 2.0, mass: 1.0 }];
        let mu = MeasureModel::new(&g, spec).unwrap();
        assert!((mu.normalization() - 0.5).abs() < 1e-12);
        assert!((mu.point_masses()[0].mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weight_forms() {
        let w: Weight = serde_json::from_str(
            r#"{"form":"product","factors":[{"form":"polynomial","coeffs":[1,2]},{"form":"indicator","intervals":[[0,1]]}]}"#,
        )
        .unwrap();
        assert_eq!(w.eval(0.5), 2.0);
        assert_eq!(w.eval(1.5), 0.0);
        let e = Weight::ExpInvDistance { center: 0.0, scale: 1.0 };
        assert_eq!(e.eval(0.0), 0.0);
        assert!((e.eval(0.5) - (-2.0f64).exp()).abs() < 1e-16);
    }
}
