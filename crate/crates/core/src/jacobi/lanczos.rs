//! Recurrence coefficients of a discrete measure by Lanczos iteration.

use super::{measure::MeasureModel, JacobiCoeffs, Tail};
use crate::error::{Error, Result};
use crate::potential::GreenModel;

/// First `n` pairs `(a_k, b_k)` of the discrete measure `Σ w_i δ_{x_i}`.
///
/// Runs Lanczos on `diag(x)` from the start vector `sqrt(w)`, with every new
/// vector orthogonalized twice against all previous ones.
pub fn lanczos(nodes: &[f64], weights: &[f64], n: usize) -> Result<JacobiCoeffs> {
    if nodes.len() != weights.len() {
        return Err(Error::InvalidInput("nodes and weights differ in length".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let (x, w): (Vec<f64>, Vec<f64>) = nodes
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&x, &w)| (x, w))
        .unzip();
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
    }
    if x.len() <= n {
        return Err(Error::InvalidInput(format!(
            "degenerate measure: {} support points cannot carry {n} coefficient pairs",
            x.len()
        )));
    }
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let total: f64 = w.iter().sum();
    let mut q: Vec<f64> = w.iter().map(|&wi| (wi / total).sqrt()).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for k in 0..n {
        let mut v: Vec<f64> = x.iter().zip(&q).map(|(xi, qi)| xi * qi).collect();
        if let Some((ap, qp)) = &prev {
            v.iter_mut().zip(qp).for_each(|(vi, pi)| *vi -= ap * pi);
        }
        let bk: f64 = v.iter().zip(&q).map(|(vi, qi)| vi * qi).sum();
        v.iter_mut().zip(&q).for_each(|(vi, qi)| *vi -= bk * qi);
        basis.push(q.clone());
        for _ in 0..2 {
            for u in &basis {
                let c: f64 = v.iter().zip(u).map(|(vi, ui)| vi * ui).sum();
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= c * ui);
            }
        }
        let ak = v.iter().map(|vi| vi * vi).sum::<f64>().sqrt();
        b.push(bk);
        if !(ak > 1e-13 * scale) {
            return Err(Error::Breakdown(format!(
                "a_{} = {ak:e} is not positive; raise quad_order or reduce n",
                k + 1
            )));
        }
        a.push(ak);
        v.iter_mut().for_each(|vi| *vi /= ak);
        prev = Some((ak, std::mem::replace(&mut q, v)));
    }
    JacobiCoeffs::new(a, b, Tail::Truncate)
}

/// `n` coefficient pairs of `mu`, discretized with `quad_order` nodes per band.
pub fn coefficients_from_measure(mu: &MeasureModel, n: usize, quad_order: usize) -> Result<JacobiCoeffs> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let pts = mu.discretize(quad_order)?;
    let support = pts.iter().filter(|p| p.1 > 0.0).count();
    if mu.has_ac_part() && support < 4 * n {
        return Err(Error::InvalidInput(format!(
            "discretization has {support} support points, fewer than 4n = {}; raise quad_order",
            4 * n
        )));
    }
    let (x, w): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    lanczos(&x, &w, n)
}

/// Recurrence coefficients of the equilibrium measure of the model's set.
///
/// Closed form with the exact interval tail when there are no gaps, otherwise
/// `n` pairs by Lanczos with at least `2n` nodes per band (truncation tail).
pub fn equilibrium_coefficients(model: &GreenModel, n: usize) -> Result<JacobiCoeffs> {
    let set = model.set();
    if set.gap_count() == 0 {
        return JacobiCoeffs::interval_equilibrium(set.alpha(), set.beta());
    }
    let per_band = (4 * n).div_ceil(set.band_count());
    let order = model.quad_order().max(2 * n).max(per_band + 16);
    coefficients_from_measure(&MeasureModel::equilibrium(model), n, order)
}

/// Largest change in any coefficient when `quad_order` is doubled.
pub fn coefficient_doubling_error(mu: &MeasureModel, n: usize, quad_order: usize) -> Result<f64> {
    let c1 = coefficients_from_measure(mu, n, quad_order)?;
    let c2 = coefficients_from_measure(mu, n, 2 * quad_order)?;
    let da = c1.a().iter().zip(c2.a()).map(|(x, y)| (x - y).abs());
    let db = c1.b().iter().zip(c2.b()).map(|(x, y)| (x - y).abs());
    Ok(da.chain(db).fold(0.0, f64::max))
}
