//! Eigenvalues of tridiagonal truncations by Sturm sequences.

use serde::Serialize;

use super::JacobiCoeffs;
use crate::error::{Error, Result};
use crate::potential::GreenModel;
use crate::realset::Location;

/// Agreement required between truncation sizes for a gap eigenvalue to count as stable.
pub const STABILITY_TOL: f64 = 1e-8;

/// Number of eigenvalues strictly below `x` of the tridiagonal matrix with
/// diagonal `d` and off-diagonal `e`.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE * e.iter().fold(1.0_f64, |m, v| m.max(v * v));
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        q = if i == 0 {
            d[0] - x
        } else {
            d[i] - x - e[i - 1] * e[i - 1] / q
        };
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < e.len() { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let pad = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    (lo - pad, hi + pad)
}

/// Eigenvalue of index `k` (0-based, ascending) bracketed in `[lo, hi]`, which
/// must satisfy `count(lo) <= k < count(hi)`.
fn bisect_eigenvalue(d: &[f64], e: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn eigenvalues_of(d: &[f64], e: &[f64]) -> Vec<f64> {
    if d.len() <= 1 {
        return d.to_vec();
    }
    let (lo, hi) = gershgorin(d, e);
    (0..d.len()).map(|k| bisect_eigenvalue(d, e, k, lo, hi)).collect()
}

/// All eigenvalues of the `n x n` truncation, ascending.
pub fn truncation_eigenvalues(j: &JacobiCoeffs, n: usize) -> Result<Vec<f64>> {
    let (d, e) = j.truncation(n)?;
    Ok(eigenvalues_of(&d, &e))
}

/// An eigenvalue outside the set and the component of `R \ E` holding it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEigenvalue {
    pub value: f64,
    pub location: Location,
}

/// Eigenvalues of the `d, e` tridiagonal that lie off the set, by component.
pub(crate) fn off_set_eigenvalues(d: &[f64], e: &[f64], model: &GreenModel) -> Vec<GapEigenvalue> {
    if d.is_empty() {
        return Vec::new();
    }
    let (glo, ghi) = gershgorin(d, e);
    let edges = model.edges();
    let last = edges.len() - 1;
    // components of R \ E as (lo, hi)
    let mut comps = vec![(glo.min(edges[0]), edges[0])];
    for j in 0..model.gap_count() {
        comps.push((edges[2 * j + 1], edges[2 * j + 2]));
    }
    comps.push((edges[last], ghi.max(edges[last])));
    let mut out = Vec::new();
    for (lo, hi) in comps {
        let c_lo = sturm_count(d, e, lo);
        let c_hi = sturm_count(d, e, hi);
        for k in c_lo..c_hi {
            let v = bisect_eigenvalue(d, e, k, lo, hi);
            match model.set().locate(v) {
                Ok(loc) if !loc.is_on_set() => out.push(GapEigenvalue { value: v, location: loc }),
                _ => {}
            }
        }
    }
    out
}

/// Eigenvalues of the `n x n` truncation in `R \ E`, counted exactly per component.
pub fn gap_eigenvalues(j: &JacobiCoeffs, model: &GreenModel, n: usize) -> Result<Vec<GapEigenvalue>> {
    let (d, e) = j.truncation(n)?;
    Ok(off_set_eigenvalues(&d, &e, model))
}

/// Gap eigenvalues present, to within `tol`, at every truncation size `n`,
/// `n + 1`, `2n` and `2n + 1`.
///
/// Eigenvalues produced by cutting the matrix move or vanish as the size
/// changes; each accepted value is taken from the largest size and its
/// multiplicity is the smallest over the four sizes.
pub fn stable_gap_eigenvalues(
    j: &JacobiCoeffs,
    model: &GreenModel,
    n: usize,
    tol: f64,
) -> Result<Vec<GapEigenvalue>> {
    if n == 0 {
        return Err(Error::InvalidInput("base size must be at least 1".into()));
    }
    let sizes = [2 * n + 1, 2 * n, n + 1, n];
    let lists: Vec<Vec<GapEigenvalue>> = sizes
        .iter()
        .map(|&s| gap_eigenvalues(j, model, s))
        .collect::<Result<_>>()?;
    let mut used: Vec<Vec<bool>> = lists.iter().map(|l| vec![false; l.len()]).collect();
    let mut out = Vec::new();
    for cand in &lists[0] {
        let mut picks = Vec::with_capacity(3);
        for (li, list) in lists.iter().enumerate().skip(1) {
            let best = list
                .iter()
                .enumerate()
                .filter(|(i, g)| !used[li][*i] && (g.value - cand.value).abs() <= tol)
                .min_by(|x, y| {
                    (x.1.value - cand.value)
                        .abs()
                        .total_cmp(&(y.1.value - cand.value).abs())
                });
            match best {
                Some((i, _)) => picks.push((li, i)),
                None => break,
            }
        }
        if picks.len() == 3 {
            for (li, i) in picks {
                used[li][i] = true;
            }
            out.push(*cand);
        }
    }
    Ok(out)
}

/// `Σ g(x_k)` over points off the set.
pub fn eigenvalue_green_sum(eigs: &[f64], model: &GreenModel) -> Result<f64> {
    let mut s = 0.0;
    for &x in eigs {
        if model.set().locate(x)?.is_on_set() {
            return Err(Error::Domain(format!(
                "{x} lies on the set and is not an eigenvalue outside it"
            )));
        }
        s += model.green_value(x);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{JacobiCoeffs, Tail};
    use crate::potential::solve_green;
    use crate::realset::GapSet;

    #[test]
    fn small_spectra() {
        let j = JacobiCoeffs::finite(vec![1.0, 1.0], vec![0.0, 0.0, 0.0]).unwrap();
        let ev = truncation_eigenvalues(&j, 3).unwrap();
        let s2 = 2f64.sqrt();
        for (x, y) in ev.iter().zip([-s2, 0.0, s2]) {
            assert!((x - y).abs() < 1e-13);
        }
        assert_eq!(truncation_eigenvalues(&j, 1).unwrap(), vec![0.0]);
        let j = JacobiCoeffs::finite(vec![1.0], vec![0.0, 0.0]).unwrap();
        let ev = truncation_eigenvalues(&j, 2).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!(truncation_eigenvalues(&j, 3).is_err());
    }

    #[test]
    fn perturbed_free_bound_state() {
        let g = solve_green(&GapSet::interval(-2.0, 2.0).unwrap(), 64).unwrap();
        let j = JacobiCoeffs::free_with_b1(2.5).unwrap();
        let ev = gap_eigenvalues(&j, &g, 200).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].value - 2.9).abs() < 1e-6);
        assert_eq!(ev[0].location, Location::RightOfSet);
        let st = stable_gap_eigenvalues(&j, &g, 100, STABILITY_TOL).unwrap();
        assert_eq!(st.len(), 1);
        let sum = eigenvalue_green_sum(&[st[0].value], &g).unwrap();
        assert!((sum - 2.5f64.ln()).abs() < 1e-9);
        assert!((eigenvalue_green_sum(&[2.9, -2.9], &g).unwrap() - 2.0 * 2.5f64.ln()).abs() < 1e-9);
        assert_eq!(eigenvalue_green_sum(&[], &g).unwrap(), 0.0);
        assert!(eigenvalue_green_sum(&[1.0], &g).is_err());

        let one = JacobiCoeffs::new(vec![], vec![3.0], Tail::Truncate).unwrap();
        let ev = gap_eigenvalues(&one, &g, 1).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].value - 3.0).abs() < 1e-14);
        let eq = JacobiCoeffs::interval_equilibrium(-2.0, 2.0).unwrap();
        assert!(gap_eigenvalues(&eq, &g, 300).unwrap().is_empty());
    }
}
