//! Poles and zeros of a truncated m-function off the set.

use serde::Serialize;

use super::{eigen::off_set_eigenvalues, m_real_truncated, JacobiCoeffs};
use crate::error::Result;
use crate::jacobi::truncation_eigenvalues;
use crate::potential::GreenModel;
use crate::realset::Location;

/// One factor `(x - y) / (x - pole)` of the interlacing product.
///
/// `pole` is an eigenvalue, or a gap's left edge when the m-function starts
/// the gap negative (`from_edge`). `zero` is the first zero to the right, cut
/// off at the end of the component; it is `+inf` when the pole lies above the
/// set with no zero after it, and such a pair contributes no factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolePair {
    pub pole: f64,
    pub zero: f64,
    pub from_edge: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterlacingProfile {
    pub poles: Vec<f64>,
    pub zeros: Vec<f64>,
    pub pairs: Vec<PolePair>,
}

impl InterlacingProfile {
    /// `ψ(x) = Π (x - y_k) / (x - x_k)` over the finite pairs.
    pub fn psi(&self, x: f64) -> f64 {
        self.pairs
            .iter()
            .filter(|p| p.zero.is_finite())
            .map(|p| (x - p.zero) / (x - p.pole))
            .product()
    }
}

/// Zero of the truncated m-function between consecutive eigenvalues `lo < hi`.
fn zero_between(d: &[f64], e: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m_real_truncated(d, e, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Poles and zeros of the `n x n` truncation's m-function in `R \ E`, paired.
pub fn interlacing_profile(j: &JacobiCoeffs, model: &GreenModel, n: usize) -> Result<InterlacingProfile> {
    let (d, e) = j.truncation(n)?;
    let poles: Vec<f64> = off_set_eigenvalues(&d, &e, model).iter().map(|g| g.value).collect();
    let all = truncation_eigenvalues(j, n)?;
    let set = model.set();
    let mut zeros = Vec::new();
    for w in all.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if let (Ok(Location::InBand(p)), Ok(Location::InBand(q))) = (set.locate(lo), set.locate(hi)) {
            if p == q {
                continue;
            }
        }
        if hi > lo {
            let z = zero_between(&d, &e, lo, hi);
            if let Ok(loc) = set.locate(z) {
                if !loc.is_on_set() {
                    zeros.push(z);
                }
            }
        }
    }

    let edges = model.edges();
    let last = edges.len() - 1;
    let mut comps = vec![(f64::NEG_INFINITY, edges[0])];
    for g in 0..model.gap_count() {
        comps.push((edges[2 * g + 1], edges[2 * g + 2]));
    }
    comps.push((edges[last], f64::INFINITY));

    let mut pairs = Vec::new();
    for (lo, hi) in comps {
        let inside = |x: &&f64| **x > lo && **x < hi;
        let ps: Vec<f64> = poles.iter().filter(inside).copied().collect();
        let zs: Vec<f64> = zeros.iter().filter(inside).copied().collect();
        let mut zi = 0;
        // a zero ahead of every pole means m < 0 just right of the left end
        if let Some(&z) = zs.first() {
            if ps.first().map_or(true, |&p| z < p) {
                pairs.push(PolePair { pole: lo, zero: z, from_edge: true });
                zi = 1;
            }
        }
        for &p in &ps {
            while zi < zs.len() && zs[zi] < p {
                zi += 1;
            }
            let zero = if zi < zs.len() {
                zi += 1;
                zs[zi - 1]
            } else {
                hi
            };
            pairs.push(PolePair { pole: p, zero, from_edge: false });
        }
    }
    Ok(InterlacingProfile { poles, zeros, pairs })
}
