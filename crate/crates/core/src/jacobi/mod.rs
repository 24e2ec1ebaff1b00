//! Jacobi matrices: recurrence coefficients, stripping and gluing, Sturm
//! eigenvalues and the m-function.
//!
//! Coefficients are numbered from 1 in the math and from 0 in storage, so
//! `a[k]` is `a_{k+1}`. The matrix has `b_1, b_2, ...` on the diagonal and
//! `a_1, a_2, ...` beside it.

mod eigen;
mod interlace;
mod lanczos;
mod measure;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{
    eigenvalue_green_sum, gap_eigenvalues, stable_gap_eigenvalues, sturm_count,
    truncation_eigenvalues, GapEigenvalue, STABILITY_TOL,
};
pub use interlace::{interlacing_profile, InterlacingProfile, PolePair};
pub use lanczos::{
    coefficient_doubling_error, coefficients_from_measure, equilibrium_coefficients, lanczos,
};
pub use measure::{MeasureModel, MeasureSpec, PointMass, Weight, WeightMode};

/// What lies beyond the stored coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tail {
    /// All further coefficients vanish; the operator is finite.
    Truncate,
    /// The last `period` stored pairs repeat forever.
    Periodic { period: usize },
    /// The equilibrium tail of `[alpha, beta]`: `a = (beta - alpha) / 4`, `b = (alpha + beta) / 2`.
    Interval { alpha: f64, beta: f64 },
}

/// Recurrence coefficients with a tail policy.
///
/// `a` has the same length as `b` or one less (the last off-diagonal entry of
/// a finite matrix is not needed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoeffs")]
pub struct JacobiCoeffs {
    a: Vec<f64>,
    b: Vec<f64>,
    tail: Tail,
}

#[derive(Deserialize)]
struct RawCoeffs {
    a: Vec<f64>,
    b: Vec<f64>,
    #[serde(default = "truncate")]
    tail: Tail,
}

fn truncate() -> Tail {
    Tail::Truncate
}

impl TryFrom<RawCoeffs> for JacobiCoeffs {
    type Error = Error;

    fn try_from(raw: RawCoeffs) -> Result<Self> {
        JacobiCoeffs::new(raw.a, raw.b, raw.tail)
    }
}

impl JacobiCoeffs {
    pub fn new(a: Vec<f64>, b: Vec<f64>, tail: Tail) -> Result<Self> {
        if a.len() != b.len() && a.len() + 1 != b.len() {
            return Err(Error::InvalidInput(format!(
                "{} off-diagonal entries for {} diagonal entries",
                a.len(),
                b.len()
            )));
        }
        if let Some((k, &x)) = a.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidInput(format!("a_{} = {x} is not positive and finite", k + 1)));
        }
        if let Some((k, &x)) = b.iter().enumerate().find(|(_, &x)| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("b_{} = {x} is not finite", k + 1)));
        }
        match tail {
            Tail::Truncate => {}
            Tail::Periodic { period } => {
                if period == 0 || period > b.len() || a.len() != b.len() {
                    return Err(Error::InvalidInput(format!(
                        "periodic tail of period {period} needs at least that many complete (a, b) pairs"
                    )));
                }
            }
            Tail::Interval { alpha, beta } => {
                if !(alpha < beta && alpha.is_finite() && beta.is_finite()) || a.len() != b.len() {
                    return Err(Error::InvalidInput(
                        "interval tail needs alpha < beta and a complete last (a, b) pair".into(),
                    ));
                }
            }
        }
        Ok(JacobiCoeffs { a, b, tail })
    }

    /// Finite matrix with the given entries.
    pub fn finite(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::new(a, b, Tail::Truncate)
    }

    /// Coefficients of the equilibrium measure of `[alpha, beta]`:
    /// `a_1 = sqrt(2) s`, then `a = s`, with `s = (beta - alpha) / 4`.
    pub fn interval_equilibrium(alpha: f64, beta: f64) -> Result<Self> {
        let s = 0.25 * (beta - alpha);
        let c = 0.5 * (alpha + beta);
        Self::new(
            vec![std::f64::consts::SQRT_2 * s],
            vec![c],
            Tail::Interval { alpha, beta },
        )
    }

    /// Free Jacobi matrix, `a = 1`, `b = 0`, with `b_1` replaced.
    pub fn free_with_b1(b1: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![b1], Tail::Interval { alpha: -2.0, beta: 2.0 })
    }

    /// Number of stored diagonal entries.
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Largest truncation size available, `None` for an infinite tail.
    pub fn max_size(&self) -> Option<usize> {
        match self.tail {
            Tail::Truncate => Some(self.b.len()),
            _ => None,
        }
    }

    /// `a_{k+1}`, following the tail past the stored entries.
    pub fn a_at(&self, k: usize) -> Option<f64> {
        if k < self.a.len() {
            return Some(self.a[k]);
        }
        match self.tail {
            Tail::Truncate => None,
            Tail::Periodic { period } => {
                let n = self.b.len();
                Some(self.a[n - period + (k - n) % period])
            }
            Tail::Interval { alpha, beta } => Some(0.25 * (beta - alpha)),
        }
    }

    /// `b_{k+1}`, following the tail past the stored entries.
    pub fn b_at(&self, k: usize) -> Option<f64> {
        if k < self.b.len() {
            return Some(self.b[k]);
        }
        match self.tail {
            Tail::Truncate => None,
            Tail::Periodic { period } => {
                let n = self.b.len();
                Some(self.b[n - period + (k - n) % period])
            }
            Tail::Interval { alpha, beta } => Some(0.5 * (alpha + beta)),
        }
    }

    /// Diagonal and off-diagonal of the `n x n` truncation.
    pub fn truncation(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if let Some(max) = self.max_size() {
            if n > max {
                return Err(Error::InvalidInput(format!(
                    "truncation size {n} exceeds the {max} stored coefficients"
                )));
            }
        }
        let d = (0..n).map(|k| self.b_at(k).expect("checked size")).collect();
        let e = (0..n.saturating_sub(1))
            .map(|k| self.a_at(k).expect("checked size"))
            .collect();
        Ok((d, e))
    }

    /// Materializes the first `n` pairs, keeping the tail policy.
    fn extended(&self, n: usize) -> JacobiCoeffs {
        if n <= self.b.len() || self.tail == Tail::Truncate {
            return self.clone();
        }
        let a = (0..n).map(|k| self.a_at(k).unwrap()).collect();
        let b = (0..n).map(|k| self.b_at(k).unwrap()).collect();
        JacobiCoeffs { a, b, tail: self.tail }
    }

    /// JSON exchange format.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// CSV with header `n,a_n,b_n`; a missing last `a_n` is left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a_n,b_n\n");
        for k in 0..self.b.len() {
            let a = self.a.get(k).map(|x| format!("{x:.17e}")).unwrap_or_default();
            out.push_str(&format!("{},{},{:.17e}\n", k + 1, a, self.b[k]));
        }
        out
    }

    /// Reads the CSV written by [`to_csv`](Self::to_csv); the tail is truncation.
    pub fn from_csv(s: &str) -> Result<Self> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with('n')) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::InvalidInput(format!("line {}: expected 3 columns", i + 1)));
            }
            let parse = |c: &str| {
                c.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("line {}: bad number {c:?}", i + 1)))
            };
            if cols[0].parse::<usize>().ok() != Some(b.len() + 1) {
                return Err(Error::InvalidInput(format!("line {}: rows must be numbered 1, 2, ...", i + 1)));
            }
            if !cols[1].is_empty() {
                if a.len() != b.len() {
                    return Err(Error::InvalidInput(format!("line {}: a_n after a missing entry", i + 1)));
                }
                a.push(parse(cols[1])?);
            }
            b.push(parse(cols[2])?);
        }
        Self::new(a, b, Tail::Truncate)
    }
}

/// Drops the first `k` pairs.
pub fn strip(j: &JacobiCoeffs, k: usize) -> Result<JacobiCoeffs> {
    if k >= j.len() && j.tail == Tail::Truncate {
        return Err(Error::InvalidInput(format!(
            "cannot strip {k} of {} coefficients",
            j.len()
        )));
    }
    // keep at least one full period stored after stripping
    let need = match j.tail {
        Tail::Truncate => j.len(),
        Tail::Periodic { period } => (k + period).max(j.len()),
        Tail::Interval { .. } => (k + 1).max(j.len()),
    };
    let full = j.extended(need);
    let a = full.a.get(k..).map(<[f64]>::to_vec).unwrap_or_default();
    Ok(JacobiCoeffs {
        a,
        b: full.b[k..].to_vec(),
        tail: full.tail,
    })
}

/// `b_1..b_n` and `a_1..a_{n-1}` of `head`, then `junction_a` as `a_n`, then `tail`.
pub fn glue_head(head: &JacobiCoeffs, junction_a: f64, tail: &JacobiCoeffs) -> Result<JacobiCoeffs> {
    if !(junction_a > 0.0 && junction_a.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "junction coefficient {junction_a} must be positive"
        )));
    }
    let n = head.len();
    if n == 0 {
        return Ok(tail.clone());
    }
    let mut a: Vec<f64> = head.a[..n - 1].to_vec();
    a.push(junction_a);
    a.extend_from_slice(&tail.a);
    let mut b = head.b.clone();
    b.extend_from_slice(&tail.b);
    JacobiCoeffs::new(a, b, tail.tail)
}

/// `1 / (b - x - a^2 m)`, one level of the continued fraction.
#[inline]
fn level(a: f64, b: f64, x: Complex64, m: Complex64) -> Complex64 {
    (Complex64::new(b, 0.0) - x - a * a * m).inv()
}

/// Attracting fixed point of `m -> (p m + q) / (r m + s)`.
fn mobius_fixed_point(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> Complex64 {
    if r.norm() == 0.0 {
        return q / (s - p);
    }
    let disc = ((s - p) * (s - p) + 4.0 * q * r).sqrt();
    let m1 = (p - s + disc) / (2.0 * r);
    let m2 = (p - s - disc) / (2.0 * r);
    // |derivative| = |ps - qr| / |r m + s|^2
    let g1 = (r * m1 + s).norm();
    let g2 = (r * m2 + s).norm();
    if (g1 - g2).abs() <= 1e-12 * g1.max(g2) {
        if m1.im >= m2.im {
            m1
        } else {
            m2
        }
    } else if g1 > g2 {
        m1
    } else {
        m2
    }
}

/// m-function of the operator whose coefficients start at storage index `from`
/// and continue with the tail (only valid for infinite tails, `from >= len`).
fn tail_m(j: &JacobiCoeffs, from: usize, x: Complex64) -> Complex64 {
    match j.tail {
        Tail::Truncate => Complex64::new(0.0, 0.0),
        Tail::Interval { alpha, beta } => {
            let s = 0.25 * (beta - alpha);
            let c = 0.5 * (alpha + beta);
            // m = 1 / (c - x - s^2 m)
            mobius_fixed_point(
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-s * s, 0.0),
                Complex64::new(c, 0.0) - x,
            )
        }
        Tail::Periodic { period } => {
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let (mut p, mut q, mut r, mut s) = (one, zero, zero, one);
            for k in from..from + period {
                let a = j.a_at(k).unwrap();
                let b = j.b_at(k).unwrap();
                // [[p, q], [r, s]] * [[0, 1], [-a^2, b - x]]
                let (np, nq) = (q * (-a * a), p + q * (Complex64::new(b, 0.0) - x));
                let (nr, ns) = (s * (-a * a), r + s * (Complex64::new(b, 0.0) - x));
                p = np;
                q = nq;
                r = nr;
                s = ns;
            }
            mobius_fixed_point(p, q, r, s)
        }
    }
}

/// `m(x) = <δ_1, (J - x)^{-1} δ_1>` by the continued fraction from the bottom.
///
/// With the truncation tail this is the m-function of the `depth x depth`
/// corner. With an infinite tail the stored coefficients are all used (and at
/// least `depth` levels), then the tail's own m-function closes the fraction.
pub fn m_function(j: &JacobiCoeffs, x: Complex64, depth: usize) -> Result<Complex64> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let (levels, seed) = match j.tail {
        Tail::Truncate => {
            if depth > j.len() {
                return Err(Error::InvalidInput(format!(
                    "depth {depth} exceeds the {} stored coefficients",
                    j.len()
                )));
            }
            (depth, Complex64::new(0.0, 0.0))
        }
        Tail::Periodic { period } => {
            let levels = depth.max(j.len());
            // align so the periodic block starts right after `levels`
            let n = j.len();
            let levels = n + (levels - n).div_ceil(period) * period;
            (levels, tail_m(j, levels, x))
        }
        Tail::Interval { .. } => {
            let levels = depth.max(j.len());
            (levels, tail_m(j, levels, x))
        }
    };
    let mut m = seed;
    for k in (0..levels).rev() {
        let a = if k + 1 < levels || j.tail != Tail::Truncate {
            j.a_at(k).unwrap_or(0.0)
        } else {
            0.0
        };
        m = level(a, j.b_at(k).unwrap(), x, m);
        if !m.re.is_finite() || !m.im.is_finite() {
            return Err(Error::Domain(format!("x = {x} is a pole of the m-function")));
        }
    }
    Ok(m)
}

/// Real-valued m-function of the `n x n` truncation; poles give `±inf`.
pub(crate) fn m_real_truncated(d: &[f64], e: &[f64], x: f64) -> f64 {
    let mut m = 0.0;
    for k in (0..d.len()).rev() {
        let a2 = if k < e.len() { e[k] * e[k] } else { 0.0 };
        m = 1.0 / (d[k] - x - a2 * m);
    }
    m
}

/// One stripping step on the boundary: `m_1 = (b_1 - t - 1/m) / a_1^2` and `f_1 = Im m_1 / π`.
pub fn stripped_boundary_density(m_boundary: Complex64, a1: f64, b1: f64, t: f64) -> Result<(Complex64, f64)> {
    if !(m_boundary.im > 0.0) {
        return Err(Error::Domain(format!(
            "stripping needs Im m(t + i0) > 0 at t = {t}, got {m_boundary}"
        )));
    }
    if !(a1 > 0.0) {
        return Err(Error::InvalidInput(format!("a_1 = {a1} must be positive")));
    }
    let m1 = (Complex64::new(b1 - t, 0.0) - m_boundary.inv()) / (a1 * a1);
    Ok((m1, m1.im / std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn strip_and_glue() {
        let j = JacobiCoeffs::finite(vec![SQRT_2, 1.0, 1.0], vec![0.0, 0.0, 0.0]).unwrap();
        let s = strip(&j, 1).unwrap();
        assert_eq!(s.a(), &[1.0, 1.0]);
        assert_eq!(s.b(), &[0.0, 0.0]);
        assert_eq!(strip(&j, 0).unwrap(), j);
        assert_eq!(strip(&strip(&j, 1).unwrap(), 1).unwrap(), strip(&j, 2).unwrap());
        assert!(strip(&j, 3).is_err());

        let tail = JacobiCoeffs::interval_equilibrium(-2.0, 2.0).unwrap();
        let head = JacobiCoeffs::finite(vec![0.5, 0.7], vec![0.1, 0.2, 0.3]).unwrap();
        let g = glue_head(&head, 0.9, &tail).unwrap();
        assert_eq!(g.a(), &[0.5, 0.7, 0.9, SQRT_2]);
        assert_eq!(strip(&g, 3).unwrap(), tail);
        let empty = JacobiCoeffs::finite(vec![], vec![]).unwrap();
        assert_eq!(glue_head(&empty, 1.0, &tail).unwrap(), tail);
        assert!(glue_head(&head, 0.0, &tail).is_err());
    }

    #[test]
    fn tails_extend() {
        let p = JacobiCoeffs::new(vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0], Tail::Periodic { period: 2 }).unwrap();
        let got: Vec<f64> = (0..7).map(|k| p.a_at(k).unwrap()).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0, 2.0, 3.0, 2.0, 3.0]);
        let s = strip(&p, 5).unwrap();
        assert_eq!(s.a_at(0), p.a_at(5));
        assert_eq!(s.b_at(3), p.b_at(8));
    }

    #[test]
    fn free_m_closed_form() {
        let free = JacobiCoeffs::new(vec![1.0], vec![0.0], Tail::Interval { alpha: -2.0, beta: 2.0 }).unwrap();
        let m = m_function(&free, c(3.0, 0.0), 1).unwrap();
        assert!((m.re - (-3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14 && m.im == 0.0);
        let m = m_function(&free, c(0.0, 1.0), 1).unwrap();
        assert!(m.re.abs() < 1e-14 && (m.im - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);
        // periodic of period 1 agrees with the interval tail
        let per = JacobiCoeffs::new(vec![1.0], vec![0.0], Tail::Periodic { period: 1 }).unwrap();
        for z in [c(0.3, 0.2), c(-2.5, 0.0), c(1.0, 1e-9)] {
            let d = m_function(&per, z, 1).unwrap() - m_function(&free, z, 1).unwrap();
            assert!(d.norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn finite_m_is_resolvent() {
        // a = (1), b = (0, 0): m = -x / (x^2 - 1)
        let j = JacobiCoeffs::finite(vec![1.0], vec![0.0, 0.0]).unwrap();
        let x = c(0.3, 0.4);
        let want = -x / (x * x - 1.0);
        assert!((m_function(&j, x, 2).unwrap() - want).norm() < 1e-15);
        assert!(m_function(&j, c(1.0, 0.0), 2).is_err());
        assert!(m_function(&j, x, 3).is_err());
    }

    #[test]
    fn boundary_stripping_examples() {
        let (m1, f1) = stripped_boundary_density(c(0.0, 0.5), SQRT_2, 0.0, 0.0).unwrap();
        assert!((m1 - c(0.0, 1.0)).norm() < 1e-15);
        assert!((f1 - 1.0 / PI).abs() < 1e-15);
        let (_, f1) = stripped_boundary_density(c(0.0, 1.0 / 3f64.sqrt()), SQRT_2, 0.0, 1.0).unwrap();
        assert!((f1 - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-15);
        assert!(stripped_boundary_density(c(0.4, 0.0), 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let j = JacobiCoeffs::finite(vec![SQRT_2, 1.0], vec![0.0, 0.25, -1.0]).unwrap();
        assert_eq!(JacobiCoeffs::from_csv(&j.to_csv()).unwrap(), j);
        let back = JacobiCoeffs::from_json(&j.to_json().unwrap()).unwrap();
        assert_eq!(back, j);
        assert!(JacobiCoeffs::from_json(r#"{"a":[-1],"b":[0]}"#).is_err());
    }
}
