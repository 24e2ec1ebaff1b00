//! Quadrature building blocks shared by the potential and Jacobi modules.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// Nodes per panel for composite Gauss-Legendre integration.
pub const PANEL_NODES: usize = 24;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("nonzero");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

fn panel_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Integrates `f` over `[a, b]` with one Gauss-Legendre panel.
pub fn gl_panel<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    panel_rule().iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Breakpoints on `[a, b]` refined geometrically toward both ends.
///
/// The first panel at each end has width `left` (resp. `right`), and widths
/// double moving inward. Use this when the integrand has complex
/// singularities at distance about `left` from `a` (resp. `right` from `b`).
pub fn graded_breaks(a: f64, b: f64, left: f64, right: f64) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = mid - a;
    let mut lo = vec![a];
    let mut w = left.min(half).max(half * 1e-12);
    let mut x = a + w;
    while x < mid - 0.25 * w {
        lo.push(x);
        w *= 2.0;
        x += w;
    }
    let mut hi = vec![b];
    let mut w = right.min(half).max(half * 1e-12);
    let mut x = b - w;
    while x > mid + 0.25 * w {
        hi.push(x);
        w *= 2.0;
        x -= w;
    }
    lo.push(mid);
    lo.extend(hi.into_iter().rev());
    lo
}

/// Composite Gauss-Legendre over `[lo, hi]`, using the panels of `breaks`
/// clipped to that range.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(breaks: &[f64], lo: f64, hi: f64, mut f: F) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
    pts.push(hi);
    pts.windows(2).map(|w| gl_panel(w[0], w[1], &mut f)).sum()
}

/// Nodes and weights of the composite rule that [`integrate_breaks`] applies.
pub fn composite_rule(breaks: &[f64], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    if hi <= lo {
        return Vec::new();
    }
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
    pts.push(hi);
    let rule = panel_rule();
    let mut out = Vec::with_capacity(rule.len() * (pts.len() - 1));
    for w in pts.windows(2) {
        let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        out.extend(rule.iter().map(|&(x, wt)| (c + h * x, wt * h)));
    }
    out
}

/// Midpoint angles `(2i - 1) pi / (2n)` of the Gauss-Chebyshev rule.
pub fn chebyshev_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (2 * i + 1) as f64 * PI / (2 * n) as f64)
}

/// Clenshaw evaluation of `sum_k c_k T_k(u)`.
pub fn chebyshev_eval(coeffs: &[f64], u: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    u * b1 - b2 + coeffs.first().copied().unwrap_or(0.0)
}

/// Coefficients of the derivative of a Chebyshev series.
pub fn chebyshev_derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * coeffs[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Chebyshev coefficients of the degree-`n` interpolant of `f` on `[-1, 1]`
/// through the `n + 1` Chebyshev points of the first kind.
pub fn chebyshev_interpolate<F: Fn(f64) -> f64>(n: usize, f: F) -> Vec<f64> {
    let m = n + 1;
    let angles: Vec<f64> = chebyshev_angles(m).collect();
    let values: Vec<f64> = angles.iter().map(|&th| f(th.cos())).collect();
    (0..m)
        .map(|k| {
            let s: f64 = angles
                .iter()
                .zip(&values)
                .map(|(&th, &v)| v * (k as f64 * th).cos())
                .sum();
            if k == 0 {
                s / m as f64
            } else {
                2.0 * s / m as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_panels_integrate_sqrt_singularity() {
        // ∫_0^1 sqrt(x) dx; singular derivative at 0 handled by grading
        let br = graded_breaks(0.0, 1.0, 1e-6, 0.5);
        let v = integrate_breaks(&br, 0.0, 1.0, |x| x.sqrt());
        assert!((v - 2.0 / 3.0).abs() < 1e-10, "{v}");
        let part = integrate_breaks(&br, 0.25, 1.0, |x| x);
        assert!((part - 0.46875).abs() < 1e-14);
    }

    #[test]
    fn breaks_are_increasing() {
        for &(l, r) in &[(1e-3, 1e-3), (10.0, 10.0), (1e-9, 0.3)] {
            let br = graded_breaks(0.0, std::f64::consts::PI, l, r);
            assert!(br.windows(2).all(|w| w[0] < w[1]), "{br:?}");
            assert_eq!(br[0], 0.0);
            assert_eq!(*br.last().unwrap(), std::f64::consts::PI);
        }
    }

    #[test]
    fn chebyshev_roundtrip() {
        // T_3 = 4u^3 - 3u
        let c = chebyshev_interpolate(3, |u| 4.0 * u * u * u - 3.0 * u);
        assert!((c[3] - 1.0).abs() < 1e-14);
        assert!(c[..3].iter().all(|x| x.abs() < 1e-14));
        let d = chebyshev_derivative(&c);
        // T_3' = 12u^2 - 3 = 6 T_2 + 3 T_0
        assert!((chebyshev_eval(&d, 0.3) - (12.0 * 0.09 - 3.0)).abs() < 1e-13);
        assert!((chebyshev_eval(&c, 0.7) - (4.0 * 0.343 - 2.1)).abs() < 1e-14);
    }
}
