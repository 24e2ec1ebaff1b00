//! Finite-gap compact subsets of the real line.
//!
//! A [`GapSet`] is a closed interval `[alpha, beta]` with finitely many open
//! gaps removed. Its complement in the interval is a union of closed bands of
//! positive length, so the set has no isolated points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest fat Cantor level accepted by [`fat_cantor`].
pub const MAX_CANTOR_LEVEL: u32 = 16;

/// `[alpha, beta]` minus finitely many disjoint open gaps, sorted by left endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGapSet")]
pub struct GapSet {
    alpha: f64,
    beta: f64,
    gaps: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawGapSet {
    alpha: f64,
    beta: f64,
    #[serde(default)]
    gaps: Vec<(f64, f64)>,
}

impl TryFrom<RawGapSet> for GapSet {
    type Error = Error;

    fn try_from(raw: RawGapSet) -> Result<Self> {
        GapSet::new(raw.alpha, raw.beta, raw.gaps)
    }
}

/// Where a real number sits relative to a [`GapSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum Location {
    /// Interior of band `k` (bands numbered left to right from 0).
    InBand(usize),
    /// Band edge `e_k` in the sorted edge list `e_0 = alpha < ... < e_{2N+1} = beta`.
    Edge(usize),
    /// Open gap `j`.
    InGap(usize),
    LeftOfSet,
    RightOfSet,
}

impl Location {
    /// Band interiors and edges both belong to the set.
    pub fn is_on_set(self) -> bool {
        matches!(self, Location::InBand(_) | Location::Edge(_))
    }
}

impl GapSet {
    /// Validates and sorts the gaps. Gaps may be given in any order.
    pub fn new(alpha: f64, beta: f64, mut gaps: Vec<(f64, f64)>) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::set("endpoints must be finite", None));
        }
        if alpha >= beta {
            return Err(Error::set(
                format!("alpha = {alpha} must be smaller than beta = {beta}"),
                None,
            ));
        }
        for &(a, b) in &gaps {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::set("gap endpoints must be finite", Some((a, b))));
            }
            if a >= b {
                return Err(Error::set("empty gap", Some((a, b))));
            }
            if a < alpha || b > beta {
                return Err(Error::set("gap outside (alpha, beta)", Some((a, b))));
            }
            if a == alpha || b == beta {
                return Err(Error::set(
                    "gap touches the outer endpoint (zero-length band)",
                    Some((a, b)),
                ));
            }
        }
        gaps.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in gaps.windows(2) {
            let (prev, next) = (w[0], w[1]);
            if prev.1 > next.0 {
                return Err(Error::set(
                    format!("overlapping gaps ({}, {}) and ({}, {})", prev.0, prev.1, next.0, next.1),
                    Some(next),
                ));
            }
            if prev.1 == next.0 {
                return Err(Error::set(
                    format!(
                        "gap ({}, {}) touches the closure of gap ({}, {}) (zero-length band)",
                        next.0, next.1, prev.0, prev.1
                    ),
                    Some(next),
                ));
            }
        }
        Ok(GapSet { alpha, beta, gaps })
    }

    /// The single band `[alpha, beta]`.
    pub fn interval(alpha: f64, beta: f64) -> Result<Self> {
        GapSet::new(alpha, beta, Vec::new())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gaps(&self) -> &[(f64, f64)] {
        &self.gaps
    }

    pub fn gap_count(&self) -> usize {
        self.gaps.len()
    }

    pub fn band_count(&self) -> usize {
        self.gaps.len() + 1
    }

    pub fn diam(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Sorted band edges `e_0 = alpha, e_1 = alpha_1, e_2 = beta_1, ..., e_{2N+1} = beta`.
    pub fn edges(&self) -> Vec<f64> {
        let mut edges = Vec::with_capacity(2 * self.gaps.len() + 2);
        edges.push(self.alpha);
        for &(a, b) in &self.gaps {
            edges.push(a);
            edges.push(b);
        }
        edges.push(self.beta);
        edges
    }

    /// Closed bands, left to right.
    pub fn bands(&self) -> Vec<(f64, f64)> {
        self.edges().chunks(2).map(|c| (c[0], c[1])).collect()
    }

    /// Image of the set under `x -> scale * x + shift` (`scale > 0`).
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidInput(format!(
                "affine map needs a finite positive scale, got {scale}"
            )));
        }
        GapSet::new(
            scale * self.alpha + shift,
            scale * self.beta + shift,
            self.gaps
                .iter()
                .map(|&(a, b)| (scale * a + shift, scale * b + shift))
                .collect(),
        )
    }

    /// Classifies `x`; band edges are reported as [`Location::Edge`].
    pub fn locate(&self, x: f64) -> Result<Location> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("cannot locate non-finite point {x}")));
        }
        let edges = self.edges();
        if x < self.alpha {
            return Ok(Location::LeftOfSet);
        }
        if x > self.beta {
            return Ok(Location::RightOfSet);
        }
        // number of edges <= x
        let k = edges.partition_point(|&e| e <= x);
        if edges[k - 1] == x {
            return Ok(Location::Edge(k - 1));
        }
        // edges[k-1] < x < edges[k]; odd k means inside band (k-1)/2
        if k % 2 == 1 {
            Ok(Location::InBand((k - 1) / 2))
        } else {
            Ok(Location::InGap(k / 2 - 1))
        }
    }

    /// Lebesgue measure of `(lo, hi) ∩ E` by exact interval intersection.
    pub fn intersection_length(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.bands()
            .iter()
            .map(|&(a, b)| (hi.min(b) - lo.max(a)).max(0.0))
            .sum()
    }

    /// Stable content hash of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        crate::hash_json(self)
    }
}

/// Level-`level` approximant of the fat Cantor set in `[0, 1]`: at step `n` an
/// open interval of length `4^-n` is removed from the middle of each of the
/// `2^(n-1)` remaining bands.
pub fn fat_cantor(level: u32) -> Result<GapSet> {
    if level > MAX_CANTOR_LEVEL {
        return Err(Error::ResourceLimit(format!(
            "fat Cantor level {level} exceeds the maximum {MAX_CANTOR_LEVEL} (2^{level} - 1 gaps)"
        )));
    }
    let mut bands = vec![(0.0_f64, 1.0_f64)];
    let mut gaps = Vec::with_capacity((1usize << level) - 1);
    for n in 1..=level {
        let half = 0.5 * 0.25_f64.powi(n as i32);
        let mut next = Vec::with_capacity(2 * bands.len());
        for &(a, b) in &bands {
            let mid = 0.5 * (a + b);
            gaps.push((mid - half, mid + half));
            next.push((a, mid - half));
            next.push((mid + half, b));
        }
        bands = next;
    }
    GapSet::new(0.0, 1.0, gaps)
}

/// Sum of band lengths.
pub fn lebesgue_measure(set: &GapSet) -> f64 {
    set.bands().iter().map(|&(a, b)| b - a).sum()
}

/// Deterministic sample points on the set: every band edge plus `t_samples`
/// uniform subintervals per band (so `t_samples + 1` points per band).
pub fn homogeneity_samples(set: &GapSet, t_samples: usize) -> Vec<f64> {
    let m = t_samples.max(1);
    let mut out = Vec::new();
    for (a, b) in set.bands() {
        for k in 0..=m {
            out.push(a + ((b - a) * k as f64) / m as f64);
        }
    }
    out
}

/// Minimum of `|(t - δ, t + δ) ∩ E| / δ` over the deterministic sample grid
/// from [`homogeneity_samples`] and the supplied radii.
pub fn homogeneity_margin(set: &GapSet, t_samples: usize, delta_grid: &[f64]) -> Result<f64> {
    if delta_grid.is_empty() {
        return Err(Error::InvalidInput("empty delta grid".into()));
    }
    let diam = set.diam();
    if let Some(&d) = delta_grid.iter().find(|&&d| !(d > 0.0 && d < diam)) {
        return Err(Error::InvalidInput(format!(
            "delta {d} outside (0, diam) = (0, {diam})"
        )));
    }
    let samples = homogeneity_samples(set, t_samples);
    let mut margin = f64::INFINITY;
    for &t in &samples {
        for &d in delta_grid {
            margin = margin.min(set.intersection_length(t - d, t + d) / d);
        }
    }
    Ok(margin)
}

/// Geometric radius grid `diam * 0.9 * ratio^k`, `k = 0..count`.
pub fn geometric_deltas(set: &GapSet, count: usize, ratio: f64) -> Vec<f64> {
    let mut d = 0.9 * set.diam();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(d);
        d *= ratio;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_gap_interval() {
        let s = GapSet::new(-2.0, 2.0, vec![]).unwrap();
        assert_eq!(s.bands(), vec![(-2.0, 2.0)]);
        assert_eq!(lebesgue_measure(&s), 4.0);
    }

    #[test]
    fn middle_quarter_removed() {
        let s = GapSet::new(0.0, 1.0, vec![(0.375, 0.625)]).unwrap();
        assert_eq!(s.bands(), vec![(0.0, 0.375), (0.625, 1.0)]);
    }

    #[test]
    fn gaps_sorted_on_construction() {
        let s = GapSet::new(0.0, 10.0, vec![(5.0, 6.0), (1.0, 2.0)]).unwrap();
        assert_eq!(s.gaps(), &[(1.0, 2.0), (5.0, 6.0)]);
    }

    #[test]
    fn rejects_overlap_and_touching() {
        let err = GapSet::new(0.0, 1.0, vec![(0.2, 0.5), (0.4, 0.7)]).unwrap_err();
        assert!(err.to_string().contains("overlapping"), "{err}");
        match err {
            Error::InvalidSet { interval, .. } => assert_eq!(interval, Some((0.4, 0.7))),
            e => panic!("unexpected {e}"),
        }
        let err = GapSet::new(0.0, 1.0, vec![(0.2, 0.5), (0.5, 0.7)]).unwrap_err();
        assert!(err.to_string().contains("touches"), "{err}");
        assert!(GapSet::new(0.0, 1.0, vec![(0.0, 0.5)]).is_err());
        assert!(GapSet::new(0.0, 1.0, vec![(0.5, 1.5)]).is_err());
        assert!(GapSet::new(1.0, 1.0, vec![]).is_err());
        assert!(GapSet::new(0.0, f64::NAN, vec![]).is_err());
    }

    #[test]
    fn cantor_levels() {
        assert!(fat_cantor(0).unwrap().gaps().is_empty());
        assert_eq!(fat_cantor(1).unwrap().gaps(), &[(0.375, 0.625)]);
        let l2 = fat_cantor(2).unwrap();
        assert_eq!(l2.gap_count(), 3);
        let removed: f64 = l2.gaps().iter().map(|g| g.1 - g.0).sum();
        assert_eq!(removed, 0.375);
        assert!(matches!(fat_cantor(17), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn locate_classifies() {
        let s = GapSet::new(0.0, 1.0, vec![(0.375, 0.625)]).unwrap();
        assert_eq!(s.locate(0.5).unwrap(), Location::InGap(0));
        assert_eq!(s.locate(0.375).unwrap(), Location::Edge(1));
        assert!(s.locate(0.375).unwrap().is_on_set());
        assert_eq!(s.locate(0.1).unwrap(), Location::InBand(0));
        assert_eq!(s.locate(0.9).unwrap(), Location::InBand(1));
        assert_eq!(s.locate(1.0).unwrap(), Location::Edge(3));
        assert_eq!(s.locate(-1.0).unwrap(), Location::LeftOfSet);
        assert_eq!(s.locate(2.0).unwrap(), Location::RightOfSet);
        assert!(s.locate(f64::INFINITY).is_err());
    }

    #[test]
    fn homogeneity_examples() {
        let unit = GapSet::interval(0.0, 1.0).unwrap();
        let m = homogeneity_margin(&unit, 8, &[0.9, 0.5, 0.1, 0.01]).unwrap();
        assert!((m - 1.0).abs() < 1e-12, "{m}");

        let two = GapSet::new(0.0, 1.0, vec![(0.1, 0.9)]).unwrap();
        assert!((two.intersection_length(0.1 - 0.8, 0.1 + 0.8) / 0.8 - 0.125).abs() < 1e-15);

        assert!(homogeneity_margin(&unit, 8, &[]).is_err());
        assert!(homogeneity_margin(&unit, 8, &[1.5]).is_err());
    }

    #[test]
    fn json_form_validates() {
        let s: GapSet = serde_json::from_str(r#"{"alpha":0,"beta":1,"gaps":[[0.375,0.625]]}"#).unwrap();
        assert_eq!(s.gap_count(), 1);
        let bad: std::result::Result<GapSet, _> =
            serde_json::from_str(r#"{"alpha":0,"beta":1,"gaps":[[0.2,0.5],[0.4,0.7]]}"#);
        assert!(bad.is_err());
        let back: GapSet = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
