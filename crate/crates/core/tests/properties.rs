use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

use potlab::jacobi::{
    coefficients_from_measure, equilibrium_coefficients, lanczos, m_function, stable_gap_eigenvalues,
    strip, sturm_count, truncation_eigenvalues, STABILITY_TOL,
};
use potlab::realset::{geometric_deltas, homogeneity_margin, lebesgue_measure};
use potlab::{solve_green, GapSet, JacobiCoeffs, MeasureModel};

/// `[-2, 2]` with one or two gaps in the interior.
fn small_set() -> impl Strategy<Value = GapSet> {
    (-1.6..-0.2f64, 0.1..0.8f64, prop::bool::ANY, 0.4..1.5f64).prop_map(|(l, w, two, r)| {
        let mut gaps = vec![(l, l + w)];
        let start = (l + w + 0.1).max(r);
        if two && start + 0.2 < 1.9 {
            gaps.push((start, start + 0.2));
        }
        GapSet::new(-2.0, 2.0, gaps).unwrap()
    })
}

fn finite_jacobi(max: usize) -> impl Strategy<Value = JacobiCoeffs> {
    (1..max).prop_flat_map(|n| {
        (prop::collection::vec(0.2..2.0f64, n - 1), prop::collection::vec(-2.0..2.0f64, n))
            .prop_map(|(a, b)| JacobiCoeffs::finite(a, b).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn affine_covariance(set in small_set(), scale in 0.2..5.0f64, shift in -3.0..3.0f64, x in 2.1..4.0f64) {
        let g = solve_green(&set, 96).unwrap();
        let h = solve_green(&set.affine(scale, shift).unwrap(), 96).unwrap();
        prop_assert!((h.capacity() - scale * g.capacity()).abs() < 1e-9 * scale);
        prop_assert!((h.green_value(scale * x + shift) - g.green_value(x)).abs() < 1e-8);
        prop_assert!((h.pw_sum() - g.pw_sum()).abs() < 1e-8);
    }

    #[test]
    fn removing_a_gap_shrinks_capacity(set in small_set(), x in 2.05..3.0f64) {
        let g = solve_green(&set, 96).unwrap();
        let mut gaps = set.gaps().to_vec();
        gaps.pop();
        let bigger = GapSet::new(set.alpha(), set.beta(), gaps).unwrap();
        let gb = solve_green(&bigger, 96).unwrap();
        prop_assert!(g.capacity() < gb.capacity());
        prop_assert!(g.green_value(x) > gb.green_value(x));
    }
}

proptest! {
    #[test]
    fn lengths_add_up(set in small_set()) {
        let gaps: f64 = set.gaps().iter().map(|(a, b)| b - a).sum();
        prop_assert!((lebesgue_measure(&set) + gaps - set.diam()).abs() < 1e-14);
    }

    #[test]
    fn homogeneity_refines_downward(set in small_set(), m in 1usize..20, k in 1usize..12) {
        let deltas = geometric_deltas(&set, k, 0.5);
        let coarse = homogeneity_margin(&set, m, &deltas).unwrap();
        let fine = homogeneity_margin(&set, 2 * m, &deltas).unwrap();
        prop_assert!(fine <= coarse);
        let more = geometric_deltas(&set, k + 3, 0.5);
        prop_assert!(homogeneity_margin(&set, m, &more).unwrap() <= coarse);
        prop_assert!(coarse > 0.0 && coarse <= 2.0);
    }

    #[test]
    fn m_function_symmetry_and_decay(j in finite_jacobi(12), re in -3.0..3.0f64, im in 0.05..3.0f64) {
        let n = j.len();
        let z = Complex64::new(re, im);
        let m = m_function(&j, z, n).unwrap();
        let mc = m_function(&j, z.conj(), n).unwrap();
        prop_assert!((mc - m.conj()).norm() < 1e-12 * (1.0 + m.norm()));
        prop_assert!(m.im > 0.0);
        let big = Complex64::new(re * 1e4, 1e4);
        let tail = big * m_function(&j, big, n).unwrap() + 1.0;
        prop_assert!(tail.norm() < 1e-3);
    }

    #[test]
    fn stripping_acts_by_moebius(j in finite_jacobi(12), re in -3.0..3.0f64, im in 0.05..3.0f64) {
        prop_assume!(j.len() >= 2);
        let n = j.len();
        let z = Complex64::new(re, im);
        let m = m_function(&j, z, n).unwrap();
        let m1 = m_function(&strip(&j, 1).unwrap(), z, n - 1).unwrap();
        let (a1, b1) = (j.a()[0], j.b()[0]);
        let rebuilt = 1.0 / (b1 - z - a1 * a1 * m1);
        prop_assert!((rebuilt - m).norm() < 1e-10 * (1.0 + m.norm()));
    }

    #[test]
    fn sturm_counts_match_dense_eigenvalues(j in finite_jacobi(50), x in -4.0..4.0f64) {
        let n = j.len();
        let (d, e) = j.truncation(n).unwrap();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
        for (i, &v) in e.iter().enumerate() {
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        let mut dense: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        let below = dense.iter().filter(|&&v| v < x - 1e-9).count();
        let at_most = dense.iter().filter(|&&v| v < x + 1e-9).count();
        let c = sturm_count(&d, &e, x);
        prop_assert!(c >= below && c <= at_most);
        let ours = truncation_eigenvalues(&j, n).unwrap();
        for (p, q) in ours.iter().zip(&dense) {
            prop_assert!((p - q).abs() < 1e-10 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn lanczos_ignores_total_mass(
        pts in prop::collection::btree_set(-500i32..500, 8..30),
        raw in prop::collection::vec(0.1..2.0f64, 30),
        c in 0.01..100.0f64,
    ) {
        let x: Vec<f64> = pts.iter().map(|&p| p as f64 / 200.0).collect();
        let w: Vec<f64> = raw[..x.len()].to_vec();
        let wc: Vec<f64> = w.iter().map(|v| c * v).collect();
        let n = x.len() / 2;
        let j = lanczos(&x, &w, n).unwrap();
        let k = lanczos(&x, &wc, n).unwrap();
        for (p, q) in j.a().iter().zip(k.a()).chain(j.b().iter().zip(k.b())) {
            prop_assert!((p - q).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Corners of the equilibrium matrix, and the stripped operators, hold
    /// at most one eigenvalue in each gap.
    #[test]
    fn one_eigenvalue_per_gap(set in small_set(), n in 5usize..60, s in 1usize..20) {
        let g = solve_green(&set, 128).unwrap();
        let j = equilibrium_coefficients(&g, 200).unwrap();
        let corner = truncation_eigenvalues(&j, n).unwrap();
        let stripped: Vec<f64> = stable_gap_eigenvalues(&strip(&j, s).unwrap(), &g, 80, STABILITY_TOL)
            .unwrap()
            .iter()
            .map(|e| e.value)
            .collect();
        for ev in [corner, stripped] {
            for &(lo, hi) in set.gaps() {
                prop_assert!(ev.iter().filter(|&&v| v > lo && v < hi).count() <= 1);
            }
        }
    }

    #[test]
    fn coefficients_converge_with_nodes(set in small_set()) {
        let g = solve_green(&set, 96).unwrap();
        let mu = MeasureModel::equilibrium(&g);
        let c1 = coefficients_from_measure(&mu, 12, 96).unwrap();
        let c2 = coefficients_from_measure(&mu, 12, 192).unwrap();
        for (p, q) in c1.a().iter().zip(c2.a()) {
            prop_assert!((p - q).abs() < 1e-8);
        }
    }
}
