//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use potlab::jacobi::{
    coefficients_from_measure, equilibrium_coefficients, gap_eigenvalues, stable_gap_eigenvalues, strip,
    sturm_count, truncation_eigenvalues, PointMass, Weight, WeightMode, STABILITY_TOL,
};
use potlab::realset::{geometric_deltas, homogeneity_margin, lebesgue_measure};
use potlab::sumrule::{eigenvalue_bound_check, n_step_sum_rule, step_sum_rule, szego_product};
use potlab::{fat_cantor, solve_green, GapSet, GreenModel, JacobiCoeffs, MeasureModel, MeasureSpec, Tail};

/// Outcome of one criterion.
struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn interval() -> GapSet {
    GapSet::interval(-2.0, 2.0).unwrap()
}

fn two_band() -> GapSet {
    GapSet::new(-2.0, 2.0, vec![(-1.0, 1.0)]).unwrap()
}

/// Green's function of `[a, b]` at `x > b` through the Joukowski map.
fn joukowski_green(a: f64, b: f64, x: f64) -> f64 {
    let u = ((2.0 * x - a - b) / (b - a)).abs();
    (u + (u * u - 1.0).sqrt()).ln()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn measure(g: &GreenModel, weight: Weight, mode: WeightMode, point_masses: Vec<PointMass>) -> MeasureModel {
    MeasureModel::new(g, MeasureSpec { set: None, weight, mode, point_masses }).unwrap()
}

fn c1_capacity() -> Outcome {
    let cases = [
        (interval(), 1.0, 1e-10),
        (GapSet::interval(0.0, 1.0).unwrap(), 0.25, 1e-10),
        // t -> t^2 maps the two bands onto [1, 4]
        (two_band(), ((4.0 - 1.0) / 4.0f64).sqrt(), 1e-8),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (set, want, tol) in cases {
        let (g, dt) = timed(|| solve_green(&set, 200).unwrap());
        let err = (g.capacity() - want).abs();
        pass &= err <= tol && dt < Duration::from_secs(1);
        parts.push(format!("err {err:.1e} in {:.0} ms", dt.as_secs_f64() * 1e3));
    }
    outcome(pass, parts.join("; "))
}

fn c2_green_values() -> Outcome {
    let g1 = solve_green(&interval(), 200).unwrap();
    let g2 = solve_green(&two_band(), 200).unwrap();
    let e1 = (g1.green_value(3.0) - joukowski_green(-2.0, 2.0, 3.0)).abs();
    let closed = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    let e1b = (joukowski_green(-2.0, 2.0, 3.0) - closed).abs();
    // g_E(x) = g_[1,4](x^2) / 2
    let e2 = (g2.green_value(0.0) - 0.5 * joukowski_green(1.0, 4.0, 0.0)).abs();
    let e2b = (0.5 * joukowski_green(1.0, 4.0, 0.0) - 0.5 * 3f64.ln()).abs();
    let edge = [&g1, &g2]
        .iter()
        .flat_map(|g| g.edges().iter().map(move |&x| g.green_value(x).abs()))
        .fold(0.0, f64::max);
    outcome(
        e1 <= 1e-8 && e2 <= 1e-8 && edge <= 1e-9 && e1b < 1e-14 && e2b < 1e-14,
        format!("g(3) err {e1:.1e}, g(0) err {e2:.1e}, max |g(edge)| {edge:.1e}"),
    )
}

fn c3_gap_areas() -> Outcome {
    let set = fat_cantor(4).unwrap();
    let ((worst, gaps), dt) = timed(|| {
        let g = solve_green(&set, potlab::potential::default_quad_order(&set)).unwrap();
        let worst = (0..g.gap_count())
            .map(|j| (g.gap_area(j) - 2.0 * g.green_value(g.critical_points()[j])).abs())
            .fold(0.0, f64::max);
        (worst, g.gap_count())
    });
    outcome(
        gaps == 15 && worst <= 1e-8 && dt < Duration::from_secs(10),
        format!("{gaps} gaps, max err {worst:.1e}, {:.2} s", dt.as_secs_f64()),
    )
}

fn c4_cantor_table() -> Outcome {
    let mut pass = true;
    let mut measure_err = 0.0_f64;
    for n in 1..=8 {
        let set = fat_cantor(n).unwrap();
        let want = 1.0 - (1.0 - 0.5f64.powi(n as i32)) / 2.0;
        measure_err = measure_err.max((lebesgue_measure(&set) - want).abs());
    }
    pass &= measure_err <= 1e-12;
    let mut margin = f64::INFINITY;
    let mut pw = Vec::new();
    for n in 1..=6 {
        let set = fat_cantor(n).unwrap();
        let deltas = geometric_deltas(&set, 12, 0.5);
        margin = margin.min(homogeneity_margin(&set, 16, &deltas).unwrap());
        pw.push(solve_green(&set, potlab::potential::default_quad_order(&set)).unwrap().pw_sum());
    }
    pass &= margin >= 0.25;
    let e1 = (pw[0] - 0.5 * (5.0f64 / 3.0).ln()).abs();
    pass &= e1 <= 1e-8;
    let inc: Vec<f64> = pw.windows(2).map(|w| w[1] - w[0]).collect();
    pass &= inc.iter().all(|&d| d > 0.0);
    let incs: Vec<String> = inc.iter().map(|d| format!("{d:.4}")).collect();
    outcome(
        pass,
        format!(
            "measure err {measure_err:.1e}, margin {margin:.4}, pw_1 err {e1:.1e}, increments [{}]",
            incs.join(", ")
        ),
    )
}

fn c5_reflectionless() -> Outcome {
    let mut worst_ratio = 0.0_f64;
    let mut worst_arg = 0.0_f64;
    for set in [interval(), two_band(), fat_cantor(3).unwrap()] {
        let g = solve_green(&set, 200).unwrap();
        for (a, b) in set.bands() {
            for k in 0..20 {
                let t = a + (b - a) * (k as f64 + 0.5) / 20.0;
                let m = g.equilibrium_m_boundary(t).unwrap();
                worst_ratio = worst_ratio.max(m.re.abs() / m.im);
                worst_arg = worst_arg.max((m.arg() / std::f64::consts::PI - 0.5).abs());
            }
        }
    }
    outcome(
        worst_ratio <= 1e-4 && worst_arg <= 1e-4,
        format!("max |Re m|/Im m {worst_ratio:.1e}, max |arg/pi - 1/2| {worst_arg:.1e}"),
    )
}

fn c6_coefficients() -> Outcome {
    let ((ea, es), dt) = timed(|| {
        let g = solve_green(&interval(), 200).unwrap();
        let arcsine = coefficients_from_measure(&MeasureModel::equilibrium(&g), 50, 200).unwrap();
        let semi = measure(
            &g,
            Weight::AbsPolyPower { coeffs: vec![4.0, 0.0, -1.0], exponent: 0.5 },
            WeightMode::Absolute,
            vec![],
        );
        let semi = coefficients_from_measure(&semi, 50, 200).unwrap();
        let err = |j: &JacobiCoeffs, a1: f64| {
            let mut e = 0.0_f64;
            for k in 0..50 {
                let want = if k == 0 { a1 } else { 1.0 };
                e = e.max((j.a()[k] - want).abs()).max(j.b()[k].abs());
            }
            e
        };
        (err(&arcsine, 2f64.sqrt()), err(&semi, 1.0))
    });
    outcome(
        ea <= 1e-8 && es <= 1e-8 && dt < Duration::from_secs(5),
        format!("arcsine err {ea:.1e}, semicircle err {es:.1e}, {:.2} s", dt.as_secs_f64()),
    )
}

fn c7_step_sum_rule() -> Outcome {
    let g = solve_green(&interval(), 200).unwrap();
    let j = JacobiCoeffs::interval_equilibrium(-2.0, 2.0).unwrap();
    let mu = MeasureModel::equilibrium(&g);
    let one = step_sum_rule(&j, &mu, &g).unwrap();
    // log a_1 = log sqrt 2 against half the entropy drop log 2 / 2
    let lhs_err = (one.lhs - 2f64.sqrt().ln()).abs();
    let rhs_err = (one.rhs - 0.5 * 2f64.ln()).abs();
    let worst = (1..=20)
        .map(|n| n_step_sum_rule(&j, &mu, &g, n).unwrap().residual.abs())
        .fold(0.0, f64::max);
    outcome(
        one.residual.abs() <= 1e-6 && lhs_err <= 1e-12 && rhs_err <= 1e-6 && worst <= 1e-5,
        format!("step residual {:.1e}, max n-step residual {worst:.1e}", one.residual.abs()),
    )
}

fn dense_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(d));
    for (i, &v) in e.iter().enumerate() {
        m[(i, i + 1)] = v;
        m[(i + 1, i)] = v;
    }
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn c8_eigenvalues() -> Outcome {
    let g = solve_green(&interval(), 200).unwrap();
    let j = JacobiCoeffs::free_with_b1(2.5).unwrap();
    let st: Vec<f64> = stable_gap_eigenvalues(&j, &g, 100, STABILITY_TOL)
        .unwrap()
        .iter()
        .map(|e| e.value)
        .collect();
    let mut pass = st.len() == 1;
    let (ev_err, sum_err) = match st.first() {
        Some(&x) => ((x - 2.9).abs(), (g.green_value(x) - 2.5f64.ln()).abs()),
        None => (f64::INFINITY, f64::INFINITY),
    };
    pass &= ev_err <= 1e-6 && sum_err <= 1e-6;

    let g2 = solve_green(&two_band(), 200).unwrap();
    let je = equilibrium_coefficients(&g2, 420).unwrap();
    let (lo, hi) = (-1.0, 1.0);
    let mut max_count = 0;
    for n in [25, 50, 100] {
        let corner = truncation_eigenvalues(&je, n).unwrap();
        max_count = max_count.max(corner.iter().filter(|&&v| v > lo && v < hi).count());
        let s = strip(&je, n).unwrap();
        let stripped = stable_gap_eigenvalues(&s, &g2, 100, STABILITY_TOL).unwrap();
        max_count = max_count.max(stripped.iter().filter(|e| e.value > lo && e.value < hi).count());
    }
    pass &= max_count <= 1;
    // exact counts at size 50 against the dense solver
    let mut oracle_ok = true;
    for m in [je.clone(), strip(&je, 50).unwrap()] {
        let (d, e) = m.truncation(50).unwrap();
        let dense = dense_eigenvalues(&d, &e);
        let in_gap = dense.iter().filter(|&&v| v > lo && v < hi).count();
        let sturm = sturm_count(&d, &e, hi) - sturm_count(&d, &e, lo);
        let ours = gap_eigenvalues(&m, &g2, 50).unwrap().len();
        oracle_ok &= in_gap == sturm && in_gap == ours;
    }
    pass &= oracle_ok;
    outcome(
        pass,
        format!(
            "{} stable eigenvalue(s), err {ev_err:.1e}, Green sum err {sum_err:.1e}; max gap count {max_count}, dense oracle {}",
            st.len(),
            if oracle_ok { "agrees" } else { "disagrees" }
        ),
    )
}

fn c9_eigenvalue_bounds() -> Outcome {
    let gi = solve_green(&interval(), 200).unwrap();
    let g2 = solve_green(&two_band(), 200).unwrap();
    let je2 = equilibrium_coefficients(&g2, 420).unwrap();
    let mut b = je2.b().to_vec();
    b[0] += 0.8;
    let kicked = JacobiCoeffs::new(je2.a().to_vec(), b, Tail::Truncate).unwrap();
    let battery: Vec<(&str, JacobiCoeffs, &GreenModel)> = vec![
        ("free", JacobiCoeffs::free_with_b1(0.0).unwrap(), &gi),
        ("chebyshev", JacobiCoeffs::interval_equilibrium(-2.0, 2.0).unwrap(), &gi),
        ("free b1=2.5", JacobiCoeffs::free_with_b1(2.5).unwrap(), &gi),
        ("two-band equilibrium", je2.clone(), &g2),
        ("two-band b1+0.8", kicked, &g2),
    ];
    let mut total = 0;
    let mut parts = Vec::new();
    for (name, j, g) in &battery {
        let check = eigenvalue_bound_check(j, g, &[5, 10, 20, 40]).unwrap();
        let v = check.violations();
        if !v.is_empty() {
            parts.push(format!("{name}: {} ({})", v.len(), v[0]));
        }
        total += v.len();
    }
    outcome(total == 0, format!("{total} violation(s) {}", parts.join("; ")))
}

fn c10_szego() -> Outcome {
    let g = solve_green(&two_band(), 200).unwrap();
    let measures = [
        MeasureModel::equilibrium(&g),
        measure(&g, Weight::Polynomial { coeffs: vec![1.0, 0.3] }, WeightMode::Relative, vec![]),
        measure(
            &g,
            Weight::Polynomial { coeffs: vec![2.0, 0.0, 1.0] },
            WeightMode::Relative,
            vec![PointMass { x: 0.0, mass: 0.1 }, PointMass { x: 2.5, mass: 0.05 }],
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for mu in &measures {
        let j = if mu.is_equilibrium() {
            equilibrium_coefficients(&g, 200).unwrap()
        } else {
            coefficients_from_measure(mu, 200, 480).unwrap()
        };
        let mins: Vec<f64> = [50, 100, 200]
            .iter()
            .map(|&n| szego_product(&j, g.capacity(), n).unwrap().window_min)
            .collect();
        let floor = 0.5 * mins[0];
        pass &= mins.iter().all(|&m| m >= floor && m > 0.0);
        parts.push(format!("{:.4}/{:.4}/{:.4}", mins[0], mins[1], mins[2]));
    }
    // non-Szegő weight exp(-1/|t - 2|) on [-2, 2]
    let gi = solve_green(&interval(), 200).unwrap();
    let mu = measure(&gi, Weight::ExpInvDistance { center: 2.0, scale: 1.0 }, WeightMode::Relative, vec![]);
    let j = coefficients_from_measure(&mu, 200, 1000).unwrap();
    let j2 = coefficients_from_measure(&mu, 200, 2000).unwrap();
    let drift = j.a().iter().zip(j2.a()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let p = szego_product(&j, gi.capacity(), 200).unwrap();
    let decreasing = p.trailing_half_decreasing();
    pass &= decreasing && drift < 1e-8;
    outcome(
        pass,
        format!(
            "window minima {}; non-Szegő log u_n decreasing over trailing half: {decreasing} (coefficient drift {drift:.1e})",
            parts.join(", ")
        ),
    )
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        r#"{"command": "capacity", "set": "fat_cantor:2"}"#,
        r#"{"command": "cantor", "n": 4, "format": "json"}"#,
        r#"{"command": "green", "set": {"alpha": -2, "beta": 2, "gaps": [[-1, 1]]}, "samples": 50}"#,
        r#"{"command": "coeffs", "set": "interval:-2,2", "measure": "equilibrium", "n": 20}"#,
        r#"{"command": "sumrule", "set": "interval:-2,2", "n": 3, "format": "json"}"#,
        r#"{"command": "theorem", "set": "interval:-2,2", "n": 40, "plot": "u.dat"}"#,
        r#"{"command": "homogeneity", "set": "fat_cantor:3"}"#,
    ];
    let mut same = 0;
    for (i, cfg) in configs.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.json"));
        std::fs::write(&path, cfg).unwrap();
        let mut runs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_potlab")).arg("--config").arg(&path).output().unwrap();
            let plot = std::fs::read(dir.path().join("u.dat")).unwrap_or_default();
            runs.push((out.status.code(), out.stdout, plot));
        }
        if runs[0] == runs[1] && runs[0].0 == Some(0) {
            same += 1;
        }
    }
    outcome(same == configs.len(), format!("{same}/{} configs byte-identical", configs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("capacity oracles", c1_capacity),
        ("Green's value oracles", c2_green_values),
        ("gap area identity", c3_gap_areas),
        ("fat Cantor table", c4_cantor_table),
        ("reflectionless boundary values", c5_reflectionless),
        ("coefficient oracles", c6_coefficients),
        ("step sum rule", c7_step_sum_rule),
        ("eigenvalue machinery", c8_eigenvalues),
        ("eigenvalue-sum bounds", c9_eigenvalue_bounds),
        ("Szegő product behaviour", c10_szego),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<32} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
