//! Checks against references computed independently of the library:
//! adaptive quadrature, closed forms, and frozen Monte Carlo simulations.

use std::path::PathBuf;

use powerkit::distributions::{
    f_cdf, f_quantile, ncf_cdf, nct_cdf, reg_inc_beta, t_cdf, t_quantile, Dof, Noncentrality,
};
use serde_json::Value;

fn dof(v: f64) -> Dof {
    Dof::new(v).unwrap()
}

/// Adaptive Simpson quadrature.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn beta_by_quadrature(x: f64, a: f64, b: f64) -> f64 {
    let kernel = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
    simpson(&kernel, 0.0, x, 1e-15) / simpson(&kernel, 0.0, 1.0, 1e-15)
}

#[test]
fn incomplete_beta_matches_quadrature() {
    // x (1-x)^4 integrated on [0, 0.3], normalized by B(2, 5) = 1/30
    let reference = beta_by_quadrature(0.3, 2.0, 5.0);
    assert!((reference - 0.579_825).abs() < 1e-12, "quadrature drifted: {reference}");
    assert!((reg_inc_beta(0.3, 2.0, 5.0).unwrap() - reference).abs() < 1e-12);
    for &(x, a, b) in &[(0.4, 2.5, 3.7), (0.81, 6.0, 1.5), (0.05, 1.0, 30.0), (0.5, 12.0, 12.0)] {
        let q = beta_by_quadrature(x, a, b);
        let v = reg_inc_beta(x, a, b).unwrap();
        assert!((v - q).abs() < 1e-11, "x={x} a={a} b={b}: {v} vs {q}");
    }
}

#[test]
fn incomplete_beta_reflection() {
    let s = reg_inc_beta(0.3, 2.0, 5.0).unwrap() + reg_inc_beta(0.7, 5.0, 2.0).unwrap();
    assert!((s - 1.0).abs() < 1e-14);
    assert_eq!(reg_inc_beta(0.5, 1.0, 1.0).unwrap(), 0.5);
}

#[test]
fn central_critical_values() {
    // F(2, d2) has CDF 1 - (1 + 2x/d2)^(-d2/2): invert in closed form
    let exact = 22.5 * (0.05f64.powf(-2.0 / 45.0) - 1.0);
    let q = f_quantile(0.95, dof(2.0), dof(45.0)).unwrap();
    assert!((q - exact).abs() < 1e-9, "{q} vs {exact}");
    // two-tailed 5% critical t for 26 df
    let t = t_quantile(0.975, dof(26.0)).unwrap();
    assert!((t - 2.055_529_438_642_871).abs() < 1e-9, "{t}");
    assert!((t_cdf(t, dof(26.0)).unwrap() - 0.975).abs() < 1e-10);
}

fn fixture() -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mc_oracle.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn monte_carlo_agreement() {
    let doc = fixture();
    let mut nct_points = 0;
    let mut ncf_points = 0;
    for p in doc["points"].as_array().unwrap() {
        let g = |k: &str| p[k].as_f64().unwrap();
        match p["kind"].as_str().unwrap() {
            "nct_cdf" => {
                let v = nct_cdf(g("x"), dof(g("df")), Noncentrality::new(g("delta")).unwrap()).unwrap();
                let z = (v - g("estimate")) / g("std_error").max(1e-12);
                assert!(z.abs() <= 3.0, "nct point {p}: exact {v}, z = {z:.2}");
                nct_points += 1;
            }
            "ncf_cdf" => {
                let lambda = Noncentrality::nonnegative(g("lambda")).unwrap();
                let v = ncf_cdf(g("x"), dof(g("df1")), dof(g("df2")), lambda).unwrap();
                let z = (v - g("estimate")) / g("std_error").max(1e-12);
                assert!(z.abs() <= 3.0, "ncf point {p}: exact {v}, z = {z:.2}");
                ncf_points += 1;
            }
            "t_quantile" => {
                let q = t_quantile(g("p"), dof(g("df"))).unwrap();
                // sample-quantile standard error sqrt(p(1-p)/n) / density, density ≈ 0.0505 here
                let se = (g("p") * (1.0 - g("p")) / g("draws")).sqrt() / 0.0505;
                assert!(
                    (q - g("estimate")).abs() <= 3.0 * se,
                    "t quantile {q} vs {}",
                    g("estimate")
                );
            }
            other => panic!("unknown fixture kind {other}"),
        }
    }
    assert!(nct_points >= 20 && ncf_points >= 20);
}

#[test]
fn zero_noncentrality_degenerates() {
    for &df in &[1.0, 4.5, 20.0, 300.0] {
        for i in -40..=40 {
            let x = i as f64 * 0.25;
            let a = nct_cdf(x, dof(df), Noncentrality::new(0.0).unwrap()).unwrap();
            assert!((a - t_cdf(x, dof(df)).unwrap()).abs() < 1e-9);
        }
    }
    for &(d1, d2) in &[(1.0, 10.0), (2.0, 45.0), (25.0, 1875.0)] {
        for i in 0..=40 {
            let x = i as f64 * 0.2;
            let a = ncf_cdf(x, dof(d1), dof(d2), Noncentrality::nonnegative(0.0).unwrap()).unwrap();
            assert!((a - f_cdf(x, dof(d1), dof(d2)).unwrap()).abs() < 1e-9);
        }
    }
}
