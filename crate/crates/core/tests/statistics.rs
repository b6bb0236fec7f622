use rand_distr::{Distribution, StandardNormal};

use flucstat::corr::{abs_acf, acf, antisymmetry_baseline, leverage, shuffle, significant_lags};
use flucstat::dist::{qgauss_sample, seeded_rng, stable_pdf, StableParams};
use flucstat::fit::{empirical_pdf, fit_qgaussian, BinScheme, QGaussFitOptions};
use flucstat::stats::{mean, ols};

fn normal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = normal(n, seed);
    let mut x = vec![0.0; n];
    for t in 1..n {
        x[t] = phi * x[t - 1] + e[t];
    }
    x
}

#[test]
fn white_noise_acf_inside_band() {
    // 3/sqrt(n) is two-sided 0.27%; pooled over 40 x 100 lags expect ~11 exceedances
    let mut out = 0;
    let mut total = 0;
    for seed in 0..40 {
        let c = acf(&normal(10_000, seed), 100).unwrap();
        out += significant_lags(&c, 3.0).len();
        total += 100;
    }
    assert!(out <= 30, "{out} of {total} lags outside 3 sigma");
}

#[test]
fn shuffling_destroys_lag_structure() {
    let x = ar1(0.3, 20_000, 5);
    let c = acf(&x, 30).unwrap();
    let lags = significant_lags(&c, 3.0);
    assert!(lags.starts_with(&[1, 2, 3]), "{lags:?}");
    // theoretical AR(1) acf is phi^tau
    for tau in 1..=3 {
        let want = 0.3f64.powi(tau as i32);
        assert!((c.values[tau] - want).abs() < 4.0 * c.noise_level, "tau={tau}");
    }
    let s = acf(&shuffle(&x, 9), 30).unwrap();
    assert!(significant_lags(&s, 3.0).len() <= 1);

    // volatility clustering shows in |r| and vanishes under shuffling
    let h = ar1(0.98, 20_000, 7);
    let e = normal(20_000, 6);
    let r: Vec<f64> = e.iter().zip(&h).map(|(z, v)| z * (0.1 * v).exp()).collect();
    assert!(significant_lags(&abs_acf(&r, 30).unwrap(), 3.0).len() > 10);
    assert!(significant_lags(&abs_acf(&shuffle(&r, 2), 30).unwrap(), 3.0).len() <= 1);
}

fn fit_q(x: &[f64], frac: f64) -> flucstat::fit::CurveFit {
    let pdf = empirical_pdf(x, BinScheme::linear_sigma(x, frac).unwrap()).unwrap();
    fit_qgaussian(&pdf, &QGaussFitOptions::default()).unwrap()
}

#[test]
fn fitted_q_stable_under_bin_width() {
    let x = qgauss_sample(1.49, 1.0, 200_000, 21).unwrap();
    let a = fit_q(&x, 0.1).param("q");
    let b = fit_q(&x, 0.2).param("q");
    assert!((a - b).abs() < 0.03, "{a} vs {b}");
    assert!((a - 1.49).abs() < 0.03, "{a}");
}

#[test]
fn stderr_shrinks_with_sample_size() {
    let x = qgauss_sample(1.49, 1.0, 200_000, 22).unwrap();
    let big = fit_q(&x, 0.1);
    let small = fit_q(&x[..50_000], 0.1);
    assert!(big.se("q") > 0.0 && small.se("q") > big.se("q"));
    assert!(big.se("B") < small.se("B"));
}

#[test]
fn stable_density_tail_exponent() {
    // p(x) ~ x^-(1+alpha) for large x
    let p = StableParams::new(1.77, 1.0).unwrap();
    let xs: Vec<f64> = (0..=20).map(|i| 10f64.powf(1.0 + i as f64 / 20.0)).collect();
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = xs.iter().map(|&x| stable_pdf(&p, x, 1e-10).unwrap().ln()).collect();
    let f = ols(&lx, &ly).unwrap();
    assert!((f.slope + 2.77).abs() < 0.05, "slope {}", f.slope);
}

#[test]
fn leverage_null_baseline_centered() {
    let r = normal(5000, 31);
    let base = antisymmetry_baseline(&r, 25, 40, 3).unwrap();
    assert_eq!(base.len(), 40);
    assert!(mean(&base).abs() < 0.2, "{}", mean(&base));
    assert!(base.iter().all(|s| s.abs() <= 1.0));
}

#[test]
fn leverage_detects_return_volatility_coupling() {
    // negative returns raise the next day's variance
    let e = normal(30_000, 40);
    let mut r = vec![0.0; e.len()];
    let mut s2: f64 = 1.0;
    for t in 0..e.len() {
        r[t] = s2.sqrt() * e[t];
        s2 = (0.2 + 0.7 * s2 + 0.1 * r[t] * r[t] - 0.3 * r[t]).max(0.05);
    }
    let l = leverage(&r, 5, 20, 1).unwrap();
    let l1 = l.value_at(1).unwrap();
    assert!(l1 < -l.noise_band, "L(1)={l1} band={}", l.noise_band);
    assert!(l.value_at(-1).unwrap().abs() < l1.abs());
}
