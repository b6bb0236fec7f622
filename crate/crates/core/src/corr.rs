//! Autocorrelation of returns and absolute returns, shuffle surrogates, and
//! the return/squared-return correlation `L(τ)` with its antisymmetry score.
//!
//! The autocorrelation uses global moments: one mean and one variance from
//! the full series, lag products averaged over the `n - τ` valid pairs.
//! Products are formed from mean-subtracted values, which differs from
//! subtracting the squared mean after averaging by O(τ/n) boundary terms and
//! makes the estimate exactly invariant under affine maps of the data.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dist::seeded_rng;
use crate::error::{Error, Result};
use crate::io::csv_table;
use crate::stats;

pub const DEFAULT_ACF_MAX_LAG: usize = 300;
pub const DEFAULT_LEVERAGE_MAX_LAG: usize = 25;
pub const MIN_LEVERAGE_SHUFFLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct AcfCurve {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    /// Number of products averaged at each lag.
    pub n_eff: Vec<usize>,
    /// `1/sqrt(n)` of the base series.
    pub noise_level: f64,
}

impl AcfCurve {
    pub fn value_at(&self, lag: usize) -> Option<f64> {
        self.lags.iter().position(|&l| l == lag).map(|i| self.values[i])
    }

    /// `lag,value,noise_bound` rows; the bound is three noise levels.
    pub fn to_csv(&self) -> String {
        let bound = 3.0 * self.noise_level;
        csv_table(
            &["lag", "value", "noise_bound"],
            self.lags.iter().zip(&self.values).map(|(&l, &v)| vec![l as f64, v, bound]),
        )
    }
}

pub fn acf(x: &[f64], max_lag: usize) -> Result<AcfCurve> {
    let n = x.len();
    if n <= max_lag + 10 {
        return Err(Error::insufficient(format!(
            "series of length {n} too short for max lag {max_lag}"
        )));
    }
    let mean = stats::mean(x);
    let y: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let var = y.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(var > 0.0) {
        return Err(Error::degenerate("zero variance series has no autocorrelation"));
    }
    let values: Vec<f64> = (0..=max_lag)
        .into_par_iter()
        .map(|tau| {
            let m = n - tau;
            let s: f64 = y[..m].iter().zip(&y[tau..]).map(|(a, b)| a * b).sum();
            s / m as f64 / var
        })
        .collect();
    Ok(AcfCurve {
        lags: (0..=max_lag).collect(),
        n_eff: (0..=max_lag).map(|t| n - t).collect(),
        values,
        noise_level: 1.0 / (n as f64).sqrt(),
    })
}

/// Autocorrelation of `|r_t|`.
pub fn abs_acf(r: &[f64], max_lag: usize) -> Result<AcfCurve> {
    let abs: Vec<f64> = r.iter().map(|v| v.abs()).collect();
    acf(&abs, max_lag)
}

/// Lags `τ >= 1` with `|C(τ)| > multiple * noise_level`, increasing.
pub fn significant_lags(c: &AcfCurve, multiple: f64) -> Vec<usize> {
    let bound = multiple * c.noise_level;
    c.lags
        .iter()
        .zip(&c.values)
        .filter(|(&l, v)| l > 0 && v.abs() > bound)
        .map(|(&l, _)| l)
        .collect()
}

/// Uniform random permutation (Fisher–Yates), deterministic in `seed`.
pub fn shuffle(x: &[f64], seed: u64) -> Vec<f64> {
    let mut v = x.to_vec();
    v.shuffle(&mut seeded_rng(seed));
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeverageCurve {
    /// `-max_lag ..= max_lag`.
    pub lags: Vec<i64>,
    pub values: Vec<f64>,
    /// 95th percentile of `|L(τ)|`, `τ != 0`, over shuffled surrogates.
    pub noise_band: f64,
    pub shuffles: usize,
    pub seed: u64,
}

impl LeverageCurve {
    pub fn value_at(&self, lag: i64) -> Option<f64> {
        self.lags.iter().position(|&l| l == lag).map(|i| self.values[i])
    }

    pub fn to_csv(&self) -> String {
        csv_table(
            &["lag", "value", "noise_bound"],
            self.lags
                .iter()
                .zip(&self.values)
                .map(|(&l, &v)| vec![l as f64, v, self.noise_band]),
        )
    }
}

/// `L(τ) = <r_t r_{t+τ}^2> / <r_{t+τ}^2>^2` for `τ` in `-max_lag ..= max_lag`,
/// both averages over the index set where `t` and `t + τ` are in range.
pub fn leverage_values(r: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = r.len();
    if n <= 2 * max_lag + 10 {
        return Err(Error::insufficient(format!(
            "series of length {n} too short for leverage max lag {max_lag}"
        )));
    }
    if r.iter().all(|v| *v == 0.0) {
        return Err(Error::degenerate("all-zero series"));
    }
    let m = max_lag as i64;
    Ok((-m..=m)
        .into_par_iter()
        .map(|tau| {
            let (start, end) = if tau >= 0 {
                (0usize, n - tau as usize)
            } else {
                ((-tau) as usize, n)
            };
            let mut num = 0.0;
            let mut sq = 0.0;
            for t in start..end {
                let s = r[(t as i64 + tau) as usize];
                let s2 = s * s;
                num += r[t] * s2;
                sq += s2;
            }
            let count = (end - start) as f64;
            let den = sq / count;
            (num / count) / (den * den)
        })
        .collect())
}

pub fn leverage(r: &[f64], max_lag: usize, shuffles: usize, seed: u64) -> Result<LeverageCurve> {
    if shuffles < MIN_LEVERAGE_SHUFFLES {
        return Err(Error::InvalidArgument(format!(
            "leverage noise band needs at least {MIN_LEVERAGE_SHUFFLES} shuffles"
        )));
    }
    let values = leverage_values(r, max_lag)?;
    let pooled: Vec<f64> = (0..shuffles as u64)
        .into_par_iter()
        .map(|i| {
            let s = shuffle(r, seed.wrapping_add(i));
            let l = leverage_values(&s, max_lag).expect("shuffle preserves length and values");
            l.into_iter()
                .enumerate()
                .filter(|(k, _)| *k != max_lag)
                .map(|(_, v)| v.abs())
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    let m = max_lag as i64;
    Ok(LeverageCurve {
        lags: (-m..=m).collect(),
        values,
        noise_band: stats::percentile(&pooled, 0.95),
        shuffles,
        seed,
    })
}

/// `-corr(L(τ), L(-τ))` over `τ = 1..=max_lag`: +1 for an antisymmetric
/// curve, -1 for a symmetric one.
pub fn antisymmetry_score(l: &LeverageCurve) -> Result<f64> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (&lag, &v) in l.lags.iter().zip(&l.values) {
        if lag > 0 {
            if let Some(w) = l.value_at(-lag) {
                pos.push(v);
                neg.push(w);
            }
        }
    }
    if pos.len() < 5 {
        return Err(Error::insufficient(format!(
            "antisymmetry needs 5 matched lag pairs, have {}",
            pos.len()
        )));
    }
    stats::pearson(&pos, &neg)
        .map(|c| -c)
        .ok_or_else(|| Error::degenerate("constant leverage curve on one side"))
}

fn score_of(values: Vec<f64>, max_lag: usize) -> Result<f64> {
    let m = max_lag as i64;
    antisymmetry_score(&LeverageCurve {
        lags: (-m..=m).collect(),
        values,
        noise_band: 0.0,
        shuffles: 0,
        seed: 0,
    })
}

/// Antisymmetry scores of `shuffles` shuffled copies of `r`.
pub fn antisymmetry_baseline(r: &[f64], max_lag: usize, shuffles: usize, seed: u64) -> Result<Vec<f64>> {
    (0..shuffles as u64)
        .into_par_iter()
        .map(|i| score_of(leverage_values(&shuffle(r, seed.wrapping_add(i)), max_lag)?, max_lag))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::seeded_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded_rng(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn lag_zero_is_one() {
        let c = acf(&normals(500, 1), 20).unwrap();
        assert!((c.values[0] - 1.0).abs() < 1e-12);
        assert_eq!(c.n_eff[5], 495);
    }

    #[test]
    fn alternating_series() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let c = acf(&x, 5).unwrap();
        assert!((c.values[1] + 1.0).abs() < 1e-12);
        assert!((c.values[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn white_noise_within_band() {
        let n = 100_000;
        let c = acf(&normals(n, 2), 50).unwrap();
        let inside = c.values[1..].iter().filter(|v| v.abs() <= 3.0 / (n as f64).sqrt()).count();
        assert!(inside >= 49, "{inside}");
    }

    #[test]
    fn errors() {
        assert!(matches!(acf(&[1.0; 50], 5), Err(Error::Degenerate(_))));
        assert!(matches!(acf(&[1.0, 2.0, 3.0], 5), Err(Error::Insufficient(_))));
        let constant_abs: Vec<f64> = (0..100).map(|i| if i % 3 == 0 { 2.0 } else { -2.0 }).collect();
        assert!(abs_acf(&constant_abs, 5).is_err());
    }

    #[test]
    fn significant_lags_excludes_zero() {
        let c = AcfCurve {
            lags: vec![0, 1, 2, 3],
            values: vec![1.0, 0.5, 0.01, -0.4],
            n_eff: vec![100; 4],
            noise_level: 0.1,
        };
        assert_eq!(significant_lags(&c, 3.0), vec![1, 3]);
    }

    #[test]
    fn shuffle_is_permutation() {
        let x = normals(1000, 3);
        let s = shuffle(&x, 7);
        assert_eq!(s, shuffle(&x, 7));
        assert_ne!(s, x);
        let mut a = x.clone();
        let mut b = s.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn antisymmetry_extremes() {
        let lags: Vec<i64> = (-6..=6).collect();
        let anti: Vec<f64> = lags.iter().map(|&l| (l as f64) * (1.0 + 0.1 * (l as f64).abs())).collect();
        let sym: Vec<f64> = lags.iter().map(|&l| 1.0 / (1.0 + (l as f64).abs())).collect();
        let mk = |values| LeverageCurve { lags: lags.clone(), values, noise_band: 0.0, shuffles: 0, seed: 0 };
        assert!((antisymmetry_score(&mk(anti)).unwrap() - 1.0).abs() < 1e-12);
        assert!((antisymmetry_score(&mk(sym)).unwrap() + 1.0).abs() < 1e-12);
        let short = LeverageCurve { lags: (-3..=3).collect(), values: vec![0.0; 7], noise_band: 0.0, shuffles: 0, seed: 0 };
        assert!(antisymmetry_score(&short).is_err());
    }

    #[test]
    fn leverage_needs_enough_shuffles() {
        assert!(leverage(&normals(200, 1), 5, 10, 0).is_err());
    }
}
