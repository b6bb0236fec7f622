//! Aggregated returns `R_N`, scaling collapse of their densities, tail
//! slopes, and detrended fluctuation analysis with crossover detection.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{empirical_pdf, BinScheme, CurveFit, FitSpace};
use crate::io::csv_table;
use crate::stats::{self, ols};

pub const DEFAULT_HORIZONS: [usize; 4] = [1, 5, 20, 100];
pub const DEFAULT_COLLAPSE_BINS: BinScheme = BinScheme::LogSymmetric { core: 0.1, ratio: 1.25 };
pub const DEFAULT_DETREND_ORDER: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedSeries {
    pub n: usize,
    pub values: Vec<f64>,
}

/// Overlapping window sums `R_{N,t} = r_t + ... + r_{t+N-1}`.
pub fn aggregate(r: &[f64], n: usize) -> Result<AggregatedSeries> {
    aggregate_with(r, n, true)
}

/// Window sums, overlapping (stride 1) or disjoint (stride `n`).
pub fn aggregate_with(r: &[f64], n: usize, overlapping: bool) -> Result<AggregatedSeries> {
    if n == 0 || n * 10 >= r.len() {
        return Err(Error::InvalidArgument(format!(
            "horizon {n} must satisfy 1 <= N < len/10 (len = {})",
            r.len()
        )));
    }
    let stride = if overlapping { 1 } else { n };
    let values = (0..=r.len() - n)
        .step_by(stride)
        .map(|t| r[t..t + n].iter().sum())
        .collect();
    Ok(AggregatedSeries { n, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapsePoint {
    /// `R_N N^{-1/α}` at the bin center.
    pub u: f64,
    /// Density of `u` over the base central density.
    pub p: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseCurve {
    pub n: usize,
    pub alpha_used: f64,
    pub points: Vec<CollapsePoint>,
}

/// Rescaled densities for each horizon: abscissa `R_N N^{-1/α}`, ordinate
/// `P(R_N) N^{1/α} / P_1(0)` with `P_1(0)` the central-bin density of the
/// unaggregated series. Bins are laid out in the rescaled variable so every
/// horizon shares the same grid.
pub fn collapse(r: &[f64], horizons: &[usize], alpha: f64, scheme: BinScheme) -> Result<Vec<CollapseCurve>> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 2]")));
    }
    if !horizons.contains(&1) {
        return Err(Error::InvalidArgument("collapse horizons must include 1".into()));
    }
    let mut hs = horizons.to_vec();
    hs.sort_unstable();
    hs.dedup();
    let pdfs: Vec<(usize, crate::fit::EmpiricalPdf)> = hs
        .par_iter()
        .map(|&n| {
            let agg = aggregate(r, n)?;
            let s = (n as f64).powf(-1.0 / alpha);
            let u: Vec<f64> = agg.values.iter().map(|v| v * s).collect();
            Ok((n, empirical_pdf(&u, scheme)?))
        })
        .collect::<Result<_>>()?;
    let p0 = pdfs[0]
        .1
        .central_density()
        .filter(|d| *d > 0.0)
        .ok_or_else(|| Error::degenerate("central bin of the base density is empty"))?;
    pdfs.into_iter()
        .map(|(n, pdf)| {
            if !pdf.central_density().is_some_and(|d| d > 0.0) {
                return Err(Error::degenerate(format!("central bin empty at horizon {n}")));
            }
            Ok(CollapseCurve {
                n,
                alpha_used: alpha,
                points: pdf
                    .bins
                    .iter()
                    .map(|b| CollapsePoint { u: b.center, p: b.density / p0, count: b.count })
                    .collect(),
            })
        })
        .collect()
}

/// Long-format CSV `N,u,p,count` for a set of curves.
pub fn collapse_csv(curves: &[CollapseCurve]) -> String {
    csv_table(
        &["N", "u", "p", "count"],
        curves.iter().flat_map(|c| {
            c.points.iter().map(move |p| vec![c.n as f64, p.u, p.p, p.count as f64])
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSlope {
    pub slope: f64,
    pub stderr: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Least-squares slope of `ln p` against `ln |u|` over points with
/// `u_lo <= |u| <= u_hi` and `p > 0`, both sides pooled.
pub fn tail_slope(c: &CollapseCurve, u_lo: f64, u_hi: f64) -> Result<TailSlope> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = c
        .points
        .iter()
        .filter(|p| p.p > 0.0 && p.u.abs() >= u_lo && p.u.abs() <= u_hi)
        .map(|p| (p.u.abs().ln(), p.p.ln()))
        .unzip();
    if lx.len() < 5 {
        return Err(Error::insufficient(format!(
            "{} tail points in [{u_lo}, {u_hi}] at horizon {}, need 5",
            lx.len(),
            c.n
        )));
    }
    let f = ols(&lx, &ly)?;
    Ok(TailSlope { slope: f.slope, stderr: f.slope_stderr, r2: f.r2, n_points: f.n })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfaCurve {
    pub scales: Vec<usize>,
    pub f: Vec<f64>,
    pub detrend_order: usize,
}

impl DfaCurve {
    /// `N,F` rows, plus `log10_N,log10_F` when `with_logs`.
    pub fn to_csv(&self, with_logs: bool) -> String {
        let rows = self.scales.iter().zip(&self.f).map(|(&n, &f)| {
            let n = n as f64;
            if with_logs { vec![n, f, n.log10(), f.log10()] } else { vec![n, f] }
        });
        if with_logs {
            csv_table(&["N", "F", "log10_N", "log10_F"], rows)
        } else {
            csv_table(&["N", "F"], rows)
        }
    }
}

/// Roughly `per_decade` log-spaced integers in `lo..=hi`.
pub fn log_scales(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    if lo == 0 || hi < lo {
        return Vec::new();
    }
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let steps = ((b - a) * per_decade as f64).ceil().max(1.0) as usize;
    let mut v: Vec<usize> = (0..=steps)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64).round() as usize)
        .filter(|&s| s >= lo && s <= hi)
        .collect();
    v.dedup();
    v
}

/// Default grid: 10 per decade, `max(4, order + 2) ..= len/4`.
pub fn default_scales(len: usize, order: usize) -> Vec<usize> {
    log_scales(4.max(order + 2), len / 4, 10)
}

/// Orthonormal basis of polynomials up to `order` on `0..s`.
fn poly_basis(s: usize, order: usize) -> Vec<Vec<f64>> {
    let mid = (s as f64 - 1.0) / 2.0;
    let scale = mid.max(1.0);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut v: Vec<f64> = (0..s).map(|t| ((t as f64 - mid) / scale).powi(k as i32)).collect();
        // two Gram–Schmidt passes for orthogonality at higher orders
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

fn detrended_ss(y: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut res = y.to_vec();
    for b in basis {
        let d: f64 = res.iter().zip(b).map(|(x, y)| x * y).sum();
        res.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
    }
    res.iter().map(|x| x * x).sum()
}

/// Detrended fluctuation function over the given box sizes. Boxes tile the
/// profile from the start and again from the end.
pub fn dfa(x: &[f64], scales: &[usize], order: usize) -> Result<DfaCurve> {
    let mut scales = scales.to_vec();
    scales.sort_unstable();
    scales.dedup();
    let Some(&max_scale) = scales.last() else {
        return Err(Error::InvalidArgument("no DFA scales given".into()));
    };
    if let Some(&s) = scales.iter().find(|&&s| s < order + 2) {
        return Err(Error::InvalidArgument(format!(
            "DFA scale {s} below detrend order + 2 = {}",
            order + 2
        )));
    }
    if x.len() < 4 * max_scale {
        return Err(Error::insufficient(format!(
            "series of length {} too short for DFA scale {max_scale}",
            x.len()
        )));
    }
    let mean = stats::mean(x);
    let mut acc = 0.0;
    let profile: Vec<f64> = x
        .iter()
        .map(|v| {
            acc += v - mean;
            acc
        })
        .collect();
    let len = profile.len();
    let f: Vec<f64> = scales
        .par_iter()
        .map(|&s| {
            let basis = poly_basis(s, order);
            let boxes = len / s;
            let mut ss = 0.0;
            for b in 0..boxes {
                ss += detrended_ss(&profile[b * s..(b + 1) * s], &basis);
                ss += detrended_ss(&profile[len - (b + 1) * s..len - b * s], &basis);
            }
            (ss / (2 * boxes * s) as f64).sqrt()
        })
        .collect();
    if f.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::degenerate("zero fluctuation at some DFA scale"));
    }
    Ok(DfaCurve { scales, f, detrend_order: order })
}

/// Slope of `ln F` against `ln N` over scales in `lo..=hi`.
/// Parameters are `H` and `intercept`.
pub fn hurst_fit(d: &DfaCurve, lo: usize, hi: usize) -> Result<CurveFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = d
        .scales
        .iter()
        .zip(&d.f)
        .filter(|(&s, _)| s >= lo && s <= hi)
        .map(|(&s, &f)| ((s as f64).ln(), f.ln()))
        .unzip();
    if lx.len() < 4 {
        return Err(Error::insufficient(format!(
            "{} DFA scales in {lo}..={hi}, need 4",
            lx.len()
        )));
    }
    let line = ols(&lx, &ly)?;
    let residuals: Vec<f64> = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| line.intercept + line.slope * x - y)
        .collect();
    let n = lx.len();
    let mx = stats::mean(&lx);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let s2 = if n > 2 { line.ssr / (n - 2) as f64 } else { 0.0 };
    let intercept_se = (s2 * (1.0 / n as f64 + mx * mx / sxx)).sqrt();
    Ok(CurveFit {
        params: BTreeMap::from([("H".to_string(), line.slope), ("intercept".to_string(), line.intercept)]),
        stderr: BTreeMap::from([("H".to_string(), line.slope_stderr), ("intercept".to_string(), intercept_se)]),
        chi2_per_n: line.ssr / n as f64,
        r2: if line.r2.is_finite() { Some(line.r2) } else { None },
        n_points: n,
        fit_space: FitSpace::LogLog,
        iterations: 1,
        converged: true,
        fixed: Vec::new(),
        at_boundary: Vec::new(),
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    /// `None` when two segments do not beat one line by more than 5%.
    pub n_cross: Option<usize>,
    pub h_below: f64,
    pub h_above: f64,
    pub ssr_single: f64,
    pub ssr_two: f64,
}

/// Best two-segment log-log fit. The segments share the break scale and
/// hold at least three scales each.
pub fn crossover_scan(d: &DfaCurve) -> Result<Crossover> {
    let m = d.scales.len();
    if m < 8 {
        return Err(Error::insufficient(format!("crossover scan needs 8 scales, have {m}")));
    }
    if d.scales[m - 1] < 10 * d.scales[0] {
        return Err(Error::insufficient("crossover scan needs scales spanning a decade"));
    }
    let lx: Vec<f64> = d.scales.iter().map(|&s| (s as f64).ln()).collect();
    let ly: Vec<f64> = d.f.iter().map(|f| f.ln()).collect();
    let single = ols(&lx, &ly)?;
    let mut best: Option<(usize, f64, f64, f64)> = None;
    for k in 2..=m - 3 {
        let a = ols(&lx[..=k], &ly[..=k])?;
        let b = ols(&lx[k..], &ly[k..])?;
        let ssr = a.ssr + b.ssr;
        if best.is_none_or(|(_, s, _, _)| ssr < s) {
            best = Some((k, ssr, a.slope, b.slope));
        }
    }
    let (k, ssr_two, h_below, h_above) = best.expect("m >= 8 leaves candidates");
    let found = single.ssr > f64::EPSILON * ly.iter().map(|v| v * v).sum::<f64>()
        && ssr_two < 0.95 * single.ssr;
    Ok(if found {
        Crossover { n_cross: Some(d.scales[k]), h_below, h_above, ssr_single: single.ssr, ssr_two }
    } else {
        Crossover {
            n_cross: None,
            h_below: single.slope,
            h_above: single.slope,
            ssr_single: single.ssr,
            ssr_two,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{fgn_sample, seeded_rng};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded_rng(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn aggregate_basics() {
        let x = normals(1000, 1);
        assert_eq!(aggregate(&x, 1).unwrap().values, x);
        let ones = aggregate(&[1.0; 100], 5).unwrap();
        assert_eq!(ones.values.len(), 96);
        assert!(ones.values.iter().all(|v| *v == 5.0));
        assert_eq!(aggregate_with(&[1.0; 100], 5, false).unwrap().values.len(), 20);
        assert!(aggregate(&x, 100).is_err());
        assert!(aggregate(&x, 0).is_err());
    }

    #[test]
    fn aggregate_variance_adds() {
        let x = normals(200_000, 2);
        let v = stats::mean_std(&aggregate(&x, 10).unwrap().values).1.powi(2);
        assert!((v / 10.0 - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn log_scale_grid() {
        let s = log_scales(4, 1000, 10);
        assert_eq!(s[0], 4);
        assert_eq!(*s.last().unwrap(), 1000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.len() >= 20 && s.len() <= 25);
    }

    #[test]
    fn dfa_white_noise() {
        let x = normals(1 << 16, 3);
        let d = dfa(&x, &log_scales(16, 1024, 10), 1).unwrap();
        let h = hurst_fit(&d, 16, 1024).unwrap().param("H");
        assert!((h - 0.5).abs() < 0.03, "{h}");
    }

    #[test]
    fn dfa_fgn() {
        let x = fgn_sample(0.8, 1 << 16, 4).unwrap();
        let d = dfa(&x, &log_scales(16, 1024, 10), 1).unwrap();
        let h = hurst_fit(&d, 16, 1024).unwrap().param("H");
        assert!((h - 0.8).abs() < 0.05, "{h}");
    }

    #[test]
    fn dfa_errors() {
        let x = normals(100, 5);
        assert!(dfa(&x, &[2, 10], 1).is_err());
        assert!(dfa(&x, &[5, 30], 1).is_err());
        assert!(dfa(&x, &[], 1).is_err());
    }

    #[test]
    fn hurst_fit_exact_power_law() {
        let scales = log_scales(4, 4000, 10);
        let f = scales.iter().map(|&s| 1.7 * (s as f64).powf(0.7)).collect();
        let d = DfaCurve { scales, f, detrend_order: 1 };
        assert!((hurst_fit(&d, 1, 10_000).unwrap().param("H") - 0.7).abs() < 1e-10);
        assert_eq!(crossover_scan(&d).unwrap().n_cross, None);
    }

    #[test]
    fn crossover_on_two_regimes() {
        let scales = log_scales(4, 2000, 10);
        let f = scales
            .iter()
            .map(|&s| {
                let s = s as f64;
                if s < 40.0 { s.powf(0.5) } else { 40f64.powf(0.5) * (s / 40.0).powf(0.9) }
            })
            .collect();
        let c = crossover_scan(&DfaCurve { scales, f, detrend_order: 1 }).unwrap();
        let n = c.n_cross.unwrap();
        assert!((30..=55).contains(&n), "{c:?}");
        assert!((c.h_below - 0.5).abs() < 0.02 && (c.h_above - 0.9).abs() < 0.02, "{c:?}");
    }

    #[test]
    fn tail_slope_of_cauchy_tabulation() {
        let points = (0..200)
            .map(|i| {
                let u = 10f64.powf(i as f64 / 50.0);
                CollapsePoint { u, p: 1.0 / (1.0 + u * u), count: 10 }
            })
            .collect();
        let c = CollapseCurve { n: 1, alpha_used: 1.0, points };
        let t = tail_slope(&c, 10.0, 1000.0).unwrap();
        assert!((t.slope + 2.0).abs() < 0.02, "{t:?}");
        assert!(tail_slope(&c, 10.0, 11.0).is_err());
    }

    #[test]
    fn collapse_requires_base_horizon() {
        let x = normals(5000, 6);
        assert!(collapse(&x, &[5, 20], 2.0, DEFAULT_COLLAPSE_BINS).is_err());
        let c = collapse(&x, &[1, 5], 2.0, DEFAULT_COLLAPSE_BINS).unwrap();
        assert_eq!(c[0].n, 1);
        let central = c[0].points.iter().find(|p| p.u == 0.0).unwrap();
        assert!((central.p - 1.0).abs() < 1e-12);
    }
}
