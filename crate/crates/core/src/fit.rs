//! Empirical densities, least-squares fits of the q-Gaussian density and the
//! q-exponential autocorrelation decay, goodness metrics, Hill estimator.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corr::AcfCurve;
use crate::dist::QGaussianParams;
use crate::error::{Error, Result};
use crate::lsq::{multi_start, LmOptions};
use crate::stats;

pub const DEFAULT_BIN_WIDTH_SIGMA: f64 = 0.1;
pub const DEFAULT_MIN_COUNT: usize = 5;
const MIN_SAMPLES: usize = 100;
const MIN_NONEMPTY_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinScheme {
    /// Equal-width bins, the central one `[-w/2, w/2)`.
    Linear { width: f64 },
    /// Central bin `(-core, core)`, then edges `core * ratio^j` on both sides.
    LogSymmetric { core: f64, ratio: f64 },
}

impl BinScheme {
    /// Linear bins `frac` sample standard deviations wide.
    pub fn linear_sigma(x: &[f64], frac: f64) -> Result<BinScheme> {
        let (_, sd) = stats::mean_std(x);
        if !(sd > 0.0) {
            return Err(Error::degenerate("zero spread, cannot size bins"));
        }
        Ok(BinScheme::Linear { width: frac * sd })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            BinScheme::Linear { width } => width > 0.0 && width.is_finite(),
            BinScheme::LogSymmetric { core, ratio } => {
                core > 0.0 && core.is_finite() && ratio > 1.0 && ratio.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid bin scheme {self:?}")))
        }
    }

    /// Signed bin index of `x`; 0 is the bin containing zero.
    fn index(&self, x: f64) -> i64 {
        match *self {
            BinScheme::Linear { width } => (x / width + 0.5).floor() as i64,
            BinScheme::LogSymmetric { core, ratio } => {
                let a = x.abs();
                if a < core {
                    0
                } else {
                    let j = ((a / core).ln() / ratio.ln()).floor() as i64 + 1;
                    if x < 0.0 { -j } else { j }
                }
            }
        }
    }

    /// `(lo, hi, center)` of bin `k`.
    fn edges(&self, k: i64) -> (f64, f64, f64) {
        match *self {
            BinScheme::Linear { width } => {
                let c = k as f64 * width;
                (c - 0.5 * width, c + 0.5 * width, c)
            }
            BinScheme::LogSymmetric { core, ratio } => {
                if k == 0 {
                    return (-core, core, 0.0);
                }
                let j = k.unsigned_abs() as i32;
                let inner = core * ratio.powi(j - 1);
                let outer = inner * ratio;
                let mid = (inner * outer).sqrt();
                if k > 0 { (inner, outer, mid) } else { (-outer, -inner, -mid) }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
    pub count: usize,
}

impl Bin {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalPdf {
    /// Increasing, contiguous; outer empty bins trimmed.
    pub bins: Vec<Bin>,
    pub total: usize,
    pub scheme: BinScheme,
    /// Non-finite samples left out of the histogram.
    pub discarded: usize,
}

impl EmpiricalPdf {
    /// Density of the bin containing zero, if present.
    pub fn central_density(&self) -> Option<f64> {
        self.bins.iter().find(|b| b.lo <= 0.0 && 0.0 < b.hi).map(|b| b.density)
    }

    pub fn nonempty(&self) -> usize {
        self.bins.iter().filter(|b| b.count > 0).count()
    }
}

/// Histogram density `count / (binned * width)`.
pub fn empirical_pdf(x: &[f64], scheme: BinScheme) -> Result<EmpiricalPdf> {
    scheme.validate()?;
    if x.len() < MIN_SAMPLES {
        return Err(Error::insufficient(format!(
            "empirical density needs {MIN_SAMPLES} samples, have {}",
            x.len()
        )));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    let mut discarded = 0;
    for &v in x {
        if v.is_finite() {
            *counts.entry(scheme.index(v)).or_default() += 1;
        } else {
            discarded += 1;
        }
    }
    if counts.len() < MIN_NONEMPTY_BINS {
        return Err(Error::degenerate(format!(
            "only {} nonempty bins, need {MIN_NONEMPTY_BINS}",
            counts.len()
        )));
    }
    let binned = (x.len() - discarded) as f64;
    let (&kmin, _) = counts.first_key_value().expect("nonempty");
    let (&kmax, _) = counts.last_key_value().expect("nonempty");
    let bins = (kmin..=kmax)
        .map(|k| {
            let (lo, hi, center) = scheme.edges(k);
            let count = counts.get(&k).copied().unwrap_or(0);
            Bin { center, lo, hi, density: count as f64 / (binned * (hi - lo)), count }
        })
        .collect();
    Ok(EmpiricalPdf { bins, total: x.len(), scheme, discarded })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitSpace {
    Linear,
    Semilog,
    LogLog,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveFit {
    pub params: BTreeMap<String, f64>,
    /// Zero for parameters held fixed.
    pub stderr: BTreeMap<String, f64>,
    pub chi2_per_n: f64,
    /// `None` when the observations have no spread in fit space.
    pub r2: Option<f64>,
    pub n_points: usize,
    pub fit_space: FitSpace,
    pub iterations: usize,
    pub converged: bool,
    pub fixed: Vec<String>,
    pub at_boundary: Vec<String>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl CurveFit {
    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn se(&self, name: &str) -> f64 {
        self.stderr[name]
    }

    /// Flat key/value record: `q`, `q_stderr`, ..., `chi2_per_n`, `r2`, ...
    pub fn to_record(&self) -> serde_json::Map<String, serde_json::Value> {
        use serde_json::{json, Value};
        let mut m = serde_json::Map::new();
        for (k, v) in &self.params {
            m.insert(k.clone(), json!(v));
            m.insert(format!("{k}_stderr"), json!(self.stderr[k]));
        }
        m.insert("chi2_per_n".into(), json!(self.chi2_per_n));
        m.insert("r2".into(), self.r2.map_or(Value::Null, |v| json!(v)));
        m.insert("n_points".into(), json!(self.n_points));
        m.insert("fit_space".into(), serde_json::to_value(self.fit_space).expect("enum"));
        m.insert("iterations".into(), json!(self.iterations));
        m.insert("converged".into(), json!(self.converged));
        m.insert("fixed".into(), json!(self.fixed.join(",")));
        m.insert("at_boundary".into(), json!(self.at_boundary.join(",")));
        m
    }
}

/// `(chi2_per_n, r2)`: mean squared residual, and `1 - SS_res/SS_tot` about
/// the mean of the observations `fitted - residuals`.
pub fn goodness(residuals: &[f64], fitted: &[f64]) -> Result<(f64, Option<f64>)> {
    if residuals.len() != fitted.len() || residuals.len() < 2 {
        return Err(Error::InvalidArgument(
            "goodness needs equal-length inputs of at least two points".into(),
        ));
    }
    let n = residuals.len() as f64;
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let obs: Vec<f64> = fitted.iter().zip(residuals).map(|(f, r)| f - r).collect();
    let m = stats::mean(&obs);
    let ss_tot: f64 = obs.iter().map(|o| (o - m).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { Some(1.0 - ss_res / ss_tot) } else { None };
    Ok((ss_res / n, r2))
}

/// Parameter layout shared by the fitters: names, bounds, optional fixed values.
struct Problem<'a> {
    names: &'a [&'a str],
    lower: &'a [f64],
    upper: &'a [f64],
    fixed: Vec<Option<f64>>,
    space: FitSpace,
}

impl Problem<'_> {
    fn free(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&i| self.fixed[i].is_none()).collect()
    }

    fn expand(&self, free_vals: &[f64]) -> Vec<f64> {
        let mut it = free_vals.iter();
        self.fixed
            .iter()
            .map(|f| f.unwrap_or_else(|| *it.next().expect("free parameter")))
            .collect()
    }

    /// Fit `model(params, x)` to `ys` in place. Residual is model minus data.
    fn solve<M>(&self, model: M, xs: &[f64], ys: &[f64], starts: &[Vec<f64>]) -> Result<CurveFit>
    where
        M: Fn(&[f64], f64) -> f64 + Sync,
    {
        let free = self.free();
        let lo: Vec<f64> = free.iter().map(|&i| self.lower[i]).collect();
        let hi: Vec<f64> = free.iter().map(|&i| self.upper[i]).collect();
        let residual = |p: &[f64]| {
            let full = self.expand(p);
            xs.iter().zip(ys).map(|(&x, &y)| model(&full, x) - y).collect::<Vec<_>>()
        };
        let free_starts: Vec<Vec<f64>> = starts
            .iter()
            .map(|s| free.iter().map(|&i| s[i].clamp(self.lower[i], self.upper[i])).collect())
            .collect();
        let opts = LmOptions::default();
        let best = multi_start(&residual, &free_starts, &lo, &hi, &opts)
            .ok_or_else(|| Error::degenerate("model not finite at any starting point"))?;
        let full = self.expand(&best.params);
        if !best.converged {
            return Err(Error::FitFailed {
                iterations: best.iterations,
                last: self.names.iter().map(|n| n.to_string()).zip(full).collect(),
            });
        }
        let se_free = best.stderr().unwrap_or_else(|| vec![f64::NAN; free.len()]);
        let mut params = BTreeMap::new();
        let mut stderr = BTreeMap::new();
        let mut at_boundary = Vec::new();
        let mut k = 0;
        for (i, name) in self.names.iter().enumerate() {
            params.insert(name.to_string(), full[i]);
            if self.fixed[i].is_some() {
                stderr.insert(name.to_string(), 0.0);
            } else {
                stderr.insert(name.to_string(), se_free[k]);
                if best.at_bound[k] {
                    at_boundary.push(name.to_string());
                }
                k += 1;
            }
        }
        let fitted: Vec<f64> = ys.iter().zip(&best.residuals).map(|(y, r)| y + r).collect();
        let (chi2_per_n, r2) = goodness(&best.residuals, &fitted)?;
        Ok(CurveFit {
            params,
            stderr,
            chi2_per_n,
            r2,
            n_points: xs.len(),
            fit_space: self.space,
            iterations: best.iterations,
            converged: best.converged,
            fixed: (0..self.names.len())
                .filter(|&i| self.fixed[i].is_some())
                .map(|i| self.names[i].to_string())
                .collect(),
            at_boundary,
            residuals: best.residuals,
        })
    }
}

const Q_MAX: f64 = 2.999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGaussFitOptions {
    /// Extra starting point `(q, B)` tried before the grid.
    pub init: Option<(f64, f64)>,
    pub fixed_q: Option<f64>,
    /// Bins with fewer counts are left out of the fit.
    pub min_count: usize,
}

impl Default for QGaussFitOptions {
    fn default() -> Self {
        QGaussFitOptions { init: None, fixed_q: None, min_count: DEFAULT_MIN_COUNT }
    }
}

/// Bins in the contiguous run around the center whose counts all reach
/// `min_count`. Stopping at the first sparse bin on each side keeps isolated
/// tail bins, which pass a count cut only when they fluctuate upward, out of
/// the fit.
pub fn fit_window(pdf: &EmpiricalPdf, min_count: usize) -> &[Bin] {
    let Some(c) = pdf.bins.iter().position(|b| b.lo <= 0.0 && 0.0 < b.hi) else {
        return &[];
    };
    if pdf.bins[c].count < min_count {
        return &[];
    }
    let mut lo = c;
    while lo > 0 && pdf.bins[lo - 1].count >= min_count {
        lo -= 1;
    }
    let mut hi = c;
    while hi + 1 < pdf.bins.len() && pdf.bins[hi + 1].count >= min_count {
        hi += 1;
    }
    &pdf.bins[lo..=hi]
}

/// Semilog least-squares fit of the q-Gaussian `(q, B)`; `A` follows from
/// normalization. Parameters are `q` and `B`.
pub fn fit_qgaussian(pdf: &EmpiricalPdf, opts: &QGaussFitOptions) -> Result<CurveFit> {
    if pdf.nonempty() < MIN_NONEMPTY_BINS {
        return Err(Error::insufficient("q-Gaussian fit needs 10 nonempty bins"));
    }
    if let Some(q) = opts.fixed_q {
        if !(1.0..3.0).contains(&q) {
            return Err(Error::domain(format!("fixed q = {q} outside [1, 3)")));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = fit_window(pdf, opts.min_count.max(1))
        .iter()
        .map(|b| (b.center, b.density.ln()))
        .unzip();
    if xs.len() < 4 {
        return Err(Error::insufficient(format!(
            "only {} bins reach {} counts",
            xs.len(),
            opts.min_count
        )));
    }
    let p0 = pdf
        .central_density()
        .filter(|d| *d > 0.0)
        .unwrap_or_else(|| ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp());
    let b0 = std::f64::consts::PI * p0 * p0;
    let mut starts = Vec::new();
    if let Some((q, b)) = opts.init {
        starts.push(vec![q, b]);
    }
    for q in [1.2, 1.6, 2.2] {
        for f in [1.0 / 3.0, 1.0, 3.0] {
            starts.push(vec![opts.fixed_q.unwrap_or(q), b0 * f]);
        }
    }
    let problem = Problem {
        names: &["q", "B"],
        lower: &[1.0, 1e-8],
        upper: &[Q_MAX, 1e8],
        fixed: vec![opts.fixed_q, None],
        space: FitSpace::Semilog,
    };
    let model = |p: &[f64], x: f64| match QGaussianParams::new(p[0], p[1]) {
        Ok(g) => g.ln_pdf(x),
        Err(_) => f64::NAN,
    };
    problem.solve(model, &xs, &ys, &starts)
}

/// `ln C(τ) = -ln(1 + (q_c - 1) T τ²) / (q_c - 1)`, Gaussian limit at `q_c = 1`.
pub fn qexp_acf_ln(q_c: f64, t: f64, tau: f64) -> f64 {
    let d = q_c - 1.0;
    let u = t * tau * tau;
    if d.abs() < 1e-12 { -u } else { -(d * u).ln_1p() / d }
}

/// Semilog fit of the q-exponential decay over lags `lo..=hi`.
/// Parameters are `q_c` and `T`.
pub fn fit_qexponential_acf(acf: &AcfCurve, lo: usize, hi: usize) -> Result<CurveFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = 0;
    for (&lag, &v) in acf.lags.iter().zip(&acf.values) {
        if lag < lo || lag > hi {
            continue;
        }
        if v > 0.0 {
            xs.push(lag as f64);
            ys.push(v.ln());
        } else {
            dropped += 1;
        }
    }
    if dropped > 0 {
        log::warn!("{dropped} nonpositive autocorrelation values left out of the fit");
    }
    if xs.len() < 5 {
        return Err(Error::insufficient(format!(
            "{} usable lags in {lo}..={hi}, need 5",
            xs.len()
        )));
    }
    let mut starts = Vec::new();
    for q in [1.5, 3.0, 6.0] {
        for t in [0.01, 0.1, 1.0] {
            starts.push(vec![q, t]);
        }
    }
    let problem = Problem {
        names: &["q_c", "T"],
        lower: &[1.0, 1e-10],
        upper: &[100.0, 1e6],
        fixed: vec![None, None],
        space: FitSpace::Semilog,
    };
    problem.solve(|p: &[f64], tau: f64| qexp_acf_ln(p[0], p[1], tau), &xs, &ys, &starts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HillEstimate {
    pub k: usize,
    pub alpha: f64,
    pub stderr: f64,
}

/// Hill tail index from the `k` largest `|x|`.
pub fn hill_estimate(x: &[f64], k: usize) -> Result<HillEstimate> {
    if k == 0 || 2 * k >= x.len() {
        return Err(Error::InvalidArgument(format!(
            "Hill order k = {k} must satisfy 0 < k < n/2 (n = {})",
            x.len()
        )));
    }
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    let pivot = a[k];
    if !(pivot > 0.0) {
        return Err(Error::degenerate("Hill threshold order statistic is zero"));
    }
    let s: f64 = a[..k].iter().map(|v| (v / pivot).ln()).sum();
    if !(s > 0.0) {
        return Err(Error::degenerate("no spread above the Hill threshold"));
    }
    let alpha = k as f64 / s;
    Ok(HillEstimate { k, alpha, stderr: alpha / (k as f64).sqrt() })
}

/// Hill estimates over several `k`, skipping orders that are out of range.
pub fn hill_scan(x: &[f64], ks: &[usize]) -> Vec<HillEstimate> {
    ks.iter().filter_map(|&k| hill_estimate(x, k).ok()).collect()
}

pub const DEFAULT_HILL_KS: [usize; 6] = [50, 100, 200, 400, 800, 1600];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{qgauss_sample, seeded_rng};
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn normal_density_at_zero() {
        let mut rng = seeded_rng(1);
        let x: Vec<f64> = (0..1_000_000).map(|_| rng.sample(StandardNormal)).collect();
        let pdf = empirical_pdf(&x, BinScheme::Linear { width: 0.1 }).unwrap();
        let want = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((pdf.central_density().unwrap() / want - 1.0).abs() < 0.02);
        let mass: f64 = pdf.bins.iter().map(|b| b.density * b.width()).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_is_flat() {
        let mut rng = seeded_rng(2);
        let x: Vec<f64> = (0..200_000).map(|_| rng.random::<f64>()).collect();
        // shift so that the bins tile [0, 1] exactly
        let pdf = empirical_pdf(&x.iter().map(|v| v - 0.05).collect::<Vec<_>>(), BinScheme::Linear { width: 0.1 }).unwrap();
        for b in &pdf.bins {
            assert!((b.density - 1.0).abs() < 0.05, "{b:?}");
        }
    }

    #[test]
    fn empirical_pdf_errors() {
        assert!(matches!(empirical_pdf(&[1.0; 500], BinScheme::Linear { width: 0.1 }), Err(Error::Degenerate(_))));
        assert!(empirical_pdf(&[1.0; 50], BinScheme::Linear { width: 0.1 }).is_err());
        assert!(empirical_pdf(&[1.0; 500], BinScheme::Linear { width: 0.0 }).is_err());
    }

    #[test]
    fn log_bins_tile_the_line() {
        let s = BinScheme::LogSymmetric { core: 0.5, ratio: 1.5 };
        for x in [-7.3, -0.49, 0.0, 0.3, 0.5, 0.74, 0.76, 12.0] {
            let (lo, hi, _) = s.edges(s.index(x));
            assert!(lo <= x && x <= hi, "{x} {lo} {hi}");
        }
        assert_eq!(s.index(-0.5), -1);
        assert_eq!(s.index(0.5), 1);
    }

    #[test]
    fn goodness_definitions() {
        let obs = [1.0, 2.0, 4.0];
        let (c, r2) = goodness(&[0.0; 3], &obs).unwrap();
        assert_eq!((c, r2), (0.0, Some(1.0)));
        let m = 7.0 / 3.0;
        let res: Vec<f64> = obs.iter().map(|o| m - o).collect();
        assert!(goodness(&res, &[m; 3]).unwrap().1.unwrap().abs() < 1e-12);
        assert_eq!(goodness(&[0.5; 4], &[1.0, 2.0, 3.0, 4.0]).unwrap().0, 0.25);
        assert_eq!(goodness(&[0.0; 2], &[1.0, 1.0]).unwrap().1, None);
    }

    fn exact_pdf(q: f64, b: f64) -> EmpiricalPdf {
        let g = QGaussianParams::new(q, b).unwrap();
        let w = 0.05;
        let bins = (-60..=60)
            .map(|k| {
                let c = k as f64 * w;
                Bin { center: c, lo: c - w / 2.0, hi: c + w / 2.0, density: g.pdf(c), count: 1000 }
            })
            .collect();
        EmpiricalPdf { bins, total: 121_000, scheme: BinScheme::Linear { width: w }, discarded: 0 }
    }

    #[test]
    fn qgaussian_self_consistency() {
        let f = fit_qgaussian(&exact_pdf(1.49, 2.23), &QGaussFitOptions::default()).unwrap();
        assert!((f.param("q") - 1.49).abs() < 1e-6, "{f:?}");
        assert!((f.param("B") - 2.23).abs() < 1e-6);
        assert!(f.chi2_per_n < 1e-20);
        assert_eq!(f.stderr.keys().collect::<Vec<_>>(), f.params.keys().collect::<Vec<_>>());
    }

    #[test]
    fn qgaussian_fixed_q_is_honored() {
        let opts = QGaussFitOptions { fixed_q: Some(1.666), ..Default::default() };
        let f = fit_qgaussian(&exact_pdf(1.49, 2.23), &opts).unwrap();
        assert_eq!(f.param("q"), 1.666);
        assert_eq!(f.se("q"), 0.0);
        assert_eq!(f.fixed, vec!["q".to_string()]);
    }

    #[test]
    fn qgaussian_recovers_sampler() {
        let x = qgauss_sample(1.72, 5.9, 200_000, 11).unwrap();
        let pdf = empirical_pdf(&x, BinScheme::Linear { width: 0.04 }).unwrap();
        let f = fit_qgaussian(&pdf, &QGaussFitOptions::default()).unwrap();
        assert!((f.param("q") - 1.72).abs() < 0.05, "{f:?}");
        assert!((f.param("B") / 5.9 - 1.0).abs() < 0.1, "{f:?}");
    }

    #[test]
    fn qexp_self_consistency() {
        let lags: Vec<usize> = (0..=300).collect();
        let values = lags.iter().map(|&t| qexp_acf_ln(4.7, 0.45, t as f64).exp()).collect();
        let acf = AcfCurve { n_eff: vec![1; 301], lags, values, noise_level: 0.01 };
        let f = fit_qexponential_acf(&acf, 1, 300).unwrap();
        assert!((f.param("q_c") - 4.7).abs() < 1e-6, "{f:?}");
        assert!((f.param("T") - 0.45).abs() < 1e-6);
        let rec = f.to_record();
        assert!(rec.contains_key("q_c_stderr") && rec.contains_key("converged"));
    }

    #[test]
    fn qexp_needs_positive_lags() {
        let acf = AcfCurve {
            lags: (0..10).collect(),
            values: vec![1.0, 0.5, -0.1, -0.2, 0.1, -0.1, 0.05, -0.3, 0.0, 0.2],
            n_eff: vec![1; 10],
            noise_level: 0.1,
        };
        assert!(matches!(fit_qexponential_acf(&acf, 1, 9), Err(Error::Insufficient(_))));
    }

    #[test]
    fn hill_pareto_and_scale() {
        let mut rng = seeded_rng(5);
        let x: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>().powf(-1.0 / 2.0)).collect();
        let h = hill_estimate(&x, 1000).unwrap();
        assert!((h.alpha - 2.0).abs() < 0.2, "{h:?}");
        let scaled: Vec<f64> = x.iter().map(|v| -3.7 * v).collect();
        assert!((hill_estimate(&scaled, 1000).unwrap().alpha / h.alpha - 1.0).abs() < 1e-12);
        assert!(hill_estimate(&[2.0; 100], 10).is_err());
        assert!(hill_estimate(&x[..10], 5).is_err());
        assert_eq!(hill_scan(&x, &[10, 100, 90_000]).len(), 2);
    }
}

