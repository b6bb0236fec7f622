//! Command-line front end: `ingest`, `analyze`, `synth`, `defaults`.
//!
//! Flag values fall back to `FLUCSTAT_*` environment variables, then to the
//! built-in defaults printed by `flucstat defaults`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::corr::{
    abs_acf, acf, antisymmetry_baseline, antisymmetry_score, leverage, shuffle, significant_lags,
    DEFAULT_ACF_MAX_LAG, DEFAULT_LEVERAGE_MAX_LAG,
};
use crate::dist::{alpha_from_q, fgn_sample, qgauss_sample, stable_sample, QGaussianParams, StableParams};
use crate::error::{Error, Result};
use crate::fit::{
    empirical_pdf, fit_qexponential_acf, fit_qgaussian, hill_scan, qexp_acf_ln, BinScheme, CurveFit,
    QGaussFitOptions, DEFAULT_BIN_WIDTH_SIGMA, DEFAULT_HILL_KS, DEFAULT_MIN_COUNT,
};
use crate::ingest::{
    fetch_remote, log_returns, normalize, parse_quotes, ColumnRef, ColumnSpec, FetchOptions, ReturnSeries,
    SeriesMeta, CACHE_DIR_ENV,
};
use crate::io::{atomic_write, csv_table};
use crate::scaling::{
    collapse, collapse_csv, crossover_scan, default_scales, dfa, hurst_fit, log_scales, tail_slope,
    DEFAULT_COLLAPSE_BINS, DEFAULT_DETREND_ORDER, DEFAULT_HORIZONS,
};
use crate::stats;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SHUFFLES: usize = 100;
pub const DEFAULT_TAIL_RANGE: [f64; 2] = [3.0, 100.0];
pub const DEFAULT_SIGNIFICANCE: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(name = "flucstat", version, about = "Heavy-tail, correlation and persistence analysis of daily quote series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a quote file (local or remote) into a normalized return series.
    Ingest(IngestArgs),
    /// Run the analyses on a return series and write a report plus plot data.
    Analyze(AnalyzeArgs),
    /// Write a synthetic return series from a reference distribution.
    Synth(SynthArgs),
    /// Print every default value as JSON.
    Defaults,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Local quote file.
    #[arg(long, conflicts_with = "url", required_unless_present = "url")]
    pub input: Option<PathBuf>,
    /// Remote quote file, cached under the directory named by FLUCSTAT_CACHE_DIR.
    #[arg(long)]
    pub url: Option<String>,
    /// First date kept (inclusive, YYYY-MM-DD).
    #[arg(long, env = "FLUCSTAT_FROM")]
    pub from: Option<NaiveDate>,
    /// Last date kept (inclusive, YYYY-MM-DD).
    #[arg(long, env = "FLUCSTAT_TO")]
    pub to: Option<NaiveDate>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Date column, by zero-based index or header name.
    #[arg(long, default_value = "0")]
    pub date_column: String,
    /// Quote column, by zero-based index or header name.
    #[arg(long, default_value = "1")]
    pub value_column: String,
    /// Read remote files from the cache only.
    #[arg(long, env = "FLUCSTAT_OFFLINE")]
    pub offline: bool,
    /// Network timeout in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    #[arg(long, env = "FLUCSTAT_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "returns.csv")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Analysis {
    All,
    Acf,
    Pdf,
    Hill,
    Collapse,
    Dfa,
    Leverage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range(pub f64, pub f64);

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        let lo: f64 = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
        let hi: f64 = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
        if !(lo < hi) {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Range(lo, hi))
    }
}

/// `LO:HI` for a log-spaced grid or a comma list of box sizes.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleSpec {
    Grid(usize, usize),
    List(Vec<usize>),
}

impl FromStr for ScaleSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let int = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad scale {t:?}"));
        if let Some((a, b)) = s.split_once(':') {
            Ok(ScaleSpec::Grid(int(a)?, int(b)?))
        } else {
            Ok(ScaleSpec::List(s.split(',').map(int).collect::<std::result::Result<_, _>>()?))
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Return series written by `ingest` or `synth`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, env = "FLUCSTAT_ANALYSES", value_enum, value_delimiter = ',', default_value = "all")]
    pub analyses: Vec<Analysis>,
    /// Largest autocorrelation lag.
    #[arg(long, env = "FLUCSTAT_MAX_LAG", default_value_t = DEFAULT_ACF_MAX_LAG)]
    pub max_lag: usize,
    /// Largest leverage lag.
    #[arg(long, default_value_t = DEFAULT_LEVERAGE_MAX_LAG)]
    pub leverage_max_lag: usize,
    /// Lag window of the q-exponential fit (default 1:max-lag).
    #[arg(long)]
    pub acf_fit_range: Option<Range>,
    /// Density bin width in standard deviations.
    #[arg(long, env = "FLUCSTAT_BINS", default_value_t = DEFAULT_BIN_WIDTH_SIGMA)]
    pub bins: f64,
    /// Smallest bin count entering the density fit.
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    pub min_count: usize,
    /// Aggregation horizons for the scaling collapse; must include 1.
    #[arg(long, env = "FLUCSTAT_HORIZONS", value_delimiter = ',', default_values_t = DEFAULT_HORIZONS)]
    pub horizons: Vec<usize>,
    /// Stability index for the collapse (default: implied by the fitted q).
    #[arg(long, env = "FLUCSTAT_ALPHA")]
    pub alpha: Option<f64>,
    /// |u| window of the collapse tail slope.
    #[arg(long, default_value = "3:100")]
    pub tail_range: Range,
    /// DFA box sizes, LO:HI (log grid) or a comma list (default 4:len/4).
    #[arg(long, env = "FLUCSTAT_SCALES")]
    pub scales: Option<ScaleSpec>,
    #[arg(long, env = "FLUCSTAT_DETREND_ORDER", default_value_t = DEFAULT_DETREND_ORDER)]
    pub detrend_order: usize,
    /// Also fit the density with q held at this value.
    #[arg(long)]
    pub fix_q: Option<f64>,
    /// Shuffle surrogates for leverage noise band and baseline.
    #[arg(long, default_value_t = DEFAULT_SHUFFLES)]
    pub shuffles: usize,
    #[arg(long, env = "FLUCSTAT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, env = "FLUCSTAT_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
    /// Add log10 columns to the DFA plot data.
    #[arg(long)]
    pub log_columns: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gaussian,
    Qgaussian,
    Stable,
    Fgn,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(short = 'n', long, default_value_t = 13865)]
    pub n: usize,
    /// q-Gaussian index.
    #[arg(long, default_value_t = 1.72)]
    pub q: f64,
    /// q-Gaussian inverse width.
    #[arg(long = "b", default_value_t = 5.9)]
    pub b: f64,
    /// Stable index.
    #[arg(long, default_value_t = 1.77)]
    pub alpha: f64,
    /// Stable scale coefficient.
    #[arg(long = "scale", default_value_t = 1.0)]
    pub a: f64,
    /// Hurst exponent of fractional Gaussian noise.
    #[arg(long, default_value_t = 0.8)]
    pub hurst: f64,
    #[arg(long, env = "FLUCSTAT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Date stamped on the first return; later ones follow day by day.
    #[arg(long, default_value = "1954-01-05")]
    pub start: NaiveDate,
    #[arg(long, env = "FLUCSTAT_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "synth.csv")]
    pub output: String,
}

/// Parse `args` and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Ingest(a) => cmd_ingest(&a).map(|_| 0),
        Command::Analyze(a) => cmd_analyze(&a).map(|r| if r.failed { 1 } else { 0 }),
        Command::Synth(a) => cmd_synth(&a).map(|_| 0),
        Command::Defaults => {
            use std::io::Write;
            let text = serde_json::to_string_pretty(&defaults()).expect("json");
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(0)
        }
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

pub fn defaults() -> Value {
    json!({
        "analyze": {
            "analyses": "all",
            "max_lag": DEFAULT_ACF_MAX_LAG,
            "leverage_max_lag": DEFAULT_LEVERAGE_MAX_LAG,
            "acf_fit_range": "1:max_lag",
            "bins": DEFAULT_BIN_WIDTH_SIGMA,
            "min_count": DEFAULT_MIN_COUNT,
            "horizons": DEFAULT_HORIZONS,
            "alpha": "implied by fitted q; 2 when q <= 5/3",
            "tail_range": DEFAULT_TAIL_RANGE,
            "collapse_bins": DEFAULT_COLLAPSE_BINS,
            "scales": "log grid 4:len/4, 10 per decade",
            "detrend_order": DEFAULT_DETREND_ORDER,
            "shuffles": DEFAULT_SHUFFLES,
            "significance_multiple": DEFAULT_SIGNIFICANCE,
            "hill_k": DEFAULT_HILL_KS,
            "seed": DEFAULT_SEED,
            "out_dir": "out",
        },
        "ingest": {
            "delimiter": ",",
            "date_column": 0,
            "value_column": 1,
            "timeout_s": 60,
            "out_dir": ".",
            "output": "returns.csv",
        },
        "synth": {
            "n": 13865,
            "q": 1.72,
            "b": 5.9,
            "alpha": 1.77,
            "scale": 1.0,
            "hurst": 0.8,
            "start": "1954-01-05",
            "output": "synth.csv",
        },
        "environment": {
            "cache_dir": CACHE_DIR_ENV,
            "flags": ["FLUCSTAT_FROM", "FLUCSTAT_TO", "FLUCSTAT_OFFLINE", "FLUCSTAT_OUT_DIR",
                      "FLUCSTAT_ANALYSES", "FLUCSTAT_MAX_LAG", "FLUCSTAT_BINS", "FLUCSTAT_HORIZONS",
                      "FLUCSTAT_ALPHA", "FLUCSTAT_SCALES", "FLUCSTAT_DETREND_ORDER", "FLUCSTAT_SEED"],
        },
    })
}

fn column_ref(s: &str) -> ColumnRef {
    s.parse().map(ColumnRef::Index).unwrap_or_else(|_| ColumnRef::Name(s.to_string()))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn cmd_ingest(a: &IngestArgs) -> Result<PathBuf> {
    if !a.delimiter.is_ascii() {
        return Err(Error::InvalidArgument("delimiter must be a single ASCII character".into()));
    }
    let (raw, source) = match (&a.input, &a.url) {
        (Some(p), _) => (fs::read(p)?, p.display().to_string()),
        (None, Some(u)) => {
            let mut opts = FetchOptions::from_env();
            opts.offline = a.offline;
            opts.timeout = Duration::from_secs(a.timeout);
            (fetch_remote(u, &opts)?, u.clone())
        }
        (None, None) => return Err(Error::InvalidArgument("one of --input or --url is required".into())),
    };
    let spec = ColumnSpec {
        delimiter: a.delimiter as u8,
        date_column: column_ref(&a.date_column),
        value_column: column_ref(&a.value_column),
    };
    let (quotes, dropped) = parse_quotes(&raw, &spec)?;
    let window = quotes.restrict(a.from, a.to);
    let returns = normalize(&log_returns(&window)?)?;
    let meta = SeriesMeta {
        source,
        from: a.from,
        to: a.to,
        n_quotes: window.len(),
        n_returns: returns.len(),
        dropped,
        raw_mean: returns.raw_mean(),
        raw_std: returns.raw_std(),
    };
    ensure_dir(&a.out_dir)?;
    let path = a.out_dir.join(&a.output);
    returns.write(&path, &meta)?;
    eprintln!(
        "{} quotes, {} returns ({} rows dropped) -> {}",
        meta.n_quotes,
        meta.n_returns,
        meta.dropped.total(),
        path.display()
    );
    Ok(path)
}

pub fn cmd_synth(a: &SynthArgs) -> Result<PathBuf> {
    if a.n < 2 {
        return Err(Error::InvalidArgument("synthetic series needs n >= 2".into()));
    }
    let (raw, desc) = match a.family {
        Family::Gaussian => (qgauss_sample(1.0, 0.5, a.n, a.seed)?, "gaussian".to_string()),
        Family::Qgaussian => (
            qgauss_sample(a.q, a.b, a.n, a.seed)?,
            format!("qgaussian q={} B={}", a.q, a.b),
        ),
        Family::Stable => (
            stable_sample(&StableParams::new(a.alpha, a.a)?, a.n, a.seed),
            format!("stable alpha={} a={}", a.alpha, a.a),
        ),
        Family::Fgn => (fgn_sample(a.hurst, a.n, a.seed)?, format!("fgn H={}", a.hurst)),
    };
    let series = ReturnSeries::from_values(&raw, a.start)?;
    let meta = SeriesMeta {
        source: format!("synth:{desc} n={} seed={}", a.n, a.seed),
        from: series.dates().first().copied(),
        to: series.dates().last().copied(),
        n_quotes: a.n + 1,
        n_returns: a.n,
        dropped: Default::default(),
        raw_mean: series.raw_mean(),
        raw_std: series.raw_std(),
    };
    ensure_dir(&a.out_dir)?;
    let path = a.out_dir.join(&a.output);
    series.write(&path, &meta)?;
    eprintln!("{} -> {}", meta.source, path.display());
    Ok(path)
}

/// Outcome of `analyze`: the report document and whether any block failed.
#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub report: Value,
    pub failed: bool,
    pub files: Vec<PathBuf>,
}

struct Blocks {
    map: Map<String, Value>,
    failed: bool,
}

impl Blocks {
    fn record(&mut self, name: &str, r: Result<Value>) -> Option<Value> {
        match r {
            Ok(mut v) => {
                v.as_object_mut().expect("block is an object").insert("status".into(), json!("ok"));
                self.map.insert(name.into(), v.clone());
                Some(v)
            }
            Err(e) => {
                log::warn!("{name} analysis failed: {e}");
                self.failed = true;
                self.map.insert(name.into(), json!({"status": "failed", "error": e.to_string()}));
                None
            }
        }
    }
}

fn fit_value(f: &CurveFit) -> Value {
    Value::Object(f.to_record())
}

fn seeds(seed: u64) -> [(&'static str, u64); 4] {
    [
        ("leverage_noise_band", seed),
        ("leverage_baseline", seed.wrapping_add(1)),
        ("acf_shuffle", seed.wrapping_add(2)),
        ("dfa_shuffle", seed.wrapping_add(3)),
    ]
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<AnalyzeOutcome> {
    let (series, meta) = ReturnSeries::read(&a.input)?;
    let r = series.values();
    let selected = |x: Analysis| a.analyses.contains(&Analysis::All) || a.analyses.contains(&x);
    let seed_of = |name: &str| seeds(a.seed).iter().find(|(n, _)| *n == name).expect("seed").1;
    ensure_dir(&a.out_dir)?;
    let mut files = Vec::new();
    let mut write = |name: &str, body: String| -> Result<()> {
        let p = a.out_dir.join(name);
        atomic_write(&p, body.as_bytes())?;
        files.push(p);
        Ok(())
    };
    let mut blocks = Blocks { map: Map::new(), failed: false };
    let abs: Vec<f64> = r.iter().map(|v| v.abs()).collect();

    if selected(Analysis::Acf) {
        let mut fit_failed = false;
        let res = (|| -> Result<(Value, String)> {
            let c_r = acf(r, a.max_lag)?;
            let c_abs = abs_acf(r, a.max_lag)?;
            let Range(lo, hi) = a.acf_fit_range.unwrap_or(Range(1.0, a.max_lag as f64));
            let fit = fit_qexponential_acf(&c_abs, lo.ceil() as usize, hi.floor() as usize);
            let shuffled = abs_acf(&shuffle(r, seed_of("acf_shuffle")), a.max_lag)?;
            let mut cols = vec!["lag", "acf_r", "acf_abs", "noise_bound"];
            if fit.is_ok() {
                cols.push("qexp_fit");
            }
            let rows = c_r.lags.iter().enumerate().map(|(i, &lag)| {
                let mut row = vec![lag as f64, c_r.values[i], c_abs.values[i], DEFAULT_SIGNIFICANCE * c_r.noise_level];
                if let Ok(f) = &fit {
                    row.push(qexp_acf_ln(f.param("q_c"), f.param("T"), lag as f64).exp());
                }
                row
            });
            let csv = csv_table(&cols, rows);
            let v = json!({
                "max_lag": a.max_lag,
                "noise_level": c_r.noise_level,
                "significance_multiple": DEFAULT_SIGNIFICANCE,
                "significant_lags_r": significant_lags(&c_r, DEFAULT_SIGNIFICANCE),
                "significant_lags_abs_count": significant_lags(&c_abs, DEFAULT_SIGNIFICANCE).len(),
                "shuffled_abs_significant_lags": significant_lags(&shuffled, DEFAULT_SIGNIFICANCE),
                "fit_range": [lo, hi],
                "qexp_fit": match &fit {
                    Ok(f) => fit_value(f),
                    Err(e) => json!({"status": "failed", "error": e.to_string()}),
                },
            });
            fit_failed = fit.is_err();
            Ok((v, csv))
        })();
        blocks.failed |= fit_failed;
        if let Some(csv) = split_csv(&mut blocks, "acf", res) {
            write("fig1_acf.csv", csv)?;
        }
    }

    let mut fitted_q = None;
    if selected(Analysis::Pdf) || (selected(Analysis::Collapse) && a.alpha.is_none()) {
        let res = (|| -> Result<(Value, String)> {
            let scheme = BinScheme::linear_sigma(r, a.bins)?;
            let pdf = empirical_pdf(r, scheme)?;
            let opts = QGaussFitOptions { min_count: a.min_count, ..Default::default() };
            let free = fit_qgaussian(&pdf, &opts)?;
            fitted_q = Some(free.param("q"));
            let fixed = match a.fix_q {
                Some(q) => Some(fit_qgaussian(&pdf, &QGaussFitOptions { fixed_q: Some(q), ..opts })?),
                None => None,
            };
            let g = QGaussianParams::new(free.param("q"), free.param("B"))?;
            let gf = match &fixed {
                Some(f) => Some(QGaussianParams::new(f.param("q"), f.param("B"))?),
                None => None,
            };
            let mut cols = vec!["x", "density", "count", "qgauss_fit"];
            if gf.is_some() {
                cols.push("qgauss_fixed_q");
            }
            let csv = csv_table(
                &cols,
                pdf.bins.iter().map(|b| {
                    let mut row = vec![b.center, b.density, b.count as f64, g.pdf(b.center)];
                    if let Some(h) = &gf {
                        row.push(h.pdf(b.center));
                    }
                    row
                }),
            );
            let q = free.param("q");
            let v = json!({
                "bins": {"width_sigma": a.bins, "scheme": scheme, "n_bins": pdf.bins.len(), "min_count": a.min_count},
                "fit": fit_value(&free),
                "fixed_q_fit": fixed.as_ref().map(fit_value),
                "implied_alpha": match alpha_from_q(q) {
                    Ok(al) => json!(al),
                    Err(e) => json!(e.to_string()),
                },
                "tail_exponent": if q > 1.0 { json!(2.0 / (q - 1.0)) } else { Value::Null },
            });
            Ok((v, csv))
        })();
        if let Some(csv) = split_csv(&mut blocks, "pdf", res) {
            if selected(Analysis::Pdf) {
                write("fig2_pdf.csv", csv)?;
            }
        }
        if !selected(Analysis::Pdf) {
            blocks.map.remove("pdf");
        }
    }

    if selected(Analysis::Hill) {
        let table = hill_scan(r, &DEFAULT_HILL_KS);
        blocks.record(
            "hill",
            if table.is_empty() {
                Err(Error::insufficient("series too short for any Hill order"))
            } else {
                Ok(json!({ "table": table }))
            },
        );
    }

    if selected(Analysis::Collapse) {
        let res = (|| -> Result<(Value, String)> {
            let (alpha, source) = match (a.alpha, fitted_q) {
                (Some(al), _) => (al, "flag".to_string()),
                (None, Some(q)) => match alpha_from_q(q) {
                    Ok(al) => (al, format!("fitted q = {q}")),
                    Err(Error::GaussianAttractor(_)) => (2.0, format!("fitted q = {q} <= 5/3")),
                    Err(e) => return Err(e),
                },
                (None, None) => {
                    return Err(Error::InvalidArgument("no --alpha and no density fit to imply one".into()))
                }
            };
            let curves = collapse(r, &a.horizons, alpha, DEFAULT_COLLAPSE_BINS)?;
            let Range(lo, hi) = a.tail_range;
            let slopes: Vec<Value> = curves
                .iter()
                .map(|c| match tail_slope(c, lo, hi) {
                    Ok(t) => json!({"N": c.n, "slope": t.slope, "stderr": t.stderr, "r2": t.r2, "n_points": t.n_points}),
                    Err(e) => json!({"N": c.n, "error": e.to_string()}),
                })
                .collect();
            let v = json!({
                "alpha_used": alpha,
                "alpha_source": source,
                "expected_slope": -(1.0 + alpha),
                "horizons": curves.iter().map(|c| c.n).collect::<Vec<_>>(),
                "bins": DEFAULT_COLLAPSE_BINS,
                "tail_range": [lo, hi],
                "tail_slopes": slopes,
            });
            Ok((v, collapse_csv(&curves)))
        })();
        if let Some(csv) = split_csv(&mut blocks, "collapse", res) {
            write("fig2_collapse.csv", csv)?;
        }
    }

    if selected(Analysis::Dfa) {
        let res = (|| -> Result<(Value, String)> {
            let scales = match &a.scales {
                None => default_scales(abs.len(), a.detrend_order),
                Some(ScaleSpec::Grid(lo, hi)) => log_scales(*lo, *hi, 10),
                Some(ScaleSpec::List(v)) => v.clone(),
            };
            let d = dfa(&abs, &scales, a.detrend_order)?;
            let ds = dfa(&shuffle(&abs, seed_of("dfa_shuffle")), &scales, a.detrend_order)?;
            let (smin, smax) = (d.scales[0], *d.scales.last().expect("nonempty"));
            let all = hurst_fit(&d, smin, smax)?;
            let sh = hurst_fit(&ds, smin, smax)?;
            let cross = crossover_scan(&d);
            let rows = d.scales.iter().enumerate().map(|(i, &s)| {
                let mut row = vec![s as f64, d.f[i], ds.f[i]];
                if a.log_columns {
                    row.extend([(s as f64).log10(), d.f[i].log10(), ds.f[i].log10()]);
                }
                row
            });
            let cols: &[&str] = if a.log_columns {
                &["N", "F_abs", "F_shuffled", "log10_N", "log10_F_abs", "log10_F_shuffled"]
            } else {
                &["N", "F_abs", "F_shuffled"]
            };
            let v = json!({
                "signal": "abs_returns",
                "detrend_order": a.detrend_order,
                "scales": d.scales,
                "hurst_all": fit_value(&all),
                "hurst_shuffled": fit_value(&sh),
                "crossover": match &cross {
                    Ok(c) => serde_json::to_value(c).expect("json"),
                    Err(e) => json!({"error": e.to_string()}),
                },
            });
            Ok((v, csv_table(cols, rows)))
        })();
        if let Some(csv) = split_csv(&mut blocks, "dfa", res) {
            write("fig3_dfa.csv", csv)?;
        }
    }

    if selected(Analysis::Leverage) {
        let res = (|| -> Result<(Value, String)> {
            let curve = leverage(r, a.leverage_max_lag, a.shuffles, seed_of("leverage_noise_band"))?;
            let score = antisymmetry_score(&curve)?;
            let base = antisymmetry_baseline(r, a.leverage_max_lag, a.shuffles, seed_of("leverage_baseline"))?;
            let p95 = stats::percentile(&base, 0.95);
            let v = json!({
                "max_lag": a.leverage_max_lag,
                "noise_band": curve.noise_band,
                "shuffles": a.shuffles,
                "antisymmetry_score": score,
                "baseline_mean": stats::mean(&base),
                "baseline_p95": p95,
                "above_baseline": score > p95,
            });
            Ok((v, curve.to_csv()))
        })();
        if let Some(csv) = split_csv(&mut blocks, "leverage", res) {
            write("fig4_leverage.csv", csv)?;
        }
    }

    let params = json!({
        "analyses": a.analyses.iter().map(|x| format!("{x:?}").to_lowercase()).collect::<Vec<_>>(),
        "max_lag": a.max_lag,
        "leverage_max_lag": a.leverage_max_lag,
        "acf_fit_range": a.acf_fit_range.map(|Range(l, h)| [l, h]),
        "bins": a.bins,
        "min_count": a.min_count,
        "horizons": a.horizons,
        "alpha": a.alpha,
        "tail_range": [a.tail_range.0, a.tail_range.1],
        "scales": a.scales.as_ref().map(|s| format!("{s:?}")),
        "detrend_order": a.detrend_order,
        "fix_q": a.fix_q,
        "shuffles": a.shuffles,
        "seed": a.seed,
        "log_columns": a.log_columns,
    });
    let report = json!({
        "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
        "dataset": {
            "input": a.input.display().to_string(),
            "n_returns": series.len(),
            "first_date": series.dates().first().map(|d| d.to_string()),
            "last_date": series.dates().last().map(|d| d.to_string()),
            "meta": meta,
        },
        "parameters": params,
        "seeds": seeds(a.seed).iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<Map<_, _>>(),
        "analyses": Value::Object(blocks.map),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write("report.json", text)?;
    Ok(AnalyzeOutcome { report, failed: blocks.failed, files })
}

fn split_csv(blocks: &mut Blocks, name: &str, res: Result<(Value, String)>) -> Option<String> {
    match res {
        Ok((v, csv)) => {
            blocks.record(name, Ok(v));
            Some(csv)
        }
        Err(e) => {
            blocks.record(name, Err(e));
            None
        }
    }
}
