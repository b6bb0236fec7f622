//! Daily quote ingestion and construction of normalized log-fluctuations.
//!
//! A quote file is delimiter-separated text with a header row, one ISO-8601
//! date column and one value column. Rows whose value is not a number (the
//! public data source writes `.` for holidays) are dropped, and returns are
//! taken between consecutive retained observations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{atomic_write, fmt_sig};
use crate::stats;

/// Environment variable naming the download cache directory.
pub const CACHE_DIR_ENV: &str = "FLUCSTAT_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl ColumnRef {
    fn resolve(&self, headers: &csv::StringRecord) -> Result<usize> {
        match self {
            ColumnRef::Index(i) if *i < headers.len() => Ok(*i),
            ColumnRef::Index(i) => Err(Error::Parse {
                line: 1,
                msg: format!("column index {i} out of range ({} columns)", headers.len()),
            }),
            ColumnRef::Name(name) => headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: format!("no column named {name:?}"),
                }),
        }
    }
}

/// Layout of a quote file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub delimiter: u8,
    pub date_column: ColumnRef,
    pub value_column: ColumnRef,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        ColumnSpec {
            delimiter: b',',
            date_column: ColumnRef::Index(0),
            value_column: ColumnRef::Index(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub date: NaiveDate,
    pub value: f64,
}

/// Strictly date-ordered sequence of positive, finite quotes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteSeries {
    observations: Vec<Quote>,
}

impl QuoteSeries {
    pub fn new(observations: Vec<Quote>) -> Result<Self> {
        for (i, w) in observations.windows(2).enumerate() {
            if w[1].date <= w[0].date {
                return Err(Error::InvalidArgument(format!(
                    "dates not strictly increasing at observation {}",
                    i + 1
                )));
            }
        }
        if let Some(q) = observations.iter().find(|q| !(q.value > 0.0 && q.value.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "non-positive or non-finite quote {} on {}",
                q.value, q.date
            )));
        }
        Ok(QuoteSeries { observations })
    }

    pub fn observations(&self) -> &[Quote] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Keep observations with `from <= date <= to`. Either bound may be open.
    pub fn restrict(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> QuoteSeries {
        let observations = self
            .observations
            .iter()
            .filter(|q| from.is_none_or(|f| q.date >= f) && to.is_none_or(|t| q.date <= t))
            .copied()
            .collect();
        QuoteSeries { observations }
    }

    /// Serialize as `date,value` CSV. Values use the shortest representation
    /// that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,value\n");
        for q in &self.observations {
            out.push_str(&format!("{},{}\n", q.date.format("%Y-%m-%d"), q.value));
        }
        out
    }
}

/// Row counts discarded while parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    /// Value field was not a number (missing-data marker).
    pub missing: usize,
    /// Value was zero, negative or infinite; its logarithm is undefined.
    pub nonpositive: usize,
}

impl DropReport {
    pub fn total(&self) -> usize {
        self.missing + self.nonpositive
    }
}

pub fn parse_quotes(raw: &[u8], spec: &ColumnSpec) -> Result<(QuoteSeries, DropReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw);
    let headers = reader.headers()?.clone();
    let date_idx = spec.date_column.resolve(&headers)?;
    let value_idx = spec.value_column.resolve(&headers)?;

    let mut observations: Vec<Quote> = Vec::new();
    let mut dropped = DropReport::default();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |idx: usize| -> Result<&str> {
            record.get(idx).ok_or_else(|| Error::Parse {
                line,
                msg: format!("missing column {idx}"),
            })
        };
        let date_text = field(date_idx)?;
        let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d").map_err(|e| Error::Parse {
            line,
            msg: format!("malformed date {date_text:?}: {e}"),
        })?;
        let value: f64 = match field(value_idx)?.parse() {
            Ok(v) => v,
            Err(_) => {
                dropped.missing += 1;
                continue;
            }
        };
        if value.is_nan() {
            dropped.missing += 1;
            continue;
        }
        if !(value > 0.0 && value.is_finite()) {
            log::warn!("line {line}: dropping quote {value} on {date} (logarithm undefined)");
            dropped.nonpositive += 1;
            continue;
        }
        if let Some(prev) = observations.last() {
            if date <= prev.date {
                return Err(Error::Parse {
                    line,
                    msg: format!("date {date} does not follow {}", prev.date),
                });
            }
        }
        observations.push(Quote { date, value });
    }
    if observations.is_empty() {
        return Err(Error::degenerate("no valid quotes in input"));
    }
    Ok((QuoteSeries { observations }, dropped))
}

/// Raw log-fluctuations `ln Q_t - ln Q_{t-1}`, each dated by its later quote.
#[derive(Debug, Clone, PartialEq)]
pub struct LogReturns {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

pub fn log_returns(q: &QuoteSeries) -> Result<LogReturns> {
    if q.len() < 2 {
        return Err(Error::insufficient(format!(
            "need at least 2 quotes for a return, got {}",
            q.len()
        )));
    }
    let obs = q.observations();
    let (dates, values) = obs
        .windows(2)
        .map(|w| (w[1].date, w[1].value.ln() - w[0].value.ln()))
        .unzip();
    Ok(LogReturns { dates, values })
}

/// Normalized log-fluctuations `r = (r~ - <r~>) / sigma`, population sigma.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    raw_mean: f64,
    raw_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub source: String,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub n_quotes: usize,
    pub n_returns: usize,
    pub dropped: DropReport,
    pub raw_mean: f64,
    pub raw_std: f64,
}

impl ReturnSeries {
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn raw_mean(&self) -> f64 {
        self.raw_mean
    }

    pub fn raw_std(&self) -> f64 {
        self.raw_std
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Undo the normalization.
    pub fn denormalized(&self) -> Vec<f64> {
        self.values.iter().map(|r| r * self.raw_std + self.raw_mean).collect()
    }

    /// Normalize an undated sequence, stamping consecutive calendar days from `start`.
    pub fn from_values(raw: &[f64], start: NaiveDate) -> Result<Self> {
        let dates = start.iter_days().take(raw.len()).collect();
        normalize(&LogReturns {
            dates,
            values: raw.to_vec(),
        })
    }

    /// Wrap values already normalized elsewhere (e.g. read back from disk).
    pub fn from_normalized(
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
        raw_mean: f64,
        raw_std: f64,
    ) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidArgument("dates and values differ in length".into()));
        }
        Ok(ReturnSeries {
            dates,
            values,
            raw_mean,
            raw_std,
        })
    }

    /// `date,r` CSV with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.len() + 8);
        out.push_str("date,r\n");
        for (d, r) in self.dates.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", d.format("%Y-%m-%d"), fmt_sig(*r)));
        }
        out
    }

    pub fn from_csv(raw: &[u8]) -> Result<Self> {
        let spec = ColumnSpec::default();
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(spec.delimiter)
            .trim(csv::Trim::All)
            .from_reader(raw);
        let mut dates = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let bad = |msg: String| Error::Parse { line, msg };
            let date = NaiveDate::parse_from_str(record.get(0).unwrap_or(""), "%Y-%m-%d")
                .map_err(|e| bad(format!("malformed date: {e}")))?;
            let r: f64 = record
                .get(1)
                .unwrap_or("")
                .parse()
                .map_err(|_| bad("non-numeric return".into()))?;
            if !r.is_finite() {
                return Err(bad("non-finite return".into()));
            }
            dates.push(date);
            values.push(r);
        }
        if values.len() < 2 {
            return Err(Error::degenerate("series file holds fewer than 2 returns"));
        }
        Ok(ReturnSeries {
            dates,
            values,
            raw_mean: 0.0,
            raw_std: 1.0,
        })
    }

    /// Write `path` and its `.meta.json` sidecar atomically.
    pub fn write(&self, path: &Path, meta: &SeriesMeta) -> Result<()> {
        atomic_write(path, self.to_csv().as_bytes())?;
        let json = serde_json::to_string_pretty(meta).expect("metadata serializes");
        atomic_write(&sidecar_path(path), json.as_bytes())?;
        Ok(())
    }

    /// Read a series file; picks up `raw_mean`/`raw_std` from the sidecar if present.
    pub fn read(path: &Path) -> Result<(Self, Option<SeriesMeta>)> {
        let mut series = Self::from_csv(&fs::read(path)?)?;
        let meta = match fs::read(sidecar_path(path)) {
            Ok(bytes) => serde_json::from_slice::<SeriesMeta>(&bytes).ok(),
            Err(_) => None,
        };
        if let Some(m) = &meta {
            series.raw_mean = m.raw_mean;
            series.raw_std = m.raw_std;
        }
        Ok((series, meta))
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

pub fn normalize(raw: &LogReturns) -> Result<ReturnSeries> {
    if raw.values.len() < 2 {
        return Err(Error::insufficient("normalization needs at least 2 returns"));
    }
    if raw.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite log-return".into()));
    }
    let (mean, std) = stats::mean_std(&raw.values);
    if !(std > 0.0) {
        return Err(Error::degenerate("zero standard deviation (constant series)"));
    }
    let values = raw.values.iter().map(|x| (x - mean) / std).collect();
    Ok(ReturnSeries {
        dates: raw.dates.clone(),
        values,
        raw_mean: mean,
        raw_std: std,
    })
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub cache_dir: PathBuf,
    pub offline: bool,
    pub timeout: Duration,
}

impl FetchOptions {
    /// Cache directory from [`CACHE_DIR_ENV`], falling back to `~/.cache/flucstat`.
    pub fn from_env() -> Self {
        let cache_dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("XDG_CACHE_HOME").map(|p| PathBuf::from(p).join("flucstat")))
            .or_else(|| std::env::var_os("HOME").map(|p| PathBuf::from(p).join(".cache/flucstat")))
            .unwrap_or_else(|| PathBuf::from(".flucstat-cache"));
        FetchOptions {
            cache_dir,
            offline: false,
            timeout: Duration::from_secs(60),
        }
    }

    pub fn cache_path(&self, url: &str) -> PathBuf {
        let key = hex::encode(Sha256::digest(url.as_bytes()));
        self.cache_dir.join(format!("{key}.csv"))
    }
}

/// Download `url`, caching the body under a hash of the url.
///
/// Offline mode reads the cache only. A transport failure falls back to the
/// cache when it holds the url; an HTTP error status never does.
pub fn fetch_remote(url: &str, opts: &FetchOptions) -> Result<Vec<u8>> {
    let cache = opts.cache_path(url);
    if opts.offline {
        return fs::read(&cache).map_err(|e| Error::Network {
            url: url.to_string(),
            msg: format!("offline and not cached ({}): {e}", cache.display()),
        });
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(opts.timeout))
        .build()
        .into();
    match agent.get(url).call() {
        Ok(mut resp) => {
            let body = resp
                .body_mut()
                .with_config()
                .limit(256 * 1024 * 1024)
                .read_to_vec()
                .map_err(|e| Error::Network {
                    url: url.to_string(),
                    msg: e.to_string(),
                })?;
            fs::create_dir_all(&opts.cache_dir)?;
            atomic_write(&cache, &body)?;
            Ok(body)
        }
        Err(ureq::Error::StatusCode(status)) => Err(Error::HttpStatus {
            url: url.to_string(),
            status,
        }),
        Err(e) => match fs::read(&cache) {
            Ok(bytes) => {
                log::warn!("fetch of {url} failed ({e}); using cached copy");
                Ok(bytes)
            }
            Err(_) => Err(Error::Network {
                url: url.to_string(),
                msg: e.to_string(),
            }),
        },
    }
}

/// Seed the cache for `url` with `body` (used to install a manually obtained file).
pub fn store_in_cache(url: &str, body: &[u8], opts: &FetchOptions) -> Result<PathBuf> {
    fs::create_dir_all(&opts.cache_dir)?;
    let path = opts.cache_path(url);
    let mut f = fs::File::create(&path)?;
    f.write_all(body)?;
    Ok(path)
}
