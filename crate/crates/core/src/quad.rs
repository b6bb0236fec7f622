//! Adaptive Gauss–Kronrod quadrature and series acceleration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// 21-point Kronrod rule with its embedded 10-point Gauss rule.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive bisection on `[a, b]`, stopping when the summed error
/// estimate is below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_pieces: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let first = gk21(f, a, b);
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, est: first });
    while total.error > abs_tol.max(rel_tol * total.value.abs()) {
        if heap.len() >= max_pieces {
            return Err(Error::NoConvergence {
                iterations: heap.len(),
                achieved: total.error / total.value.abs().max(f64::MIN_POSITIVE),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution; accept its estimate
            heap.push(Piece {
                est: Estimate {
                    value: worst.est.value,
                    error: 0.0,
                },
                ..worst
            });
            total.error -= worst.est.error;
            continue;
        }
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            est: right,
        });
        // recompute from pieces now and then to shed accumulated rounding
        if heap.len() % 64 == 0 {
            total = heap.iter().fold(
                Estimate {
                    value: 0.0,
                    error: 0.0,
                },
                |acc, p| Estimate {
                    value: acc.value + p.est.value,
                    error: acc.error + p.est.error,
                },
            );
        }
    }
    Ok(total)
}

/// Integral over `[a, +inf)`.
///
/// `[a, a+scale]` is integrated directly; beyond it the substitution
/// `x = a + scale * e^s` turns algebraic tails into exponentially decaying
/// ones, integrated in unit steps of `s` until the geometric tail bound of
/// the remaining steps is below tolerance.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    scale: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    let head = integrate(f, a, a + scale, 0.0, rel_tol * 0.1, 4096)?;
    let g = |s: f64| {
        let e = s.exp();
        f(a + scale * e) * scale * e
    };
    let mut total = head;
    let mut prev = f64::INFINITY;
    let mut s = 0.0;
    while s < 700.0 {
        let step = integrate(&g, s, s + 1.0, f64::MIN_POSITIVE, rel_tol * 0.1, 4096)?;
        total.value += step.value;
        total.error += step.error;
        let mag = step.value.abs();
        let ratio = if prev > 0.0 && prev.is_finite() { mag / prev } else { 1.0 };
        let tail = if ratio < 0.95 { mag * ratio / (1.0 - ratio) } else { f64::INFINITY };
        if mag == 0.0 || (s >= 2.0 && tail <= rel_tol * total.value.abs()) {
            total.error += if mag == 0.0 { 0.0 } else { tail };
            return Ok(total);
        }
        prev = mag;
        s += 1.0;
    }
    Err(Error::NoConvergence {
        iterations: 700,
        achieved: total.error / total.value.abs().max(f64::MIN_POSITIVE),
    })
}

/// Wynn's epsilon algorithm applied incrementally to a sequence of partial sums.
#[derive(Debug, Default, Clone)]
pub struct WynnEpsilon {
    // last row of the epsilon table, even columns hold estimates
    row: Vec<f64>,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add the next partial sum and return the current extrapolated limit.
    pub fn push(&mut self, partial_sum: f64) -> f64 {
        let mut new_row = Vec::with_capacity(self.row.len() + 1);
        new_row.push(partial_sum);
        // eps_{k+1}^{(n)} = eps_{k-1}^{(n+1)} + 1/(eps_k^{(n+1)} - eps_k^{(n)})
        for k in 0..self.row.len() {
            let below = if k == 0 { 0.0 } else { self.row[k - 1] };
            let diff = new_row[k] - self.row[k];
            if diff == 0.0 || !diff.is_finite() {
                break;
            }
            let next = below + 1.0 / diff;
            if !next.is_finite() {
                break;
            }
            new_row.push(next);
        }
        self.row = new_row;
        self.estimate()
    }

    /// Highest even-column entry of the last row.
    pub fn estimate(&self) -> f64 {
        let last_even = (self.row.len() - 1) & !1;
        self.row[last_even]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gk21_is_exact_for_low_degree() {
        let e = gk21(&|x: f64| 3.0 * x * x + 1.0, 0.0, 2.0);
        assert!((e.value - 10.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let e = integrate(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-12, 10_000).unwrap();
        assert!((e.value - 2.0).abs() < 1e-10, "{}", e.value);
    }

    #[test]
    fn semi_infinite_power_and_gaussian_tails() {
        let e = integrate_to_infinity(&|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-10, "{}", e.value);
        let e = integrate_to_infinity(&|x: f64| (-x * x).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((e.value - PI.sqrt() / 2.0).abs() < 1e-12);
        // slowly decaying x^{-4/3}
        let e = integrate_to_infinity(&|x: f64| (1.0 + x).powf(-4.0 / 3.0), 0.0, 1.0, 1e-11).unwrap();
        assert!((e.value - 3.0).abs() < 1e-8, "{}", e.value);
    }

    #[test]
    fn wynn_accelerates_alternating_harmonic() {
        let mut w = WynnEpsilon::new();
        let mut s = 0.0;
        let mut est = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            est = w.push(s);
        }
        assert!((est - 2f64.ln()).abs() < 1e-10, "{est}");
    }
}
