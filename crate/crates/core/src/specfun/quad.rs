//! Globally adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! Endpoint power singularities are removed before the adaptive loop: when
//! the integrand behaves like `(x - lo)^p` with `-1 < p < 0`, the half of the
//! interval next to `lo` is reparametrised as `x = lo + h u^(1/(1+p))`, which
//! turns the singular factor into a bounded one. Semi-infinite ranges are
//! folded onto `(0, 1]` with `x = lo + (1 - t)/t`; an algebraic tail
//! `f ~ x^p` (`p < -1`) becomes an endpoint singularity of the folded
//! integrand with exponent `-p - 2` and is stretched the same way.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Accuracy;
use crate::error::{Error, Result};

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

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Local power-law behaviour of an integrand at the two ends of the range.
///
/// For a finite end the exponent `p` means `f ~ |x - end|^p`; only
/// `-1 < p < 0` triggers the change of variables. For an infinite upper
/// end, `hi` is the tail exponent: `f ~ x^p` with `p < -1`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PowerHint {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl PowerHint {
    pub const NONE: PowerHint = PowerHint { lo: None, hi: None };

    pub fn lo(p: f64) -> Self {
        Self {
            lo: Some(p),
            hi: None,
        }
    }

    pub fn hi(p: f64) -> Self {
        Self {
            lo: None,
            hi: Some(p),
        }
    }

    pub fn both(lo: f64, hi: f64) -> Self {
        Self {
            lo: Some(lo),
            hi: Some(hi),
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    roundoff: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(roundoff);
    }
    Segment {
        a,
        b,
        value,
        error,
        roundoff,
    }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, acc: &Accuracy) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod21(f, a, b);
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut roundoff = first.roundoff;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NonConvergence {
                what: "quad_adaptive (non-finite integrand)",
                estimate: total_err,
            });
        }
        let tol = acc.abs_tol.max(acc.rel_tol * total.abs());
        if total_err <= tol || total_err <= 2.0 * roundoff {
            break;
        }
        if heap.len() >= acc.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "quad_adaptive",
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval exhausted at machine resolution; keep what we have
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            continue;
        }
        let left = kronrod21(f, worst.a, mid);
        let right = kronrod21(f, mid, worst.b);
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        roundoff += left.roundoff + right.roundoff - worst.roundoff;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    let mut value = crate::sum::CompensatedSum::new();
    let mut error = 0.0;
    for s in heap.iter() {
        value.add(s.value);
        error += s.error;
    }
    Ok(Integral {
        value: value.value(),
        error,
        evaluations,
    })
}

fn stretch_exponent(p: Option<f64>) -> Option<f64> {
    match p {
        Some(p) if p > -1.0 && p < 0.0 => Some(1.0 / (1.0 + p)),
        _ => None,
    }
}

fn finite_with_hints<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    hint: PowerHint,
    acc: &Accuracy,
) -> Result<Integral> {
    let k_lo = stretch_exponent(hint.lo);
    let k_hi = stretch_exponent(hint.hi);
    if k_lo.is_none() && k_hi.is_none() {
        return adapt(f, a, b, acc);
    }
    let (lo_end, hi_end) = match (k_lo, k_hi) {
        (Some(_), None) => (b, b),
        (None, Some(_)) => (a, a),
        _ => {
            let m = 0.5 * (a + b);
            (m, m)
        }
    };
    // Each piece gets the full relative budget of its own magnitude; the
    // sum then meets the relative tolerance of the whole.
    let mut out = Integral {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    let mut add = |r: Integral| {
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
    };
    if let Some(k) = k_lo {
        let h = lo_end - a;
        let g = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = a + h * u.powf(k);
            if x <= a {
                return 0.0;
            }
            f(x) * h * k * u.powf(k - 1.0)
        };
        add(adapt(&g, 0.0, 1.0, acc)?);
    } else if lo_end > a {
        add(adapt(f, a, lo_end, acc)?);
    }
    if let Some(k) = k_hi {
        let h = b - hi_end;
        let g = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = b - h * u.powf(k);
            if x >= b {
                return 0.0;
            }
            f(x) * h * k * u.powf(k - 1.0)
        };
        add(adapt(&g, 0.0, 1.0, acc)?);
    } else if b > hi_end {
        add(adapt(f, hi_end, b, acc)?);
    }
    Ok(out)
}

/// Integrates `f` over `[lo, hi]` (`hi` may be `+inf`) with optional
/// endpoint power hints.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    hint: PowerHint,
    acc: &Accuracy,
) -> Result<Integral> {
    acc.validate()?;
    if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || lo == f64::NEG_INFINITY {
        return Err(crate::error::domain(
            "quad_adaptive",
            lo,
            "finite lower limit",
        ));
    }
    if hi < lo {
        let r = integrate(f, hi, lo, PowerHint::both_swapped(hint), acc)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    if hi.is_finite() {
        return finite_with_hints(&f, lo, hi, hint, acc);
    }
    if hint.lo.is_some() {
        // keep the singular end out of the folded map, where 1 − t would
        // round away the distance to it
        let mid = lo + 1.0;
        let head = finite_with_hints(&f, lo, mid, PowerHint { lo: hint.lo, hi: None }, acc)?;
        let tail = folded_tail(&f, mid, hint.hi, acc)?;
        return Ok(Integral {
            value: head.value + tail.value,
            error: head.error + tail.error,
            evaluations: head.evaluations + tail.evaluations,
        });
    }
    folded_tail(&f, lo, hint.hi, acc)
}

/// `∫_lo^∞ f` folded onto `(0, 1]` by `x = lo + (1 − t)/t`.
fn folded_tail<F: Fn(f64) -> f64>(f: &F, lo: f64, tail_exponent: Option<f64>, acc: &Accuracy) -> Result<Integral> {
    let g = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let x = lo + (1.0 - t) / t;
        if !x.is_finite() {
            return 0.0;
        }
        f(x) / (t * t)
    };
    let folded = PowerHint {
        lo: tail_exponent.map(|p| -p - 2.0),
        hi: None,
    };
    finite_with_hints(&g, 0.0, 1.0, folded, acc)
}

impl PowerHint {
    fn both_swapped(self) -> Self {
        Self {
            lo: self.hi,
            hi: self.lo,
        }
    }
}

/// Adaptive quadrature of a smooth integrand; see [`integrate`].
pub fn quad_adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, acc: &Accuracy) -> Result<f64> {
    integrate(f, lo, hi, PowerHint::NONE, acc).map(|r| r.value)
}

/// Adaptive quadrature with declared endpoint power behaviour.
pub fn quad_adaptive_hinted<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    hint: PowerHint,
    acc: &Accuracy,
) -> Result<f64> {
    integrate(f, lo, hi, hint, acc).map(|r| r.value)
}
