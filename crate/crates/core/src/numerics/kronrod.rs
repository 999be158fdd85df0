//! 10-point Gauss / 21-point Kronrod rule and the adaptive driver built on it.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::QuadratureSpec;
use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1], descending; odd indices are the Gauss nodes.
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
    0.123_491_976_262_065_851_077_600_525_452_138,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct PanelEstimate {
    pub value: Complex64,
    pub error: f64,
}

/// Applies the 21-point Kronrod rule on `[a, b]` with a QUADPACK-style error
/// estimate.
pub(crate) fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<PanelEstimate>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [Complex64::new(0.0, 0.0); 21];
    values[10] = f(center)?;
    for j in 0..10 {
        let dx = half * XGK[j];
        values[j] = f(center - dx)?;
        values[20 - j] = f(center + dx)?;
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("integrand"));
    }

    let mut kronrod = values[10] * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = values[10].norm() * WGK[10];
    for j in 0..10 {
        let pair = values[j] + values[20 - j];
        kronrod += pair * WGK[j];
        abs_sum += (values[j].norm() + values[20 - j].norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (values[10] - mean).norm() * WGK[10];
    for j in 0..10 {
        asc += ((values[j] - mean).norm() + (values[20 - j] - mean).norm()) * WGK[j];
    }

    let width = half.abs();
    let value = kronrod * half;
    let abs_sum = abs_sum * width;
    let asc = asc * width;
    let mut error = ((kronrod - gauss) * half).norm();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Ok(PanelEstimate { value, error })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    est: PanelEstimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken on position so the pop order never depends on heap internals
        self.est
            .error
            .total_cmp(&other.est.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Adaptive bisection over an initial partition given by sorted `breaks`.
///
/// `spec.max_subdivisions` bounds the number of bisections performed beyond
/// the initial partition.
pub(crate) fn adaptive<F>(f: &mut F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if breaks.len() < 2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() + spec.max_subdivisions);
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let est = gk21(f, w[0], w[1])?;
        total += est.value;
        total_err += est.error;
        heap.push(Panel { a: w[0], b: w[1], est });
    }

    let tolerance = |total: Complex64| spec.abs_tol.max(spec.rel_tol * total.norm());
    let mut subdivisions = 0;
    while total_err > tolerance(total) {
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                error: total_err,
                tolerance: tolerance(total),
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel at roundoff width: nothing left to gain
            return Err(Error::NonConvergence {
                error: total_err,
                tolerance: tolerance(total),
                subdivisions,
            });
        }
        let left = gk21(f, worst.a, mid)?;
        let right = gk21(f, mid, worst.b)?;
        total += left.value + right.value - worst.est.value;
        total_err += left.error + right.error - worst.est.error;
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });
        subdivisions += 1;
    }

    // re-sum from the panels so the result does not carry running-sum drift
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(panels.iter().map(|p| p.est.value).sum())
}
