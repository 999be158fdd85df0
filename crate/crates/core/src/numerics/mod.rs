//! Quadrature and finite-difference kernels.
//!
//! Every integral in the crate goes through the adaptive Gauss-Kronrod driver
//! in [`kronrod`]. Infinite ranges are truncated where the integrand envelope
//! `|f|` drops below `abs_tol` times its sampled peak. Oscillatory integrands
//! are handled by capping the initial panels at half an oscillation period,
//! taken from [`QuadratureSpec::oscillation_freq_hint`].
//!
//! All routines are deterministic pure functions of their inputs.

mod finite_diff;
mod kronrod;

pub use finite_diff::{fd_derivative, DerivativeOrder, DEFAULT_FD_STEP};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for amplitudes, labels and overlaps.
pub type ComplexValue = Complex64;

/// Largest distance from the anchor scanned when locating the support of an
/// integrand on an unbounded range.
pub const MAX_SCAN_RANGE: f64 = 1e6;

/// Initial partitions finer than this are refused with `NonConvergence`
/// rather than attempted.
pub const MAX_INITIAL_PANELS: usize = 1 << 20;

/// Tolerances and hints for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Angular frequency of the integrand's oscillation, in radians per unit
    /// of the integration variable. Zero means non-oscillatory.
    pub oscillation_freq_hint: f64,
    /// The integrand on `(0, inf)` has a Gaussian-in-`ln u` envelope; integrate
    /// in `v = ln u` instead.
    pub log_envelope: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            oscillation_freq_hint: 0.0,
            log_envelope: false,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
            ..Self::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidDomain(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidDomain(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidDomain("max_subdivisions must be >= 1".into()));
        }
        if !(self.oscillation_freq_hint >= 0.0 && self.oscillation_freq_hint.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "oscillation_freq_hint must be finite and >= 0, got {}",
                self.oscillation_freq_hint
            )));
        }
        Ok(())
    }

    pub fn with_oscillation(mut self, freq: f64) -> Self {
        self.oscillation_freq_hint = freq.abs();
        self
    }

    pub fn with_log_envelope(mut self) -> Self {
        self.log_envelope = true;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    /// Same spec with both tolerances divided by `factor`.
    pub fn tightened(self, factor: f64) -> Self {
        self.with_tolerances(self.abs_tol / factor, self.rel_tol / factor)
    }

    fn max_panel(&self) -> Option<f64> {
        (self.oscillation_freq_hint > 0.0).then(|| PI / self.oscillation_freq_hint)
    }
}

/// Rejects NaN/Inf components.
pub fn checked(value: ComplexValue, what: &'static str) -> Result<ComplexValue> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn lift<F: Fn(f64) -> ComplexValue>(f: F) -> impl FnMut(f64) -> Result<ComplexValue> {
    move |x| Ok(f(x))
}

/// `\int_a^b f(u) du` over a finite interval.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: Fn(f64) -> ComplexValue,
{
    try_integrate_interval(lift(f), a, b, spec)
}

pub fn try_integrate_interval<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: FnMut(f64) -> Result<ComplexValue>,
{
    spec.validate()?;
    if a == b {
        return Ok(ComplexValue::new(0.0, 0.0));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let breaks = uniform_breaks(lo, hi, spec)?;
    let v = kronrod::adaptive(&mut f, &breaks, spec)? * sign;
    checked(v, "integrate_interval")
}

/// `\int_{-inf}^{inf} f(u) e^{-a (u - c)^2} du` with `a = inv_variance`.
pub fn integrate_gaussian_weighted<F>(
    f: F,
    center: f64,
    inv_variance: f64,
    spec: &QuadratureSpec,
) -> Result<ComplexValue>
where
    F: Fn(f64) -> ComplexValue,
{
    try_integrate_gaussian_weighted(lift(f), center, inv_variance, spec)
}

pub fn try_integrate_gaussian_weighted<F>(
    mut f: F,
    center: f64,
    inv_variance: f64,
    spec: &QuadratureSpec,
) -> Result<ComplexValue>
where
    F: FnMut(f64) -> Result<ComplexValue>,
{
    if !(inv_variance > 0.0 && inv_variance.is_finite()) {
        return Err(Error::InvalidDomain(format!(
            "inv_variance must be > 0, got {inv_variance}"
        )));
    }
    let root = inv_variance.sqrt();
    // t = sqrt(a) (u - c) turns the weight into e^{-t^2}
    let t_spec = spec.with_oscillation(spec.oscillation_freq_hint / root);
    let g = |t: f64| -> Result<ComplexValue> { Ok(f(center + t / root)? * (-t * t).exp()) };
    let v = try_integrate_real_line(g, 0.0, 1.0, &t_spec)? / root;
    checked(v, "integrate_gaussian_weighted")
}

/// `\int_{lower}^{inf} f(u) du`.
///
/// The range is truncated where `|f|` stays below `abs_tol` times its sampled
/// peak. With [`QuadratureSpec::log_envelope`] set (and `lower >= 0`) the
/// integral is evaluated as `\int f(e^v) e^v dv`.
pub fn integrate_semi_infinite<F>(f: F, lower: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: Fn(f64) -> ComplexValue,
{
    try_integrate_semi_infinite(lift(f), lower, spec)
}

pub fn try_integrate_semi_infinite<F>(mut f: F, lower: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: FnMut(f64) -> Result<ComplexValue>,
{
    spec.validate()?;
    if spec.log_envelope {
        if lower < 0.0 {
            return Err(Error::InvalidDomain(format!(
                "log-envelope integration needs lower >= 0, got {lower}"
            )));
        }
        return log_semi_infinite(&mut f, lower, spec);
    }
    let offsets = scan_offsets(1.0);
    let Some(cut) = ray_support(&mut f, lower, 1.0, &offsets, spec)? else {
        return Ok(ComplexValue::new(0.0, 0.0));
    };
    let breaks = merge_breaks(
        graded_breaks(lower, 1.0, &offsets, cut),
        lower,
        lower + cut,
        spec,
    )?;
    let v = kronrod::adaptive(&mut f, &breaks, spec)?;
    checked(v, "integrate_semi_infinite")
}

/// `\int_{-inf}^{inf} f(u) du`, scanning outward from `center` on length
/// `scale` to locate the support.
pub fn integrate_real_line<F>(f: F, center: f64, scale: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: Fn(f64) -> ComplexValue,
{
    try_integrate_real_line(lift(f), center, scale, spec)
}

pub fn try_integrate_real_line<F>(
    mut f: F,
    center: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<ComplexValue>
where
    F: FnMut(f64) -> Result<ComplexValue>,
{
    spec.validate()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidDomain(format!("scale must be > 0, got {scale}")));
    }
    let offsets = scan_offsets(scale);
    let mut env = |x: f64| f(x).map(|v| v.norm());
    let right: Vec<f64> = offsets.iter().map(|&s| env(center + s)).collect::<Result<_>>()?;
    let left: Vec<f64> = offsets.iter().map(|&s| env(center - s)).collect::<Result<_>>()?;
    let peak = right.iter().chain(left.iter()).cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(ComplexValue::new(0.0, 0.0));
    }
    let threshold = spec.abs_tol * peak;
    let cut_r = side_cut(&right, &offsets, threshold)?;
    let cut_l = side_cut(&left, &offsets, threshold)?;

    let mut breaks: Vec<f64> = graded_breaks(center, -1.0, &offsets, cut_l);
    breaks.reverse();
    breaks.pop();
    breaks.extend(graded_breaks(center, 1.0, &offsets, cut_r));
    let breaks = merge_breaks(breaks, center - cut_l, center + cut_r, spec)?;
    let v = kronrod::adaptive(&mut f, &breaks, spec)?;
    checked(v, "integrate_real_line")
}

/// `\int_{u_lo}^{u_hi} f(u) du` evaluated in `v = ln u` (requires
/// `0 < u_lo < u_hi`). Panels respect the oscillation hint measured in `u`.
pub fn integrate_log_window<F>(f: F, u_lo: f64, u_hi: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: Fn(f64) -> ComplexValue,
{
    try_integrate_log_window(lift(f), u_lo, u_hi, spec)
}

pub fn try_integrate_log_window<F>(mut f: F, u_lo: f64, u_hi: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: FnMut(f64) -> Result<ComplexValue>,
{
    spec.validate()?;
    if !(u_lo > 0.0 && u_hi > u_lo) {
        return Err(Error::InvalidDomain(format!(
            "log window needs 0 < u_lo < u_hi, got [{u_lo}, {u_hi}]"
        )));
    }
    let breaks = log_breaks(u_lo.ln(), u_hi.ln(), spec)?;
    let mut g = |v: f64| -> Result<ComplexValue> {
        let u = v.exp();
        Ok(f(u)? * u)
    };
    let val = kronrod::adaptive(&mut g, &breaks, spec)?;
    checked(val, "integrate_log_window")
}

/// `\int_C f(Z) d^2Z` with `d^2Z = dRe Z dIm Z`, for integrands bounded by
/// `C e^{-weight_scale |Z|^2}`.
pub fn integrate_plane<F>(f: F, weight_scale: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: Fn(ComplexValue) -> ComplexValue,
{
    if !(weight_scale > 0.0 && weight_scale.is_finite()) {
        return Err(Error::InvalidDomain(format!(
            "weight_scale must be > 0, got {weight_scale}"
        )));
    }
    let scale = weight_scale.sqrt().recip();
    let outer = |re: f64| -> Result<ComplexValue> {
        try_integrate_real_line(|im: f64| Ok(f(ComplexValue::new(re, im))), 0.0, scale, spec)
    };
    let v = try_integrate_real_line(outer, 0.0, scale, spec)?;
    checked(v, "integrate_plane")
}

fn log_semi_infinite<F>(f: &mut F, lower: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: FnMut(f64) -> Result<ComplexValue>,
{
    const STEP: f64 = 0.05;
    const V_FLOOR: f64 = -60.0;
    let v_start = if lower > 0.0 { lower.ln().max(V_FLOOR) } else { V_FLOOR };
    let v_end = (lower + MAX_SCAN_RANGE).ln();
    let n = ((v_end - v_start) / STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| v_start + (v_end - v_start) * k as f64 / n as f64).collect();
    let env: Vec<f64> = grid
        .iter()
        .map(|&v| {
            let u = v.exp();
            f(u).map(|val| val.norm() * u)
        })
        .collect::<Result<_>>()?;
    let peak = env.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(ComplexValue::new(0.0, 0.0));
    }
    let threshold = spec.abs_tol * peak;
    let first = env.iter().position(|&e| e > threshold).unwrap_or(0);
    let last = env.iter().rposition(|&e| e > threshold).unwrap_or(0);
    if last == n || (first == 0 && lower == 0.0) {
        return Err(Error::SlowDecay {
            threshold,
            range: MAX_SCAN_RANGE,
        });
    }
    let u_lo = if first == 0 { lower } else { grid[first - 1].exp() };
    let u_hi = grid[last + 1].exp();
    try_integrate_log_window(&mut *f, u_lo, u_hi, spec)
}

/// Offsets `0, scale * 10^{k/40}` for `10^-6 <= 10^{k/40} <= 10^6`.
fn scan_offsets(scale: f64) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend((-240..=240).map(|k| scale * 10f64.powf(k as f64 / 40.0)));
    v
}

/// Distance from `origin` along `dir` beyond which the sampled envelope stays
/// below threshold; `None` when the integrand vanishes at every sample.
fn ray_support<F>(f: &mut F, origin: f64, dir: f64, offsets: &[f64], spec: &QuadratureSpec) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<ComplexValue>,
{
    let env: Vec<f64> = offsets
        .iter()
        .map(|&s| f(origin + dir * s).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let peak = env.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(None);
    }
    side_cut(&env, offsets, spec.abs_tol * peak).map(Some)
}

fn side_cut(env: &[f64], offsets: &[f64], threshold: f64) -> Result<f64> {
    match env.iter().rposition(|&e| e > threshold) {
        None => Ok(offsets[1]),
        Some(last) if last + 1 == env.len() => Err(Error::SlowDecay {
            threshold,
            range: offsets[last],
        }),
        Some(last) => Ok(offsets[last + 1]),
    }
}

/// Every eighth scan offset up to `cut`, as absolute positions from `origin`.
fn graded_breaks(origin: f64, dir: f64, offsets: &[f64], cut: f64) -> Vec<f64> {
    let mut b = vec![origin];
    b.extend(
        offsets
            .iter()
            .skip(1)
            .step_by(8)
            .filter(|&&s| s < cut)
            .map(|&s| origin + dir * s),
    );
    b.push(origin + dir * cut);
    b
}

fn too_many_panels(spec: &QuadratureSpec) -> Error {
    Error::NonConvergence {
        error: f64::INFINITY,
        tolerance: spec.abs_tol,
        subdivisions: 0,
    }
}

fn uniform_breaks(lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    let n = match spec.max_panel() {
        Some(w) => ((hi - lo) / w).ceil().max(1.0),
        None => 1.0,
    };
    if n > MAX_INITIAL_PANELS as f64 {
        return Err(too_many_panels(spec));
    }
    let n = n as usize;
    Ok((0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect())
}

/// Sorted union of `base` with a uniform partition of `[lo, hi]` when a
/// panel cap applies.
fn merge_breaks(mut base: Vec<f64>, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    if spec.max_panel().is_some() {
        base.extend(uniform_breaks(lo, hi, spec)?);
    }
    base.retain(|&x| x >= lo && x <= hi);
    base.sort_by(f64::total_cmp);
    base.dedup();
    Ok(base)
}

/// Breakpoints in `v = ln u`: at most 0.25 apart, and at most half an
/// oscillation period apart when measured in `u`.
fn log_breaks(v_lo: f64, v_hi: f64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    const MAX_STEP: f64 = 0.25;
    let freq = spec.oscillation_freq_hint;
    let mut b = vec![v_lo];
    let mut v = v_lo;
    while v < v_hi {
        let mut step = MAX_STEP;
        if freq > 0.0 {
            step = step.min((PI / (freq * v.exp())).ln_1p());
        }
        v += step;
        b.push(v.min(v_hi));
        if b.len() > MAX_INITIAL_PANELS {
            return Err(too_many_panels(spec));
        }
    }
    Ok(b)
}
