//! Numerical helpers: log-domain sums, adaptive Gauss–Kronrod quadrature,
//! log-scaled integration over (possibly infinite) ranges and bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{LossError, Result};

pub use statrs::function::erf::erfc;
pub use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

/// Relative tolerance for the adaptive quadrature.
pub const QUAD_REL_TOL: f64 = 1e-12;
/// Subdivision cap shared by one adaptive integration.
pub const QUAD_MAX_INTERVALS: usize = 100_000;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u - LN_SQRT_2PI).exp()
}

/// Standard normal CDF.
#[inline]
pub fn std_normal_cdf(u: f64) -> f64 {
    0.5 * erfc(-u / std::f64::consts::SQRT_2)
}

/// Standard normal survival function, accurate in the upper tail.
#[inline]
pub fn std_normal_sf(u: f64) -> f64 {
    0.5 * erfc(u / std::f64::consts::SQRT_2)
}

/// `ln(sum(exp(x_i)))`, returning `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// A real number stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        log_abs: f64::NEG_INFINITY,
    };
}

/// Sum of `sign_i * exp(log_abs_i)` carried out in log space.
pub fn signed_log_sum<I: IntoIterator<Item = SignedLog>>(terms: I) -> SignedLog {
    let terms: Vec<SignedLog> = terms.into_iter().filter(|t| t.sign != 0.0).collect();
    let m = terms
        .iter()
        .map(|t| t.log_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return SignedLog::ZERO;
    }
    let s: f64 = terms.iter().map(|t| t.sign * (t.log_abs - m).exp()).sum();
    if s == 0.0 {
        SignedLog::ZERO
    } else {
        SignedLog {
            sign: s.signum(),
            log_abs: m + s.abs().ln(),
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
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

/// Adaptive Gauss–Kronrod (7/15) quadrature on the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(LossError::Quadrature(format!("non-finite limits [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (v, e) = gk15(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a: lo, b: hi, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut count = 1;
    while total_err > abs_tol.max(rel_tol * total.abs()) && count < QUAD_MAX_INTERVALS {
        let seg = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval cannot be split further in floating point
            heap.push(Segment { error: 0.0, ..seg });
            total_err = heap.iter().map(|s| s.error).sum();
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, seg.a, mid);
        let (v2, e2) = gk15(&f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        count += 1;
        if count % 64 == 0 {
            // re-sum to keep rounding drift out of the running totals
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let total: f64 = heap.iter().map(|s| s.value).sum();
    if !total.is_finite() {
        return Err(LossError::Quadrature("integral is not finite".into()));
    }
    Ok(sign * total)
}

const GRID_POINTS: usize = 2049;
/// Integrand values below `max - LOG_CUTOFF` are treated as zero.
const LOG_CUTOFF: f64 = 70.0;

/// Computes `ln ∫_lo^hi exp(g(x)) dx` for a log-integrand `g`.
///
/// The limits may be infinite; `hint = (centre, width)` locates the bulk of
/// the mass for the initial window. `breaks` lists points where `g` may be
/// discontinuous. Returns `None` when the integral is zero.
pub fn log_integral<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    hint: (f64, f64),
) -> Result<Option<f64>> {
    if !(lo < hi) {
        return Ok(None);
    }
    let eval = |x: f64| {
        let v = g(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let (mut left, mut right) = initial_window(lo, hi, hint);
    let coarse = grid_max(&eval, left, right, 257);
    let mut s = coarse.0;

    if hi.is_infinite() {
        let mut step = (right - left).max(1e-3);
        for _ in 0..200 {
            let edge = eval(right);
            let beyond = eval(right + 1e-3 * step);
            if edge.is_finite() && (edge > s - LOG_CUTOFF || beyond > edge) {
                s = s.max(edge);
                right += step;
                step *= 2.0;
            } else {
                break;
            }
        }
    }
    if lo.is_infinite() {
        let mut step = (right - left).max(1e-3);
        for _ in 0..200 {
            let edge = eval(left);
            let beyond = eval(left - 1e-3 * step);
            if edge.is_finite() && (edge > s - LOG_CUTOFF || beyond > edge) {
                s = s.max(edge);
                left -= step;
                step *= 2.0;
            } else {
                break;
            }
        }
    }

    let xs: Vec<f64> = (0..GRID_POINTS)
        .map(|i| left + (right - left) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let gs: Vec<f64> = xs.iter().map(|&x| eval(x)).collect();
    let mut s_grid = f64::NEG_INFINITY;
    let mut arg = left;
    for (&x, &v) in xs.iter().zip(&gs) {
        if v > s_grid {
            s_grid = v;
            arg = x;
        }
    }
    for &b in breaks {
        if b > left && b < right {
            for x in [b, b - 1e-12 * b.abs().max(1.0), b + 1e-12 * b.abs().max(1.0)] {
                let v = eval(x);
                if v > s_grid {
                    s_grid = v;
                    arg = x;
                }
            }
        }
    }
    if !s_grid.is_finite() {
        return Ok(None);
    }
    let first = gs.iter().position(|&v| v > s_grid - LOG_CUTOFF).unwrap_or(0);
    let last = gs
        .iter()
        .rposition(|&v| v > s_grid - LOG_CUTOFF)
        .unwrap_or(GRID_POINTS - 1);
    let a = if first == 0 { left } else { xs[first - 1] };
    let b = if last + 1 >= GRID_POINTS { right } else { xs[last + 1] };

    let mut cuts = vec![a, b];
    if arg > a && arg < b {
        cuts.push(arg);
    }
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let scaled = |x: f64| (eval(x) - s_grid).exp();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(scaled, w[0], w[1], QUAD_REL_TOL, 0.0)?;
    }
    if total <= 0.0 {
        return Ok(None);
    }
    Ok(Some(s_grid + total.ln()))
}

fn initial_window(lo: f64, hi: f64, hint: (f64, f64)) -> (f64, f64) {
    let width = if hint.1.is_finite() && hint.1 > 0.0 { hint.1 } else { 1.0 };
    let centre = if hint.0.is_finite() { hint.0 } else { 0.0 };
    let left = if lo.is_finite() { lo } else { (centre - 10.0 * width).min(hi - width) };
    let right = if hi.is_finite() { hi } else { (centre + 10.0 * width).max(lo + width) };
    (left, right)
}

fn grid_max<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, n: usize) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, a);
    for i in 0..n {
        let x = a + (b - a) * i as f64 / (n - 1) as f64;
        let v = g(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    best
}

/// Bisection for a sign change of `f` on `[a, b]`, assuming `f(a)` and
/// `f(b)` have opposite signs. Returns the bracket `(lo, hi)` after
/// `iterations` halvings, with `lo` on the side of `a`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let fa_positive = f(a) > 0.0;
    for _ in 0..iterations {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        if (f(m) > 0.0) == fa_positive {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}
