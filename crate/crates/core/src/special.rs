//! Special functions: error function, standard normal, log-gamma, digamma,
//! regularized incomplete beta and the Student-t family.
//!
//! Everything is generic over [`Real`]. Accuracy targets are stated for `f64`;
//! `f32` evaluations run the same algorithms to single-precision tolerances.
//!
//! The `*_unchecked` style helpers (`lgamma`, `psi`, `t_cdf_raw`, ...) are the
//! hot-path versions used by the distribution code once parameters have been
//! validated. They return NaN instead of an error on bad input.

use crate::error::{domain, Result};
use crate::real::Real;
use crate::roots::{find_root_with, RootConfig};

const ERF_SERIES_LIMIT: f64 = 1.5;
const MAX_CF_ITER: usize = 200_000;

fn frac_1_sqrt_pi<T: Real>() -> T {
    T::FRAC_2_SQRT_PI() / T::lit(2.0)
}

/// Maclaurin-type series `erf(x) = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!`.
/// All terms are positive, so there is no cancellation for moderate `|x|`.
fn erf_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let two = T::lit(2.0);
    let mut term = x;
    let mut sum = x;
    let mut n = 0usize;
    loop {
        n += 1;
        term = term * two * x2 / T::from_usize_lossy(2 * n + 1);
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(0.25) || n > 500 {
            break;
        }
    }
    T::FRAC_2_SQRT_PI() * (-x2).exp() * sum
}

/// Continued fraction `x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))` evaluated by
/// modified Lentz; `erfc(x) = e^{-x^2} / (sqrt(pi) * cf)` for `x > 0`.
fn erfc_cf_denominator<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value() * T::lit(1e10);
    let half = T::lit(0.5);
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for n in 1..MAX_CF_ITER {
        let a = T::from_usize_lossy(n) * half;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = d.recip();
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    f
}

/// Error function.
pub fn erf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x.abs() < T::lit(ERF_SERIES_LIMIT) {
        erf_series(x)
    } else if x > T::zero() {
        T::one() - erfc(x)
    } else {
        erfc(-x) - T::one()
    }
}

/// Complementary error function with full relative accuracy in the right tail.
pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return T::lit(2.0) - erfc(-x);
    }
    if x < T::lit(ERF_SERIES_LIMIT) {
        return T::one() - erf_series(x);
    }
    if x > T::lit(27.3) {
        return T::zero();
    }
    (-x * x).exp() * frac_1_sqrt_pi::<T>() / erfc_cf_denominator(x)
}

/// `ln erfc(x)` for `x > 0`, safe far into the tail.
fn ln_erfc_pos<T: Real>(x: T) -> T {
    if x < T::lit(ERF_SERIES_LIMIT) {
        erfc(x).ln()
    } else {
        -x * x + frac_1_sqrt_pi::<T>().ln() - erfc_cf_denominator(x).ln()
    }
}

/// Standard normal density.
pub fn norm_pdf<T: Real>(x: T) -> T {
    let inv_sqrt_2pi = T::lit(0.398_942_280_401_432_7);
    inv_sqrt_2pi * (-x * x / T::lit(2.0)).exp()
}

/// `ln phi(x)`.
pub fn norm_ln_pdf<T: Real>(x: T) -> T {
    let ln_sqrt_2pi = T::lit(0.918_938_533_204_672_8);
    -x * x / T::lit(2.0) - ln_sqrt_2pi
}

/// Standard normal distribution function.
pub fn norm_cdf<T: Real>(z: T) -> T {
    let x = z / T::SQRT_2();
    let half = T::lit(0.5);
    if x.abs() < T::lit(ERF_SERIES_LIMIT) {
        half * (T::one() + erf_series(x))
    } else if x < T::zero() {
        half * erfc(-x)
    } else {
        T::one() - half * erfc(x)
    }
}

/// Upper tail `1 - Phi(z)` without cancellation.
pub fn norm_sf<T: Real>(z: T) -> T {
    norm_cdf(-z)
}

/// `ln Phi(z)`, accurate for arguments far below `-8`.
pub fn norm_ln_cdf<T: Real>(z: T) -> T {
    if z < T::lit(-3.0) {
        T::lit(0.5).ln() + ln_erfc_pos(-z / T::SQRT_2())
    } else if z > T::lit(3.0) {
        (-norm_cdf(-z)).ln_1p()
    } else {
        norm_cdf(z).ln()
    }
}

/// Standard normal quantile. Rational initial approximation followed by
/// Halley refinement against [`norm_cdf`].
pub fn norm_quantile<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(format!("normal quantile requires 0 < p < 1, got {p}")));
    }
    Ok(norm_quantile_raw(p))
}

pub(crate) fn norm_quantile_raw<T: Real>(p: T) -> T {
    let half = T::lit(0.5);
    if p > half {
        return -norm_quantile_raw(T::one() - p);
    }
    let pf = p.as_f64();
    let mut x = T::lit(acklam_lower(pf));
    let sqrt_2pi = T::lit(2.506_628_274_631_000_7);
    for _ in 0..3 {
        let e = norm_cdf(x) - p;
        let u = e * sqrt_2pi * (x * x / T::lit(2.0)).exp();
        if !u.is_finite() {
            break;
        }
        let step = u / (T::one() + x * u / T::lit(2.0));
        x = x - step;
        if step.abs() <= T::epsilon() * x.abs().max(T::one()) {
            break;
        }
    }
    x
}

/// Normal quantile of `exp(ln_p)`, usable when the probability itself
/// underflows.
pub(crate) fn norm_quantile_from_ln<T: Real>(ln_p: T) -> T {
    if ln_p >= T::zero() {
        return T::infinity();
    }
    if ln_p > T::min_positive_value().ln() + T::lit(5.0) {
        return norm_quantile_raw(ln_p.exp());
    }
    // Newton on ln Phi(x) = ln_p from the leading tail asymptote.
    let mut x = -(T::lit(-2.0) * ln_p).sqrt();
    for _ in 0..50 {
        let g = norm_ln_cdf(x) - ln_p;
        let slope = (norm_ln_pdf(x) - norm_ln_cdf(x)).exp();
        let step = g / slope;
        x = x - step;
        if step.abs() <= T::epsilon() * x.abs() {
            break;
        }
    }
    x
}

/// Acklam's rational approximation for the lower half `p <= 0.5`.
fn acklam_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

// ---------------------------------------------------------------------------
// Gamma family
// ---------------------------------------------------------------------------

const STIRLING_SHIFT: f64 = 15.0;

/// Tail of Stirling's series, `ln Gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2]`, for `x >= 15`.
fn stirling_tail<T: Real>(x: T) -> T {
    const COEF: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut acc = T::zero();
    for &c in COEF.iter().rev() {
        acc = acc * inv2 + T::lit(c);
    }
    acc * inv
}

/// `ln Gamma(x)` for `x > 0`; NaN otherwise.
pub(crate) fn lgamma<T: Real>(x: T) -> T {
    if !(x > T::zero()) {
        return T::nan();
    }
    if x.is_infinite() {
        return x;
    }
    let shift = T::lit(STIRLING_SHIFT);
    let mut y = x;
    let mut prod = T::one();
    let mut ln_acc = T::zero();
    while y < shift {
        prod = prod * y;
        if prod > T::lit(1e100) {
            ln_acc = ln_acc + prod.ln();
            prod = T::one();
        }
        y = y + T::one();
    }
    let half_ln_2pi = T::lit(0.918_938_533_204_672_8);
    (y - T::lit(0.5)) * y.ln() - y + half_ln_2pi + stirling_tail(y) - prod.ln() - ln_acc
}

/// Natural log of the gamma function.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(lgamma(x))
}

/// `ln Gamma(a + b) - ln Gamma(a)` without the cancellation of the naive
/// difference when `a` is large.
pub(crate) fn lgamma_ratio<T: Real>(a: T, b: T) -> T {
    let s = a + b;
    let shift = T::lit(STIRLING_SHIFT);
    if a >= shift && s >= shift {
        let half = T::lit(0.5);
        (a - half) * (b / a).ln_1p() + b * s.ln() - b + stirling_tail(s) - stirling_tail(a)
    } else {
        lgamma(s) - lgamma(a)
    }
}

/// `ln B(a, b)`.
pub(crate) fn lbeta<T: Real>(a: T, b: T) -> T {
    let (small, large) = if a < b { (a, b) } else { (b, a) };
    lgamma(small) - lgamma_ratio(large, small)
}

pub(crate) fn psi<T: Real>(x: T) -> T {
    if !(x > T::zero()) {
        return T::nan();
    }
    const COEF: [f64; 7] = [
        -1.0 / 12.0,
        1.0 / 120.0,
        -1.0 / 252.0,
        1.0 / 240.0,
        -1.0 / 132.0,
        691.0 / 32_760.0,
        -1.0 / 12.0,
    ];
    let mut y = x;
    let mut acc = T::zero();
    let shift = T::lit(10.0);
    while y < shift {
        acc = acc - y.recip();
        y = y + T::one();
    }
    let inv2 = (y * y).recip();
    let mut series = T::zero();
    for &c in COEF.iter().rev() {
        series = series * inv2 + T::lit(c);
    }
    acc + y.ln() - T::lit(0.5) / y + series * inv2
}

/// Digamma function `psi(x) = d/dx ln Gamma(x)`.
pub fn digamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(domain(format!("digamma requires x > 0, got {x}")));
    }
    Ok(psi(x))
}

// ---------------------------------------------------------------------------
// Incomplete beta
// ---------------------------------------------------------------------------

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf<T: Real>(x: T, a: T, b: T) -> T {
    let tiny = T::min_positive_value() * T::lit(1e10);
    let one = T::one();
    let two = T::lit(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = d.recip();
    let mut h = d;
    for m in 1..MAX_CF_ITER {
        let m = T::from_usize_lossy(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs() <= T::epsilon() {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` where the caller supplies both
/// `x` and `y = 1 - x` so that neither needs to be formed by subtraction.
pub(crate) fn beta_reg_xy<T: Real>(x: T, y: T, a: T, b: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if y <= T::zero() {
        return T::one();
    }
    let ln_front = a * x.ln() + b * y.ln() - lbeta(a, b);
    if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        ln_front.exp() * beta_cf(x, a, b) / a
    } else {
        T::one() - ln_front.exp() * beta_cf(y, b, a) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn beta_reg<T: Real>(x: T, a: T, b: T) -> Result<T> {
    if !(a > T::zero() && b > T::zero()) {
        return Err(domain(format!("beta_reg requires a, b > 0, got a = {a}, b = {b}")));
    }
    if !(x >= T::zero() && x <= T::one()) {
        return Err(domain(format!("beta_reg requires 0 <= x <= 1, got {x}")));
    }
    Ok(beta_reg_xy(x, T::one() - x, a, b))
}

// ---------------------------------------------------------------------------
// Student t
// ---------------------------------------------------------------------------

fn check_nu<T: Real>(nu: T) -> Result<()> {
    if nu > T::zero() {
        Ok(())
    } else {
        Err(domain(format!("degrees of freedom must be positive, got {nu}")))
    }
}

/// `ln d_nu(t)`.
pub(crate) fn t_ln_pdf_raw<T: Real>(t: T, nu: T) -> T {
    let half = T::lit(0.5);
    lgamma_ratio(nu * half, half) - half * (nu * T::PI()).ln() - (nu + T::one()) * half * (t * t / nu).ln_1p()
}

pub(crate) fn t_pdf_raw<T: Real>(t: T, nu: T) -> T {
    t_ln_pdf_raw(t, nu).exp()
}

pub(crate) fn t_cdf_raw<T: Real>(t: T, nu: T) -> T {
    if t.is_nan() {
        return t;
    }
    if t.is_infinite() {
        return if t > T::zero() { T::one() } else { T::zero() };
    }
    let t2 = t * t;
    let denom = nu + t2;
    let half = T::lit(0.5);
    let tail = half * beta_reg_xy(nu / denom, t2 / denom, nu * half, half);
    if t > T::zero() {
        T::one() - tail
    } else {
        tail
    }
}

/// `ln D_nu(t)`, accurate in the far lower tail where `D_nu(t)` underflows.
pub(crate) fn t_ln_cdf_raw<T: Real>(t: T, nu: T) -> T {
    let half = T::lit(0.5);
    if t < T::zero() && t.is_finite() {
        let t2 = t * t;
        let denom = nu + t2;
        let (x, y) = (nu / denom, t2 / denom);
        let a = nu * half;
        if x > T::zero() && x < (a + T::one()) / (a + half + T::lit(2.0)) {
            let ln_front = a * x.ln() + half * y.ln() - lbeta(a, half);
            return half.ln() + ln_front + (beta_cf(x, a, half) / a).ln();
        }
    }
    t_cdf_raw(t, nu).ln()
}

/// Student-t density with `nu` degrees of freedom.
pub fn t_pdf<T: Real>(t: T, nu: T) -> Result<T> {
    check_nu(nu)?;
    Ok(t_pdf_raw(t, nu))
}

/// Student-t distribution function via the regularized incomplete beta function.
pub fn t_cdf<T: Real>(t: T, nu: T) -> Result<T> {
    check_nu(nu)?;
    Ok(t_cdf_raw(t, nu))
}

pub(crate) fn t_quantile_raw<T: Real>(p: T, nu: T) -> T {
    let half = T::lit(0.5);
    if p > half {
        return -t_quantile_raw(T::one() - p, nu);
    }
    if p == half {
        return T::zero();
    }
    if nu == T::one() {
        return (T::PI() * (p - half)).tan();
    }
    if nu == T::lit(2.0) {
        let q = T::lit(4.0) * p * (T::one() - p);
        return (T::lit(2.0) * p - T::one()) * (T::lit(2.0) / q).sqrt();
    }
    // Bracket around the normal quantile, expanded downward until it straddles p.
    let z = norm_quantile_raw(p);
    let mut lo = if nu < T::lit(1.5) { T::lit(-1e9) } else { z.min(-T::one()) * T::lit(2.0) };
    let hi = T::zero();
    let mut guard = 0;
    while t_cdf_raw(lo, nu) > p && guard < 400 {
        lo = lo * T::lit(4.0);
        guard += 1;
    }
    let cfg = RootConfig {
        x_rel_tol: T::lit(1e-15).max(T::epsilon() * T::lit(2.0)),
        f_tol: T::zero(),
        max_iter: 500,
    };
    // Relative tolerance on p keeps far-tail quantiles accurate.
    find_root_with(|t| (t_cdf_raw(t, nu) - p) / p, lo, hi, &cfg).unwrap_or(T::nan())
}

/// Student-t quantile; inverts [`t_cdf`] by bracketed root finding.
pub fn t_quantile<T: Real>(p: T, nu: T) -> Result<T> {
    check_nu(nu)?;
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(format!("t quantile requires 0 < p < 1, got {p}")));
    }
    Ok(t_quantile_raw(p, nu))
}

/// Derivative of the Student-t density with respect to `nu`, divided by the density.
pub(crate) fn t_ln_pdf_dnu<T: Real>(t: T, nu: T) -> T {
    let half = T::lit(0.5);
    let q = t * t / nu;
    half * (psi((nu + T::one()) * half) - psi(nu * half)) - half / nu - half * q.ln_1p()
        + (nu + T::one()) * half * q / (nu * (T::one() + q))
}

/// `d/dnu D_nu(x)`, the sensitivity of the Student-t CDF to its degrees of
/// freedom, as `int_0^x d/dnu d_nu(t) dt` (the mass below zero is fixed at 1/2).
pub(crate) fn t_cdf_dnu<T: Real>(x: T, nu: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let f = |t: T| t_pdf_raw(t, nu) * t_ln_pdf_dnu(t, nu);
    let q = crate::quadrature::Quadrature::<T>::default();
    let (lo, hi, sign) = if x > T::zero() {
        (T::zero(), x, T::one())
    } else {
        (x, T::zero(), -T::one())
    };
    let v = match crate::quadrature::integrate(f, lo, hi, &q) {
        Ok(v) => v,
        Err(crate::error::Error::Integration { estimate, .. }) => T::lit(estimate),
        Err(_) => T::nan(),
    };
    sign * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Reference values computed with mpmath at 30 digits.
    const ERF_REF: [(f64, f64); 6] = [
        (0.1, 0.112_462_916_018_284_9),
        (0.5, 0.520_499_877_813_046_5),
        (1.0, 0.842_700_792_949_714_9),
        (1.49, 0.964_897_864_843_204_2),
        (2.0, 0.995_322_265_018_952_7),
        (3.5, 0.999_999_256_901_627_7),
    ];

    #[test]
    fn erf_matches_reference() {
        for &(x, v) in &ERF_REF {
            assert_abs_diff_eq!(erf(x), v, epsilon = 2e-16);
            assert_abs_diff_eq!(erf(-x), -v, epsilon = 2e-16);
        }
    }

    #[test]
    fn erfc_tail_is_relatively_accurate() {
        // erfc(5) = 1.5374597944280348502e-12, erfc(10) = 2.0884875837625447570e-45
        assert!((erfc(5.0_f64) / 1.537_459_794_428_034_9e-12 - 1.0).abs() < 1e-14);
        assert!((erfc(10.0_f64) / 2.088_487_583_762_544_8e-45 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normal_basics() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert_abs_diff_eq!(norm_pdf(0.0), 0.398_942_280_401_432_7, epsilon = 1e-17);
        assert_abs_diff_eq!(norm_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 2e-16);
        // Phi(-10) = 7.6198530241605260659e-24
        assert!((norm_cdf(-10.0_f64) / 7.619_853_024_160_526e-24 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ln_norm_cdf_deep_tail() {
        // ln Phi(-40) = -804.60844201375378817
        assert_abs_diff_eq!(norm_ln_cdf(-40.0), -804.608_442_013_753_8, epsilon = 1e-9);
        assert_abs_diff_eq!(norm_ln_cdf(-1.0), 0.158_655_253_931_457_05_f64.ln(), epsilon = 1e-15);
        assert!(norm_ln_cdf(10.0) < 0.0);
    }

    #[test]
    fn normal_quantile_roundtrip() {
        for &p in &[1e-300_f64, 1e-12, 1e-5, 0.01, 0.02425, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-10] {
            let x = norm_quantile(p).unwrap();
            assert!((norm_cdf(x) - p).abs() < 1e-14, "p = {p}");
        }
        assert!(norm_quantile(0.0).is_err());
        assert!(norm_quantile(1.0).is_err());
        assert!(norm_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_from_log_probability() {
        let x = norm_quantile_from_ln(-1000.0_f64);
        assert!((norm_ln_cdf(x) + 1000.0).abs() < 1e-10);
        assert!((norm_quantile_from_ln(0.3_f64.ln()) - norm_quantile_raw(0.3)).abs() < 1e-15);
    }

    #[test]
    fn gamma_values() {
        assert_abs_diff_eq!(ln_gamma(1.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(2.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(0.5).unwrap(), 0.572_364_942_924_700_1, epsilon = 1e-14);
        // ln Gamma(100) = 359.13420536957539878
        assert_abs_diff_eq!(ln_gamma(100.0).unwrap(), 359.134_205_369_575_4, epsilon = 1e-11);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn digamma_values() {
        assert_abs_diff_eq!(digamma(1.0).unwrap(), -0.577_215_664_901_532_9, epsilon = 1e-14);
        // psi(0.5) = -1.9635100260214234794
        assert_abs_diff_eq!(digamma(0.5).unwrap(), -1.963_510_026_021_423_5, epsilon = 1e-14);
        assert!(digamma(0.0).is_err());
    }

    #[test]
    fn digamma_is_derivative_of_ln_gamma() {
        for &x in &[0.5_f64, 0.9, 1.7, 3.0, 12.5, 40.0] {
            let h = 1e-5;
            let fd = (lgamma(x + h) - lgamma(x - h)) / (2.0 * h);
            assert!((psi(x) - fd).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn gamma_ratio_large_argument() {
        // ln Gamma(500000.5) - ln Gamma(500000) = 6.5611814387021643974
        assert_abs_diff_eq!(lgamma_ratio(500_000.0, 0.5), 6.561_181_438_702_164, epsilon = 1e-12);
    }

    #[test]
    fn incomplete_beta_values() {
        // I_0.3(2, 3) = 0.3483
        assert_abs_diff_eq!(beta_reg(0.3, 2.0, 3.0).unwrap(), 0.3483, epsilon = 1e-14);
        assert_abs_diff_eq!(beta_reg(0.5, 1.0, 1.0).unwrap(), 0.5, epsilon = 1e-14);
        assert!(beta_reg(1.2, 1.0, 1.0).is_err());
        assert!(beta_reg(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn student_t_basics() {
        assert_eq!(t_cdf(0.0, 5.0).unwrap(), 0.5);
        assert_abs_diff_eq!(t_pdf(0.0, 1.0).unwrap(), std::f64::consts::FRAC_1_PI, epsilon = 1e-14);
        assert_abs_diff_eq!(t_cdf(1.0, 1.0).unwrap(), 0.75, epsilon = 1e-15);
        // T_3 cdf at -2: 0.069662984279421...
        assert_abs_diff_eq!(t_cdf(-2.0, 3.0).unwrap(), 0.069_662_984_279_421_4, epsilon = 1e-14);
        assert!(t_cdf(0.0, 0.0).is_err());
        assert!(t_pdf(0.0, -1.0).is_err());
    }

    #[test]
    fn student_t_quantile_roundtrip() {
        for &nu in &[0.7_f64, 1.0, 2.0, 3.5, 30.0, 1e4] {
            for &p in &[1e-8, 0.01, 0.25, 0.5, 0.9, 0.999] {
                let t = t_quantile(p, nu).unwrap();
                let err = (t_cdf(t, nu).unwrap() - p).abs();
                assert!(err < 1e-12, "nu = {nu}, p = {p}, err = {err}");
            }
        }
        assert!(t_quantile(0.5, 0.0).is_err());
        assert!(t_quantile(1.0, 3.0).is_err());
    }

    #[test]
    fn t_cdf_nu_derivative_matches_finite_difference() {
        for &(x, nu) in &[(0.7_f64, 3.0_f64), (-1.9, 5.5), (2.5, 40.0)] {
            let h = 1e-5;
            let fd = (t_cdf_raw(x, nu + h) - t_cdf_raw(x, nu - h)) / (2.0 * h);
            assert!((t_cdf_dnu(x, nu) - fd).abs() < 1e-8, "x = {x}, nu = {nu}");
        }
    }

    #[test]
    fn single_precision_smoke() {
        assert!((norm_cdf(1.0f32) - 0.841_344_7).abs() < 1e-6);
        assert!((t_cdf(1.0f32, 1.0).unwrap() - 0.75).abs() < 1e-5);
        assert!((ln_gamma(0.5f32).unwrap() - 0.572_364_9).abs() < 1e-5);
    }

    #[test]
    fn t_log_cdf_deep_tail() {
        // mpmath betainc, 40 digits.
        for &(t, nu, want) in &[
            (-250.0f64, 272.0, -743.759_479_739_114_2f64),
            (-3.0, 5.0, -4.196_402_274_894_691),
            (-1e4, 2.5, -23.355_272_498_800_846),
        ] {
            let got = t_ln_cdf_raw(t, nu);
            assert!((got - want).abs() <= 1e-12 * want.abs(), "t = {t}: {got} vs {want}");
        }
        assert!((t_ln_cdf_raw(0.7f64, 4.0) - t_cdf_raw(0.7f64, 4.0).ln()).abs() < 1e-15);
    }
}
