//! Bracketed scalar root finding (Brent's method).

use crate::error::{Error, Result};
use crate::real::Real;

/// Stopping rules for [`find_root_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig<T> {
    /// Bracket width target relative to `max(1, |x|)`.
    pub x_rel_tol: T,
    /// Accept `x` as soon as `|f(x)| <= f_tol`.
    pub f_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for RootConfig<T> {
    fn default() -> Self {
        Self {
            x_rel_tol: T::lit(1e-13).max(T::epsilon() * T::lit(4.0)),
            f_tol: T::zero(),
            max_iter: 300,
        }
    }
}

/// Root of `f` on `[lo, hi]` with the default tolerances.
///
/// Requires `f(lo) * f(hi) <= 0`; otherwise returns [`Error::Bracket`].
pub fn find_root<T: Real, F: FnMut(T) -> T>(f: F, lo: T, hi: T) -> Result<T> {
    find_root_with(f, lo, hi, &RootConfig::default())
}

/// Brent's method: inverse quadratic interpolation with bisection safeguards.
/// Always converges once the bracket is valid.
pub fn find_root_with<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    hi: T,
    cfg: &RootConfig<T>,
) -> Result<T> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    let bracket_err = |fa: T, fb: T| Error::Bracket {
        lo: lo.as_f64(),
        hi: hi.as_f64(),
        f_lo: fa.as_f64(),
        f_hi: fb.as_f64(),
    };
    if fa.is_nan() || fb.is_nan() || fa * fb > T::zero() {
        return Err(bracket_err(fa, fb));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iter {
        if fb * fc > T::zero() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::epsilon() * b.abs() + half * cfg.x_rel_tol * b.abs().max(T::one());
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() || fb.abs() <= cfg.f_tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (T::lit(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else { b + tol * m.signum() };
        fb = f(b);
        if fb.is_nan() {
            return Err(bracket_err(fa, fb));
        }
    }
    Ok(b)
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_max<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, x_tol: T) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if (b - a).abs() <= x_tol * T::one().max(a.abs().max(b.abs())) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{norm_cdf, t_cdf};
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_root() {
        assert_abs_diff_eq!(find_root(|x: f64| x - 2.0, 0.0, 5.0).unwrap(), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn normal_median() {
        assert_abs_diff_eq!(find_root(|x: f64| norm_cdf(x) - 0.5, -5.0, 5.0).unwrap(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn cauchy_quartile() {
        let r = find_root(|x: f64| t_cdf(x, 1.0).unwrap() - 0.75, 0.0, 10.0).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_bracket_is_an_error() {
        let err = find_root(|x: f64| x * x + 1.0, -1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn golden_section_finds_peak() {
        let x = golden_max(|x: f64| -(x - 0.3) * (x - 0.3), -2.0, 2.0, 1e-12);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-7);
    }
}
