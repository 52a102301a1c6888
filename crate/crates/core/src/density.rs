//! The contract every distribution in the crate satisfies, plus shared
//! helpers for bracketed quantiles, inverse-CDF sampling and quadrature of a
//! density over its support.

use crate::error::{domain, Result};
use crate::quadrature::{integrate_pieces, Quadrature};
use crate::real::Real;
use crate::rng::RngStream;
use crate::roots::find_root;

/// A univariate continuous distribution.
pub trait DensityModel<T: Real> {
    fn ln_pdf(&self, x: T) -> T;

    fn pdf(&self, x: T) -> T {
        self.ln_pdf(x).exp()
    }

    fn cdf(&self, x: T) -> T;

    /// Upper tail `1 - F(x)`. Implementations override this where a
    /// cancellation-free form exists.
    fn sf(&self, x: T) -> T {
        T::one() - self.cdf(x)
    }

    /// Inverse of [`DensityModel::cdf`]; `p` must lie in `(0, 1)`.
    fn quantile(&self, p: T) -> Result<T> {
        quantile_by_root(self, p)
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<T> {
        (0..n)
            .map(|_| {
                let u = rng.uniform_real::<T>();
                self.quantile(u).unwrap_or(T::nan())
            })
            .collect()
    }

    /// Closed support `(lo, hi)`; infinite ends are `±inf`.
    fn support(&self) -> (T, T) {
        (T::neg_infinity(), T::infinity())
    }

    /// Points where the density has a kink or its formula changes branch.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }

    /// Typical location and spread, used to bracket quantiles and to scale
    /// quadrature over infinite ranges.
    fn location_scale(&self) -> (T, T);
}

/// Quantile by Brent's method on `cdf - p`, expanding a bracket around the
/// model's location until it straddles `p`.
pub fn quantile_by_root<T: Real, M: DensityModel<T> + ?Sized>(m: &M, p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(format!("quantile requires 0 < p < 1, got {p}")));
    }
    let (center, scale) = m.location_scale();
    let (s_lo, s_hi) = m.support();
    let two = T::lit(2.0);
    let mut width = scale;
    let mut lo = center - width;
    let mut hi = center + width;
    for _ in 0..2000 {
        let lo_ok = lo <= s_lo || m.cdf(lo) <= p;
        let hi_ok = hi >= s_hi || m.cdf(hi) >= p;
        if lo_ok && hi_ok {
            break;
        }
        width = width * two;
        if !lo_ok {
            lo = (center - width).max(s_lo);
        }
        if !hi_ok {
            hi = (center + width).min(s_hi);
        }
    }
    if s_lo.is_finite() && lo <= s_lo {
        // Approach a finite lower bound geometrically rather than landing on it.
        lo = s_lo;
        let mut probe = center;
        while probe > s_lo && m.cdf(probe) > p {
            let next = s_lo + (probe - s_lo) / T::lit(16.0);
            if next == probe {
                break;
            }
            probe = next;
        }
        if probe > s_lo {
            lo = probe;
        }
    }
    let lo = lo.max(s_lo);
    let hi = hi.min(s_hi);
    // Relative residual keeps small tail probabilities accurate.
    let scale_p = p.min(T::one() - p);
    find_root(|x| (m.cdf(x) - p) / scale_p, lo, hi)
}

/// `∫ pdf` over the model's support, split at its breakpoints.
pub fn total_mass<T: Real, M: DensityModel<T> + ?Sized>(m: &M, q: &Quadrature<T>) -> Result<T> {
    let (lo, hi) = m.support();
    let (c, s) = m.location_scale();
    let mut breaks = m.breakpoints();
    breaks.push(c);
    integrate_pieces(|x| m.pdf(x), lo, hi, &breaks, s, q)
}

/// `∫_{lo}^{x} pdf`, the quadrature oracle for a closed-form CDF.
pub fn cdf_by_quadrature<T: Real, M: DensityModel<T> + ?Sized>(m: &M, x: T, q: &Quadrature<T>) -> Result<T> {
    let (lo, _) = m.support();
    let (c, s) = m.location_scale();
    let mut breaks = m.breakpoints();
    breaks.push(c);
    integrate_pieces(|t| m.pdf(t), lo, x, &breaks, s, q)
}

/// `∫ x^r pdf` over the support.
pub fn raw_moment_by_quadrature<T: Real, M: DensityModel<T> + ?Sized>(m: &M, r: i32, q: &Quadrature<T>) -> Result<T> {
    let (lo, hi) = m.support();
    let (c, s) = m.location_scale();
    let mut breaks = m.breakpoints();
    breaks.push(c);
    integrate_pieces(|x| if r == 0 { m.pdf(x) } else { x.powi(r) * m.pdf(x) }, lo, hi, &breaks, s, q)
}

/// Draw from `N(mean, 1)` truncated to `(-inf, upper)` by inversion on the
/// lower tail, so no probability near 1 is ever formed.
pub(crate) fn truncated_normal_below<T: Real>(mean: T, upper: T, u: T) -> T {
    let ln_mass = crate::special::norm_ln_cdf(upper - mean);
    mean + crate::special::norm_quantile_from_ln(u.ln() + ln_mass)
}

/// Draw from `N(mean, 1)` truncated to `(lower, inf)`, mirrored onto the
/// lower-tail routine.
pub(crate) fn truncated_normal_above<T: Real>(mean: T, lower: T, u: T) -> T {
    -truncated_normal_below(-mean, -lower, u)
}

/// Draw from a Student-t with `nu` degrees of freedom, location `center`
/// and scale `scale`, truncated to `(-inf, upper)`.
pub(crate) fn truncated_t_below<T: Real>(center: T, scale: T, nu: T, upper: T, u: T) -> T {
    let mass = crate::special::t_cdf_raw((upper - center) / scale, nu);
    let target = u * mass;
    if !(target > T::zero()) {
        return upper;
    }
    let z = crate::special::t_quantile_raw(target, nu);
    (center + scale * z).min(upper)
}

/// Truncated to `(lower, inf)`; mirrored onto [`truncated_t_below`].
pub(crate) fn truncated_t_above<T: Real>(center: T, scale: T, nu: T, lower: T, u: T) -> T {
    -truncated_t_below(-center, scale, nu, -lower, u)
}
