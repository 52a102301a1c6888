//! Log-BUN lifetime distribution: `T = exp(X)` with `X ~ BUN(mu, sigma, k, a)`.

use crate::bun::{Bun, BunParams};
use crate::density::DensityModel;
use crate::error::{domain, Error, Result};
use crate::real::Real;
use crate::rng::RngStream;

/// Same fields and meaning as [`BunParams`], applied to `log T`.
pub type LogBunParams<T> = BunParams<T>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBun<T> {
    inner: Bun<T>,
}

impl<T: Real> LogBun<T> {
    pub fn new(params: LogBunParams<T>) -> Result<Self> {
        Ok(Self { inner: Bun::new(params)? })
    }

    pub fn from_parts(mu: T, sigma: T, k: T, a: T) -> Result<Self> {
        Ok(Self { inner: Bun::from_parts(mu, sigma, k, a)? })
    }

    pub fn params(&self) -> &LogBunParams<T> {
        self.inner.params()
    }

    /// The BUN law of `log T`.
    pub fn log_scale(&self) -> &Bun<T> {
        &self.inner
    }

    /// Density with a domain error for `t <= 0`.
    pub fn pdf_checked(&self, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(domain(format!("Log-BUN density requires t > 0, got {t}")));
        }
        Ok(self.pdf(t))
    }

    /// `E(T^r) = E(exp(r X)) = exp(r mu) M_Z(r sigma)`.
    pub fn moment(&self, r: u32) -> T {
        if r == 0 {
            return T::one();
        }
        let p = self.inner.params();
        let rf = T::lit(r as f64);
        (rf * p.mu).exp() * self.inner.mgf(rf * p.sigma)
    }

    /// Hazard `f(t) / (1 - F(t))`, formed in log space so that a tiny
    /// survival probability does not underflow.
    ///
    /// If the ratio is still not finite, the error carries the hazard at the
    /// largest point below `t` (on a log-spaced walk back) where it is.
    pub fn hazard(&self, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(domain(format!("hazard requires t > 0, got {t}")));
        }
        let h = self.hazard_raw(t);
        if h.is_finite() {
            return Ok(h);
        }
        let step = self.inner.params().sigma * T::lit(0.01);
        let mut ln_t = t.min(T::max_value()).ln();
        let mut last_finite = f64::NAN;
        for _ in 0..100_000 {
            ln_t = ln_t - step;
            let v = self.hazard_raw(ln_t.exp());
            if v.is_finite() {
                last_finite = v.as_f64();
                break;
            }
        }
        Err(Error::HazardOverflow { t: t.as_f64(), last_finite })
    }

    fn hazard_raw(&self, t: T) -> T {
        let x = t.ln();
        (self.inner.ln_pdf(x) - x - self.inner.ln_sf(x)).exp()
    }

    /// Hazard at each point of an ascending grid; stops at the first point
    /// where it is not finite.
    pub fn hazard_curve(&self, ts: &[T]) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(ts.len());
        for &t in ts {
            if !(t > T::zero()) {
                return Err(domain(format!("hazard requires t > 0, got {t}")));
            }
            let h = self.hazard_raw(t);
            if !h.is_finite() {
                let last_finite = out.last().map_or(f64::NAN, |v: &T| v.as_f64());
                return Err(Error::HazardOverflow { t: t.as_f64(), last_finite });
            }
            out.push(h);
        }
        Ok(out)
    }
}

impl<T: Real> DensityModel<T> for LogBun<T> {
    fn ln_pdf(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::neg_infinity();
        }
        let x = t.ln();
        self.inner.ln_pdf(x) - x
    }

    fn cdf(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        self.inner.cdf(t.ln())
    }

    fn sf(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::one();
        }
        self.inner.sf(t.ln())
    }

    fn quantile(&self, p: T) -> Result<T> {
        Ok(self.inner.quantile(p)?.exp())
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<T> {
        self.inner.sample(n, rng).into_iter().map(|x| x.exp()).collect()
    }

    fn support(&self) -> (T, T) {
        (T::zero(), T::infinity())
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![self.inner.params().mu.exp()]
    }

    fn location_scale(&self) -> (T, T) {
        let (c, s) = self.inner.location_scale();
        (c.exp(), c.exp() * (s.exp() - T::one()))
    }
}
