//! Bimodal-unimodal Laplace (BUL) distribution.
//!
//! ```text
//! f(x) = k / (sigma c) (1 + (u - b)^2) exp(-k |u|)
//! u = (x - mu) / sigma,  b = a / sigma,  c = 2 (1 + b^2 + 2 / k^2)
//! ```
//!
//! The CDF is the exact piecewise antiderivative
//! `F = exp(k u) [P(u) - P'(u)/k + 2/k^2] / c` for `u <= 0` and
//! `1 - F = exp(-k u) [P(u) + P'(u)/k + 2/k^2] / c` for `u > 0`,
//! with `P(u) = 1 + (u - b)^2`.

use crate::density::DensityModel;
use crate::error::{domain, Result};
use crate::modes::numeric_modes;
use crate::real::Real;

/// Parameters `(mu, sigma, k, a)` with `k > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulParams<T> {
    pub mu: T,
    pub sigma: T,
    pub k: T,
    pub a: T,
}

impl<T: Real> BulParams<T> {
    pub fn new(mu: T, sigma: T, k: T, a: T) -> Result<Self> {
        let p = Self { mu, sigma, k, a };
        p.validate()?;
        Ok(p)
    }

    /// The symmetric sub-family `a = 0`.
    pub fn symmetric(mu: T, sigma: T, k: T) -> Result<Self> {
        Self::new(mu, sigma, k, T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.a.is_finite()) {
            return Err(domain("BUL parameters must be finite"));
        }
        if !(self.sigma > T::zero() && self.sigma.is_finite()) {
            return Err(domain(format!("BUL requires sigma > 0, got {}", self.sigma)));
        }
        if !(self.k > T::zero() && self.k.is_finite()) {
            return Err(domain(format!("BUL requires k > 0, got {}", self.k)));
        }
        Ok(())
    }

    pub fn b(&self) -> T {
        self.a / self.sigma
    }
}

/// `c = 2 (1 + b^2 + 2 / k^2)` and `b = a / sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulAux<T> {
    pub c: T,
    pub b: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bul<T> {
    params: BulParams<T>,
    aux: BulAux<T>,
}

/// `E(W^s)` for a Laplace variable with location 0 and scale `1 / k`.
pub fn laplace_moment<T: Real>(s: u32, k: T) -> T {
    if s % 2 == 1 {
        return T::zero();
    }
    let fact = (1..=s).fold(T::one(), |acc, i| acc * T::lit(i as f64));
    fact / k.powi(s as i32)
}

impl<T: Real> Bul<T> {
    pub fn new(params: BulParams<T>) -> Result<Self> {
        params.validate()?;
        let b = params.b();
        let two = T::lit(2.0);
        let c = two * (T::one() + b * b + two / (params.k * params.k));
        Ok(Self { params, aux: BulAux { c, b } })
    }

    pub fn from_parts(mu: T, sigma: T, k: T, a: T) -> Result<Self> {
        Self::new(BulParams::new(mu, sigma, k, a)?)
    }

    pub fn params(&self) -> &BulParams<T> {
        &self.params
    }

    pub fn aux(&self) -> &BulAux<T> {
        &self.aux
    }

    fn u(&self, x: T) -> T {
        (x - self.params.mu) / self.params.sigma
    }

    /// `E(Z^r)` of the standardized variable `Z = (X - mu) / sigma`.
    pub fn standardized_moment(&self, r: u32) -> T {
        let (k, b, c) = (self.params.k, self.aux.b, self.aux.c);
        let two = T::lit(2.0);
        two / c
            * ((T::one() + b * b) * laplace_moment(r, k) - two * b * laplace_moment(r + 1, k)
                + laplace_moment(r + 2, k))
    }

    /// `E(X^r)` by binomial expansion of `(mu + sigma Z)^r`.
    pub fn moment(&self, r: u32) -> T {
        let p = &self.params;
        let mut total = T::zero();
        let mut binom = T::one();
        for j in 0..=r {
            if j > 0 {
                binom = binom * T::lit((r - j + 1) as f64) / T::lit(j as f64);
            }
            total = total + binom * p.mu.powi((r - j) as i32) * p.sigma.powi(j as i32) * self.standardized_moment(j);
        }
        total
    }

    /// Modes in ascending order. For `a = 0` they come from the stationary
    /// equation `k u^2 - 2u + k = 0` (`u > 0`, mirrored) plus the kink at
    /// `mu`; otherwise from a numeric search.
    pub fn modes(&self) -> Vec<T> {
        let p = &self.params;
        if p.a == T::zero() {
            let one = T::one();
            if p.k < one {
                let inv = p.k.recip();
                let u = inv + (inv * inv - one).sqrt();
                return vec![p.mu - p.sigma * u, p.mu, p.mu + p.sigma * u];
            }
            return vec![p.mu];
        }
        let span = p.sigma * (T::lit(4.0) / p.k + p.a.abs() / p.sigma + T::lit(4.0));
        numeric_modes(|x| self.ln_pdf(x), p.mu - span, p.mu + span)
    }

    pub fn loglik(&self, data: &[T]) -> T {
        let p = &self.params;
        let n = T::from_usize_lossy(data.len());
        let two = T::lit(2.0);
        let mut abs_sum = T::zero();
        let mut log_sum = T::zero();
        for &x in data {
            abs_sum = abs_sum + ((x - p.mu) / p.sigma).abs();
            let r = (x - p.mu - p.a) / p.sigma;
            log_sum = log_sum + (r * r).ln_1p();
        }
        n * (p.k / (two * p.sigma)).ln() - n * (self.aux.c / two).ln() - p.k * abs_sum + log_sum
    }

    /// Score vector `(d/dmu, d/dsigma, d/dk, d/da)`, `sign(0) = 0`.
    pub fn score(&self, data: &[T]) -> [T; 4] {
        let p = &self.params;
        let n = T::from_usize_lossy(data.len());
        let two = T::lit(2.0);
        let q = self.aux.c / two;
        let mut sign_sum = T::zero();
        let mut abs_sum = T::zero();
        let mut r_term = T::zero();
        let mut r2_term = T::zero();
        for &x in data {
            let d = x - p.mu;
            sign_sum = sign_sum + d.sign0();
            abs_sum = abs_sum + d.abs();
            let r = (d - p.a) / p.sigma;
            r_term = r_term + r / (T::one() + r * r);
            r2_term = r2_term + r * r / (T::one() + r * r);
        }
        let s = p.sigma;
        let d_mu = p.k / s * sign_sum - two / s * r_term;
        let d_sigma = -n / s + two * n * p.a * p.a / (s.powi(3) * q) + p.k / (s * s) * abs_sum - two / s * r2_term;
        let d_k = n / p.k + T::lit(4.0) * n / (p.k.powi(3) * q) - abs_sum / s;
        let d_a = -two * n * p.a / (s * s * q) - two / s * r_term;
        [d_mu, d_sigma, d_k, d_a]
    }
}

impl<T: Real> DensityModel<T> for Bul<T> {
    fn ln_pdf(&self, x: T) -> T {
        let p = &self.params;
        let u = self.u(x);
        let r = u - self.aux.b;
        p.k.ln() - p.sigma.ln() - self.aux.c.ln() + (r * r).ln_1p() - p.k * u.abs()
    }

    fn cdf(&self, x: T) -> T {
        let u = self.u(x);
        if u <= T::zero() {
            self.left_mass(u)
        } else {
            T::one() - self.right_tail(u)
        }
    }

    fn sf(&self, x: T) -> T {
        let u = self.u(x);
        if u > T::zero() {
            self.right_tail(u)
        } else {
            T::one() - self.left_mass(u)
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![self.params.mu]
    }

    fn location_scale(&self) -> (T, T) {
        let p = &self.params;
        (p.mu + p.a, p.sigma * (T::one() + p.k.recip()) + p.a.abs())
    }
}

impl<T: Real> Bul<T> {
    fn poly_terms(&self, u: T) -> (T, T) {
        let r = u - self.aux.b;
        (T::one() + r * r, T::lit(2.0) * r)
    }

    /// `F(u)` for `u <= 0`.
    fn left_mass(&self, u: T) -> T {
        let k = self.params.k;
        let (p, dp) = self.poly_terms(u);
        (k * u).exp() * (p - dp / k + T::lit(2.0) / (k * k)) / self.aux.c
    }

    /// `1 - F(u)` for `u > 0`.
    fn right_tail(&self, u: T) -> T {
        let k = self.params.k;
        let (p, dp) = self.poly_terms(u);
        (-k * u).exp() * (p + dp / k + T::lit(2.0) / (k * k)) / self.aux.c
    }
}
