//! Bimodal-unimodal normal (BUN) distribution.
//!
//! Density
//! `f(x) = c exp(k |u|) phi(u - b) / sigma`, `u = (x - mu) / sigma`, `b = a / sigma`,
//! with `1 / c = exp(k^2 / 2) [exp(k b) Phi(k + b) + exp(-k b) Phi(k - b)]`.
//! The family is bimodal exactly when `sigma k > |a|`, reduces to the normal
//! at `k = 0` and is symmetric about `mu` at `a = 0`.
//!
//! Every normalizing quantity is evaluated in log space, so large `|k|` or
//! `|a| / sigma` cannot overflow.

use crate::density::{truncated_normal_above, truncated_normal_below, DensityModel};
use crate::error::{domain, Result};
use crate::real::{log_sum_exp, Real};
use crate::rng::RngStream;
use crate::special::{norm_cdf, norm_ln_cdf, norm_ln_pdf};

/// Parameters `(mu, sigma, k, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BunParams<T> {
    pub mu: T,
    pub sigma: T,
    pub k: T,
    pub a: T,
}

impl<T: Real> BunParams<T> {
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
        if !(self.mu.is_finite() && self.k.is_finite() && self.a.is_finite()) {
            return Err(domain("BUN parameters must be finite"));
        }
        if !(self.sigma > T::zero() && self.sigma.is_finite()) {
            return Err(domain(format!("BUN requires sigma > 0, got {}", self.sigma)));
        }
        Ok(())
    }

    /// Skew parameter in standardized units, `a / sigma`.
    pub fn b(&self) -> T {
        self.a / self.sigma
    }
}

/// Auxiliary quantities of the standardized variable `Z = (X - mu) / sigma`.
///
/// `p_t`, `n_t`, `delta` and `n_d` are the raw (possibly huge) values;
/// `s`, `rho` and `p` are computed from their logarithms and stay accurate
/// when the raw values overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BunAux<T> {
    /// `exp(k b) Phi(k + b)`
    pub p_t: T,
    /// `exp(-k b) Phi(k - b)`
    pub n_t: T,
    /// `p_t + n_t`
    pub delta: T,
    /// `k + b`
    pub p_k: T,
    /// `k - b`
    pub n_k: T,
    /// `exp(-k b) phi(k - b)`
    pub n_d: T,
    /// Weight of the left mixture component, `n_t / delta`.
    pub p: T,
    /// `(p_t - n_t) / delta`
    pub s: T,
    /// `2 exp(k b) phi(k + b) / delta`
    pub rho: T,
    pub ln_delta: T,
}

impl<T: Real> BunAux<T> {
    fn new(k: T, b: T) -> Self {
        let ln_pt = k * b + norm_ln_cdf(k + b);
        let ln_nt = -k * b + norm_ln_cdf(k - b);
        let ln_delta = log_sum_exp(ln_pt, ln_nt);
        let ln_nd = -k * b + norm_ln_pdf(k - b);
        let half = T::lit(0.5);
        // exp(k b) phi(k + b) == exp(-k b) phi(k - b), so rho = 2 n_d / delta.
        Self {
            p_t: ln_pt.exp(),
            n_t: ln_nt.exp(),
            delta: ln_delta.exp(),
            p_k: k + b,
            n_k: k - b,
            n_d: ln_nd.exp(),
            p: (ln_nt - ln_delta).exp(),
            s: ((ln_pt - ln_nt) * half).tanh(),
            rho: T::lit(2.0) * (ln_nd - ln_delta).exp(),
            ln_delta,
        }
    }

    /// `n_d / delta` without forming either factor.
    fn nd_over_delta(&self, k: T, b: T) -> T {
        (-k * b + norm_ln_pdf(k - b) - self.ln_delta).exp()
    }
}

/// One truncated normal component of the mixture representation, in the
/// standardized variable `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal<T> {
    pub mean: T,
    pub lower: T,
    pub upper: T,
}

impl<T: Real> TruncatedNormal<T> {
    pub fn pdf(&self, z: T) -> T {
        if z < self.lower || z > self.upper {
            return T::zero();
        }
        (norm_ln_pdf(z - self.mean) - self.ln_mass()).exp()
    }

    /// Log of the untruncated mass on `[lower, upper]`, computed on the far
    /// side of the mean so a remote interval does not cancel to zero.
    fn ln_mass(&self) -> T {
        let (lo, hi) = (self.lower - self.mean, self.upper - self.mean);
        if hi == T::infinity() {
            norm_ln_cdf(-lo)
        } else if lo == T::neg_infinity() {
            norm_ln_cdf(hi)
        } else if lo > T::zero() {
            (norm_cdf(-lo) - norm_cdf(-hi)).ln()
        } else {
            (norm_cdf(hi) - norm_cdf(lo)).ln()
        }
    }
}

/// Two-component representation: with probability `p` draw from `left`
/// (support `z < 0`), otherwise from `right` (support `z > 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BunMixture<T> {
    pub p: T,
    pub left: TruncatedNormal<T>,
    pub right: TruncatedNormal<T>,
}

impl<T: Real> BunMixture<T> {
    /// Mixture density in `Z`.
    pub fn pdf(&self, z: T) -> T {
        if z < T::zero() {
            self.p * self.left.pdf(z)
        } else {
            (T::one() - self.p) * self.right.pdf(z)
        }
    }
}

/// A BUN distribution with its normalizer precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bun<T> {
    params: BunParams<T>,
    aux: BunAux<T>,
    ln_c: T,
}

impl<T: Real> Bun<T> {
    pub fn new(params: BunParams<T>) -> Result<Self> {
        params.validate()?;
        let aux = BunAux::new(params.k, params.b());
        let ln_c = -params.k * params.k / T::lit(2.0) - aux.ln_delta;
        Ok(Self { params, aux, ln_c })
    }

    pub fn from_parts(mu: T, sigma: T, k: T, a: T) -> Result<Self> {
        Self::new(BunParams::new(mu, sigma, k, a)?)
    }

    pub fn params(&self) -> &BunParams<T> {
        &self.params
    }

    pub fn aux(&self) -> &BunAux<T> {
        &self.aux
    }

    /// `ln c`, the log normalizing constant.
    pub fn ln_norm_const(&self) -> T {
        self.ln_c
    }

    fn z(&self, x: T) -> T {
        (x - self.params.mu) / self.params.sigma
    }

    /// Mixture of two truncated normals that reproduces the density.
    pub fn mixture(&self) -> BunMixture<T> {
        let (k, b) = (self.params.k, self.params.b());
        BunMixture {
            p: self.aux.p,
            left: TruncatedNormal { mean: b - k, lower: T::neg_infinity(), upper: T::zero() },
            right: TruncatedNormal { mean: b + k, lower: T::zero(), upper: T::infinity() },
        }
    }

    /// Moment generating function of the standardized variable `Z`.
    pub fn mgf(&self, t: T) -> T {
        let (k, b) = (self.params.k, self.params.b());
        let half = T::lit(0.5);
        let kp = k + t;
        let km = k - t;
        let num = log_sum_exp(
            kp * b + kp * kp * half + norm_ln_cdf(k + b + t),
            -km * b + km * km * half + norm_ln_cdf(k - b - t),
        );
        (num - k * k * half - self.aux.ln_delta).exp()
    }

    /// `E(Z), E(Z^2), E(Z^3), E(Z^4)` for the standardized variable.
    pub fn moments(&self) -> [T; 4] {
        let (k, b) = (self.params.k, self.params.b());
        let a = &self.aux;
        let wp = T::one() - a.p;
        let wn = a.p;
        let wd = a.nd_over_delta(k, b);
        let (pk, nk) = (a.p_k, a.n_k);
        let c = |v: f64| T::lit(v);
        let m1 = pk * wp - nk * wn;
        let m2 = (T::one() + pk * pk) * wp + (T::one() + nk * nk) * wn + c(2.0) * k * wd;
        let m3 = (c(3.0) * pk + pk.powi(3)) * wp - (c(3.0) * nk + nk.powi(3)) * wn + c(4.0) * k * b * wd;
        let m4 = (c(3.0) + c(6.0) * pk * pk + pk.powi(4)) * wp
            + (c(3.0) + c(6.0) * nk * nk + nk.powi(4)) * wn
            + (c(2.0) * k.powi(3) + c(10.0) * k + c(6.0) * b * b * k) * wd;
        [m1, m2, m3, m4]
    }

    /// Mean and variance of `X`.
    pub fn mean_variance(&self) -> (T, T) {
        let [m1, m2, _, _] = self.moments();
        let s = self.params.sigma;
        (self.params.mu + s * m1, s * s * (m2 - m1 * m1))
    }

    /// Modes of the density in ascending order.
    pub fn modes(&self) -> Vec<T> {
        let p = &self.params;
        let (left, right) = (p.mu + p.a - p.sigma * p.k, p.mu + p.a + p.sigma * p.k);
        let z = standardized_modes(p.k, p.b());
        match z.len() {
            2 => vec![left, right],
            _ if z[0] == T::zero() => vec![p.mu],
            _ if z[0] < T::zero() => vec![left],
            _ => vec![right],
        }
    }

    /// Log-likelihood of `data`.
    pub fn loglik(&self, data: &[T]) -> T {
        let p = &self.params;
        let n = T::from_usize_lossy(data.len());
        let half = T::lit(0.5);
        let mut abs_sum = T::zero();
        let mut sq_sum = T::zero();
        for &x in data {
            abs_sum = abs_sum + (x - p.mu).abs();
            let r = (x - p.mu - p.a) / p.sigma;
            sq_sum = sq_sum + r * r;
        }
        let ln_2pi = T::lit(1.837_877_066_409_345_5);
        -n * p.k * p.k * half - n * p.sigma.ln() - n * self.aux.ln_delta - n * half * ln_2pi + p.k / p.sigma * abs_sum
            - half * sq_sum
    }

    /// Score vector `(d/dmu, d/dsigma, d/dk, d/da)` of the log-likelihood,
    /// with `sign(0) = 0` at kinks.
    pub fn score(&self, data: &[T]) -> [T; 4] {
        let p = &self.params;
        let n = T::from_usize_lossy(data.len());
        let s = self.aux.s;
        let rho = self.aux.rho;
        let mut sign_sum = T::zero();
        let mut abs_sum = T::zero();
        let mut r_sum = T::zero();
        let mut r2_sum = T::zero();
        for &x in data {
            let d = x - p.mu;
            sign_sum = sign_sum + d.sign0();
            abs_sum = abs_sum + d.abs();
            let r = (d - p.a) / p.sigma;
            r_sum = r_sum + r;
            r2_sum = r2_sum + r * r;
        }
        let sig = p.sigma;
        let d_mu = -p.k / sig * sign_sum + r_sum / sig;
        let d_sigma = -n / sig + n * p.k * p.a * s / (sig * sig) - p.k / (sig * sig) * abs_sum + r2_sum / sig;
        let d_k = -n * p.k - n * p.a * s / sig - n * rho + abs_sum / sig;
        let d_a = -n * p.k * s / sig + r_sum / sig;
        [d_mu, d_sigma, d_k, d_a]
    }

    /// Draws `n` variates via the truncated-normal mixture.
    pub fn sample_mixture(&self, n: usize, rng: &mut RngStream) -> Vec<T> {
        let m = self.mixture();
        let p = &self.params;
        (0..n)
            .map(|_| {
                let pick = rng.uniform_real::<T>();
                let u = rng.uniform_real::<T>();
                let z = if pick < m.p {
                    truncated_normal_below(m.left.mean, T::zero(), u)
                } else {
                    truncated_normal_above(m.right.mean, T::zero(), u)
                };
                p.mu + p.sigma * z
            })
            .collect()
    }
}

/// Modes of the standardized density `exp(k|z|) phi(z - b)`.
pub(crate) fn standardized_modes<T: Real>(k: T, b: T) -> Vec<T> {
    let left = b - k;
    let right = b + k;
    match (left < T::zero(), right > T::zero()) {
        (true, true) => vec![left, right],
        (true, false) => vec![left],
        (false, true) => vec![right],
        (false, false) => vec![T::zero()],
    }
}

impl<T: Real> DensityModel<T> for Bun<T> {
    fn ln_pdf(&self, x: T) -> T {
        let p = &self.params;
        let u = self.z(x);
        self.ln_c + p.k * u.abs() - p.sigma.ln() + norm_ln_pdf(u - p.b())
    }

    fn cdf(&self, x: T) -> T {
        let z = self.z(x);
        if z <= T::zero() {
            self.left_mass(z)
        } else {
            let sf = self.right_tail(z);
            if sf < T::lit(0.5) {
                T::one() - sf
            } else {
                let (k, b) = (self.params.k, self.params.b());
                let inner = norm_cdf(z - k - b) - norm_cdf(-k - b);
                self.aux.p + (k * b + inner.ln() - self.aux.ln_delta).exp()
            }
        }
    }

    fn sf(&self, x: T) -> T {
        let z = self.z(x);
        if z > T::zero() {
            self.right_tail(z)
        } else {
            T::one() - self.left_mass(z)
        }
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<T> {
        self.sample_mixture(n, rng)
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![self.params.mu]
    }

    fn location_scale(&self) -> (T, T) {
        let p = &self.params;
        (p.mu + p.a, p.sigma * (T::one() + p.k.abs()))
    }
}

impl<T: Real> Bun<T> {
    /// `ln(1 - F(x))`, finite for every finite `x`.
    pub fn ln_sf(&self, x: T) -> T {
        let z = self.z(x);
        if z > T::zero() {
            let (k, b) = (self.params.k, self.params.b());
            k * b + norm_ln_cdf(k + b - z) - self.aux.ln_delta
        } else {
            (-self.left_mass(z)).ln_1p()
        }
    }

    /// `F(z)` for `z <= 0`: `exp(-k b) Phi(z + k - b) / delta`.
    fn left_mass(&self, z: T) -> T {
        let (k, b) = (self.params.k, self.params.b());
        (-k * b + norm_ln_cdf(z + k - b) - self.aux.ln_delta).exp()
    }

    /// `1 - F(z)` for `z > 0`: `exp(k b) Phi(k + b - z) / delta`.
    fn right_tail(&self, z: T) -> T {
        let (k, b) = (self.params.k, self.params.b());
        (k * b + norm_ln_cdf(k + b - z) - self.aux.ln_delta).exp()
    }
}
