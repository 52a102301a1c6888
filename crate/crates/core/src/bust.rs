//! Bimodal-unimodal Student-t (BUSt) distribution.
//!
//! With `s_- = sigma^2 - 2ak/nu`, `s_+ = sigma^2 + 2ak/nu` and `d`, `D` the
//! Student-t density and distribution function with `nu` degrees of freedom,
//!
//! ```text
//! f(x) = s_-^{-(nu+1)/2} d((x - mu - a - k) / sqrt(s_-)) / Delta    x >= mu
//! f(x) = s_+^{-(nu+1)/2} d((x - mu - a + k) / sqrt(s_+)) / Delta    x <  mu
//! Delta = s_-^{-nu/2} D((a + k) / sqrt(s_-)) + s_+^{-nu/2} D((k - a) / sqrt(s_+))
//! ```
//!
//! `k` and `a` are in data units, so the modes sit at `mu + a ± k`. The two
//! branches meet continuously at `x = mu`. As `nu -> inf` the family tends to
//! `BUN(mu, sigma, k / sigma, a)`.

use crate::bun::Bun;
use crate::density::{truncated_t_above, truncated_t_below, DensityModel};
use crate::error::{domain, Error, Result};
use crate::real::{log_sum_exp, Real};
use crate::rng::RngStream;
use crate::special::{lgamma, psi, t_cdf_dnu, t_cdf_raw, t_ln_cdf_raw, t_ln_pdf_raw, t_pdf_raw};

/// Parameters `(mu, sigma, k, a, nu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BustParams<T> {
    pub mu: T,
    pub sigma: T,
    pub k: T,
    pub a: T,
    pub nu: T,
}

impl<T: Real> BustParams<T> {
    pub fn new(mu: T, sigma: T, k: T, a: T, nu: T) -> Result<Self> {
        let p = Self { mu, sigma, k, a, nu };
        p.validate()?;
        Ok(p)
    }

    /// The symmetric sub-family `a = 0`.
    pub fn symmetric(mu: T, sigma: T, k: T, nu: T) -> Result<Self> {
        Self::new(mu, sigma, k, T::zero(), nu)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.k.is_finite() && self.a.is_finite()) {
            return Err(domain("BUSt parameters must be finite"));
        }
        if !(self.sigma > T::zero() && self.sigma.is_finite()) {
            return Err(domain(format!("BUSt requires sigma > 0, got {}", self.sigma)));
        }
        if !(self.nu > T::zero() && self.nu.is_finite()) {
            return Err(domain(format!("BUSt requires nu > 0, got {}", self.nu)));
        }
        let two_ak = T::lit(2.0) * (self.a * self.k).abs();
        if !(self.nu * self.sigma * self.sigma > two_ak) {
            return Err(domain(format!(
                "BUSt requires nu sigma^2 > 2|a k| (branch scales must be positive), got nu sigma^2 = {}, 2|ak| = {}",
                self.nu * self.sigma * self.sigma,
                two_ak
            )));
        }
        Ok(())
    }

    pub fn s_minus(&self) -> T {
        self.sigma * self.sigma - T::lit(2.0) * self.a * self.k / self.nu
    }

    pub fn s_plus(&self) -> T {
        self.sigma * self.sigma + T::lit(2.0) * self.a * self.k / self.nu
    }
}

/// Derived quantities shared by the density, moments and score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BustAux<T> {
    pub s_minus: T,
    pub s_plus: T,
    /// Normalizer `Delta`.
    pub delta: T,
    pub ln_delta: T,
    /// Weight of the right component (support `x > mu`).
    pub r_minus: T,
    /// Weight of the left component (support `x < mu`).
    pub r_plus: T,
    /// `D((a + k) / sqrt(s_-))`
    pub d_cdf_minus: T,
    /// `D((k - a) / sqrt(s_+))`
    pub d_cdf_plus: T,
    /// `d((a + k) / sqrt(s_-))`
    pub d_pdf_minus: T,
    /// `d((k - a) / sqrt(s_+))`
    pub d_pdf_plus: T,
    /// Normalized raw moments `E(T^j)`, `j = 1..4`, of the standardized
    /// right component; NaN where `nu <= j`.
    pub eta: [T; 4],
    /// Same for the standardized left component.
    pub lambda: [T; 4],
    /// `G_nu(s)` for `s = 1, 3` (right component); NaN where `nu <= s`.
    pub g_nu: [T; 2],
    /// `G'_nu(s)` for `s = 1, 3` (left component).
    pub gp_nu: [T; 2],
}

/// A truncated, location-scale Student-t component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedT<T> {
    pub center: T,
    pub scale: T,
    pub nu: T,
    pub lower: T,
    pub upper: T,
}

impl<T: Real> TruncatedT<T> {
    pub fn pdf(&self, x: T) -> T {
        if x < self.lower || x > self.upper {
            return T::zero();
        }
        let (lo, hi) = ((self.lower - self.center) / self.scale, (self.upper - self.center) / self.scale);
        // Mass taken on the far side of the center so a remote interval keeps its precision.
        let ln_mass = if hi == T::infinity() {
            t_ln_cdf_raw(-lo, self.nu)
        } else if lo == T::neg_infinity() {
            t_ln_cdf_raw(hi, self.nu)
        } else if lo > T::zero() {
            (t_cdf_raw(-lo, self.nu) - t_cdf_raw(-hi, self.nu)).ln()
        } else {
            (t_cdf_raw(hi, self.nu) - t_cdf_raw(lo, self.nu)).ln()
        };
        (t_ln_pdf_raw((x - self.center) / self.scale, self.nu) - ln_mass).exp() / self.scale
    }
}

/// `f = r_minus * right + r_plus * left`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BustMixture<T> {
    pub r_minus: T,
    pub r_plus: T,
    /// Supported on `(mu, inf)`, centered at `mu + a + k`, scale `sqrt(s_-)`.
    pub right: TruncatedT<T>,
    /// Supported on `(-inf, mu)`, centered at `mu + a - k`, scale `sqrt(s_+)`.
    pub left: TruncatedT<T>,
}

impl<T: Real> BustMixture<T> {
    pub fn pdf(&self, x: T) -> T {
        if x >= self.right.lower {
            self.r_minus * self.right.pdf(x)
        } else {
            self.r_plus * self.left.pdf(x)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bust<T> {
    params: BustParams<T>,
    aux: BustAux<T>,
    ln_t_const: T,
    // Branch scales and normalizer relative to sigma^2 and sigma^-nu, which
    // stay finite when nu and sigma are large.
    ln_sm_rel: T,
    ln_sp_rel: T,
    ln_delta_rel: T,
}

impl<T: Real> Bust<T> {
    pub fn new(params: BustParams<T>) -> Result<Self> {
        params.validate()?;
        let (sm, sp) = (params.s_minus(), params.s_plus());
        let nu = params.nu;
        let half = T::lit(0.5);
        let cm = (params.a + params.k) / sm.sqrt();
        let cp = (params.k - params.a) / sp.sqrt();
        let d_cdf_minus = t_cdf_raw(cm, nu);
        let d_cdf_plus = t_cdf_raw(cp, nu);
        let eps = T::lit(2.0) * params.a * params.k / (nu * params.sigma * params.sigma);
        let ln_sm_rel = (-eps).ln_1p();
        let ln_sp_rel = eps.ln_1p();
        let ln_a = -nu * half * ln_sm_rel + t_ln_cdf_raw(cm, nu);
        let ln_b = -nu * half * ln_sp_rel + t_ln_cdf_raw(cp, nu);
        let ln_delta_rel = log_sum_exp(ln_a, ln_b);
        let ln_delta = ln_delta_rel - nu * params.sigma.ln();
        let r_minus = (ln_a - ln_delta_rel).exp();
        let eta = truncated_t_moments(-cm, nu, true);
        let lambda = truncated_t_moments(cp, nu, false);
        let g = |s: T, mass: T| -> T {
            if nu <= s {
                return T::nan();
            }
            (lgamma((nu - s) * half) + nu * half * nu.ln() - lgamma(nu * half) - lgamma(half)).exp() / (T::lit(2.0) * mass)
        };
        let three = T::lit(3.0);
        let aux = BustAux {
            s_minus: sm,
            s_plus: sp,
            delta: ln_delta.exp(),
            ln_delta,
            r_minus,
            r_plus: (ln_b - ln_delta_rel).exp(),
            d_cdf_minus,
            d_cdf_plus,
            d_pdf_minus: t_pdf_raw(cm, nu),
            d_pdf_plus: t_pdf_raw(cp, nu),
            eta,
            lambda,
            g_nu: [g(T::one(), d_cdf_minus), g(three, d_cdf_minus)],
            gp_nu: [g(T::one(), d_cdf_plus), g(three, d_cdf_plus)],
        };
        let ln_t_const = crate::special::lgamma_ratio(nu * half, half) - half * (nu * T::PI()).ln();
        Ok(Self { params, aux, ln_t_const, ln_sm_rel, ln_sp_rel, ln_delta_rel })
    }

    pub fn from_parts(mu: T, sigma: T, k: T, a: T, nu: T) -> Result<Self> {
        Self::new(BustParams::new(mu, sigma, k, a, nu)?)
    }

    pub fn params(&self) -> &BustParams<T> {
        &self.params
    }

    pub fn aux(&self) -> &BustAux<T> {
        &self.aux
    }

    pub fn mixture(&self) -> BustMixture<T> {
        let p = &self.params;
        BustMixture {
            r_minus: self.aux.r_minus,
            r_plus: self.aux.r_plus,
            right: TruncatedT {
                center: p.mu + p.a + p.k,
                scale: self.aux.s_minus.sqrt(),
                nu: p.nu,
                lower: p.mu,
                upper: T::infinity(),
            },
            left: TruncatedT {
                center: p.mu + p.a - p.k,
                scale: self.aux.s_plus.sqrt(),
                nu: p.nu,
                lower: T::neg_infinity(),
                upper: p.mu,
            },
        }
    }

    /// Raw moments `E(X1^r)` of the right and `E(X2^r)` of the left component.
    fn component_moments(&self, r: u32) -> (T, T) {
        let p = &self.params;
        let m1 = p.mu + p.a + p.k;
        let m2 = p.mu + p.a - p.k;
        let (sq_m, sq_p) = (self.aux.s_minus.sqrt(), self.aux.s_plus.sqrt());
        let mut e1 = T::zero();
        let mut e2 = T::zero();
        for j in 0..=r {
            let binom = T::lit(binomial(r, j) as f64);
            let (t1, t2) = if j == 0 {
                (T::one(), T::one())
            } else {
                (self.aux.eta[j as usize - 1], self.aux.lambda[j as usize - 1])
            };
            e1 = e1 + binom * m1.powi((r - j) as i32) * sq_m.powi(j as i32) * t1;
            e2 = e2 + binom * m2.powi((r - j) as i32) * sq_p.powi(j as i32) * t2;
        }
        (e1, e2)
    }

    /// `E(X^r)` for `r = 1..4` via the mixture identity
    /// `E(X^r) = R_- E(X1^r) + R_+ E(X2^r)` with exact truncated-t moments.
    pub fn moment(&self, r: u32) -> Result<T> {
        if r == 0 {
            return Ok(T::one());
        }
        if r > 4 {
            return Err(domain(format!("BUSt moments are provided for r = 1..4, got {r}")));
        }
        if self.params.nu <= T::lit(r as f64) {
            return Err(Error::MomentUndefined { order: r, nu: self.params.nu.as_f64() });
        }
        let (e1, e2) = self.component_moments(r);
        Ok(self.aux.r_minus * e1 + self.aux.r_plus * e2)
    }

    /// The alternative binomial cross-product display
    /// `sum_i C(r,i) R_-^i R_+^{r-i} E(X1^i) E(X2^{r-i})`, kept only to
    /// report how far it sits from [`Bust::moment`].
    pub fn moment_cross_product_display(&self, r: u32) -> Result<T> {
        if r == 0 || r > 4 {
            return Err(domain(format!("display is defined for r = 1..4, got {r}")));
        }
        if self.params.nu <= T::lit(r as f64) {
            return Err(Error::MomentUndefined { order: r, nu: self.params.nu.as_f64() });
        }
        let (rm, rp) = (self.aux.r_minus, self.aux.r_plus);
        let mut total = T::zero();
        for i in 0..=r {
            let (e1, _) = self.component_moments(i);
            let (_, e2) = self.component_moments(r - i);
            total = total + T::lit(binomial(r, i) as f64) * rm.powi(i as i32) * rp.powi((r - i) as i32) * e1 * e2;
        }
        Ok(total)
    }

    /// The alternative `G_nu`-based display of the standardized component
    /// moments `(eta, lambda)`, kept only to report how far it sits from the
    /// exact values in [`BustAux`]. Orders with `nu <= j` are NaN.
    pub fn eta_lambda_display(&self) -> ([T; 4], [T; 4]) {
        let p = &self.params;
        let aux = &self.aux;
        let nu = p.nu;
        let (two, three, half) = (T::lit(2.0), T::lit(3.0), T::lit(0.5));
        let cm = (p.a + p.k) / aux.s_minus.sqrt();
        let cp = (p.a - p.k) / aux.s_plus.sqrt();
        let base_m = nu + cm * cm;
        let base_p = nu + cp * cp;
        let pw1 = |b: T| b.powf(-(nu - T::one()) * half);
        let pw3 = |b: T| b.powf(-(nu - three) * half);
        let [g1, g3] = aux.g_nu;
        let [h1, h3] = aux.gp_nu;
        let nan = T::nan();
        let gate = |order: f64, v: T| if nu > T::lit(order) { v } else { nan };
        let r2 = nu / (nu - two);
        let r4 = nu * nu / ((nu - two) * (nu - T::lit(4.0)));
        let eta = [
            gate(1.0, g1 * pw1(base_m)),
            gate(2.0, r2 - cm * g1 * pw1(base_m)),
            gate(3.0, g3 * pw3(base_m) + cm * cm * g1 * pw1(base_m)),
            gate(4.0, three * (r4 - g3 * half * cm * pw3(base_m))),
        ];
        let lambda = [
            gate(1.0, -h1 * pw1(base_p)),
            gate(2.0, r2 + cp * h1 * pw1(base_p)),
            gate(3.0, -h3 * pw3(base_p) - cp * cp * h1 * pw1(base_p)),
            gate(4.0, three * (r4 + h3 * half * cp * pw3(base_p))),
        ];
        (eta, lambda)
    }

    /// Modes in ascending order.
    pub fn modes(&self) -> Vec<T> {
        let p = &self.params;
        let left = p.mu + p.a - p.k;
        let right = p.mu + p.a + p.k;
        match (left < p.mu, right > p.mu) {
            (true, true) => vec![left, right],
            (true, false) => vec![left],
            (false, true) => vec![right],
            (false, false) => vec![p.mu],
        }
    }

    /// The BUN law this distribution approaches as `nu -> inf`.
    pub fn limit_bun(&self) -> Result<Bun<T>> {
        let p = &self.params;
        Bun::from_parts(p.mu, p.sigma, p.k / p.sigma, p.a)
    }

    /// Sup-distance between this density at `nu = nu_large` and its BUN
    /// limit over a fixed probe grid of 801 points.
    pub fn limit_distance(&self, nu_large: T) -> Result<T> {
        let p = self.params;
        let big = Bust::from_parts(p.mu, p.sigma, p.k, p.a, nu_large)?;
        let bun = self.limit_bun()?;
        let half_width = T::lit(10.0) * p.sigma + p.k.abs() + p.a.abs();
        let n = 800;
        let mut sup = T::zero();
        for i in 0..=n {
            let x = p.mu - half_width + T::lit(2.0) * half_width * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            sup = sup.max((big.pdf(x) - bun.pdf(x)).abs());
        }
        Ok(sup)
    }

    /// Log-likelihood of `data`.
    pub fn loglik(&self, data: &[T]) -> T {
        data.iter().map(|&x| self.ln_pdf(x)).sum()
    }

    /// Score vector `(d/dmu, d/dsigma, d/dk, d/da, d/dnu)`.
    ///
    /// The `nu` derivative of the Student-t distribution function inside the
    /// normalizer is evaluated by quadrature of the `nu` derivative of the
    /// density.
    pub fn score(&self, data: &[T]) -> [T; 5] {
        let p = &self.params;
        let aux = &self.aux;
        let (nu, sigma, a, k) = (p.nu, p.sigma, p.a, p.k);
        let one = T::one();
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        let n = T::from_usize_lossy(data.len());
        let (sm, sp) = (aux.s_minus, aux.s_plus);

        // d s / d(sigma, k, a, nu) for each branch.
        let ds_m = [two * sigma, -two * a / nu, -two * k / nu, two * a * k / (nu * nu)];
        let ds_p = [two * sigma, two * a / nu, two * k / nu, -two * a * k / (nu * nu)];
        // d(branch offset)/d(k, a) for c = offset / sqrt(s).
        let dc_num_m = [T::zero(), one, one, T::zero()];
        let dc_num_p = [T::zero(), one, -one, T::zero()];

        // Normalizer: Delta = A + B, with A, B scaled by 1/Delta throughout.
        let cm = (a + k) / sm.sqrt();
        let cp = (k - a) / sp.sqrt();
        let wa = aux.r_minus;
        let wb = aux.r_plus;
        let pdf_over_cdf_m = aux.d_pdf_minus / aux.d_cdf_minus;
        let pdf_over_cdf_p = aux.d_pdf_plus / aux.d_cdf_plus;
        let dnu_cdf_m = t_cdf_dnu(cm, nu) / aux.d_cdf_minus;
        let dnu_cdf_p = t_cdf_dnu(cp, nu) / aux.d_cdf_plus;
        let mut dln_delta = [T::zero(); 4];
        for i in 0..4 {
            let dcm = dc_num_m[i] / sm.sqrt() - half * cm / sm * ds_m[i];
            let dcp = dc_num_p[i] / sp.sqrt() - half * cp / sp * ds_p[i];
            let mut ga = -nu * half / sm * ds_m[i] + pdf_over_cdf_m * dcm;
            let mut gb = -nu * half / sp * ds_p[i] + pdf_over_cdf_p * dcp;
            if i == 3 {
                ga = ga - half * sm.ln() + dnu_cdf_m;
                gb = gb - half * sp.ln() + dnu_cdf_p;
            }
            dln_delta[i] = wa * ga + wb * gb;
        }

        let dconst_dnu = half * (psi((nu + one) * half) - psi(nu * half)) - half / nu;
        let mut d_mu = T::zero();
        let mut acc = [T::zero(); 4];
        for &x in data {
            let right = x >= p.mu;
            let (s, ds, u, du_k) = if right {
                (sm, &ds_m, x - p.mu - a - k, -one)
            } else {
                (sp, &ds_p, x - p.mu - a + k, one)
            };
            let q = u * u / (nu * s);
            let g_u = -(nu + one) * u / (nu * s * (one + q));
            let g_s = -(nu + one) / (two * s * (one + q));
            let g_nu = dconst_dnu - half * s.ln() - half * q.ln_1p() + (nu + one) * half * q / (nu * (one + q));
            d_mu = d_mu - g_u;
            acc[0] = acc[0] + g_s * ds[0];
            acc[1] = acc[1] + g_s * ds[1] + g_u * du_k;
            acc[2] = acc[2] + g_s * ds[2] - g_u;
            acc[3] = acc[3] + g_s * ds[3] + g_nu;
        }
        [
            d_mu,
            acc[0] - n * dln_delta[0],
            acc[1] - n * dln_delta[1],
            acc[2] - n * dln_delta[2],
            acc[3] - n * dln_delta[3],
        ]
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

/// Normalized raw moments `E(T^j)`, `j = 1..4`, of a standard Student-t
/// truncated to `(c, inf)` (`upper_tail = true`) or `(-inf, c)`.
///
/// Uses `(nu - j) M_j = (j - 1) nu M_{j-2} ± c^{j-1} (nu + c^2) d(c)` for the
/// unnormalized partial moments `M_j`; orders with `nu <= j` are NaN.
pub(crate) fn truncated_t_moments<T: Real>(c: T, nu: T, upper_tail: bool) -> [T; 4] {
    let mass = if upper_tail { t_cdf_raw(-c, nu) } else { t_cdf_raw(c, nu) };
    let sign = if upper_tail { T::one() } else { -T::one() };
    let boundary = (nu + c * c) * t_pdf_raw(c, nu);
    let mut m = [T::zero(); 5];
    m[0] = mass;
    let mut out = [T::nan(); 4];
    for j in 1..=4usize {
        let jf = T::lit(j as f64);
        if nu <= jf {
            break;
        }
        let prev = if j >= 2 { m[j - 2] } else { T::zero() };
        m[j] = ((jf - T::one()) * nu * prev + sign * c.powi(j as i32 - 1) * boundary) / (nu - jf);
        out[j - 1] = m[j] / mass;
    }
    out
}

impl<T: Real> DensityModel<T> for Bust<T> {
    fn ln_pdf(&self, x: T) -> T {
        let p = &self.params;
        let half = T::lit(0.5);
        let (s, ln_s_rel, u) = if x >= p.mu {
            (self.aux.s_minus, self.ln_sm_rel, x - p.mu - p.a - p.k)
        } else {
            (self.aux.s_plus, self.ln_sp_rel, x - p.mu - p.a + p.k)
        };
        let q = u * u / (p.nu * s);
        let nu1 = (p.nu + T::one()) * half;
        -nu1 * ln_s_rel - p.sigma.ln() + self.ln_t_const - nu1 * q.ln_1p() - self.ln_delta_rel
    }

    fn cdf(&self, x: T) -> T {
        let p = &self.params;
        let half = T::lit(0.5);
        if x < p.mu {
            let sp = self.aux.s_plus;
            let z = (x - p.mu - p.a + p.k) / sp.sqrt();
            (-p.nu * half * self.ln_sp_rel + t_ln_cdf_raw(z, p.nu) - self.ln_delta_rel).exp()
        } else {
            let sf = self.sf(x);
            if sf < half {
                T::one() - sf
            } else {
                let sm = self.aux.s_minus;
                let z = (x - p.mu - p.a - p.k) / sm.sqrt();
                let inner = t_cdf_raw(z, p.nu) - t_cdf_raw(-(p.a + p.k) / sm.sqrt(), p.nu);
                self.aux.r_plus + (-p.nu * half * self.ln_sm_rel + inner.ln() - self.ln_delta_rel).exp()
            }
        }
    }

    fn sf(&self, x: T) -> T {
        let p = &self.params;
        let half = T::lit(0.5);
        if x >= p.mu {
            let sm = self.aux.s_minus;
            let z = (p.mu + p.a + p.k - x) / sm.sqrt();
            (-p.nu * half * self.ln_sm_rel + t_ln_cdf_raw(z, p.nu) - self.ln_delta_rel).exp()
        } else {
            T::one() - self.cdf(x)
        }
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<T> {
        let m = self.mixture();
        (0..n)
            .map(|_| {
                let pick = rng.uniform_real::<T>();
                let u = rng.uniform_real::<T>();
                if pick < m.r_minus {
                    truncated_t_above(m.right.center, m.right.scale, m.right.nu, m.right.lower, u)
                } else {
                    truncated_t_below(m.left.center, m.left.scale, m.left.nu, m.left.upper, u)
                }
            })
            .collect()
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![self.params.mu]
    }

    fn location_scale(&self) -> (T, T) {
        let p = &self.params;
        (p.mu + p.a, p.sigma + p.k.abs())
    }
}
