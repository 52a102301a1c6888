//! Maximum-likelihood fitting, information criteria and the
//! Kolmogorov–Smirnov goodness-of-fit test.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::bul::Bul;
use crate::bun::Bun;
use crate::bust::Bust;
use crate::density::DensityModel;
use crate::error::{domain, Error, Result};
use crate::logbun::LogBun;
use crate::optimize::{minimize_from, numeric_gradient, Minimum, Objective, OptimizerConfig};
use crate::real::Real;
use crate::rng::RngStream;

/// Minimum sample size accepted by [`fit_ml`].
pub const MIN_FIT_SIZE: usize = 5;
/// Degrees of freedom above which a soft penalty flattens the `nu` direction;
/// values beyond `NU_CAP^2` are rejected.
pub const NU_CAP: f64 = 1e4;
/// Smallest admissible `min(s_-, s_+) / sigma^2` for BUSt fits.
pub const BUST_SCALE_FLOOR: f64 = 1e-3;
/// Simplex iterations given to each start before refinement.
pub const SCREEN_ITERS: usize = 300;
/// Number of screened starts refined to full tolerance.
pub const REFINED_STARTS: usize = 4;
/// A fit is reported converged only if the score is below this in sup norm.
pub const SCORE_TOL: f64 = 1e-3;

/// An observed sample of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    values: Vec<T>,
    sorted: Vec<T>,
    name: String,
    source: String,
}

impl<T: Real> Dataset<T> {
    pub fn new(values: Vec<T>, name: impl Into<String>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("dataset is empty".into()));
        }
        let bad: Vec<String> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_finite())
            .map(|(i, _)| (i + 1).to_string())
            .collect();
        if !bad.is_empty() {
            return Err(Error::Data(format!("non-finite values at positions {}", bad.join(", "))));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));
        Ok(Self { values, sorted, name: name.into(), source: source.into() })
    }

    pub fn from_values(values: Vec<T>) -> Result<Self> {
        Self::new(values, "data", "memory")
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn sorted(&self) -> &[T] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// All values equal.
    pub fn is_degenerate(&self) -> bool {
        self.sorted[0] == self.sorted[self.sorted.len() - 1]
    }
}

fn median_sorted<T: Real>(s: &[T]) -> T {
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) * T::lit(0.5)
    }
}

fn sample_sd<T: Real>(s: &[T]) -> T {
    let n = T::from_usize_lossy(s.len());
    let mean = s.iter().copied().sum::<T>() / n;
    let ss: T = s.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (ss / (n - T::one()).max(T::one())).sqrt()
}

fn scaled_mad<T: Real>(s: &[T]) -> T {
    let m = median_sorted(s);
    let mut dev: Vec<T> = s.iter().map(|&x| (x - m).abs()).collect();
    dev.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    median_sorted(&dev) * T::lit(1.4826)
}

/// Centres of the two most populated local maxima of an equal-width
/// histogram with `clamp(ceil(sqrt n), 5, 50)` bins, in ascending order.
pub fn histogram_peaks<T: Real>(sorted: &[T]) -> Vec<T> {
    let n = sorted.len();
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    if !(hi > lo) {
        return vec![lo];
    }
    let bins = ((n as f64).sqrt().ceil() as usize).clamp(5, 50);
    let width = (hi - lo) / T::from_usize_lossy(bins);
    let mut counts = vec![0usize; bins];
    for &x in sorted {
        let i = ((x - lo) / width).floor().to_usize().unwrap_or(0).min(bins - 1);
        counts[i] += 1;
    }
    let mut peaks: Vec<(usize, usize)> = (0..bins)
        .filter(|&i| {
            let left = if i == 0 { 0 } else { counts[i - 1] };
            let right = if i + 1 == bins { 0 } else { counts[i + 1] };
            counts[i] > 0 && counts[i] >= left && counts[i] > right
        })
        .map(|i| (counts[i], i))
        .collect();
    peaks.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut centres: Vec<T> = peaks
        .iter()
        .take(2)
        .map(|&(_, i)| lo + width * (T::from_usize_lossy(i) + T::lit(0.5)))
        .collect();
    centres.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    centres
}

/// `(aic, bic)` for log-likelihood `loglik`, `p` free parameters and `n` observations.
pub fn aic_bic<T: Real>(loglik: T, p: usize, n: usize) -> (T, T) {
    let pf = T::from_usize_lossy(p);
    let nf = T::from_usize_lossy(n);
    let m2 = T::lit(-2.0) * loglik;
    (m2 + T::lit(2.0) * pf, m2 + pf * nf.ln())
}

/// Kolmogorov–Smirnov statistic of ascending `sorted` against `cdf`.
pub fn ks_statistic<T: Real, F: Fn(T) -> T>(sorted: &[T], cdf: F) -> T {
    let n = T::from_usize_lossy(sorted.len());
    sorted.iter().enumerate().fold(T::zero(), |d, (i, &x)| {
        let f = cdf(x);
        let above = T::from_usize_lossy(i + 1) / n - f;
        let below = f - T::from_usize_lossy(i) / n;
        d.max(above).max(below)
    })
}

/// Upper tail `P(K > lambda)` of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small lambda.
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|j| ((2 * j - 1) as f64).powi(2) * c).map(f64::exp).sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value of statistic `d` at sample size `n`, with Stephens'
/// small-sample correction `(sqrt n + 0.12 + 0.11 / sqrt n) d`.
///
/// Approximate when the hypothesised distribution was fitted to the same data.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let rn = (n as f64).sqrt();
    kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d)
}

/// `(D, p-value)` of `data` against `cdf`.
pub fn ks_test<T: Real, F: Fn(T) -> T>(data: &Dataset<T>, cdf: F) -> (T, f64) {
    let d = ks_statistic(data.sorted(), cdf);
    (d, ks_pvalue(d.as_f64(), data.len()))
}

/// Models supported by [`fit_ml`]. The symmetric variants fix `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Bun,
    BunSym,
    Bust,
    BustSym,
    Bul,
    BulSym,
    #[serde(rename = "logbun")]
    LogBun,
}

impl Model {
    pub const ALL: [Model; 7] =
        [Model::Bun, Model::BunSym, Model::Bust, Model::BustSym, Model::Bul, Model::BulSym, Model::LogBun];

    /// Registry name, as accepted by [`FromStr`].
    pub fn name(self) -> &'static str {
        match self {
            Model::Bun => "bun",
            Model::BunSym => "bun-sym",
            Model::Bust => "bust",
            Model::BustSym => "bust-sym",
            Model::Bul => "bul",
            Model::BulSym => "bul-sym",
            Model::LogBun => "logbun",
        }
    }

    /// Parameter names in estimate order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Model::Bun | Model::Bul | Model::LogBun => &["mu", "sigma", "k", "a"],
            Model::BunSym | Model::BulSym => &["mu", "sigma", "k"],
            Model::Bust => &["mu", "sigma", "k", "a", "nu"],
            Model::BustSym => &["mu", "sigma", "k", "nu"],
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, Model::BunSym | Model::BustSym | Model::BulSym)
    }

    /// Builds the distribution from parameters in [`Model::param_names`] order.
    pub fn build<T: Real>(self, params: &[T]) -> Result<ModelInstance<T>> {
        if params.len() != self.n_params() {
            return Err(domain(format!(
                "{} takes {} parameters ({}), got {}",
                self.name(),
                self.n_params(),
                self.param_names().join(", "),
                params.len()
            )));
        }
        let z = T::zero();
        let p = params;
        Ok(match self {
            Model::Bun => ModelInstance::Bun(Bun::from_parts(p[0], p[1], p[2], p[3])?),
            Model::BunSym => ModelInstance::Bun(Bun::from_parts(p[0], p[1], p[2], z)?),
            Model::Bust => ModelInstance::Bust(Bust::from_parts(p[0], p[1], p[2], p[3], p[4])?),
            Model::BustSym => ModelInstance::Bust(Bust::from_parts(p[0], p[1], p[2], z, p[3])?),
            Model::Bul => ModelInstance::Bul(Bul::from_parts(p[0], p[1], p[2], p[3])?),
            Model::BulSym => ModelInstance::Bul(Bul::from_parts(p[0], p[1], p[2], z)?),
            Model::LogBun => ModelInstance::LogBun(LogBun::from_parts(p[0], p[1], p[2], p[3])?),
        })
    }

    /// Builds the distribution from named parameters; every name must be
    /// known and present exactly once.
    pub fn build_named<T: Real>(self, named: &[(String, T)]) -> Result<ModelInstance<T>> {
        let names = self.param_names();
        if let Some((bad, _)) = named.iter().find(|(k, _)| !names.contains(&k.as_str())) {
            return Err(domain(format!(
                "unknown parameter '{bad}' for {} (expected {})",
                self.name(),
                names.join(", ")
            )));
        }
        let mut values = Vec::with_capacity(names.len());
        for name in names {
            let hits: Vec<T> = named.iter().filter(|(k, _)| k == name).map(|&(_, v)| v).collect();
            match hits.as_slice() {
                [v] => values.push(*v),
                [] => return Err(domain(format!("missing parameter '{name}' for {}", self.name()))),
                _ => return Err(domain(format!("parameter '{name}' given more than once"))),
            }
        }
        self.build(&values)
    }

    /// Model fitted on the optimizer's working data (log data for Log-BUN).
    fn working(self) -> Model {
        if self == Model::LogBun {
            Model::Bun
        } else {
            self
        }
    }

    fn index_of(self, name: &str) -> Option<usize> {
        self.param_names().iter().position(|&n| n == name)
    }

    /// Whether the `k` coordinate is log-transformed for optimization.
    fn log_k(self) -> bool {
        matches!(self, Model::Bul | Model::BulSym)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Model::ALL.iter().map(|m| m.name()).collect();
            domain(format!("unknown model '{s}' (available: {})", names.join(", ")))
        })
    }
}

/// A concrete member of one of the fitted families.
#[derive(Debug, Clone)]
pub enum ModelInstance<T> {
    Bun(Bun<T>),
    Bust(Bust<T>),
    Bul(Bul<T>),
    LogBun(LogBun<T>),
}

impl<T: Real> ModelInstance<T> {
    fn inner(&self) -> &dyn DensityModel<T> {
        match self {
            ModelInstance::Bun(d) => d,
            ModelInstance::Bust(d) => d,
            ModelInstance::Bul(d) => d,
            ModelInstance::LogBun(d) => d,
        }
    }

    pub fn loglik(&self, data: &[T]) -> T {
        match self {
            ModelInstance::Bun(d) => d.loglik(data),
            ModelInstance::Bust(d) => d.loglik(data),
            ModelInstance::Bul(d) => d.loglik(data),
            ModelInstance::LogBun(d) => data.iter().map(|&t| d.ln_pdf(t)).sum(),
        }
    }

    /// Full score vector of the family, `a` included.
    pub fn score(&self, data: &[T]) -> Vec<T> {
        match self {
            ModelInstance::Bun(d) => d.score(data).to_vec(),
            ModelInstance::Bust(d) => d.score(data).to_vec(),
            ModelInstance::Bul(d) => d.score(data).to_vec(),
            ModelInstance::LogBun(d) => {
                let logs: Vec<T> = data.iter().map(|t| t.ln()).collect();
                d.log_scale().score(&logs).to_vec()
            }
        }
    }
}

impl<T: Real> DensityModel<T> for ModelInstance<T> {
    fn ln_pdf(&self, x: T) -> T {
        self.inner().ln_pdf(x)
    }
    fn pdf(&self, x: T) -> T {
        self.inner().pdf(x)
    }
    fn cdf(&self, x: T) -> T {
        self.inner().cdf(x)
    }
    fn sf(&self, x: T) -> T {
        self.inner().sf(x)
    }
    fn quantile(&self, p: T) -> Result<T> {
        self.inner().quantile(p)
    }
    fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<T> {
        self.inner().sample(n, rng)
    }
    fn support(&self) -> (T, T) {
        self.inner().support()
    }
    fn breakpoints(&self) -> Vec<T> {
        self.inner().breakpoints()
    }
    fn location_scale(&self) -> (T, T) {
        self.inner().location_scale()
    }
}

/// Drops the `a` component of a full score for the symmetric variants.
fn model_score<T: Real>(model: Model, full: Vec<T>) -> Vec<T> {
    if model.is_symmetric() {
        full.into_iter().enumerate().filter(|&(i, _)| i != 3).map(|(_, v)| v).collect()
    } else {
        full
    }
}

/// Negative log-likelihood over unconstrained coordinates: `sigma`, `nu`
/// and the BUL `k` enter on the log scale.
struct FitObjective<'a, T> {
    model: Model,
    data: &'a [T],
    kink_tol: T,
}

impl<'a, T: Real> FitObjective<'a, T> {
    fn natural(&self, theta: &[T]) -> Vec<T> {
        let mut p = theta.to_vec();
        p[1] = p[1].exp();
        if self.model.log_k() {
            p[2] = p[2].exp();
        }
        if let Some(i) = self.model.index_of("nu") {
            p[i] = p[i].exp();
        }
        p
    }

    fn unconstrained(&self, natural: &[T]) -> Vec<T> {
        let mut t = natural.to_vec();
        t[1] = t[1].ln();
        if self.model.log_k() {
            t[2] = t[2].ln();
        }
        if let Some(i) = self.model.index_of("nu") {
            t[i] = t[i].ln();
        }
        t
    }

    /// Soft penalties: the BUSt branch-scale barrier and the `nu` cap.
    fn penalty(&self, natural: &[T]) -> T {
        let Some(inu) = self.model.index_of("nu") else { return T::zero() };
        let nu = natural[inu];
        let mut pen = T::zero();
        let cap = T::lit(NU_CAP);
        if nu > cap * cap {
            return T::infinity();
        }
        if nu > cap {
            let e = (nu / cap).ln();
            pen = pen + e * e;
        }
        let a = self.model.index_of("a").map_or(T::zero(), |i| natural[i]);
        let sigma = natural[1];
        let ratio = T::one() - T::lit(2.0) * (a * natural[2]).abs() / (nu * sigma * sigma);
        let floor = T::lit(BUST_SCALE_FLOOR);
        let onset = T::lit(10.0 * BUST_SCALE_FLOOR);
        if ratio <= floor {
            return T::infinity();
        }
        if ratio < onset {
            let e = ((onset - floor) / (ratio - floor)).ln();
            pen = pen + e * e;
        }
        pen
    }

    fn at_kink(&self, mu: T) -> bool {
        self.data.iter().any(|&x| (x - mu).abs() <= self.kink_tol)
    }
}

impl<'a, T: Real> Objective<T> for FitObjective<'a, T> {
    fn value(&self, theta: &[T]) -> T {
        if theta.iter().any(|v| !v.is_finite()) {
            return T::infinity();
        }
        let nat = self.natural(theta);
        let pen = self.penalty(&nat);
        if !pen.is_finite() {
            return T::infinity();
        }
        match self.model.build(&nat) {
            Ok(d) => -d.loglik(self.data) + pen,
            Err(_) => T::infinity(),
        }
    }

    fn gradient(&self, theta: &[T]) -> Option<Vec<T>> {
        let nat = self.natural(theta);
        let d = self.model.build(&nat).ok()?;
        let score = model_score(self.model, d.score(self.data));
        let mut g: Vec<T> = score.iter().map(|&s| -s).collect();
        // Chain rule for the log-scale coordinates.
        g[1] = g[1] * nat[1];
        if self.model.log_k() {
            g[2] = g[2] * nat[2];
        }
        if let Some(i) = self.model.index_of("nu") {
            g[i] = g[i] * nat[i];
            let pen_grad = numeric_gradient(|t: &[T]| self.penalty(&self.natural(t)), theta);
            for (gi, pi) in g.iter_mut().zip(pen_grad) {
                *gi = *gi + pi;
            }
        }
        Some(g)
    }

    fn kink_coords(&self, theta: &[T]) -> Vec<usize> {
        if self.at_kink(theta[0]) {
            vec![0]
        } else {
            Vec::new()
        }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: Model,
    pub n: usize,
    pub estimates: IndexMap<String, f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub ks_stat: f64,
    pub ks_pvalue: f64,
    /// Simplex converged and the score sup norm is below [`SCORE_TOL`].
    pub converged: bool,
    /// Sup norm of the score at the estimate, `mu` omitted when it sits on a data point.
    pub score_norm: f64,
    pub n_starts_used: usize,
    pub runtime_ms: u64,
}

impl FitReport {
    pub fn params(&self) -> Vec<f64> {
        self.estimates.values().copied().collect()
    }

    pub fn instance(&self) -> Result<ModelInstance<f64>> {
        self.model.build(&self.params())
    }
}

/// Deterministic start points in natural coordinates.
///
/// Location from the median and the two main histogram peaks, scale from
/// the scaled MAD and the SD, `k` from `{±0.5, ±2}` (BUL: `{0.5, 2}`; BUSt
/// uses data units, so these are multiplied by the scale), skew from
/// `{0, ±scale/2}` and `nu` from `{3, 15}`.
pub fn start_grid<T: Real>(model: Model, sorted: &[T]) -> Vec<Vec<T>> {
    let half = T::lit(0.5);
    let mut locs = vec![median_sorted(sorted)];
    for p in histogram_peaks(sorted) {
        if !locs.contains(&p) {
            locs.push(p);
        }
    }
    let sd = sample_sd(sorted);
    let mad = scaled_mad(sorted);
    let mut scales = Vec::new();
    for s in [mad, sd] {
        if s > T::zero() && s.is_finite() && !scales.contains(&s) {
            scales.push(s);
        }
    }
    let ks: Vec<T> = match model.working() {
        Model::Bul | Model::BulSym => vec![half, T::lit(2.0)],
        _ => vec![-T::lit(2.0), -half, half, T::lit(2.0)],
    };
    let data_unit_k = matches!(model, Model::Bust | Model::BustSym);
    let nus = [T::lit(3.0), T::lit(15.0)];
    let mut out = Vec::new();
    for &mu in &locs {
        for &s in &scales {
            let skews = if model.is_symmetric() { vec![T::zero()] } else { vec![T::zero(), -s * half, s * half] };
            for &k in &ks {
                let k = if data_unit_k { k * s } else { k };
                for &a in &skews {
                    let mut base = vec![mu, s, k];
                    if !model.is_symmetric() {
                        base.push(a);
                    }
                    if model.index_of("nu").is_some() {
                        for &nu in &nus {
                            let mut p = base.clone();
                            p.push(nu);
                            out.push(p);
                        }
                    } else {
                        out.push(base);
                    }
                }
            }
        }
    }
    out
}

/// Default optimizer settings for likelihood fits.
pub fn fit_config<T: Real>() -> OptimizerConfig<T> {
    OptimizerConfig {
        x_tol: T::lit(1e-9).max(T::epsilon() * T::lit(64.0)),
        f_tol: T::lit(1e-11).max(T::epsilon() * T::lit(16.0)),
        grad_tol: T::lit(1e-8).max(T::epsilon().sqrt()),
        max_iters: 5_000,
        n_starts: 1,
        seed: 42,
    }
}

/// Maximum-likelihood fit of `model` to `data`.
///
/// Every point of [`start_grid`] is screened; `cfg.n_starts - 1` further
/// starts are random perturbations of grid points drawn from `rng`. The
/// [`REFINED_STARTS`] best screened points are refined and the best local
/// optimum is kept, ties going to the earliest start.
pub fn fit_ml<T: Real>(data: &Dataset<T>, model: Model, cfg: &OptimizerConfig<T>, rng: &mut RngStream) -> Result<FitReport> {
    let clock = Instant::now();
    cfg.validate()?;
    if data.len() < MIN_FIT_SIZE {
        return Err(Error::Fit(format!("{} observations; at least {MIN_FIT_SIZE} are required", data.len())));
    }
    if data.is_degenerate() {
        return Err(Error::Fit("all observations are equal; the likelihood is unbounded as sigma -> 0".into()));
    }
    let working: Vec<T> = if model == Model::LogBun {
        if data.sorted()[0] <= T::zero() {
            return Err(Error::Fit("logbun requires strictly positive data".into()));
        }
        data.values().iter().map(|x| x.ln()).collect()
    } else {
        data.values().to_vec()
    };
    let mut sorted_work = working.clone();
    sorted_work.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let spread = sorted_work[sorted_work.len() - 1] - sorted_work[0];
    let obj = FitObjective { model: model.working(), data: &working, kink_tol: spread * T::lit(1e-9) };

    let mut starts: Vec<Vec<T>> =
        start_grid(model, &sorted_work).iter().map(|p| obj.unconstrained(p)).collect();
    let grid_len = starts.len();
    let extra_scale = sample_sd(&sorted_work);
    for i in 1..cfg.n_starts {
        let base = &starts[(i - 1) % grid_len];
        let p: Vec<T> = base
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let s = if j == 0 || obj.model.index_of("a") == Some(j) { extra_scale } else { T::one() };
                v + rng.standard_normal::<T>() * s * T::lit(0.5)
            })
            .collect();
        starts.push(p);
    }

    // Screen every start with a short simplex budget, then refine the most
    // promising ones to full tolerance.
    let screen_cfg = OptimizerConfig { max_iters: SCREEN_ITERS.min(cfg.max_iters), ..*cfg };
    let mut screened: Vec<(T, usize, Vec<T>)> = Vec::new();
    let mut last_err = None;
    for (i, s) in starts.iter().enumerate() {
        match minimize_from(&obj, std::slice::from_ref(s), &screen_cfg) {
            Ok(m) => screened.push((m.value, i, m.x)),
            Err(e) => last_err = Some(e),
        }
    }
    screened.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut best: Option<Minimum<T>> = None;
    for (_, _, x) in screened.iter().take(REFINED_STARTS) {
        match minimize_from(&obj, std::slice::from_ref(x), cfg) {
            Ok(m) => {
                if best.as_ref().is_none_or(|b| m.value < b.value) {
                    best = Some(m);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some(mut best) = best else {
        return Err(Error::Fit(format!(
            "{}: all {} starts failed ({})",
            model,
            starts.len(),
            last_err.map_or_else(|| "no finite objective".to_string(), |e| e.to_string())
        )));
    };

    // A location that converged onto a data point is snapped to it exactly.
    if let Some(&x) = working.iter().min_by(|a, b| {
        (**a - best.x[0]).abs().partial_cmp(&(**b - best.x[0]).abs()).expect("finite")
    }) {
        if (x - best.x[0]).abs() <= spread * T::lit(1e-6) {
            let mut snapped = best.x.clone();
            snapped[0] = x;
            let v = obj.value(&snapped);
            if v <= best.value {
                best.x = snapped;
                best.value = v;
            }
        }
    }

    let nat = obj.natural(&best.x);
    let instance = model.build(&nat).map_err(|e| Error::Fit(format!("{model}: optimum is not a valid distribution ({e})")))?;
    let loglik = instance.loglik(data.values());
    if !loglik.is_finite() {
        return Err(Error::Fit(format!("{model}: log-likelihood at the optimum is not finite")));
    }
    let score = model_score(model.working(), obj.model.build(&nat)?.score(&working));
    let kink = obj.at_kink(nat[0]);
    let score_norm = score
        .iter()
        .enumerate()
        .filter(|&(i, _)| !(i == 0 && kink))
        .fold(0.0f64, |m, (_, v)| m.max(v.as_f64().abs()));
    let (aic, bic) = aic_bic(loglik.as_f64(), model.n_params(), data.len());
    let (d, pvalue) = ks_test(data, |x| instance.cdf(x));
    let estimates = model.param_names().iter().zip(&nat).map(|(k, v)| (k.to_string(), v.as_f64())).collect();
    Ok(FitReport {
        model,
        n: data.len(),
        estimates,
        loglik: loglik.as_f64(),
        aic,
        bic,
        ks_stat: d.as_f64(),
        ks_pvalue: pvalue,
        converged: best.diagnostics.converged && score_norm < SCORE_TOL,
        score_norm,
        n_starts_used: starts.len(),
        runtime_ms: clock.elapsed().as_millis() as u64,
    })
}

/// A fit that could not be completed during [`compare`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitFailure {
    pub model: Model,
    pub error: Error,
}

/// Ranked fits and inline failures.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Ascending AIC, then BIC, then model name.
    pub ranked: Vec<FitReport>,
    pub failures: Vec<FitFailure>,
}

/// Fits every model and ranks the successful fits.
pub fn compare<T: Real>(data: &Dataset<T>, models: &[Model], cfg: &OptimizerConfig<T>, rng: &RngStream) -> Result<Comparison> {
    if models.len() < 2 {
        return Err(domain("compare needs at least two models"));
    }
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    for (i, &m) in models.iter().enumerate() {
        let mut r = rng.substream(i as u64);
        match fit_ml(data, m, cfg, &mut r) {
            Ok(rep) => ranked.push(rep),
            Err(error) => failures.push(FitFailure { model: m, error }),
        }
    }
    rank(&mut ranked);
    Ok(Comparison { ranked, failures })
}

/// Sorts by AIC, then BIC, then model name.
pub fn rank(reports: &mut [FitReport]) {
    reports.sort_by(|a, b| {
        a.aic
            .total_cmp(&b.aic)
            .then(a.bic.total_cmp(&b.bic))
            .then(a.model.name().cmp(b.model.name()))
    });
}

/// Checks that moving each estimate by ±1% of `max(|value|, sigma / 10)`
/// lowers the log-likelihood.
pub fn is_local_max_certificate(report: &FitReport, data: &[f64]) -> bool {
    let p = report.params();
    let floor = 0.1 * p[1];
    let base = match report.model.build(&p) {
        Ok(d) => d.loglik(data),
        Err(_) => return false,
    };
    (0..p.len()).all(|i| {
        let h = 0.01 * p[i].abs().max(floor);
        [-h, h].iter().all(|&dh| {
            let mut q = p.clone();
            q[i] += dh;
            report.model.build(&q).map_or(true, |d| d.loglik(data) < base)
        })
    })
}
