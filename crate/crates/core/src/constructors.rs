//! Generic constructions of bimodal and skewed families from a symmetric
//! base density: weight tilting `w(x) g(x) / E_g[w(X)]`, the two closed-form
//! cdf tilts, transform folding `g(h(x)) / ∫ g(h)`, the half fold
//! `g(|x|) / (2 G(2c))` and its skewed variant. The Laplace-Cauchy family
//! and a registry of named example families live here too.

use std::fmt;
use std::sync::Arc;

use crate::density::{quantile_by_root, DensityModel};
use crate::error::{domain, Error, Result};
use crate::modes::numeric_modes;
use crate::quadrature::{integrate_pieces, integrate_scaled, Quadrature};
use crate::real::Real;
use crate::rng::RngStream;
use crate::roots::find_root;
use crate::special::{norm_cdf, norm_ln_cdf, norm_ln_pdf};

/// Shared scalar function.
pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Number of points sampled by the symmetry, positivity and convexity checks.
const CHECK_POINTS: usize = 256;
const CHECK_SEED: u64 = 0x5eed;
/// Cells of the tabulated CDF, uniform in `atan((x - center) / scale)`.
const TABLE_CELLS: usize = 512;

fn check_offsets<T: Real>(scale: T) -> Vec<T> {
    let mut rng = RngStream::new(CHECK_SEED);
    (0..CHECK_POINTS).map(|_| scale * T::lit(8.0) * rng.uniform_real::<T>()).collect()
}

fn close<T: Real>(x: T, y: T, rel: T) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()).max(T::min_positive_value())
}

/// A density symmetric about `center`, strictly positive on the real line.
#[derive(Clone)]
pub struct SymmetricBase<T> {
    name: String,
    ln_pdf: ScalarFn<T>,
    cdf: ScalarFn<T>,
    center: T,
    scale: T,
}

impl<T: Real> fmt::Debug for SymmetricBase<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricBase")
            .field("name", &self.name)
            .field("center", &self.center)
            .field("scale", &self.scale)
            .finish()
    }
}

impl<T: Real> SymmetricBase<T> {
    /// A base from its log density and CDF; symmetry and positivity are
    /// checked on sampled points.
    pub fn new(
        name: impl Into<String>,
        ln_pdf: impl Fn(T) -> T + Send + Sync + 'static,
        cdf: impl Fn(T) -> T + Send + Sync + 'static,
        center: T,
        scale: T,
    ) -> Result<Self> {
        let b = Self::new_unchecked(name, ln_pdf, cdf, center, scale)?;
        b.validate()?;
        Ok(b)
    }

    /// As [`SymmetricBase::new`] without the sampled checks.
    pub fn new_unchecked(
        name: impl Into<String>,
        ln_pdf: impl Fn(T) -> T + Send + Sync + 'static,
        cdf: impl Fn(T) -> T + Send + Sync + 'static,
        center: T,
        scale: T,
    ) -> Result<Self> {
        if !center.is_finite() {
            return Err(domain("base center must be finite"));
        }
        if !(scale > T::zero() && scale.is_finite()) {
            return Err(domain(format!("base scale must be positive, got {scale}")));
        }
        Ok(Self { name: name.into(), ln_pdf: Arc::new(ln_pdf), cdf: Arc::new(cdf), center, scale })
    }

    pub fn validate(&self) -> Result<()> {
        let rel = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        for d in check_offsets(self.scale) {
            let (hi, lo) = (self.pdf(self.center + d), self.pdf(self.center - d));
            if !(hi > T::zero() && lo > T::zero()) {
                return Err(Error::Construction(format!("base {} is not strictly positive", self.name)));
            }
            if !close(hi, lo, rel) {
                return Err(Error::Construction(format!(
                    "base {} is not symmetric about {}: pdf differs at offset {d}",
                    self.name, self.center
                )));
            }
        }
        Ok(())
    }

    fn standard(name: &str, center: T, scale: T, ln_pdf: fn(T) -> T, cdf: fn(T) -> T) -> Result<Self> {
        let ln_s = scale.ln();
        Self::new_unchecked(
            name,
            move |x| ln_pdf((x - center) / scale) - ln_s,
            move |x| cdf((x - center) / scale),
            center,
            scale,
        )
    }

    pub fn normal(center: T, scale: T) -> Result<Self> {
        Self::standard("normal", center, scale, norm_ln_pdf, norm_cdf)
    }

    pub fn logistic(center: T, scale: T) -> Result<Self> {
        fn ln_pdf<T: Real>(z: T) -> T {
            let a = z.abs();
            -a - T::lit(2.0) * (-a).exp().ln_1p()
        }
        fn cdf<T: Real>(z: T) -> T {
            T::one() / (T::one() + (-z).exp())
        }
        Self::standard("logistic", center, scale, ln_pdf, cdf)
    }

    pub fn cauchy(center: T, scale: T) -> Result<Self> {
        fn ln_pdf<T: Real>(z: T) -> T {
            -T::PI().ln() - (z * z).ln_1p()
        }
        fn cdf<T: Real>(z: T) -> T {
            if z < T::zero() {
                (-z).recip().atan() / T::PI()
            } else {
                T::lit(0.5) + z.atan() / T::PI()
            }
        }
        Self::standard("cauchy", center, scale, ln_pdf, cdf)
    }

    /// Hyperbolic secant law with density `1 / (pi cosh z)`.
    pub fn hyperbolic_secant(center: T, scale: T) -> Result<Self> {
        fn ln_pdf<T: Real>(z: T) -> T {
            let a = z.abs();
            let ln_cosh = a + (-T::lit(2.0) * a).exp().ln_1p() - T::LN_2();
            -T::PI().ln() - ln_cosh
        }
        fn cdf<T: Real>(z: T) -> T {
            T::lit(2.0) / T::PI() * z.exp().atan()
        }
        Self::standard("hyperbolic-secant", center, scale, ln_pdf, cdf)
    }

    pub fn laplace(center: T, scale: T) -> Result<Self> {
        fn ln_pdf<T: Real>(z: T) -> T {
            -T::LN_2() - z.abs()
        }
        fn cdf<T: Real>(z: T) -> T {
            let half = T::lit(0.5);
            if z < T::zero() {
                half * z.exp()
            } else {
                T::one() - half * (-z).exp()
            }
        }
        Self::standard("laplace", center, scale, ln_pdf, cdf)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn ln_pdf(&self, x: T) -> T {
        (self.ln_pdf)(x)
    }

    pub fn pdf(&self, x: T) -> T {
        (self.ln_pdf)(x).exp()
    }

    pub fn cdf(&self, x: T) -> T {
        (self.cdf)(x)
    }

    /// Upper tail, taken from the mirrored lower tail.
    pub fn sf(&self, x: T) -> T {
        self.cdf(T::lit(2.0) * self.center - x)
    }

    /// Inverse CDF by bracketed root finding.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(domain(format!("quantile requires 0 < p < 1, got {p}")));
        }
        if p > T::lit(0.5) {
            return Ok(T::lit(2.0) * self.center - self.quantile(T::one() - p)?);
        }
        let mut lo = self.center - self.scale;
        for _ in 0..2000 {
            if self.cdf(lo) <= p {
                break;
            }
            lo = self.center - (self.center - lo) * T::lit(2.0);
        }
        find_root(|x| (self.cdf(x) - p) / p, lo, self.center)
    }
}

/// Convexity claimed for a weight function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    Concave,
    Unknown,
}

/// A strictly positive weight `w`, symmetric about `symmetry_point`, stored
/// as `ln w`.
#[derive(Clone)]
pub struct WeightFn<T> {
    ln_w: ScalarFn<T>,
    symmetry_point: T,
    convexity: Convexity,
}

impl<T: Real> fmt::Debug for WeightFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFn")
            .field("symmetry_point", &self.symmetry_point)
            .field("convexity", &self.convexity)
            .finish()
    }
}

impl<T: Real> WeightFn<T> {
    /// A weight from `w` itself; positivity, symmetry and (if claimed)
    /// midpoint convexity are checked on sampled points.
    pub fn new(w: impl Fn(T) -> T + Send + Sync + 'static, symmetry_point: T, convexity: Convexity) -> Result<Self> {
        let wf = Self { ln_w: Arc::new(move |x| w(x).ln()), symmetry_point, convexity };
        wf.validate(T::one())?;
        Ok(wf)
    }

    /// `w(x) = exp(k |x - b|)`, convex for `k >= 0`.
    pub fn exp_abs(k: T, b: T) -> Self {
        let convexity = if k >= T::zero() { Convexity::Convex } else { Convexity::Unknown };
        Self { ln_w: Arc::new(move |x: T| k * (x - b).abs()), symmetry_point: b, convexity }
    }

    /// `w = 1`.
    pub fn constant() -> Self {
        Self { ln_w: Arc::new(|_| T::zero()), symmetry_point: T::zero(), convexity: Convexity::Convex }
    }

    pub fn symmetry_point(&self) -> T {
        self.symmetry_point
    }

    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    pub fn ln_w(&self, x: T) -> T {
        (self.ln_w)(x)
    }

    pub fn w(&self, x: T) -> T {
        (self.ln_w)(x).exp()
    }

    /// Sampled checks at offsets up to `8 scale` from the symmetry point.
    pub fn validate(&self, scale: T) -> Result<()> {
        let rel = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        let b = self.symmetry_point;
        let offsets = check_offsets(scale);
        for &d in &offsets {
            let (hi, lo) = (self.w(b + d), self.w(b - d));
            if !(hi > T::zero() && lo > T::zero() && hi.is_finite() && lo.is_finite()) {
                return Err(Error::Construction("weight must be strictly positive and finite".into()));
            }
            if !close(hi, lo, rel) {
                return Err(Error::Construction(format!("weight is not symmetric about {b}")));
            }
        }
        if self.convexity == Convexity::Convex {
            for pair in offsets.chunks(2) {
                let (x, y) = (b + pair[0], b - pair[1]);
                let mid = self.w((x + y) / T::lit(2.0));
                let avg = (self.w(x) + self.w(y)) / T::lit(2.0);
                if mid > avg * (T::one() + rel) {
                    return Err(Error::Construction("weight fails the midpoint convexity check".into()));
                }
            }
        }
        Ok(())
    }
}

/// A convex transform `h`, symmetric about `symmetry_point`.
#[derive(Clone)]
pub struct FoldTransform<T> {
    h: ScalarFn<T>,
    symmetry_point: T,
}

impl<T: Real> fmt::Debug for FoldTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FoldTransform").field("symmetry_point", &self.symmetry_point).finish()
    }
}

impl<T: Real> FoldTransform<T> {
    /// A transform from `h`; symmetry and midpoint convexity are checked on
    /// sampled points. The convexity check is non-strict so that `|x|`
    /// qualifies.
    pub fn new(h: impl Fn(T) -> T + Send + Sync + 'static, symmetry_point: T) -> Result<Self> {
        let t = Self { h: Arc::new(h), symmetry_point };
        t.validate(T::one())?;
        Ok(t)
    }

    /// `h(x) = |x - d|`.
    pub fn abs(d: T) -> Self {
        Self { h: Arc::new(move |x: T| (x - d).abs()), symmetry_point: d }
    }

    pub fn symmetry_point(&self) -> T {
        self.symmetry_point
    }

    pub fn h(&self, x: T) -> T {
        (self.h)(x)
    }

    pub fn validate(&self, scale: T) -> Result<()> {
        let rel = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        let d = self.symmetry_point;
        let offsets = check_offsets(scale);
        for &t in &offsets {
            if !close(self.h(d + t), self.h(d - t), rel) {
                return Err(Error::Construction(format!("transform is not symmetric about {d}")));
            }
        }
        for pair in offsets.chunks(2) {
            let (x, y) = (d + pair[0], d - pair[1]);
            let mid = self.h((x + y) / T::lit(2.0));
            let avg = (self.h(x) + self.h(y)) / T::lit(2.0);
            if mid > avg + rel * avg.abs().max(T::one()) {
                return Err(Error::Construction("transform fails the midpoint convexity check".into()));
            }
        }
        Ok(())
    }
}

/// The distribution function `F` of the skewing factor `F(lambda x)`.
#[derive(Clone)]
pub struct SkewCdf<T> {
    name: String,
    ln_cdf: ScalarFn<T>,
}

impl<T: Real> fmt::Debug for SkewCdf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SkewCdf").field("name", &self.name).finish()
    }
}

impl<T: Real> SkewCdf<T> {
    /// `F` given by its logarithm; its density must be symmetric about 0.
    pub fn new(name: impl Into<String>, ln_cdf: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { name: name.into(), ln_cdf: Arc::new(ln_cdf) }
    }

    pub fn normal() -> Self {
        Self::new("normal", norm_ln_cdf)
    }
}

/// How a [`ConstructedFamily`] was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Tilted,
    ExpCdfTilted,
    PowCdfTilted,
    Folded,
    FoldedHalf,
    FoldedSkewed,
    LaplaceCauchy,
}

#[derive(Debug, Clone)]
struct CdfTable<T> {
    nodes: Vec<T>,
    cum: Vec<T>,
}

/// A normalized density built by one of the constructions in this module.
///
/// The normalizer and a tabulated CDF are computed once at construction;
/// evaluation never re-integrates over the whole line.
#[derive(Clone)]
pub struct ConstructedFamily<T> {
    name: String,
    kind: FamilyKind,
    ln_kernel: ScalarFn<T>,
    norm_const: T,
    ln_norm: T,
    norm_is_closed_form: bool,
    center: T,
    scale: T,
    breakpoints: Vec<T>,
    shape: Vec<(&'static str, T)>,
    base_interval: (T, T),
    table: CdfTable<T>,
}

impl<T: Real> fmt::Debug for ConstructedFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstructedFamily")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("norm_const", &self.norm_const)
            .field("norm_is_closed_form", &self.norm_is_closed_form)
            .field("shape", &self.shape)
            .finish()
    }
}

struct Spec<T> {
    name: String,
    kind: FamilyKind,
    ln_kernel: ScalarFn<T>,
    closed_norm: Option<T>,
    center: T,
    scale: T,
    breakpoints: Vec<T>,
    shape: Vec<(&'static str, T)>,
    base_interval: (T, T),
}

fn table_quadrature<T: Real>() -> Quadrature<T> {
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(16.0));
    Quadrature::new(tol, tol, 2000).expect("valid quadrature settings")
}

fn base_interval<T: Real>(base: &SymmetricBase<T>) -> Result<(T, T)> {
    let lo = base.quantile(T::lit(1e-6))?;
    let hi = base.quantile(T::one() - T::lit(1e-6))?;
    Ok((lo, hi))
}

impl<T: Real> ConstructedFamily<T> {
    fn build(spec: Spec<T>) -> Result<Self> {
        let (norm_const, closed) = match spec.closed_norm {
            Some(c) => (c, true),
            None => {
                let kernel = spec.ln_kernel.clone();
                let mut breaks = spec.breakpoints.clone();
                breaks.push(spec.center);
                let v = integrate_pieces(
                    |x| kernel(x).exp(),
                    T::neg_infinity(),
                    T::infinity(),
                    &breaks,
                    spec.scale,
                    &Quadrature::default(),
                )
                .map_err(|e| Error::Construction(format!("normalizer of {} did not converge: {e}", spec.name)))?;
                (v, false)
            }
        };
        if !(norm_const > T::zero() && norm_const.is_finite()) {
            return Err(Error::Construction(format!(
                "normalizer of {} must be positive and finite, got {norm_const}",
                spec.name
            )));
        }
        let mut fam = Self {
            name: spec.name,
            kind: spec.kind,
            ln_kernel: spec.ln_kernel,
            norm_const,
            ln_norm: norm_const.ln(),
            norm_is_closed_form: closed,
            center: spec.center,
            scale: spec.scale,
            breakpoints: spec.breakpoints,
            shape: spec.shape,
            base_interval: spec.base_interval,
            table: CdfTable { nodes: Vec::new(), cum: Vec::new() },
        };
        fam.table = fam.build_table()?;
        Ok(fam)
    }

    fn build_table(&self) -> Result<CdfTable<T>> {
        let half_pi = T::FRAC_PI_2();
        let m = TABLE_CELLS;
        let nodes: Vec<T> = (0..=m)
            .map(|i| {
                if i == 0 {
                    T::neg_infinity()
                } else if i == m {
                    T::infinity()
                } else {
                    let theta = -half_pi + T::PI() * T::from_usize_lossy(i) / T::from_usize_lossy(m);
                    self.center + self.scale * theta.tan()
                }
            })
            .collect();
        let q = table_quadrature();
        let mut cum = Vec::with_capacity(m + 1);
        cum.push(T::zero());
        let mut acc = T::zero();
        for w in nodes.windows(2) {
            acc = acc + self.integrate_segment(w[0], w[1], &q)?;
            cum.push(acc);
        }
        Ok(CdfTable { nodes, cum })
    }

    fn integrate_segment(&self, a: T, b: T, q: &Quadrature<T>) -> Result<T> {
        let breaks: Vec<T> = self.breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
        if breaks.is_empty() {
            integrate_scaled(|x| self.pdf(x), a, b, self.scale, q)
        } else {
            integrate_pieces(|x| self.pdf(x), a, b, &breaks, self.scale, q)
        }
    }

    fn cell_of(&self, x: T) -> usize {
        let m = TABLE_CELLS;
        let theta = ((x - self.center) / self.scale).atan();
        let pos = (theta + T::FRAC_PI_2()) / T::PI() * T::from_usize_lossy(m);
        let mut i = pos.floor().to_usize().unwrap_or(0).min(m - 1);
        let nodes = &self.table.nodes;
        while i > 0 && nodes[i] > x {
            i -= 1;
        }
        while i + 1 < m && nodes[i + 1] <= x {
            i += 1;
        }
        i
    }

    /// Weight tilt `w(x) g(x) / E_g[w(X)]` with a quadrature normalizer.
    pub fn tilt(base: &SymmetricBase<T>, w: &WeightFn<T>) -> Result<Self> {
        let (b, g) = (base.clone(), w.clone());
        let mut breakpoints = vec![w.symmetry_point()];
        breakpoints.dedup();
        Self::build(Spec {
            name: format!("tilt({})", base.name()),
            kind: FamilyKind::Tilted,
            ln_kernel: Arc::new(move |x| g.ln_w(x) + b.ln_pdf(x)),
            closed_norm: None,
            center: base.center(),
            scale: base.scale(),
            breakpoints,
            shape: Vec::new(),
            base_interval: base_interval(base)?,
        })
    }

    /// `k / (2 (e^k - e^{k/2})) g(x) exp(k G(|x|))` for a base symmetric
    /// about 0. `k = 0` gives the base.
    pub fn tilt_exp_cdf(base: &SymmetricBase<T>, k: T) -> Result<Self> {
        require_zero_center(base)?;
        if !k.is_finite() {
            return Err(domain("k must be finite"));
        }
        let half = T::lit(0.5);
        let norm = if k == T::zero() {
            T::one()
        } else {
            // 2 (e^k - e^{k/2}) / k = 2 e^{k/2} expm1(k/2) / k
            T::lit(2.0) * (k * half).exp() * (k * half).exp_m1() / k
        };
        let b = base.clone();
        Self::build(Spec {
            name: format!("exp-cdf-tilt({})", base.name()),
            kind: FamilyKind::ExpCdfTilted,
            ln_kernel: Arc::new(move |x| b.ln_pdf(x) + k * b.cdf(x.abs())),
            closed_norm: Some(norm),
            center: T::zero(),
            scale: base.scale(),
            breakpoints: vec![T::zero()],
            shape: vec![("k", k)],
            base_interval: base_interval(base)?,
        })
    }

    /// `(k + 1) / (2 (1 - 2^{-(k+1)})) g(x) G(|x|)^k` for a base symmetric
    /// about 0 and `k > -1`.
    pub fn tilt_pow_cdf(base: &SymmetricBase<T>, k: T) -> Result<Self> {
        require_zero_center(base)?;
        if !(k > -T::one() && k.is_finite()) {
            return Err(domain(format!("power cdf tilt requires k > -1, got {k}")));
        }
        let kp1 = k + T::one();
        let norm = T::lit(2.0) * (-(-kp1 * T::LN_2()).exp_m1()) / kp1;
        let b = base.clone();
        Self::build(Spec {
            name: format!("pow-cdf-tilt({})", base.name()),
            kind: FamilyKind::PowCdfTilted,
            ln_kernel: Arc::new(move |x| b.ln_pdf(x) + k * b.cdf(x.abs()).ln()),
            closed_norm: Some(norm),
            center: T::zero(),
            scale: base.scale(),
            breakpoints: vec![T::zero()],
            shape: vec![("k", k)],
            base_interval: base_interval(base)?,
        })
    }

    /// `g(h(x)) / ∫ g(h(w)) dw` with a quadrature normalizer.
    pub fn fold(base: &SymmetricBase<T>, h: &FoldTransform<T>) -> Result<Self> {
        let (b, t) = (base.clone(), h.clone());
        let (lo, hi) = base_interval(base)?;
        let d = h.symmetry_point();
        let reach = (hi - d).abs().max((lo - d).abs());
        Self::build(Spec {
            name: format!("fold({})", base.name()),
            kind: FamilyKind::Folded,
            ln_kernel: Arc::new(move |x| b.ln_pdf(t.h(x))),
            closed_norm: None,
            center: d,
            scale: base.scale() + base.center().abs(),
            breakpoints: vec![d],
            shape: vec![("k", base.center())],
            base_interval: (d - reach, d + reach),
        })
    }

    /// `g(|x|) / (2 G(2c))` for a base symmetric about `c`; `c = 0` gives
    /// the base itself.
    pub fn fold_half(base: &SymmetricBase<T>) -> Result<Self> {
        let c = base.center();
        let norm = T::lit(2.0) * base.cdf(T::lit(2.0) * c);
        let b = base.clone();
        let (lo, hi) = base_interval(base)?;
        let reach = hi.abs().max(lo.abs());
        Self::build(Spec {
            name: format!("fold-half({})", base.name()),
            kind: FamilyKind::FoldedHalf,
            ln_kernel: Arc::new(move |x| b.ln_pdf(x.abs())),
            closed_norm: Some(norm),
            center: T::zero(),
            scale: base.scale() + c.abs(),
            breakpoints: vec![T::zero()],
            shape: vec![("k", c)],
            base_interval: (-reach, reach),
        })
    }

    /// `g(|x|) F(lambda x) / G(2c)` for a base symmetric about `c`.
    pub fn fold_skew(base: &SymmetricBase<T>, skew: &SkewCdf<T>, lambda: T) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(domain("lambda must be finite"));
        }
        let c = base.center();
        let norm = base.cdf(T::lit(2.0) * c);
        let b = base.clone();
        let f = skew.ln_cdf.clone();
        let (lo, hi) = base_interval(base)?;
        let reach = hi.abs().max(lo.abs());
        Self::build(Spec {
            name: format!("fold-skew({}, {})", base.name(), skew.name),
            kind: FamilyKind::FoldedSkewed,
            ln_kernel: Arc::new(move |x| b.ln_pdf(x.abs()) + f(lambda * x)),
            closed_norm: Some(norm),
            center: T::zero(),
            scale: base.scale() + c.abs(),
            breakpoints: vec![T::zero()],
            shape: vec![("k", c), ("lambda", lambda)],
            base_interval: (-reach, reach),
        })
    }

    /// Laplace-Cauchy family `(1 + (x - k)^2) e^{-|x|} / (2 (3 + k^2))`.
    pub fn laplace_cauchy(k: T) -> Result<Self> {
        if !k.is_finite() {
            return Err(domain("k must be finite"));
        }
        let three = T::lit(3.0);
        Self::build(Spec {
            name: "laplace-cauchy".into(),
            kind: FamilyKind::LaplaceCauchy,
            ln_kernel: Arc::new(move |x: T| ((x - k) * (x - k)).ln_1p() - x.abs()),
            closed_norm: Some(T::lit(2.0) * (three + k * k)),
            center: T::zero(),
            scale: T::one() + k.abs(),
            breakpoints: vec![T::zero()],
            shape: vec![("k", k)],
            base_interval: (T::lit(-20.0) - k.abs(), T::lit(20.0) + k.abs()),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// The divisor that normalizes the kernel.
    pub fn norm_const(&self) -> T {
        self.norm_const
    }

    pub fn norm_is_closed_form(&self) -> bool {
        self.norm_is_closed_form
    }

    /// Shape parameters as `(name, value)` pairs.
    pub fn shape(&self) -> &[(&'static str, T)] {
        &self.shape
    }

    /// `∫ kernel` by quadrature, independent of the cached normalizer.
    pub fn quadrature_norm(&self, q: &Quadrature<T>) -> Result<T> {
        let mut breaks = self.breakpoints.clone();
        breaks.push(self.center);
        integrate_pieces(|x| (self.ln_kernel)(x).exp(), T::neg_infinity(), T::infinity(), &breaks, self.scale, q)
    }

    /// Strict local maxima of the density, ascending. The search covers the
    /// base's `[q(1e-6), q(1 - 1e-6)]` and the family's own, widened by 20%,
    /// on a grid uniform in `atan((x - center) / scale)`.
    pub fn modes(&self) -> Vec<T> {
        let eps = T::lit(1e-6);
        let (mut lo, mut hi) = self.base_interval;
        if let (Ok(a), Ok(b)) = (self.quantile(eps), self.quantile(T::one() - eps)) {
            lo = lo.min(a);
            hi = hi.max(b);
        }
        let pad = (hi - lo) * T::lit(0.1);
        // Search in theta = atan((x - center) / scale) so heavy-tailed ranges
        // keep grid resolution near the center.
        let (c, s) = (self.center, self.scale);
        let to_theta = |x: T| ((x - c) / s).atan();
        let from_theta = |t: T| c + s * t.tan();
        numeric_modes(|t| self.ln_pdf(from_theta(t)), to_theta(lo - pad), to_theta(hi + pad))
            .into_iter()
            .map(from_theta)
            .collect()
    }
}

fn require_zero_center<T: Real>(base: &SymmetricBase<T>) -> Result<()> {
    if base.center() != T::zero() {
        return Err(domain(format!("this construction needs a base symmetric about 0, got center {}", base.center())));
    }
    Ok(())
}

impl<T: Real> DensityModel<T> for ConstructedFamily<T> {
    fn ln_pdf(&self, x: T) -> T {
        (self.ln_kernel)(x) - self.ln_norm
    }

    fn cdf(&self, x: T) -> T {
        if x.is_nan() {
            return T::nan();
        }
        if x == T::infinity() {
            return T::one();
        }
        if x == T::neg_infinity() {
            return T::zero();
        }
        let i = self.cell_of(x);
        let tail = self.integrate_segment(self.table.nodes[i], x, &table_quadrature()).unwrap_or(T::nan());
        (self.table.cum[i] + tail).max(T::zero()).min(T::one())
    }

    fn quantile(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(domain(format!("quantile requires 0 < p < 1, got {p}")));
        }
        let cum = &self.table.cum;
        let i = cum.partition_point(|&c| c <= p).saturating_sub(1).min(TABLE_CELLS - 1);
        let (a, b) = (self.table.nodes[i], self.table.nodes[i + 1]);
        if !(a.is_finite() && b.is_finite()) {
            return quantile_by_root(self, p);
        }
        let q = table_quadrature();
        let base = cum[i];
        let scale_p = p.min(T::one() - p);
        find_root(
            |x| (base + self.integrate_segment(a, x, &q).unwrap_or(T::nan()) - p) / scale_p,
            a,
            b,
        )
        .or_else(|_| quantile_by_root(self, p))
    }

    fn breakpoints(&self) -> Vec<T> {
        self.breakpoints.clone()
    }

    fn location_scale(&self) -> (T, T) {
        (self.center, self.scale)
    }
}

/// Laplace-Cauchy density `(1 + (x - k)^2) e^{-|x|} / (2 (3 + k^2))`.
pub fn lc_pdf<T: Real>(x: T, k: T) -> T {
    let d = x - k;
    (T::one() + d * d) * (-x.abs()).exp() / (T::lit(2.0) * (T::lit(3.0) + k * k))
}

/// `E(X^r)` of the Laplace-Cauchy family, from the standard Laplace moments
/// `E(L^{2s}) = (2s)!`:
/// `[(1 + k^2) E(L^r) - 2k E(L^{r+1}) + E(L^{r+2})] / (3 + k^2)`.
pub fn lc_moment<T: Real>(r: u32, k: T) -> T {
    let lap = |s: u32| crate::bul::laplace_moment(s, T::one());
    ((T::one() + k * k) * lap(r) - T::lit(2.0) * k * lap(r + 1) + lap(r + 2)) / (T::lit(3.0) + k * k)
}

/// Names accepted by [`registry_family`].
pub const FAMILY_NAMES: [&str; 6] =
    ["lc", "bimodal-logistic-1", "bimodal-logistic-2", "bimodal-cauchy", "bimodal-hs", "skew-bimodal-normal"];

/// Parameter names of a registered family, in the order
/// [`registry_family`] expects them.
pub fn family_parameters(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "lc" | "bimodal-logistic-1" | "bimodal-logistic-2" | "bimodal-cauchy" | "bimodal-hs" => Some(&["k"]),
        "skew-bimodal-normal" => Some(&["k", "lambda"]),
        _ => None,
    }
}

/// Builds a named example family:
///
/// - `lc`: Laplace-Cauchy with skew `k`;
/// - `bimodal-logistic-1`, `bimodal-logistic-2`: exp-cdf and power-cdf tilts
///   of the standard logistic;
/// - `bimodal-cauchy`, `bimodal-hs`: `|x|` folds of the Cauchy and hyperbolic
///   secant laws centered at `k`;
/// - `skew-bimodal-normal`: `phi(|x| - k) Phi(lambda x) / Phi(k)`.
pub fn registry_family<T: Real>(name: &str, params: &[T]) -> Result<ConstructedFamily<T>> {
    let expected = family_parameters(name).ok_or_else(|| {
        domain(format!("unknown family {name:?}; expected one of {}", FAMILY_NAMES.join(", ")))
    })?;
    if params.len() != expected.len() {
        return Err(domain(format!(
            "family {name} takes {} parameter(s) ({}), got {}",
            expected.len(),
            expected.join(", "),
            params.len()
        )));
    }
    let k = params[0];
    let one = T::one();
    let mut fam = match name {
        "lc" => ConstructedFamily::laplace_cauchy(k),
        "bimodal-logistic-1" => ConstructedFamily::tilt_exp_cdf(&SymmetricBase::logistic(T::zero(), one)?, k),
        "bimodal-logistic-2" => ConstructedFamily::tilt_pow_cdf(&SymmetricBase::logistic(T::zero(), one)?, k),
        "bimodal-cauchy" => ConstructedFamily::fold(&SymmetricBase::cauchy(k, one)?, &FoldTransform::abs(T::zero())),
        "bimodal-hs" => {
            ConstructedFamily::fold(&SymmetricBase::hyperbolic_secant(k, one)?, &FoldTransform::abs(T::zero()))
        }
        _ => ConstructedFamily::fold_skew(&SymmetricBase::normal(k, one)?, &SkewCdf::normal(), params[1]),
    }?;
    fam.name = name.to_string();
    Ok(fam)
}
