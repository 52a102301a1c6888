//! Unconstrained minimization: Nelder–Mead simplex followed by an optional
//! BFGS polish, with deterministic multi-start.
//!
//! Log-likelihoods of the families in this crate have `|x - mu|` kinks, so the
//! simplex phase does the heavy lifting and the quasi-Newton phase only runs
//! where the objective is smooth (see [`Objective::kink_coords`]).

use crate::error::{domain, Error, Result};
use crate::real::Real;
use crate::rng::RngStream;

/// Stopping rules and restart budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig<T> {
    /// Simplex diameter target, relative to `max(1, |x|)`.
    pub x_tol: T,
    /// Spread of simplex values, relative to `max(1, |f|)`.
    pub f_tol: T,
    /// Infinity-norm gradient target for the polish phase.
    pub grad_tol: T,
    pub max_iters: usize,
    pub n_starts: usize,
    /// Seed for the perturbed extra starts.
    pub seed: u64,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            x_tol: T::lit(1e-10).max(T::epsilon() * T::lit(16.0)),
            f_tol: T::lit(1e-12).max(T::epsilon() * T::lit(4.0)),
            grad_tol: T::lit(1e-7).max(T::epsilon().sqrt()),
            max_iters: 20_000,
            n_starts: 1,
            seed: 42,
        }
    }
}

impl<T: Real> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_tol > T::zero() && self.f_tol > T::zero() && self.grad_tol > T::zero()) {
            return Err(domain("optimizer tolerances must be strictly positive"));
        }
        if self.n_starts == 0 {
            return Err(domain("n_starts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(domain("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Function to minimize.
pub trait Objective<T: Real> {
    fn value(&self, x: &[T]) -> T;

    /// Analytic gradient, if available.
    fn gradient(&self, _x: &[T]) -> Option<Vec<T>> {
        None
    }

    /// Coordinates at which the objective is not differentiable at `x`; they
    /// are held fixed during the gradient polish.
    fn kink_coords(&self, _x: &[T]) -> Vec<usize> {
        Vec::new()
    }
}

struct Closure<F, G> {
    f: F,
    g: Option<G>,
}

impl<T: Real, F: Fn(&[T]) -> T, G: Fn(&[T]) -> Vec<T>> Objective<T> for Closure<F, G> {
    fn value(&self, x: &[T]) -> T {
        (self.f)(x)
    }
    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        self.g.as_ref().map(|g| g(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Simplex iterations of the winning start.
    pub iterations: usize,
    /// Objective evaluations across all starts.
    pub evaluations: usize,
    /// The winning start's simplex met its tolerances.
    pub converged: bool,
    /// A gradient polish step was accepted on the winning start.
    pub polished: bool,
    pub best_start: usize,
    pub starts_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub diagnostics: Diagnostics,
}

/// Minimizes `f` from `x0`. When `cfg.n_starts > 1`, additional starts are
/// Gaussian perturbations of `x0` drawn from `cfg.seed`.
pub fn minimize<T, F, G>(f: F, grad: Option<G>, x0: &[T], cfg: &OptimizerConfig<T>) -> Result<Minimum<T>>
where
    T: Real,
    F: Fn(&[T]) -> T,
    G: Fn(&[T]) -> Vec<T>,
{
    let mut starts = vec![x0.to_vec()];
    let mut rng = RngStream::new(cfg.seed);
    for _ in 1..cfg.n_starts {
        let s = x0
            .iter()
            .map(|&v| v + rng.standard_normal::<T>() * v.abs().max(T::one()))
            .collect();
        starts.push(s);
    }
    minimize_from(&Closure { f, g: grad }, &starts, cfg)
}

/// Minimizes `obj` from each start and returns the best result. Ties are
/// resolved by start order, so the outcome is deterministic.
pub fn minimize_from<T: Real, O: Objective<T> + ?Sized>(
    obj: &O,
    starts: &[Vec<T>],
    cfg: &OptimizerConfig<T>,
) -> Result<Minimum<T>> {
    cfg.validate()?;
    if starts.is_empty() {
        return Err(domain("at least one start point is required"));
    }
    let mut best: Option<Minimum<T>> = None;
    let mut evaluations = 0;
    let mut last_err = None;
    for (i, x0) in starts.iter().enumerate() {
        match run_single(obj, x0, cfg) {
            Ok(mut m) => {
                evaluations += m.diagnostics.evaluations;
                m.diagnostics.best_start = i;
                let better = match &best {
                    None => true,
                    Some(b) => m.value < b.value,
                };
                if better {
                    best = Some(m);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(mut b) => {
            b.diagnostics.evaluations = evaluations;
            b.diagnostics.starts_used = starts.len();
            Ok(b)
        }
        None => Err(last_err.unwrap_or_else(|| Error::Optimization("no start produced a finite objective".into()))),
    }
}

fn eval<T: Real, O: Objective<T> + ?Sized>(obj: &O, x: &[T], count: &mut usize) -> T {
    *count += 1;
    let v = obj.value(x);
    if v.is_nan() {
        T::infinity()
    } else {
        v
    }
}

fn run_single<T: Real, O: Objective<T> + ?Sized>(obj: &O, x0: &[T], cfg: &OptimizerConfig<T>) -> Result<Minimum<T>> {
    let mut count = 0usize;
    let f0 = eval(obj, x0, &mut count);
    if !f0.is_finite() {
        return Err(Error::Optimization("objective is not finite at the start point".into()));
    }
    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut iterations = 0;
    let mut converged = false;
    // Restart the simplex at its own optimum until it stops improving; a
    // collapsed simplex is the classic Nelder–Mead failure mode.
    for restart in 0..4 {
        let (xn, fxn, it, conv) = nelder_mead(obj, &x, fx, cfg, &mut count);
        iterations += it;
        let improved = fxn < fx - cfg.f_tol * fx.abs().max(T::one());
        x = xn;
        fx = fxn;
        converged = conv;
        if !conv || (!improved && restart > 0) {
            break;
        }
    }
    let mut polished = false;
    if let Some((xp, fp)) = bfgs_polish(obj, &x, fx, cfg, &mut count) {
        if fp <= fx {
            x = xp;
            fx = fp;
            polished = true;
        }
    }
    Ok(Minimum {
        x,
        value: fx,
        diagnostics: Diagnostics {
            iterations,
            evaluations: count,
            converged,
            polished,
            best_start: 0,
            starts_used: 1,
        },
    })
}

fn nelder_mead<T: Real, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    f0: T,
    cfg: &OptimizerConfig<T>,
    count: &mut usize,
) -> (Vec<T>, T, usize, bool) {
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f0, 0, true);
    }
    let nf = T::from_usize_lossy(n);
    let one = T::one();
    let two = T::lit(2.0);
    // Dimension-adaptive coefficients (Gao & Han).
    let alpha = one;
    let gamma = one + two / nf;
    let rho = T::lit(0.75) - one / (two * nf);
    let shrink = (one - one / nf).max(T::lit(0.5));

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    let mut values: Vec<T> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(f0);
    for i in 0..n {
        let mut p = x0.to_vec();
        let step = if p[i].abs() > T::lit(1e-3) { T::lit(0.05) * p[i] } else { T::lit(0.05) };
        p[i] = p[i] + step;
        values.push(eval(obj, &p, count));
        simplex.push(p);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut iter = 0;
    let mut converged = false;
    while iter < cfg.max_iters {
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];

        let f_spread = order.iter().map(|&i| (values[i] - values[best]).abs()).fold(T::zero(), T::max);
        let x_spread = order
            .iter()
            .flat_map(|&i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (simplex[i][j] - simplex[best][j]).abs() / simplex[best][j].abs().max(one))
            .fold(T::zero(), T::max);
        if values[best].is_finite()
            && f_spread <= cfg.f_tol * values[best].abs().max(one)
            && x_spread <= cfg.x_tol
        {
            converged = true;
            break;
        }
        iter += 1;

        let mut centroid = vec![T::zero(); n];
        for &i in order.iter().take(n) {
            for j in 0..n {
                centroid[j] = centroid[j] + simplex[i][j];
            }
        }
        for c in centroid.iter_mut() {
            *c = *c / nf;
        }
        let along = |t: T| -> Vec<T> { (0..n).map(|j| centroid[j] + t * (simplex[worst][j] - centroid[j])).collect() };

        let xr = along(-alpha);
        let fr = eval(obj, &xr, count);
        if fr < values[best] {
            let xe = along(-alpha * gamma);
            let fe = eval(obj, &xe, count);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let xc = along(-alpha * rho);
            let fc = eval(obj, &xc, count);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = eval(obj, &xc, count);
            (xc, fc)
        };
        if fc < values[worst].min(fr) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        let xb = simplex[best].clone();
        for &i in order.iter().skip(1) {
            for j in 0..n {
                simplex[i][j] = xb[j] + shrink * (simplex[i][j] - xb[j]);
            }
            values[i] = eval(obj, &simplex[i], count);
        }
    }
    let (bi, _) = values
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    (simplex[bi].clone(), values[bi], iter, converged)
}

/// BFGS on the coordinates that are smooth at `x0`. Returns `None` if no
/// gradient is available.
fn bfgs_polish<T: Real, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: &[T],
    f0: T,
    cfg: &OptimizerConfig<T>,
    count: &mut usize,
) -> Option<(Vec<T>, T)> {
    let n = x0.len();
    let frozen = obj.kink_coords(x0);
    let free: Vec<usize> = (0..n).filter(|i| !frozen.contains(i)).collect();
    let m = free.len();
    if m == 0 {
        return None;
    }
    let grad_free = |x: &[T]| -> Option<Vec<T>> {
        let g = obj.gradient(x)?;
        Some(free.iter().map(|&i| g[i]).collect())
    };
    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut g = grad_free(&x)?;
    if g.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut h = vec![vec![T::zero(); m]; m];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let c1 = T::lit(1e-4);
    for _ in 0..200 {
        let gmax = g.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        if gmax <= cfg.grad_tol {
            break;
        }
        let mut p: Vec<T> = (0..m).map(|i| -(0..m).map(|j| h[i][j] * g[j]).sum::<T>()).collect();
        let mut slope: T = (0..m).map(|i| p[i] * g[i]).sum();
        if !(slope < T::zero()) {
            p = g.iter().map(|&v| -v).collect();
            slope = -(g.iter().map(|&v| v * v).sum::<T>());
            for (i, row) in h.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { T::one() } else { T::zero() };
                }
            }
        }
        let mut t = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn = x.clone();
            for (k, &i) in free.iter().enumerate() {
                xn[i] = x[i] + t * p[k];
            }
            let fnew = eval(obj, &xn, count);
            if fnew.is_finite() && fnew <= fx + c1 * t * slope {
                accepted = Some((xn, fnew));
                break;
            }
            t = t * T::lit(0.5);
        }
        let Some((xn, fnew)) = accepted else { break };
        // Stop at a newly touched kink rather than stepping across it.
        if obj.kink_coords(&xn).iter().any(|i| !frozen.contains(i)) {
            if fnew < fx {
                x = xn;
                fx = fnew;
            }
            break;
        }
        let Some(gn) = grad_free(&xn) else { break };
        if gn.iter().any(|v| !v.is_finite()) {
            break;
        }
        let s: Vec<T> = free.iter().map(|&i| xn[i] - x[i]).collect();
        let y: Vec<T> = (0..m).map(|i| gn[i] - g[i]).collect();
        let sy: T = (0..m).map(|i| s[i] * y[i]).sum();
        let progress = fx - fnew;
        x = xn;
        fx = fnew;
        g = gn;
        if sy > T::epsilon() * T::lit(1e3) {
            let hy: Vec<T> = (0..m).map(|i| (0..m).map(|j| h[i][j] * y[j]).sum()).collect();
            let yhy: T = (0..m).map(|i| y[i] * hy[i]).sum();
            let rho = sy.recip();
            for i in 0..m {
                for j in 0..m {
                    h[i][j] = h[i][j] - rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        if progress <= T::epsilon() * fx.abs().max(T::one()) {
            break;
        }
    }
    Some((x, fx))
}

/// Central-difference gradient with per-coordinate step `max(1e-6, 1e-7 |x_i|)`.
pub fn numeric_gradient<T: Real, F: Fn(&[T]) -> T>(f: F, x: &[T]) -> Vec<T> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = T::lit(1e-6).max(T::lit(1e-7) * x[i].abs());
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            (fp - fm) / (h + h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type NoGrad = fn(&[f64]) -> Vec<f64>;

    #[test]
    fn quadratic_one_dimensional() {
        let m = minimize(|x: &[f64]| (x[0] - 3.0).powi(2), None::<NoGrad>, &[0.0], &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(m.x[0], 3.0, epsilon = 1e-6);
        assert!(m.diagnostics.converged);
    }

    #[test]
    fn rosenbrock_with_and_without_gradient() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let g = |x: &[f64]| vec![-400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]), 200.0 * (x[1] - x[0] * x[0])];
        let cfg = OptimizerConfig::default();
        let plain = minimize(f, None::<NoGrad>, &[-1.2, 1.0], &cfg).unwrap();
        assert_abs_diff_eq!(plain.x[0], 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(plain.x[1], 1.0, epsilon = 1e-4);
        let polished = minimize(f, Some(g), &[-1.2, 1.0], &cfg).unwrap();
        assert_abs_diff_eq!(polished.x[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(polished.x[1], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn multi_start_is_deterministic() {
        let f = |x: &[f64]| (x[0] * x[0] - 4.0).powi(2) + 0.1 * x[0] + x[1] * x[1];
        let cfg = OptimizerConfig { n_starts: 20, seed: 11, ..OptimizerConfig::default() };
        let a = minimize(f, None::<NoGrad>, &[1.0, 1.0], &cfg).unwrap();
        let b = minimize(f, None::<NoGrad>, &[1.0, 1.0], &cfg).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert!(a.x[0] < 0.0, "global minimum is on the negative branch");
    }

    #[test]
    fn non_finite_start_fails() {
        let err = minimize(|_: &[f64]| f64::NAN, None::<NoGrad>, &[0.0], &OptimizerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Optimization(_)));
    }

    #[test]
    fn numeric_gradient_examples() {
        let g = numeric_gradient(|x: &[f64]| x[0] * x[0], &[3.0]);
        assert_abs_diff_eq!(g[0], 6.0, epsilon = 1e-6);
        let g = numeric_gradient(|x: &[f64]| x[0] * x[1], &[2.0, 5.0]);
        assert_abs_diff_eq!(g[0], 5.0, epsilon = 1e-6);
        assert_abs_diff_eq!(g[1], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = OptimizerConfig::<f64> { n_starts: 0, ..OptimizerConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
