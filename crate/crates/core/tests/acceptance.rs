//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p bimodal --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

use std::time::Instant;

use bimodal::bul::Bul;
use bimodal::bun::Bun;
use bimodal::bust::Bust;
use bimodal::constructors::{
    registry_family, ConstructedFamily, FoldTransform, SkewCdf, SymmetricBase, WeightFn, FAMILY_NAMES,
};
use bimodal::density::{cdf_by_quadrature, raw_moment_by_quadrature, total_mass, DensityModel};
use bimodal::fit::{fit_config, fit_ml, ks_test, Dataset, FitReport, Model};
use bimodal::logbun::LogBun;
use bimodal::modes::numeric_modes;
use bimodal::quadrature::Quadrature;
use bimodal::rng::RngStream;

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn info(name: &str, detail: &str) {
    println!("INFO {name}: {detail}");
}

fn fixture(name: &str) -> Dataset<f64> {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).expect("fixture present");
    let values: Vec<f64> = text.lines().skip(1).filter(|l| !l.trim().is_empty()).map(|l| l.trim().parse().unwrap()).collect();
    Dataset::new(values, name, path).unwrap()
}

fn bun_grid() -> Vec<Bun<f64>> {
    let mut out = Vec::new();
    for &sigma in &[0.5, 1.0, 5.0] {
        for &k in &[-3.0, -1.0, 0.0, 1.0, 3.0] {
            for &a in &[-2.0, 0.0, 2.0] {
                out.push(Bun::from_parts(0.3, sigma, k, a).unwrap());
            }
        }
    }
    out
}

fn bust_grid() -> Vec<Bust<f64>> {
    let mut out = Vec::new();
    for &nu in &[1.5, 3.0, 8.0] {
        for &k in &[-2.0, 0.0, 1.0, 3.0] {
            for &a in &[-0.3, 0.0, 0.3] {
                if let Ok(d) = Bust::from_parts(0.0, 1.0, k, a, nu) {
                    out.push(d);
                }
            }
        }
    }
    out
}

fn bul_grid() -> Vec<Bul<f64>> {
    let mut out = Vec::new();
    for &sigma in &[0.5, 2.0] {
        for &k in &[0.5, 1.0, 2.0, 4.0] {
            for &a in &[-1.0, 0.0, 1.0] {
                out.push(Bul::from_parts(-0.2, sigma, k, a).unwrap());
            }
        }
    }
    out
}

fn logbun_grid() -> Vec<LogBun<f64>> {
    [(0.0, 0.5, 1.0, 0.0), (0.2, 0.4, 1.5, -0.3), (-0.5, 0.3, 0.5, 0.2), (1.0, 1.0, 2.0, 0.5), (0.0, 0.8, 0.0, 0.0), (0.5, 0.25, 3.0, -0.2)]
        .iter()
        .map(|&(m, s, k, a)| LogBun::from_parts(m, s, k, a).unwrap())
        .collect()
}

fn family_grid() -> Vec<ConstructedFamily<f64>> {
    let mut out = Vec::new();
    for name in FAMILY_NAMES {
        let sets: Vec<Vec<f64>> = match name {
            "lc" => vec![vec![-1.0], vec![0.0], vec![1.0], vec![2.5]],
            "skew-bimodal-normal" => vec![vec![1.0, 0.0], vec![1.5, 2.0], vec![2.0, -1.0], vec![0.5, 3.0]],
            _ => vec![vec![0.5], vec![1.0], vec![2.0], vec![4.0]],
        };
        for p in sets {
            out.push(registry_family(name, &p).unwrap());
        }
    }
    out
}

fn boxed<'a, M: DensityModel<f64> + 'a>(v: Vec<M>) -> Vec<Box<dyn DensityModel<f64> + 'a>> {
    v.into_iter().map(|m| Box::new(m) as Box<dyn DensityModel<f64>>).collect()
}

#[test]
fn normalization_suite() {
    let t = Instant::now();
    let q = Quadrature::default();
    let mut cases = boxed(bun_grid());
    cases.extend(boxed(bust_grid()));
    cases.extend(boxed(bul_grid()));
    cases.extend(boxed(logbun_grid()));
    cases.extend(boxed(family_grid()));
    let worst = cases.iter().map(|m| (total_mass(m.as_ref(), &q).unwrap_or(f64::NAN) - 1.0).abs()).fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    verdict(
        "normalization",
        worst <= 1e-8 && secs < 60.0,
        &format!("{} cases, max |mass - 1| = {worst:.2e} (tol 1e-8), {secs:.1} s (limit 60 s)", cases.len()),
    );
}

#[test]
fn cdf_quantile_suite() {
    let q = Quadrature::default();
    let mut cdf_err: f64 = 0.0;
    let mut rt_err: f64 = 0.0;
    let mut jump: f64 = 0.0;
    let mut n = 0;
    let mut check = |m: &dyn DensityModel<f64>, mu: f64| {
        let (c, s) = m.location_scale();
        let positive = m.support().0 >= 0.0;
        for z in [-2.0, -0.5, 0.0, 0.7, 2.5] {
            let x = if positive { c * (z * 0.5f64).exp() } else { c + s * z };
            cdf_err = cdf_err.max((m.cdf(x) - cdf_by_quadrature(m, x, &q).unwrap()).abs());
        }
        for p in [1e-6, 0.01, 0.3, 0.5, 0.9, 0.999] {
            rt_err = rt_err.max((m.cdf(m.quantile(p).unwrap()) - p).abs());
        }
        let delta = 1e-9 * s.max(1e-3);
        jump = jump.max((m.cdf(mu) - m.cdf(mu - delta)).abs());
        n += 1;
    };
    for d in bun_grid() {
        check(&d, d.params().mu);
    }
    for d in bust_grid() {
        check(&d, d.params().mu);
    }
    for d in bul_grid() {
        check(&d, d.params().mu);
    }
    for d in logbun_grid() {
        check(&d, d.params().mu.exp());
    }
    verdict(
        "cdf_quantile",
        cdf_err <= 1e-8 && rt_err < 1e-10 && jump <= 1e-6,
        &format!(
            "{n} cases; max cdf-quadrature gap {cdf_err:.2e} (tol 1e-8), quantile roundtrip {rt_err:.2e} (tol 1e-10), jump at mu {jump:.2e} (tol 1e-6)"
        ),
    );
}

/// Central differences of `f` with step `1e-5 max(1, |x_i|)`.
fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let h = 1e-5 * x[i].abs().max(1.0);
            let mut p = x.to_vec();
            p[i] += h;
            let fp = f(&p);
            p[i] -= 2.0 * h;
            (fp - f(&p)) / (2.0 * h)
        })
        .collect()
}

/// Worst `|analytic - fd| / max(1, |fd|)` over 10 random instances.
fn score_check<S>(seed: u64, draw: impl Fn(&mut RngStream) -> Option<Vec<f64>>, loglik: impl Fn(&[f64], &[f64]) -> f64, score: S, sample: impl Fn(&[f64], &mut RngStream) -> Vec<f64>) -> f64
where
    S: Fn(&[f64], &[f64]) -> Vec<f64>,
{
    let mut rng = RngStream::new(seed);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 10 {
        let Some(theta) = draw(&mut rng) else { continue };
        // Kink-adjacent observations are dropped so every instance is smooth in mu.
        let data: Vec<f64> = sample(&theta, &mut rng).into_iter().filter(|x| (x - theta[0]).abs() > 1e-3).collect();
        let fd = fd_gradient(|t| loglik(t, &data), &theta);
        let an = score(&theta, &data);
        for (a, f) in an.iter().zip(&fd) {
            worst = worst.max((a - f).abs() / f.abs().max(1.0));
        }
        done += 1;
    }
    worst
}

#[test]
fn score_suite() {
    let u = |r: &mut RngStream, lo: f64, hi: f64| lo + (hi - lo) * r.uniform();
    let bun = score_check(
        11,
        |r| Some(vec![u(r, -1.0, 1.0), u(r, 0.5, 2.0), u(r, -1.0, 3.0), u(r, -1.0, 1.0)]),
        |t, x| Bun::from_parts(t[0], t[1], t[2], t[3]).unwrap().loglik(x),
        |t, x| Bun::from_parts(t[0], t[1], t[2], t[3]).unwrap().score(x).to_vec(),
        |t, r| Bun::from_parts(t[0], t[1], t[2], t[3]).unwrap().sample(40, r),
    );
    let bust = score_check(
        12,
        |r| {
            let sigma = u(r, 0.5, 2.0);
            let t = vec![u(r, -1.0, 1.0), sigma, u(r, 0.2, 3.0) * sigma, u(r, -0.5, 0.5), u(r, 2.5, 15.0)];
            Bust::from_parts(t[0], t[1], t[2], t[3], t[4]).ok().map(|_| t)
        },
        |t, x| Bust::from_parts(t[0], t[1], t[2], t[3], t[4]).unwrap().loglik(x),
        |t, x| Bust::from_parts(t[0], t[1], t[2], t[3], t[4]).unwrap().score(x).to_vec(),
        |t, r| Bust::from_parts(t[0], t[1], t[2], t[3], t[4]).unwrap().sample(40, r),
    );
    let bul = score_check(
        13,
        |r| Some(vec![u(r, -1.0, 1.0), u(r, 0.5, 2.0), u(r, 0.3, 3.0), u(r, -1.0, 1.0)]),
        |t, x| Bul::from_parts(t[0], t[1], t[2], t[3]).unwrap().loglik(x),
        |t, x| Bul::from_parts(t[0], t[1], t[2], t[3]).unwrap().score(x).to_vec(),
        |t, r| Bul::from_parts(t[0], t[1], t[2], t[3]).unwrap().sample(40, r),
    );
    verdict(
        "score_vectors",
        bun.max(bust).max(bul) <= 1e-4,
        &format!("10 instances each; max relative error BUN {bun:.1e}, BUSt {bust:.1e}, BUL {bul:.1e} (tol 1e-4)"),
    );
}

#[test]
fn mixture_and_sampler_suite() {
    let mut mix_err: f64 = 0.0;
    for d in bun_grid() {
        let (m, p) = (d.mixture(), d.params());
        for i in 0..=200 {
            let x = p.mu + p.sigma * (-8.0 + 0.08 * i as f64);
            mix_err = mix_err.max((m.pdf((x - p.mu) / p.sigma) / p.sigma - d.pdf(x)).abs());
        }
    }
    for d in bust_grid() {
        let (m, p) = (d.mixture(), d.params());
        for i in 0..=200 {
            let x = p.mu + p.sigma * (-8.0 + 0.08 * i as f64);
            mix_err = mix_err.max((m.pdf(x) - d.pdf(x)).abs());
        }
    }
    let n = 100_000;
    let mut worst_p: f64 = 1.0;
    let mut lines = Vec::new();
    let mut ks = |name: &str, xs: Vec<f64>, cdf: &dyn Fn(f64) -> f64| {
        let data = Dataset::from_values(xs).unwrap();
        let (d, p) = ks_test(&data, cdf);
        worst_p = worst_p.min(p);
        lines.push(format!("{name} D={d:.4} p={p:.3}"));
    };
    let bun = Bun::from_parts(0.5, 1.2, 1.5, 0.4).unwrap();
    ks("BUN", bun.sample(n, &mut RngStream::new(21)), &|x| bun.cdf(x));
    ks("BUN-mixture", bun.sample_mixture(n, &mut RngStream::new(22)), &|x| bun.cdf(x));
    let bust = Bust::from_parts(0.0, 1.0, 1.5, 0.3, 4.0).unwrap();
    ks("BUSt", bust.sample(n, &mut RngStream::new(23)), &|x| bust.cdf(x));
    let bul = Bul::from_parts(0.0, 1.0, 0.6, 0.5).unwrap();
    ks("BUL", bul.sample(n, &mut RngStream::new(24)), &|x| bul.cdf(x));
    let lb = LogBun::from_parts(0.2, 0.5, 1.5, -0.2).unwrap();
    ks("LogBUN", lb.sample(n, &mut RngStream::new(25)), &|x| lb.cdf(x));
    verdict(
        "mixture_and_samplers",
        mix_err <= 1e-12 && worst_p > 0.01,
        &format!("mixture max |diff| {mix_err:.1e} (tol 1e-12); KS at n=1e5: {} (alpha 0.01)", lines.join(", ")),
    );
}

fn binomial_raw(mu: f64, sigma: f64, z: &[f64], r: usize) -> f64 {
    let mut total = 0.0;
    let mut c = 1.0;
    for j in 0..=r {
        if j > 0 {
            c = c * (r - j + 1) as f64 / j as f64;
        }
        let ez = if j == 0 { 1.0 } else { z[j - 1] };
        total += c * mu.powi((r - j) as i32) * sigma.powi(j as i32) * ez;
    }
    total
}

#[test]
fn moment_suite() {
    let q = Quadrature::new(1e-12, 1e-12, 4000).unwrap();
    let mut worst: f64 = 0.0;
    let mut rel = |got: f64, want: f64| worst = worst.max((got - want).abs() / want.abs().max(1.0));
    for &(m, s, k, a) in &[(0.0, 1.0, 1.0, 0.0), (0.5, 1.3, 2.0, -0.7), (-1.0, 0.6, -0.5, 0.4), (0.2, 2.0, 3.0, 1.5)] {
        let d = Bun::from_parts(m, s, k, a).unwrap();
        let z = d.moments();
        for r in 1..=4 {
            rel(binomial_raw(m, s, &z, r), raw_moment_by_quadrature(&d, r as i32, &q).unwrap());
        }
    }
    for &(m, s, k, a, nu) in &[(0.0, 1.0, 1.0, 0.3, 6.0), (0.5, 1.5, 2.0, -0.4, 9.0), (-0.3, 0.8, 0.5, 0.2, 5.5)] {
        let d = Bust::from_parts(m, s, k, a, nu).unwrap();
        for r in 1..=4u32 {
            if nu > r as f64 {
                rel(d.moment(r).unwrap(), raw_moment_by_quadrature(&d, r as i32, &q).unwrap());
            }
        }
    }
    for d in bul_grid() {
        for r in 1..=4u32 {
            rel(d.moment(r), raw_moment_by_quadrature(&d, r as i32, &q).unwrap());
        }
    }
    for d in logbun_grid().into_iter().take(3) {
        for r in 1..=2u32 {
            rel(d.moment(r), raw_moment_by_quadrature(&d, r as i32, &q).unwrap());
        }
    }
    let d = Bust::from_parts(0.0, 1.0, 1.0, 0.3, 6.0).unwrap();
    let (eta, lambda) = d.eta_lambda_display();
    let aux = d.aux();
    let r4 = |v: [f64; 4]| v.map(|x| (x * 1e4).round() / 1e4);
    info(
        "bust_printed_eta_lambda",
        &format!("alternative eta {:?} vs exact {:?}; alternative lambda {:?} vs exact {:?}", r4(eta), r4(aux.eta), r4(lambda), r4(aux.lambda)),
    );
    verdict("moments", worst <= 1e-6, &format!("BUN, BUSt, BUL, Log-BUN raw moments vs quadrature, max relative gap {worst:.1e} (tol 1e-6)"));
}

fn numeric_argmax<M: DensityModel<f64>>(d: &M, lo: f64, hi: f64) -> Vec<f64> {
    numeric_modes(|x| d.ln_pdf(x), lo, hi)
}

fn mode_gap(formula: &[f64], numeric: &[f64]) -> f64 {
    if formula.len() != numeric.len() {
        return f64::INFINITY;
    }
    formula.iter().zip(numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[test]
fn mode_suite() {
    let mut gap: f64 = 0.0;
    for d in bun_grid() {
        let p = *d.params();
        let w = 8.0 * p.sigma + p.a.abs() + p.sigma * p.k.abs();
        gap = gap.max(mode_gap(&d.modes(), &numeric_argmax(&d, p.mu - w, p.mu + w)));
    }
    for d in bust_grid() {
        let p = *d.params();
        let w = 8.0 * p.sigma + p.a.abs() + p.k.abs();
        gap = gap.max(mode_gap(&d.modes(), &numeric_argmax(&d, p.mu - w, p.mu + w)));
    }
    for &k in &[0.3, 0.5, 0.8, 0.95, 1.0, 1.5, 3.0] {
        for &sigma in &[0.5, 2.0] {
            let d = Bul::from_parts(0.4, sigma, k, 0.0).unwrap();
            let w = sigma * (4.0 / k + 4.0);
            gap = gap.max(mode_gap(&d.modes(), &numeric_argmax(&d, 0.4 - w, 0.4 + w)));
        }
    }
    // Bimodality boundary sigma k = |a|: two modes just inside, one just outside.
    let mut boundary_ok = true;
    for &(sigma, k) in &[(1.0, 1.0), (1.3, 1.5), (0.5, 3.0), (2.0, 0.7)] {
        for &sign in &[-1.0, 1.0] {
            let edge = sigma * k;
            let count = |a: f64| {
                let d = Bun::from_parts(0.0, sigma, k, a).unwrap();
                let w = 10.0 * sigma + a.abs() + edge;
                numeric_argmax(&d, -w, w).len()
            };
            boundary_ok &= count(sign * 0.9 * edge) == 2 && count(sign * 1.1 * edge) == 1;
        }
    }
    verdict(
        "modes",
        gap <= 1e-6 && boundary_ok,
        &format!("BUN, BUSt and BUL (a=0) formulas vs numeric argmax, max gap {gap:.1e} (tol 1e-6); sigma k = |a| boundary {}", if boundary_ok { "reproduced" } else { "violated" }),
    );
}

#[test]
fn theorem_property_suite() {
    let q = Quadrature::default();
    // Convex symmetric tilts: two modes summing to twice the centre.
    let mut tilt_ok = 0;
    let mut tilt_n = 0;
    for &c in &[-1.0f64, 0.0, 2.0] {
        for &(s, k) in &[(0.5, 1.0), (1.0, 0.5), (1.0, 2.0), (2.0, 1.0)] {
            let f = ConstructedFamily::tilt(&SymmetricBase::normal(c, s).unwrap(), &WeightFn::exp_abs(k, c)).unwrap();
            let m = f.modes();
            tilt_n += 1;
            tilt_ok += usize::from(m.len() == 2 && (m[0] + m[1] - 2.0 * c).abs() < 1e-6);
        }
    }
    for &k in &[0.3f64, 0.6, 0.9] {
        let f = ConstructedFamily::tilt(&SymmetricBase::logistic(0.5, 1.0).unwrap(), &WeightFn::exp_abs(k, 0.5)).unwrap();
        let m = f.modes();
        tilt_n += 1;
        tilt_ok += usize::from(m.len() == 2 && (m[0] + m[1] - 1.0).abs() < 1e-6);
    }
    // CDF-based tilts: symmetric, bimodal, closed-form normalizer.
    let mut cdf_ok = 0;
    let mut cdf_n = 0;
    let mut norm_gap: f64 = 0.0;
    // Bases smooth at the centre; a kinked base such as Laplace needs k above a threshold.
    let bases = [
        SymmetricBase::normal(0.0, 1.0).unwrap(),
        SymmetricBase::logistic(0.0, 1.0).unwrap(),
        SymmetricBase::cauchy(0.0, 1.5).unwrap(),
        SymmetricBase::hyperbolic_secant(0.0, 1.0).unwrap(),
    ];
    for base in &bases {
        for &k in &[0.5, 1.0, 2.0, 4.0] {
            for f in [ConstructedFamily::tilt_exp_cdf(base, k).unwrap(), ConstructedFamily::tilt_pow_cdf(base, k).unwrap()] {
                let sym = (0..=60).map(|i| 0.1 * i as f64).all(|x| (f.pdf(x) - f.pdf(-x)).abs() <= 1e-12);
                cdf_n += 1;
                cdf_ok += usize::from(sym && f.modes().len() == 2);
                if f.norm_is_closed_form() {
                    norm_gap = norm_gap.max((f.norm_const() - f.quadrature_norm(&q).unwrap()).abs() / f.norm_const());
                }
            }
        }
    }
    // Folds: every mode maps to the base mode under h.
    let mut fold_ok = 0;
    let mut fold_n = 0;
    for &k in &[1.0f64, 2.0, 3.5] {
        let bases = [
            SymmetricBase::normal(k, 1.0).unwrap(),
            SymmetricBase::logistic(k, 1.0).unwrap(),
            SymmetricBase::cauchy(k, 1.0).unwrap(),
            SymmetricBase::hyperbolic_secant(k, 1.0).unwrap(),
        ];
        for base in &bases {
            let h = FoldTransform::abs(0.0);
            let f = ConstructedFamily::fold(base, &h).unwrap();
            let m = f.modes();
            fold_n += 1;
            fold_ok += usize::from(!m.is_empty() && m.iter().all(|&x| (h.h(x) - k).abs() < 1e-6));
        }
    }
    // Skewed folds: unit mass for every lambda, symmetric at lambda = 0.
    let mut skew_ok = 0;
    let mut skew_n = 0;
    for &k in &[0.5, 1.0, 2.0] {
        for &lambda in &[-2.0, 0.0, 1.0, 3.0] {
            let f = ConstructedFamily::fold_skew(&SymmetricBase::normal(k, 1.0).unwrap(), &SkewCdf::normal(), lambda).unwrap();
            let mass_ok = (total_mass(&f, &q).unwrap() - 1.0).abs() <= 1e-8;
            let sym_ok = lambda != 0.0 || (0..=60).map(|i| 0.1 * i as f64).all(|x| (f.pdf(x) - f.pdf(-x)).abs() <= 1e-12);
            skew_n += 1;
            skew_ok += usize::from(mass_ok && sym_ok);
        }
    }
    let pass = tilt_ok == tilt_n && cdf_ok == cdf_n && norm_gap <= 1e-8 && fold_ok == fold_n && skew_ok == skew_n;
    verdict(
        "theorem_properties",
        pass,
        &format!(
            "convex tilt modes {tilt_ok}/{tilt_n}; cdf tilts symmetric+bimodal {cdf_ok}/{cdf_n}, normalizer gap {norm_gap:.1e} (tol 1e-8); fold h(mode)=k {fold_ok}/{fold_n}; skew fold mass/symmetry {skew_ok}/{skew_n}"
        ),
    );
}

#[test]
fn student_t_limit() {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(m, s, k, a) in &[(0.0, 1.0, 1.5, 0.3), (0.5, 2.0, 3.0, -0.6), (-1.0, 0.7, 0.5, 0.0)] {
        let d = Bust::from_parts(m, s, k, a, 5.0).unwrap();
        let ladder: Vec<f64> = [1e3, 1e4, 1e6].iter().map(|&nu| d.limit_distance(nu).unwrap()).collect();
        pass &= ladder[2] < 1e-3 && ladder[0] > ladder[1] && ladder[1] > ladder[2];
        parts.push(format!("[{:.1e}, {:.1e}, {:.1e}]", ladder[0], ladder[1], ladder[2]));
    }
    verdict("bust_to_bun_limit", pass, &format!("sup-distance at nu = 1e3, 1e4, 1e6: {} (need < 1e-3 at 1e6, decreasing)", parts.join(" ")));
}

fn fit(data: &Dataset<f64>, model: Model) -> FitReport {
    fit_ml(data, model, &fit_config(), &mut RngStream::new(7)).unwrap()
}

#[test]
fn lifetime_table() {
    let t = Instant::now();
    let data = fixture("aarset.csv");
    let bun = fit(&data, Model::BunSym);
    let bust = fit(&data, Model::Bust);
    let bul = fit(&data, Model::Bul);
    let secs = t.elapsed().as_secs_f64();
    let c1 = bun.aic <= 468.3;
    let c2 = (bun.ks_stat - 0.0728).abs() <= 0.005;
    let c3 = (bust.aic - 471.92).abs() <= 1.0;
    let c4 = (bul.aic - 487.43).abs() <= 1.0;
    verdict(
        "aarset_table",
        c1 && c2 && c3 && c4 && secs < 30.0,
        &format!(
            "BUN-sym AIC {:.2} (need <= 468.3), KS D {:.4} (need 0.0728 ± 0.005); BUSt AIC {:.2} (need 471.92 ± 1); BUL AIC {:.2} (need 487.43 ± 1); {secs:.1} s",
            bun.aic, bun.ks_stat, bust.aic, bul.aic
        ),
    );
}

#[test]
fn lean_body_mass_table() {
    let data = fixture("ais_lbm_female.csv");
    let bul = fit(&data, Model::Bul);
    let bun = fit(&data, Model::Bun);
    let bust = fit(&data, Model::Bust);
    let target = [53.41, 3.22, 1.22, -1.59];
    let est = bul.params();
    let within: Vec<bool> = est.iter().zip(&target).map(|(e, t)| ((e - t) / t).abs() <= 0.05).collect();
    let c1 = bul.aic <= 667.1;
    let c2 = within.iter().all(|&b| b);
    let c3 = (bun.aic - 673.29).abs() <= 1.0;
    let c4 = bul.aic < bun.aic && bun.aic < bust.aic;
    verdict(
        "lean_body_mass_table",
        c1 && c2 && c3 && c4,
        &format!(
            "n={}; BUL AIC {:.2} (need <= 667.1); BUL estimates {:?} vs {:?} within 5%: {:?}; BUN AIC {:.2} (need 673.29 ± 1); ranking BUL {:.2} < BUN {:.2} < BUSt {:.2}: {c4}",
            data.len(),
            bul.aic,
            est.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
            target,
            within,
            bun.aic,
            bul.aic,
            bun.aic,
            bust.aic
        ),
    );
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn parameter_recovery() {
    let t = Instant::now();
    let cases: [(Model, Vec<f64>); 3] = [
        (Model::Bun, vec![0.0, 1.0, 2.0, 0.5]),
        (Model::Bust, vec![0.0, 1.0, 2.0, 0.5, 5.0]),
        (Model::Bul, vec![0.0, 1.0, 0.7, 0.4]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (model, truth) in &cases {
        let d = model.build(truth).unwrap();
        let root = RngStream::new(2024);
        let mut errs = vec![Vec::new(); truth.len()];
        for rep in 0..20u64 {
            let xs = d.sample(2000, &mut root.substream(rep));
            let data = Dataset::from_values(xs).unwrap();
            let r = fit_ml(&data, *model, &fit_config(), &mut root.substream(1000 + rep)).unwrap();
            for (i, e) in r.params().iter().enumerate() {
                errs[i].push((e - truth[i]).abs());
            }
        }
        // A zero true value is measured against the true scale sigma.
        let rel: Vec<f64> = errs
            .into_iter()
            .enumerate()
            .map(|(i, e)| median(e) / if truth[i] == 0.0 { truth[1] } else { truth[i].abs() })
            .collect();
        pass &= rel.iter().all(|&r| r < 0.1);
        parts.push(format!("{model} {:?}", rel.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>()));
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        "parameter_recovery",
        pass && secs < 300.0,
        &format!("median relative error per parameter at n=2000 x 20: {} (tol 0.1); {secs:.0} s (limit 300 s)", parts.join("; ")),
    );
}

#[test]
fn cli_determinism() {
    let data = format!("{}/data/aarset.csv", env!("CARGO_MANIFEST_DIR"));
    let invocations: Vec<Vec<&str>> = vec![
        vec!["bimodal", "fit", "--model", "bun-sym", "--input", &data, "--seed", "7", "--no-meta"],
        vec!["bimodal", "compare", "--model", "bun-sym,bust,bul", "--input", &data, "--no-meta"],
        vec!["bimodal", "sample", "--model", "bun", "--params", "mu=0,sigma=1,k=2,a=0", "--n", "5", "--seed", "1"],
        vec!["bimodal", "pdf", "--model", "bul", "--params", "mu=0,sigma=1,k=1,a=0", "--grid", "-6,6,101"],
        vec!["bimodal", "construct", "--family", "bimodal-cauchy", "--params", "k=2", "--grid", "-5,5,21"],
    ];
    let run = |args: &[&str]| {
        let mut out = Vec::new();
        let mut info = Vec::new();
        bimodal_cli::run(args.iter().copied(), &mut out, &mut info).map(|_| out).map_err(|e| e.line())
    };
    let mut identical = 0;
    for args in &invocations {
        if let (Ok(a), Ok(b)) = (run(args), run(args)) {
            identical += usize::from(a == b && !a.is_empty());
        }
    }
    verdict(
        "cli_determinism",
        identical == invocations.len(),
        &format!("{identical}/{} documented invocations byte-identical across runs with fixed seed and --no-meta", invocations.len()),
    );
}
