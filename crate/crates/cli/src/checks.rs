//! Invariant checks behind `verify` and the acceptance target.
//!
//! Every row is a deterministic function of its inputs: parallel work is
//! collected in index order and then reduced sequentially, and no timings are
//! recorded, so the table is identical for any thread count.

use std::f64::consts::PI;

use num::complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cuspdet::ramanujan::{self, HalfPlaneFunction};
use cuspdet::spectrum::{self, Truncation};
use cuspdet::zetadet::{self, Regime};
use cuspdet::{hypergeom, specfun, Geometry, Result, SpectralZetaParams};

use crate::config::Selector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub module: String,
    /// Acceptance criterion the row belongs to, if any.
    pub criterion: Option<u8>,
    pub invariant: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn row(module: &str, criterion: Option<u8>, invariant: impl Into<String>, measured: f64, threshold: f64) -> CheckRow {
    CheckRow { module: module.into(), criterion, invariant: invariant.into(), measured, threshold, pass: measured <= threshold }
}

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

pub const MODULES: [Selector; 5] =
    [Selector::Specfun, Selector::Hypergeom, Selector::Ramanujan, Selector::Spectrum, Selector::Zetadet];

pub fn criteria_of(module: Selector) -> &'static [u8] {
    match module {
        Selector::Specfun => &[1, 2],
        Selector::Hypergeom => &[3],
        Selector::Ramanujan => &[4],
        Selector::Spectrum => &[5],
        Selector::Zetadet => &[6, 7, 8],
        Selector::All => &[1, 2, 3, 4, 5, 6, 7, 8],
    }
}

/// Rows of one acceptance criterion. Criterion 9 compares whole runs and has
/// no rows of its own.
pub fn criterion_checks(n: u8, quick: bool) -> Result<Vec<CheckRow>> {
    match n {
        1 => bessel_kernel(),
        2 => uniform_asymptotics(quick),
        3 => hypergeometric_suite(quick),
        4 => ramanujan_sums(quick),
        5 => spectrum_checks(quick),
        6 => strip_equivalence(quick),
        7 => a_asymptotics(quick),
        8 => mu_asymptotics(quick),
        _ => Ok(Vec::new()),
    }
}

/// Checks tied to no criterion.
fn extra_checks(module: Selector) -> Result<Vec<CheckRow>> {
    match module {
        Selector::Specfun => specfun_extras(),
        Selector::Ramanujan => ramanujan_extras(),
        Selector::Zetadet => zetadet_extras(),
        _ => Ok(Vec::new()),
    }
}

pub fn module_checks(module: Selector, quick: bool) -> Result<Vec<CheckRow>> {
    if module == Selector::All {
        let mut out = Vec::new();
        for m in MODULES {
            out.extend(module_checks(m, quick)?);
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for &c in criteria_of(module) {
        out.extend(criterion_checks(c, quick)?);
    }
    out.extend(extra_checks(module)?);
    Ok(out)
}

// ---------------------------------------------------------------------------
// specfun

fn bessel_kernel() -> Result<Vec<CheckRow>> {
    let mut worst_k: f64 = 0.0;
    for i in 0..50 {
        let x = 0.1 * 500f64.powf(i as f64 / 49.0);
        let k = specfun::bessel_k_real_order(0.5, x)?;
        worst_k = worst_k.max(rel(k, (PI / (2.0 * x)).sqrt() * (-x).exp()));
    }
    let mut worst_d: f64 = 0.0;
    for i in 0..40 {
        let x = 0.5 + 19.5 * i as f64 / 39.0;
        let d = specfun::dlog_bessel_k_dorder(0.5, x)?;
        worst_d = worst_d.max(rel(d, specfun::exp_integral_e1_scaled(2.0 * x)?));
    }
    Ok(vec![
        row("specfun", Some(1), "K_1/2 closed form, relative", worst_k, 1e-12),
        row("specfun", Some(1), "order derivative at 1/2 vs E1, relative", worst_d, 1e-10),
    ])
}

fn uniform_remainder(nu: f64, x: f64) -> Result<f64> {
    Ok((specfun::log_bessel_k(nu, nu * x)?.log_k - specfun::uniform_log_k_terms(nu, x)).abs())
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn uniform_asymptotics(quick: bool) -> Result<Vec<CheckRow>> {
    let draws = if quick { 50 } else { 200 };
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let pts: Vec<(f64, f64)> =
        (0..draws).map(|_| (rng.gen_range(25.0..200.0), 10f64.powf(rng.gen_range(-2.0..2.0)))).collect();
    let ratios: Vec<Result<f64>> = pts
        .par_iter()
        .map(|&(nu, x)| {
            let c = specfun::uniform_log_k_certified(nu, x)?;
            let direct = specfun::log_bessel_k(nu, nu * x)?.log_k;
            Ok((direct - c.value).abs() / c.abs_error_bound)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in ratios {
        worst = worst.max(r?);
    }
    let mut rows = vec![row("specfun", Some(2), "uniform expansion |remainder| / certified bound", worst, 1.0)];
    for x in [0.5, 2.0] {
        let mut fit = Vec::new();
        for nu in [25.0, 35.0, 50.0, 70.0, 100.0] {
            fit.push((f64::ln(nu), uniform_remainder(nu, x)?.ln()));
        }
        rows.push(row("specfun", Some(2), format!("uniform remainder log-log slope in ν at x={x}"), least_squares_slope(&fit), -1.8));
    }
    Ok(rows)
}

fn specfun_extras() -> Result<Vec<CheckRow>> {
    let z2 = specfun::riemann_zeta(2.0)?;
    let (zm1, _) = specfun::hurwitz_zeta_with_derivative(-1.0, 1.0)?;
    let (_, dz0) = specfun::hurwitz_zeta_with_derivative(0.0, 1.0)?;
    let mut binet: f64 = 0.0;
    for c in [0.5, 1.0, 1.3, 1.7, 3.0] {
        // Binet's second formula for log Γ
        let want = 0.5 * (specfun::ln_gamma(c) - (c - 0.5) * c.ln() + c - 0.5 * (2.0 * PI).ln());
        binet = binet.max((specfun::bose_arctan_integral(c)? - want).abs());
    }
    Ok(vec![
        row("specfun", None, "zeta(2) = pi^2/6", (z2 - PI * PI / 6.0).abs(), 1e-13),
        row("specfun", None, "zeta(-1) = -1/12", (zm1 + 1.0 / 12.0).abs(), 1e-13),
        row("specfun", None, "zeta'(0) = -log(2pi)/2", (dz0 + 0.5 * (2.0 * PI).ln()).abs(), 1e-12),
        row("specfun", None, "arctan Bose integral vs Binet", binet, 1e-12),
    ])
}

// ---------------------------------------------------------------------------
// hypergeom

fn hypergeometric_suite(quick: bool) -> Result<Vec<CheckRow>> {
    let draws = if quick { 100 } else { 500 };
    let rep = hypergeom::identity_suite(draws, 0x5eed_0003)?;
    Ok(rep
        .max_residual
        .iter()
        .map(|(name, v)| row("hypergeom", Some(3), format!("{name} max residual"), *v, 1e-9))
        .collect())
}

// ---------------------------------------------------------------------------
// ramanujan

fn power(s: f64) -> HalfPlaneFunction<'static> {
    HalfPlaneFunction::new(move |z: Complex64| z.powf(-s), 0.5)
}

fn ramanujan_sums(quick: bool) -> Result<Vec<CheckRow>> {
    let terms = if quick { 2_000 } else { 10_000 };
    let mut rows = vec![
        row("ramanujan", Some(4), "R(x^-2) = pi^2/6 - 1", (ramanujan::ramanujan_sum(&power(2.0))? - (PI * PI / 6.0 - 1.0)).abs(), 1e-9),
        row("ramanujan", Some(4), "R(1/x) = Euler gamma", (ramanujan::ramanujan_sum(&power(1.0))? - specfun::EULER_GAMMA).abs(), 1e-9),
    ];
    for s in [1.5, 2.0, 3.0] {
        let v = match ramanujan::sum_split_check(&power(s), terms)? {
            Some(c) => c.residual,
            None => f64::INFINITY,
        };
        rows.push(row("ramanujan", Some(4), format!("split theorem residual at s={s}"), v, 1e-8));
    }
    Ok(rows)
}

fn ramanujan_extras() -> Result<Vec<CheckRow>> {
    let prof = ramanujan::hurwitz_mu_profile(&[0.0, 0.5, 3.0], &[1.5, 2.5])?;
    let worst = prof.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(vec![row("ramanujan", None, "Hurwitz zeta by Ramanujan vs Euler-Maclaurin", worst, 1e-9)])
}

// ---------------------------------------------------------------------------
// spectrum

fn spectrum_checks(quick: bool) -> Result<Vec<CheckRow>> {
    let (heights, lambda_max): (&[f64], f64) = if quick { (&[1.0], 100.0) } else { (&[0.5, 1.0, 2.0], 200.0) };
    let mut rows = Vec::new();
    for &a in heights {
        for alpha in [0.0, 0.3] {
            let g = Geometry::new(a, alpha)?;
            let eig = spectrum::eigenvalues_up_to(&g, lambda_max)?;
            let uncertified = eig.iter().filter(|e| !e.certified).count();
            let tag = format!("a={a} alpha={alpha}");
            rows.push(row("spectrum", Some(5), format!("{tag}: roots failing residual or simplicity, of {}", eig.len()), uncertified as f64, 0.0));
            if alpha == 0.0 {
                let mut asym: f64 = 0.0;
                for e in eig.iter().filter(|e| e.k > 0) {
                    let mirror = eig.iter().find(|m| m.k == -e.k && m.j == e.j);
                    asym = asym.max(mirror.map_or(f64::INFINITY, |m| (m.r - e.r).abs()));
                }
                rows.push(row("spectrum", Some(5), format!("{tag}: |r(k) - r(-k)|"), asym, 1e-12));
            }
            let grid: Vec<f64> = (1..=8).map(|i| lambda_max * i as f64 / 8.0).collect();
            let counts = spectrum::weyl_check(&g, &grid, 1.0)?;
            let excess = counts.iter().map(|c| c.n_empirical as f64 - c.weyl_bound).fold(f64::NEG_INFINITY, f64::max);
            rows.push(row("spectrum", Some(5), format!("{tag}: max N(lambda) - Weyl bound"), excess, 0.0));
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// zetadet

fn strip_equivalence(quick: bool) -> Result<Vec<CheckRow>> {
    let points: &[f64] = if quick { &[1.5] } else { &[1.25, 1.5, 1.75] };
    let trunc = Truncation { k_max: 5, r_max: 50.0 };
    let mut rows = Vec::new();
    for alpha in [0.0, 0.3] {
        let g = Geometry::new(1.0, alpha)?;
        for mu in [0.0, 1.0] {
            let p = SpectralZetaParams::new(g, mu, 0.06)?;
            for &s in points {
                let c = zetadet::strip_master_check(&p, s, trunc)?;
                rows.push(row("zetadet", Some(6), format!("alpha={alpha} mu={mu} s={s}: |sum strip - zeta_eig|"), c.difference, 1e-5));
            }
        }
    }
    let modes: Vec<i64> = (-5..=5).collect();
    for alpha in [0.0, 0.3] {
        let p = SpectralZetaParams::new(Geometry::new(1.0, alpha)?, 0.0, 0.06)?;
        let ks: Vec<i64> = modes.iter().copied().filter(|&k| !(alpha == 0.0 && k == 0)).collect();
        let ks: Vec<i64> = if quick { ks.into_iter().filter(|k| k.abs() <= 1).collect() } else { ks };
        let per_mode: Vec<Result<(f64, f64)>> = ks
            .par_iter()
            .map(|&k| {
                let mut ident: f64 = 0.0;
                let mut rform: f64 = 0.0;
                for s in [1.3, 1.7] {
                    let t = zetadet::split_terms_strip(&p, k, s)?;
                    let i = zetadet::mode_zeta_strip(&p, k, s)?;
                    for (name, r) in t.identity_residuals(i) {
                        if name == "R closed form" {
                            rform = rform.max(r);
                        } else {
                            ident = ident.max(r);
                        }
                    }
                }
                Ok((ident, rform))
            })
            .collect();
        let mut ident: f64 = 0.0;
        let mut rform: f64 = 0.0;
        for r in per_mode {
            let (i, f) = r?;
            ident = ident.max(i);
            rform = rform.max(f);
        }
        rows.push(row("zetadet", Some(6), format!("alpha={alpha}: L+M=I, L=A+B, M=Mtilde+R"), ident, 1e-8));
        rows.push(row("zetadet", Some(6), format!("alpha={alpha}: R closed form vs quadrature"), rform, 1e-8));
    }
    Ok(rows)
}

fn decay_rows(criterion: u8, tag: &str, rep: &zetadet::ResidualReport, threshold: bool) -> Vec<CheckRow> {
    let mut ratio: f64 = 0.0;
    for w in rep.rows.windows(2) {
        ratio = ratio.max(w[1].residual.abs() / w[0].residual.abs());
    }
    let mut decay = row("zetadet", Some(criterion), format!("{tag}: max |r| ratio along grid"), ratio, 1.0);
    decay.pass = rep.monotone_decay;
    let mut out = vec![decay];
    if threshold {
        let last = rep.rows.last().expect("non-empty grid");
        let mut t = row(
            "zetadet",
            Some(criterion),
            format!("{tag}: |r| at a={}", last.grid_value),
            last.residual.abs(),
            (1e-2f64).max(3.0 * last.est_error),
        );
        t.pass = rep.final_threshold;
        out.push(t);
    }
    out
}

fn a_asymptotics(_quick: bool) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for alpha in [0.0, 0.3] {
        let g = Geometry::new(1.0, alpha)?;
        let rep = zetadet::residual_report(&g, Regime::LargeA, &[5.0, 10.0, 20.0], 0.06)?;
        rows.extend(decay_rows(7, &format!("mu=0 alpha={alpha}"), &rep, true));
    }
    Ok(rows)
}

fn mu_asymptotics(quick: bool) -> Result<Vec<CheckRow>> {
    let grid: &[f64] = if quick { &[25.0, 100.0] } else { &[25.0, 100.0, 400.0] };
    let mut rows = Vec::new();
    for alpha in [0.0, 0.3] {
        let g = Geometry::new(1.0, alpha)?;
        let rep = zetadet::residual_report(&g, Regime::LargeMu, grid, 0.06)?;
        rows.extend(decay_rows(8, &format!("a=1 alpha={alpha}"), &rep, false));
        for &mu in grid {
            let d1 = zetadet::logdet(&SpectralZetaParams::new(g, mu, 0.06)?)?;
            let d2 = zetadet::logdet(&SpectralZetaParams::new(g, mu, 0.10)?)?;
            rows.push(row(
                "zetadet",
                Some(8),
                format!("a=1 alpha={alpha} mu={mu}: |logdet(delta=0.06) - logdet(delta=0.10)|"),
                (d1.logdet - d2.logdet).abs(),
                d1.est_error.max(d2.est_error),
            ));
        }
    }
    Ok(rows)
}

fn zetadet_extras() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let p = SpectralZetaParams::new(Geometry::new(1.0, 0.3)?, 0.0, 0.06)?;
    let mut f0: f64 = 0.0;
    let mut db: f64 = 0.0;
    for k in -3..=3 {
        f0 = f0.max(zetadet::f_mu_k(&p, k, p.nu0())?.abs());
        db = db.max(zetadet::term_derivatives_at_zero(&p, k)?.d_b0.abs());
    }
    rows.push(row("zetadet", None, "f(nu0) = 0", f0, 1e-12));
    rows.push(row("zetadet", None, "dB/ds at 0 = 0", db, 0.0));
    for (a, alpha) in [(1.0, 0.0), (2.0, 0.3)] {
        let g = Geometry::new(a, alpha)?;
        let rep = zetadet::logdet(&SpectralZetaParams::new(g, 0.0, 0.06)?)?;
        let want = zetadet::asymptotic_formula(&g, Regime::LargeA, 0.0)? - 1.0 / (3.0 * PI * a);
        rows.push(row("zetadet", None, format!("a={a} alpha={alpha} mu=0: logdet vs elementary closed form"), (rep.logdet - want).abs(), 1e-9));
        rows.push(row("zetadet", None, format!("a={a} alpha={alpha} mu=0: direct vs split route"), rep.diagnostics.route_difference, 1e-9));
    }
    Ok(rows)
}
