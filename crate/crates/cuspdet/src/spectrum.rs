//! Eigenvalues `λ = ¼ + r²` from the real zeros of `r ↦ K_{ir}(u_k)`,
//! spectral counting against the Weyl bound, and the eigenvalue-sum zeta.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quad::{self, Sum};
use crate::specfun::{self, ImagK};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub a: f64,
    pub alpha: f64,
}

impl Geometry {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Config(format!("cusp height must satisfy a > 0, got a = {a}")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Config(format!("holonomy must satisfy 0 ≤ α < 1, got α = {alpha}")));
        }
        Ok(Geometry { a, alpha })
    }

    pub fn trivial_bundle(&self) -> bool {
        self.alpha == 0.0
    }

    /// Modes ordered by increasing frequency on each side: `k ≥ 0` and `k < 0`.
    fn side_mode(&self, positive: bool, n: i64) -> i64 {
        if positive {
            if self.trivial_bundle() {
                n + 1
            } else {
                n
            }
        } else {
            -(n + 1)
        }
    }
}

pub fn mode_frequency(g: &Geometry, k: i64) -> Result<f64> {
    if g.trivial_bundle() && k == 0 {
        return Err(Error::Domain("mode k = 0 is removed when α = 0".into()));
    }
    Ok(2.0 * PI * (k as f64 + g.alpha).abs() * g.a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub k: i64,
    pub j: usize,
    pub r: f64,
    pub lambda: f64,
    /// `|e^{πr/2} K_{ir}(u_k)|` at the refined root.
    pub residual: f64,
    /// `∂_r (e^{πr/2} K_{ir}(u_k))` at the root.
    pub derivative: f64,
    pub certified: bool,
}

const RESIDUAL_REL: f64 = 1e-10;

/// Sign-preserving scaled value: `K̃(ν) e^{-shift}`.
fn scaled(k: &ImagK, shift: f64) -> f64 {
    (k.log_scale - shift).exp() * k.mantissa
}

fn refine_root(lo: f64, hi: f64, u: f64) -> Result<f64> {
    let shift = specfun::scaled_k_imag(lo, u)?.log_scale;
    let mut failure = None;
    let root = quad::brent(lo, hi, 4e-16 * hi.max(1.0), |nu| match specfun::scaled_k_imag(nu, u) {
        Ok(k) => scaled(&k, shift),
        Err(e) => {
            failure = Some(e);
            0.0
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    root.ok_or_else(|| Error::Numeric(format!("lost bracket [{lo}, {hi}] at u = {u}")))
}

fn certify(k: i64, j: usize, r: f64, u: f64) -> Result<EigenvalueRecord> {
    let at = specfun::scaled_k_imag(r, u)?;
    let residual = at.scaled_value().abs();
    let derivative = at.scaled_derivative();
    let tol = RESIDUAL_REL * (derivative.abs() * r).max(1.0);
    // central difference must straddle the root with a nonzero slope
    let h = 1e-6 * r.max(1.0);
    let left = specfun::scaled_k_imag(r - h, u)?;
    let right = specfun::scaled_k_imag(r + h, u)?;
    let shift = at.log_scale;
    let central = (scaled(&right, shift) - scaled(&left, shift)) / (2.0 * h);
    let simple = central != 0.0 && central.signum() == derivative.signum() && derivative.abs() > 10.0 * tol;
    Ok(EigenvalueRecord {
        k,
        j,
        r,
        lambda: 0.25 + r * r,
        residual,
        derivative,
        certified: residual <= tol && simple,
    })
}

/// Sign changes of `K̃` on `(lo, hi]`, refining cells around local minima of `|K̃|`.
fn scan_brackets(u: f64, lo: f64, hi: f64, step: f64, depth: u32) -> Result<Vec<(f64, f64)>> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut grid = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let nu = if i == n { hi } else { lo + i as f64 * h };
        let k = specfun::scaled_k_imag(nu, u)?;
        grid.push((nu, k.mantissa, k.log_scale));
    }
    let mut out = Vec::new();
    for i in 0..n {
        let (x0, m0, _) = grid[i];
        let (x1, m1, _) = grid[i + 1];
        if m0 == 0.0 && i > 0 {
            continue;
        }
        if m1 == 0.0 || m0.signum() != m1.signum() {
            out.push((x0, x1));
            continue;
        }
        // an interior minimum of |K̃| with no sign change may hide a close pair
        if depth > 0 && i + 2 <= n {
            let (_, m2, _) = grid[i + 2];
            let v = |m: f64, ls: f64| m.abs().ln() + ls;
            let mid = v(m1, grid[i + 1].2);
            if m1.signum() == m2.signum()
                && mid < v(m0, grid[i].2)
                && mid < v(m2, grid[i + 2].2)
                && mid < -3.0
            {
                let sub = scan_brackets(u, x0, grid[i + 2].0, h / 16.0, depth - 1)?;
                out.extend(sub);
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

/// All zeros of `r ↦ K_{ir}(u_k)` in `(0, r_max]`, increasing.
pub fn find_mode_zeros(g: &Geometry, k: i64, r_max: f64) -> Result<Vec<EigenvalueRecord>> {
    if !(r_max > 0.0) {
        return Err(Error::Domain(format!("r_max must be positive, got {r_max}")));
    }
    let u = mode_frequency(g, k)?;
    let step = (u / 100.0).min(0.05);
    let brackets = scan_brackets(u, 0.0, r_max, step, 2)?;
    let mut out = Vec::with_capacity(brackets.len());
    for (j, (lo, hi)) in brackets.into_iter().enumerate() {
        let r = refine_root(lo, hi, u)?;
        if r <= 0.0 {
            continue;
        }
        out.push(certify(k, j + 1, r, u)?);
    }
    for w in out.windows(2) {
        if !(w[1].r > w[0].r) {
            return Err(Error::Numeric(format!("unresolved zero pair near r = {} in mode {k}", w[0].r)));
        }
    }
    Ok(out)
}

/// Zeros of every mode with some `λ ≤ lambda_max`, sorted by `(k, j)`.
///
/// Each side of the mode line is walked outwards until three consecutive
/// modes have no zero below `r_max`.
pub fn eigenvalues_up_to(g: &Geometry, lambda_max: f64) -> Result<Vec<EigenvalueRecord>> {
    if !(lambda_max > 0.25) {
        return Err(Error::Domain(format!("lambda_max must exceed 1/4, got {lambda_max}")));
    }
    let r_max = (lambda_max - 0.25).sqrt();
    let mut all = Vec::new();
    for positive in [true, false] {
        let batch = 4;
        let mut n = 0;
        let mut empty_run = 0;
        'side: loop {
            let modes: Vec<i64> = (n..n + batch).map(|i| g.side_mode(positive, i)).collect();
            let found: Vec<Result<Vec<EigenvalueRecord>>> =
                modes.par_iter().map(|&k| find_mode_zeros(g, k, r_max)).collect();
            for zeros in found {
                let zeros = zeros?;
                if zeros.is_empty() {
                    empty_run += 1;
                } else {
                    if empty_run > 0 {
                        return Err(Error::Numeric("mode cutoff not monotone: zeros reappeared after an empty mode".into()));
                    }
                    all.extend(zeros.into_iter().filter(|z| z.lambda <= lambda_max));
                }
                if empty_run >= 3 {
                    break 'side;
                }
            }
            n += batch;
        }
    }
    all.sort_by(|a, b| a.k.cmp(&b.k).then(a.j.cmp(&b.j)));
    Ok(all)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub lambda: f64,
    pub n_empirical: usize,
    pub weyl_bound: f64,
    pub pass: bool,
}

/// Explicit counting bound. The `α ≠ 0` form carries the conservative
/// constant `5 + δ/a` on the linear term.
pub fn weyl_bound(g: &Geometry, lambda: f64, delta: f64) -> f64 {
    let a = g.a;
    let sq = lambda.sqrt();
    let log_term = sq * lambda.ln() / (2.0 * PI * delta);
    if g.trivial_bundle() {
        sq / (PI * a) + (1.0 + delta / a) * lambda / (4.0 * PI * a) + log_term
    } else {
        (5.0 + delta / a) * lambda / (4.0 * PI * a) + log_term
    }
}

pub fn weyl_check(g: &Geometry, lambdas: &[f64], delta: f64) -> Result<Vec<CountReport>> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("Weyl parameter δ must be positive, got {delta}")));
    }
    if let Some(bad) = lambdas.iter().find(|&&l| !(l > 1.0)) {
        return Err(Error::Domain(format!("Weyl bound needs λ > 1, got {bad}")));
    }
    let Some(top) = lambdas.iter().cloned().reduce(f64::max) else {
        return Ok(Vec::new());
    };
    let eig = eigenvalues_up_to(g, top)?;
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let n = eig.iter().filter(|e| e.lambda <= lambda).count();
            let bound = weyl_bound(g, lambda, delta);
            CountReport { lambda, n_empirical: n, weyl_bound: bound, pass: n as f64 <= bound }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Eigenvalue-sum zeta

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Modes `|k| ≤ k_max`.
    pub k_max: u32,
    pub r_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeZetaEig {
    pub k: i64,
    pub zeros: usize,
    pub partial: f64,
    pub tail: f64,
    pub tail_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaEig {
    /// `Σ (λ+μ)^{-s}` over every eigenvalue of the modes `|k| ≤ k_max`:
    /// found eigenvalues plus the per-mode Debye-phase tail beyond `r_max`.
    pub value: f64,
    /// Estimated error of `value` (tail model only).
    pub tail_bound: f64,
    pub partial: f64,
    pub asymptotic_tail: f64,
    /// Weyl-inequality bound on `Σ_{λ > ¼ + r_max²} (λ+μ)^{-s}` over all modes.
    pub weyl_tail_bound: f64,
    pub modes: Vec<ModeZetaEig>,
}

/// Correction to the Debye phase of `K̃`: zeros satisfy
/// `Φ(r) − (5t³ − 3t)/(24r) ≈ π(j − ¼)` with `t = r/√(r² − u²)`.
fn phase(r: f64, u: f64, corrected: bool) -> (f64, f64) {
    let w = (r * r - u * u).sqrt();
    let ac = (r / u).acosh();
    let phi = r * ac - w;
    if !corrected {
        return (phi, ac);
    }
    let t = r / w;
    let c = (5.0 * t.powi(3) - 3.0 * t) / (24.0 * r);
    let dt = -t.powi(3) * u * u / r.powi(3);
    let dc = (15.0 * t * t - 3.0) * dt / (24.0 * r) - c / r;
    (phi - c, ac - dc)
}

fn phase_inverse(target: f64, u: f64, corrected: bool, r_floor: f64) -> Option<f64> {
    let lo = r_floor.max(u * (1.0 + 1e-9));
    let f = |r: f64| phase(r, u, corrected).0 - target;
    let mut hi = lo.max(1.0) * 2.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    if f(lo) >= 0.0 {
        return Some(lo);
    }
    quad::brent(lo, hi, 1e-14 * hi, f)
}

/// `Σ_{j > J} g(r_j)` for `g(r) = (r² + ν₀²)^{-s}` from the phase model, by
/// the midpoint Euler-Maclaurin formula in `j`.
fn debye_tail_with(u: f64, zeros_found: usize, omega: f64, nu0: f64, s: f64, corrected: bool) -> Option<(f64, f64)> {
    let j_half = zeros_found as f64 + 0.5;
    let floor = if corrected { 1.05 * u } else { u };
    let r_lo = phase_inverse(PI * (j_half - 0.25) + omega, u, corrected, floor)?;
    let g = |r: f64| (r * r + nu0 * nu0).powf(-s);
    let integral = quad::exp_sinh(r_lo, r_lo, 1e-13, |r, _| g(r) * phase(r, u, corrected).1 / PI).value;
    let dg = -2.0 * s * r_lo * (r_lo * r_lo + nu0 * nu0).powf(-s - 1.0);
    let em = dg * PI / phase(r_lo, u, corrected).1 / 24.0;
    Some((integral + em, em))
}

/// Tail beyond the last found zero and an error estimate from refitting the
/// phase offset one zero earlier.
pub fn debye_tail(u: f64, zeros: &[f64], nu0: f64, s: f64) -> Result<(f64, f64)> {
    let fail = || Error::Numeric(format!("phase inversion failed for u = {u}"));
    let n = zeros.len();
    let usable = |r: f64| r > 1.2 * u;
    if n >= 2 && usable(zeros[n - 2]) {
        let omega = |j: usize| phase(zeros[j - 1], u, true).0 - PI * (j as f64 - 0.25);
        let (tail, em) = debye_tail_with(u, n, omega(n), nu0, s, true).ok_or_else(fail)?;
        let (alt, _) = debye_tail_with(u, n, omega(n - 1), nu0, s, true).ok_or_else(fail)?;
        Ok((tail, (tail - alt).abs() + 0.05 * em.abs()))
    } else {
        let (tail, em) = debye_tail_with(u, n, 0.0, nu0, s, false).ok_or_else(fail)?;
        Ok((tail, 0.05 * tail.abs() + em.abs()))
    }
}

fn weyl_tail(g: &Geometry, mu: f64, s: f64, big_lambda: f64) -> f64 {
    let start = big_lambda.max(1.0 + 1e-12);
    let head = if big_lambda < start {
        // eigenvalues in (Λ, 1] counted through the bound at 1
        weyl_bound(g, start, 1.0) * (big_lambda + mu).powf(-s)
    } else {
        0.0
    };
    let integral = quad::exp_sinh(start, start, 1e-12, |l, _| weyl_bound(g, l, 1.0) * (l + mu).powf(-s - 1.0)).value;
    head + s * integral
}

pub fn zeta_eig(g: &Geometry, mu: f64, s: f64, trunc: Truncation) -> Result<ZetaEig> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("eigenvalue zeta diverges for s ≤ 1, got s = {s}")));
    }
    if !(mu >= 0.0) {
        return Err(Error::Config(format!("spectral shift must satisfy μ ≥ 0, got μ = {mu}")));
    }
    let nu0 = (0.25 + mu).sqrt();
    let k_max = trunc.k_max as i64;
    let modes: Vec<i64> = (-k_max..=k_max).filter(|&k| !(g.trivial_bundle() && k == 0)).collect();
    let per_mode: Vec<Result<ModeZetaEig>> = modes
        .par_iter()
        .map(|&k| {
            let u = mode_frequency(g, k)?;
            let zeros = find_mode_zeros(g, k, trunc.r_max)?;
            let rs: Vec<f64> = zeros.iter().map(|z| z.r).collect();
            let partial = quad::sum_iter(rs.iter().rev().map(|r| (r * r + nu0 * nu0).powf(-s)));
            let (tail, tail_error) = debye_tail(u, &rs, nu0, s)?;
            Ok(ModeZetaEig { k, zeros: rs.len(), partial, tail, tail_error })
        })
        .collect();
    let modes = per_mode.into_iter().collect::<Result<Vec<_>>>()?;
    let mut partial = Sum::new();
    let mut tail = Sum::new();
    let mut err = 0.0;
    for m in &modes {
        partial.add(m.partial);
        tail.add(m.tail);
        err += m.tail_error;
    }
    let big_lambda = 0.25 + trunc.r_max * trunc.r_max;
    Ok(ZetaEig {
        value: partial.value() + tail.value(),
        tail_bound: err,
        partial: partial.value(),
        asymptotic_tail: tail.value(),
        weyl_tail_bound: weyl_tail(g, mu, s, big_lambda),
        modes,
    })
}
