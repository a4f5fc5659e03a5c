//! Gauss hypergeometric function on the real half-line `z < 1`, the
//! generalized `₃F₂` series, and residuals of the classical identities.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::quad::{self, Sum};
use crate::specfun::{gamma, rgamma};
use crate::{Error, Result};

const SERIES_CAP: usize = 100_000;
const TARGET: f64 = 1e-16;

fn nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn near_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() < tol
}

/// Raw series `Σ (a)ₙ(b)ₙ/(c)ₙ zⁿ/n!`.
pub fn series_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::Pole(format!("c = {c} is a non-positive integer")));
    }
    if z.abs() >= 1.0 {
        return Err(Error::Domain(format!("series needs |z| < 1, got {z}")));
    }
    let mut acc = Sum::new();
    let mut term = 1.0;
    acc.add(term);
    let mut small = 0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        acc.add(term);
        if term == 0.0 {
            break;
        }
        if term.abs() < TARGET * acc.value().abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(acc.value())
}

/// Euler integral, valid for `c > b > 0` and `z < 1`.
fn euler_integral_2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let pref = gamma(c) * rgamma(b) * rgamma(c - b);
    let r = quad::tanh_sinh(0.0, 1.0, 1e-15, |t, d| {
        let (t, one_minus_t) = if t < 0.5 { (d, 1.0 - d) } else { (t, d) };
        t.powf(b - 1.0) * one_minus_t.powf(c - b - 1.0) * (1.0 - z * t).powf(-a)
    });
    pref * r.value
}

/// `F(a, b; c; z)` on `[0, 1)`: series below 1/2, linear transformation above.
fn f_unit_interval(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z <= 0.5 || nonpositive_integer(a) || nonpositive_integer(b) {
        return series_2f1(a, b, c, z);
    }
    let d = c - a - b;
    if !near_integer(d, 1e-6) {
        let w = 1.0 - z;
        let t1 = gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b);
        let t2 = gamma(c) * gamma(-d) * rgamma(a) * rgamma(b);
        let f1 = if t1 == 0.0 { 0.0 } else { series_2f1(a, b, 1.0 - d, w)? };
        let f2 = if t2 == 0.0 { 0.0 } else { series_2f1(c - a, c - b, d + 1.0, w)? };
        return Ok(t1 * f1 + w.powf(d) * t2 * f2);
    }
    if c > b && b > 0.0 {
        return Ok(euler_integral_2f1(a, b, c, z));
    }
    if c > a && a > 0.0 {
        return Ok(euler_integral_2f1(b, a, c, z));
    }
    if z <= 0.999 {
        return series_2f1(a, b, c, z);
    }
    Err(Error::Numeric(format!(
        "F({a}, {b}; {c}; {z}): c − a − b is an integer and no fallback applies"
    )))
}

pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::Pole(format!("c = {c} is a non-positive integer")));
    }
    if !(z < 1.0) {
        return Err(Error::Domain(format!("need z < 1, got {z}")));
    }
    if ![a, b, c, z].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("non-finite parameter".into()));
    }
    if z >= -0.5 {
        return f_unit_interval(a, b, c, z);
    }
    // Pfaff: F(a,b;c;z) = (1−z)^{−a} F(a, c−b; c; z/(z−1)), pick the branch
    // that keeps the transformed problem non-degenerate when possible
    let w = z / (z - 1.0);
    let first = ((1.0 - z).powf(-a), a, c - b);
    let second = ((1.0 - z).powf(-b), b, c - a);
    let degenerate = |p: &(f64, f64, f64)| w > 0.5 && near_integer(c - p.1 - p.2, 1e-6);
    let (pref, x, y) = if degenerate(&first) && !degenerate(&second) { second } else { first };
    Ok(pref * f_unit_interval(x, y, c, w)?)
}

pub fn generalized_3f2(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64, z: f64) -> Result<f64> {
    if nonpositive_integer(b1) || nonpositive_integer(b2) {
        return Err(Error::Pole(format!("lower parameter non-positive integer: {b1}, {b2}")));
    }
    if z.abs() >= 1.0 {
        return Err(Error::Domain(format!("₃F₂ series needs |z| < 1, got {z}")));
    }
    let mut acc = Sum::new();
    let mut term = 1.0;
    acc.add(term);
    let mut small = 0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (a1 + nf) * (a2 + nf) * (a3 + nf) / ((b1 + nf) * (b2 + nf) * (nf + 1.0)) * z;
        acc.add(term);
        if term == 0.0 {
            break;
        }
        if term.abs() < TARGET * acc.value().abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(acc.value())
}

/// `Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b))`.
pub fn gauss_value_at_1(a: f64, b: f64, c: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::Pole(format!("c = {c} is a non-positive integer")));
    }
    if !(c - a - b > 0.0) {
        return Err(Error::Domain(format!("series diverges at z = 1: c − a − b = {}", c - a - b)));
    }
    Ok(gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b))
}

/// The two closed forms of `∫₀^u y^{μ−1} (1+y)^{−ν} dy`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailIntegral {
    pub via_inverse_argument: Option<f64>,
    pub via_euler: f64,
}

pub fn tail_integral_forms(mu: f64, nu: f64, u: f64) -> Result<TailIntegral> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("need μ > 0, got {mu}")));
    }
    if !(u > 0.0) {
        return Err(Error::Domain(format!("need u > 0, got {u}")));
    }
    let via_euler = u.powf(mu) * (1.0 + u).powf(-nu) / mu * gauss_2f1(nu, 1.0, mu + 1.0, u / (1.0 + u))?;
    let d = nu - mu;
    let via_inverse_argument = if nonpositive_integer(d) || nonpositive_integer(d + 1.0) {
        None
    } else {
        let f = gauss_2f1(nu, d, d + 1.0, -1.0 / u)?;
        Some(u.powf(-d) / (-d) * f + gamma(mu) * gamma(d) * rgamma(nu))
    };
    Ok(TailIntegral { via_inverse_argument, via_euler })
}

pub fn tail_integral(mu: f64, nu: f64, u: f64) -> Result<f64> {
    Ok(tail_integral_forms(mu, nu, u)?.via_euler)
}

pub fn tail_integral_quadrature(mu: f64, nu: f64, u: f64) -> f64 {
    quad::tanh_sinh(0.0, u, 1e-15, |y, d| {
        let y = if y < 0.5 * u { d } else { y };
        y.powf(mu - 1.0) * (1.0 + y).powf(-nu)
    })
    .value
}

fn rel_residual(x: f64, y: f64) -> f64 {
    (x - y).abs() / 1f64.max(x.abs()).max(y.abs())
}

/// Relative residuals `|LHS − RHS| / max(1, |LHS|, |RHS|)`; `None` when the
/// identity is degenerate or outside its domain at this parameter point.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IdentityResiduals {
    pub pfaff: Option<f64>,
    pub linear_transformation: Option<f64>,
    pub contiguous: Option<f64>,
    pub extraction_unit_parameter: Option<f64>,
    pub extraction_3f2_one_term: Option<f64>,
    pub extraction_3f2_two_terms: Option<f64>,
}

impl IdentityResiduals {
    pub fn entries(&self) -> [(&'static str, Option<f64>); 6] {
        [
            ("pfaff", self.pfaff),
            ("linear_transformation", self.linear_transformation),
            ("contiguous", self.contiguous),
            ("extraction_unit_parameter", self.extraction_unit_parameter),
            ("extraction_3f2_one_term", self.extraction_3f2_one_term),
            ("extraction_3f2_two_terms", self.extraction_3f2_two_terms),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().filter_map(|e| e.1).fold(0.0, f64::max)
    }
}

pub fn identity_residuals(a: f64, b: f64, c: f64, z: f64) -> Result<IdentityResiduals> {
    let mut out = IdentityResiduals::default();
    if nonpositive_integer(c) || !(z < 1.0) {
        return Err(Error::Domain(format!("inadmissible point a={a}, b={b}, c={c}, z={z}")));
    }
    if z.abs() < 1.0 && z < 0.5 {
        let lhs = series_2f1(a, b, c, z)?;
        let rhs = (1.0 - z).powf(-a) * series_2f1(a, c - b, c, z / (z - 1.0))?;
        out.pfaff = Some(rel_residual(lhs, rhs));
    }
    let d = c - a - b;
    if z > 0.3 && z < 0.95 && !near_integer(d, 0.05) {
        let lhs = series_2f1(a, b, c, z)?;
        let w = 1.0 - z;
        let rhs = gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b) * series_2f1(a, b, 1.0 - d, w)?
            + w.powf(d) * gamma(c) * gamma(-d) * rgamma(a) * rgamma(b) * series_2f1(c - a, c - b, d + 1.0, w)?;
        out.linear_transformation = Some(rel_residual(lhs, rhs));
    }
    if !nonpositive_integer(c - 1.0) {
        let f = gauss_2f1(a, b, c, z)?;
        let fm = gauss_2f1(a - 1.0, b, c, z)?;
        let fc = gauss_2f1(a, b, c - 1.0, z)?;
        let t1 = (a - 1.0 + (b + 1.0 - c) * z) * f;
        let t2 = (c - a) * fm;
        let t3 = (c - 1.0) * (1.0 - z) * fc;
        let scale = 1f64.max(t1.abs()).max(t2.abs()).max(t3.abs());
        out.contiguous = Some((t1 + t2 - t3).abs() / scale);
    }
    if z.abs() < 1.0 {
        let lhs = gauss_2f1(a, 1.0, c, z)?;
        let rhs = 1.0 + a / c * z + a * (a + 1.0) / (c * (c + 1.0)) * z * z * gauss_2f1(a + 2.0, 1.0, c + 2.0, z)?;
        out.extraction_unit_parameter = Some(rel_residual(lhs, rhs));
        let f = gauss_2f1(a, b, c, z)?;
        let one = 1.0 + a * b / c * z * generalized_3f2(a + 1.0, b + 1.0, 1.0, c + 1.0, 2.0, z)?;
        out.extraction_3f2_one_term = Some(rel_residual(f, one));
        let two = 1.0
            + a * b / c * z
            + a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0)) * 0.5 * z * z
                * generalized_3f2(a + 2.0, b + 2.0, 1.0, c + 2.0, 3.0, z)?;
        out.extraction_3f2_two_terms = Some(rel_residual(f, two));
    }
    Ok(out)
}

/// `|Γ-ratio − Euler beta integral|` at `z = 1`; needs `b > 0`, `c − b > 0`, `c − a − b > 0`.
pub fn gauss_at_1_residual(a: f64, b: f64, c: f64) -> Result<f64> {
    let v = gauss_value_at_1(a, b, c)?;
    if !(b > 0.0 && c - b > 0.0) {
        return Err(Error::Domain("Euler integral needs c > b > 0".into()));
    }
    let e = c - a - b;
    let beta = quad::tanh_sinh(0.0, 1.0, 1e-15, |t, d| {
        let (t, one_minus_t) = if t < 0.5 { (d, 1.0 - d) } else { (t, d) };
        t.powf(b - 1.0) * one_minus_t.powf(e - 1.0)
    });
    let integral = gamma(c) * rgamma(b) * rgamma(c - b) * beta.value;
    Ok(rel_residual(v, integral))
}

/// Pairwise relative residuals of the two closed forms and quadrature.
pub fn tail_integral_residual(mu: f64, nu: f64, u: f64) -> Result<f64> {
    let forms = tail_integral_forms(mu, nu, u)?;
    let q = tail_integral_quadrature(mu, nu, u);
    let mut r = rel_residual(forms.via_euler, q);
    if let Some(v) = forms.via_inverse_argument {
        r = r.max(rel_residual(v, q)).max(rel_residual(v, forms.via_euler));
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentitySuiteReport {
    pub draws: usize,
    pub max_residual: Vec<(String, f64)>,
    pub checked: Vec<(String, usize)>,
}

impl IdentitySuiteReport {
    pub fn worst(&self) -> f64 {
        self.max_residual.iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

fn draw_away_from_integers(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = rng.gen_range(lo..hi);
        if !near_integer(v, 0.02) {
            return v;
        }
    }
}

/// All identity residuals on `draws` seeded random admissible points.
pub fn identity_suite(draws: usize, seed: u64) -> Result<IdentitySuiteReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let names = [
        "pfaff",
        "linear_transformation",
        "contiguous",
        "extraction_unit_parameter",
        "extraction_3f2_one_term",
        "extraction_3f2_two_terms",
        "gauss_at_1",
        "tail_integral",
    ];
    let mut worst = vec![0.0f64; names.len()];
    let mut count = vec![0usize; names.len()];
    for _ in 0..draws {
        let a = draw_away_from_integers(&mut rng, -2.0, 3.0);
        let b = draw_away_from_integers(&mut rng, -2.0, 3.0);
        let c = draw_away_from_integers(&mut rng, 0.1, 4.0);
        let z = rng.gen_range(-0.9..0.9);
        let r = identity_residuals(a, b, c, z)?;
        for (i, (_, v)) in r.entries().iter().enumerate() {
            if let Some(v) = v {
                worst[i] = worst[i].max(*v);
                count[i] += 1;
            }
        }
        let b1 = rng.gen_range(0.1..2.5);
        let c1 = b1 + rng.gen_range(0.1..2.0);
        let a1 = c1 - b1 - rng.gen_range(0.1..2.0);
        worst[6] = worst[6].max(gauss_at_1_residual(a1, b1, c1)?);
        count[6] += 1;
        let mu = rng.gen_range(0.2..3.0);
        let nu = mu + draw_away_from_integers(&mut rng, 0.1, 3.0);
        let u = 10f64.powf(rng.gen_range(-1.0..1.0));
        worst[7] = worst[7].max(tail_integral_residual(mu, nu, u)?);
        count[7] += 1;
    }
    Ok(IdentitySuiteReport {
        draws,
        max_residual: names.iter().map(|n| n.to_string()).zip(worst).collect(),
        checked: names.iter().map(|n| n.to_string()).zip(count).collect(),
    })
}
