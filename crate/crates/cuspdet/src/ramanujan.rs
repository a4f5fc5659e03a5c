//! Ramanujan summation of functions analytic on a right half-plane:
//! `R(f) = ½f(1) + i∫₀^∞ (f(1+it) − f(1−it)) / (e^{2πt} − 1) dt`.

use std::f64::consts::PI;

use num::complex::Complex64;
use serde::Serialize;

use crate::quad::{self, Sum};
use crate::specfun;
use crate::{Error, Result};

/// Function analytic on `Re z > a0` (`0 < a0 < 1`) of exponential type below
/// `2π`. Analyticity and growth are the caller's responsibility.
pub struct HalfPlaneFunction<'a> {
    pub eval: Box<dyn Fn(Complex64) -> Complex64 + Sync + 'a>,
    pub a0: f64,
    pub exponential_type: f64,
}

impl<'a> HalfPlaneFunction<'a> {
    pub fn new<F: Fn(Complex64) -> Complex64 + Sync + 'a>(f: F, a0: f64) -> Self {
        HalfPlaneFunction { eval: Box::new(f), a0, exponential_type: 0.0 }
    }

    pub fn at(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn real(&self, x: f64) -> f64 {
        self.at(Complex64::new(x, 0.0)).re
    }

    fn validate(&self) -> Result<()> {
        if !(self.a0 < 1.0) {
            return Err(Error::Precondition(format!("half-plane abscissa a0 = {} must be < 1", self.a0)));
        }
        if !(self.exponential_type < 2.0 * PI) {
            return Err(Error::Precondition("declared exponential type must be < 2π".into()));
        }
        Ok(())
    }
}

/// `i (f(1+it) − f(1−it)) / (e^{2πt} − 1)`, written as a difference quotient
/// times `t/(e^{2πt} − 1)` so it stays finite as `t → 0`.
pub fn kernel_integrand(f: &HalfPlaneFunction, t: f64) -> Complex64 {
    let bose = if t == 0.0 { 1.0 / (2.0 * PI) } else { t / (2.0 * PI * t).exp_m1() };
    if t == 0.0 {
        // derivative limit 2i f'(1) by a symmetric complex difference
        let h = 1e-6;
        let d = (f.at(Complex64::new(1.0, h)) - f.at(Complex64::new(1.0, -h))) / h;
        return Complex64::i() * d * bose;
    }
    let diff = (f.at(Complex64::new(1.0, t)) - f.at(Complex64::new(1.0, -t))) / t;
    Complex64::i() * diff * bose
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RamanujanSum {
    pub value: f64,
    /// Imaginary part of the result, zero for functions real on the real axis.
    pub imaginary: f64,
    pub kernel_integral: f64,
    pub quad_error: f64,
}

pub fn ramanujan_sum_detailed(f: &HalfPlaneFunction) -> Result<RamanujanSum> {
    f.validate()?;
    let comp = |t: f64| kernel_integrand(f, t);
    let mut re = Sum::new();
    let mut im = Sum::new();
    let mut err = 0.0;
    for part in 0..2 {
        let (r_re, r_im) = if part == 0 {
            (
                quad::gauss_kronrod(0.0, 1.0, 1e-16, 1e-14, |t| comp(t).re),
                quad::gauss_kronrod(0.0, 1.0, 1e-16, 1e-14, |t| comp(t).im),
            )
        } else {
            let mapped = |v: f64, im: bool| {
                let w = 1.0 - v;
                if w <= 0.0 {
                    return 0.0;
                }
                let c = comp(1.0 + v / w) / (w * w);
                if im {
                    c.im
                } else {
                    c.re
                }
            };
            (
                quad::gauss_kronrod(0.0, 1.0, 1e-17, 1e-14, |v| mapped(v, false)),
                quad::gauss_kronrod(0.0, 1.0, 1e-17, 1e-14, |v| mapped(v, true)),
            )
        };
        re.add(r_re.value);
        im.add(r_im.value);
        err += r_re.error + r_im.error;
    }
    let f1 = f.at(Complex64::new(1.0, 0.0));
    let kernel = re.value();
    let v = 0.5 * f1 + Complex64::new(kernel, im.value());
    if !v.re.is_finite() {
        return Err(Error::Numeric("non-finite Ramanujan sum".into()));
    }
    Ok(RamanujanSum { value: v.re, imaginary: v.im, kernel_integral: kernel, quad_error: err })
}

pub fn ramanujan_sum(f: &HalfPlaneFunction) -> Result<f64> {
    Ok(ramanujan_sum_detailed(f)?.value)
}

/// `f^{(n)}(x)` for real `x` by the Cauchy integral on a circle of radius `r`.
pub fn cauchy_derivative(f: &HalfPlaneFunction, x: f64, r: f64, n: u32) -> f64 {
    let m = 64;
    let mut acc = Sum::new();
    for j in 0..m {
        let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
        let e = Complex64::from_polar(1.0, th);
        let v = f.at(Complex64::new(x, 0.0) + r * e) * e.powi(-(n as i32));
        acc.add(v.re);
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    fact * acc.value() / (m as f64 * r.powi(n as i32))
}

/// `Σ_{k>K} f(k)` by Euler-Maclaurin from `K`.
pub fn euler_maclaurin_tail(f: &HalfPlaneFunction, k: f64) -> f64 {
    let r = 0.5 * (k - f.a0);
    let integral = quad::exp_sinh(k, k.max(1.0), 1e-15, |x, _| f.real(x)).value;
    let d1 = cauchy_derivative(f, k, r, 1);
    let d3 = cauchy_derivative(f, k, r, 3);
    let d5 = cauchy_derivative(f, k, r, 5);
    integral - 0.5 * f.real(k) - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SplitCheck {
    pub partial_sum: f64,
    pub tail: f64,
    pub integral: f64,
    pub ramanujan: f64,
    pub residual: f64,
}

/// `|Σ_{k≤K} f(k) + tail − ∫₁^∞ f − R(f)|`; `None` for a divergent series.
pub fn sum_split_check(f: &HalfPlaneFunction, k_terms: usize) -> Result<Option<SplitCheck>> {
    let kf = k_terms as f64;
    let (f1, f2) = (f.real(kf), f.real(2.0 * kf));
    if f1 != 0.0 {
        let decay = -(f2 / f1).abs().log2();
        if decay < 1.05 {
            return Ok(None);
        }
    }
    let partial = quad::sum_iter((1..=k_terms).rev().map(|k| f.real(k as f64)));
    let tail = euler_maclaurin_tail(f, kf);
    let integral = quad::exp_sinh(1.0, 1.0, 1e-15, |x, _| f.real(x)).value;
    let rs = ramanujan_sum(f)?;
    let residual = (partial + tail - integral - rs).abs();
    Ok(Some(SplitCheck { partial_sum: partial, tail, integral, ramanujan: rs, residual }))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HurwitzProfileRow {
    pub mu: f64,
    pub s: f64,
    pub ramanujan_route: f64,
    pub euler_maclaurin_route: f64,
    pub residual: f64,
}

/// `ζ_H(s, 1+μ) = (1+μ)^{1−s}/(s−1) + R((x+μ)^{−s})` against Euler-Maclaurin.
pub fn hurwitz_mu_profile(mus: &[f64], ss: &[f64]) -> Result<Vec<HurwitzProfileRow>> {
    let mut rows = Vec::new();
    for &mu in mus {
        if !(mu >= 0.0) {
            return Err(Error::Domain(format!("need μ ≥ 0, got {mu}")));
        }
        for &s in ss {
            let f = HalfPlaneFunction::new(move |z: Complex64| (z + mu).powf(-s), 0.5);
            let r = ramanujan_sum(&f)? + (1.0 + mu).powf(1.0 - s) / (s - 1.0);
            let em = specfun::hurwitz_zeta(s, 1.0 + mu)?;
            rows.push(HurwitzProfileRow {
                mu,
                s,
                ramanujan_route: r,
                euler_maclaurin_route: em,
                residual: (r - em).abs(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn power(s: f64) -> HalfPlaneFunction<'static> {
        HalfPlaneFunction::new(move |z: Complex64| z.powf(-s), 0.5)
    }

    #[test]
    fn constant_gives_half() {
        let f = HalfPlaneFunction::new(|_| Complex64::new(3.0, 0.0), 0.5);
        assert!((ramanujan_sum(&f).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn inverse_square_and_harmonic() {
        let v = ramanujan_sum(&power(2.0)).unwrap();
        assert!((v - (PI * PI / 6.0 - 1.0)).abs() < 1e-12);
        let v = ramanujan_sum(&power(1.0)).unwrap();
        assert!((v - specfun::EULER_GAMMA).abs() < 1e-12);
        // independent route for 1/x: ½ + 2∫ t/((1+t²)(e^{2πt}−1)) dt
        let q = quad::exp_sinh(0.0, 0.3, 1e-15, |t, _| t / ((1.0 + t * t) * (2.0 * PI * t).exp_m1())).value;
        assert!((0.5 + 2.0 * q - v).abs() < 1e-12);
    }

    #[test]
    fn split_theorem_power_family() {
        for &s in &[1.5, 2.0, 3.0] {
            let c = sum_split_check(&power(s), 10_000).unwrap().unwrap();
            assert!(c.residual < 1e-8, "s={s}: {c:?}");
        }
        let c = sum_split_check(&power(3.0), 10_000).unwrap().unwrap();
        assert!((c.integral - 0.5).abs() < 1e-13);
    }

    #[test]
    fn split_theorem_exponential() {
        let f = HalfPlaneFunction::new(|z: Complex64| (-z).exp(), 0.5);
        let c = sum_split_check(&f, 40).unwrap().unwrap();
        assert!(c.residual < 1e-10);
        assert!((c.partial_sum + c.tail - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn divergent_series_flagged() {
        assert!(sum_split_check(&power(1.0), 1000).unwrap().is_none());
    }

    #[test]
    fn kernel_bounded_near_zero() {
        let f = power(2.0);
        let a = kernel_integrand(&f, 1e-6).norm();
        let b = kernel_integrand(&f, 1e-8).norm();
        let c = kernel_integrand(&f, 0.0).norm();
        assert!(a.is_finite() && b.is_finite());
        assert!((a - c).abs() < 1e-4 * c && (b - c).abs() < 1e-4 * c);
    }

    #[test]
    fn hurwitz_profile_points() {
        let rows = hurwitz_mu_profile(&[0.0], &[2.0]).unwrap();
        assert!((rows[0].ramanujan_route - PI * PI / 6.0).abs() < 1e-9);
        assert!(rows[0].residual < 1e-9);
        let rows = hurwitz_mu_profile(&[3.0], &[0.0]).unwrap();
        assert!((rows[0].ramanujan_route + 3.5).abs() < 1e-12);
        let rows = hurwitz_mu_profile(&[10.0], &[0.5]).unwrap();
        assert!(rows[0].residual < 1e-8);
        let rows = hurwitz_mu_profile(&[0.0, 0.5, 4.0, 30.0], &[-0.25, 0.0, 0.25]).unwrap();
        assert!(rows.iter().all(|r| r.residual < 1e-9), "{rows:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn linearity(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, s in 1.2f64..4.0, m in 0.0f64..5.0) {
            let f = HalfPlaneFunction::new(move |z: Complex64| z.powf(-s), 0.5);
            let g = HalfPlaneFunction::new(move |z: Complex64| (z + m).powf(-1.5), 0.5);
            let h = HalfPlaneFunction::new(move |z: Complex64| alpha * z.powf(-s) + beta * (z + m).powf(-1.5), 0.5);
            let lhs = ramanujan_sum(&h).unwrap();
            let rhs = alpha * ramanujan_sum(&f).unwrap() + beta * ramanujan_sum(&g).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
