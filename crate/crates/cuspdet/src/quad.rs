//! Quadrature and summation helpers shared by the numerical modules.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

pub fn sum_iter<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Sum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

pub fn gl12() -> &'static (Vec<f64>, Vec<f64>) {
    static T: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    T.get_or_init(|| gauss_legendre(12))
}

pub fn gl24() -> &'static (Vec<f64>, Vec<f64>) {
    static T: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    T.get_or_init(|| gauss_legendre(24))
}

/// Fixed-order Gauss-Legendre rule on [a, b].
pub fn gl_fixed<F: FnMut(f64) -> f64>(rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64, mut f: F) -> f64 {
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    let mut acc = Sum::new();
    for (x, w) in rule.0.iter().zip(&rule.1) {
        acc.add(w * f(c + h * x));
    }
    h * acc.value()
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

const MAX_LEVEL: usize = 10;

/// Tanh-sinh rule on [a, b]. The integrand receives `(x, d)` where `d` is the
/// distance from `x` to the nearest endpoint, computed without cancellation.
pub fn tanh_sinh<F: FnMut(f64, f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> QuadResult {
    let half = 0.5 * (b - a);
    // q = e^{-π sinh t} reaches the bottom of the double range at t ≈ 6.1
    let tmax = 6.1;
    let mut eval = |t: f64| -> f64 {
        let sh = FRAC_PI_2 * t.sinh();
        let q = (-2.0 * sh.abs()).exp();
        let d = half * 2.0 * q / (1.0 + q);
        let w = FRAC_PI_2 * t.cosh() * 4.0 * q / ((1.0 + q) * (1.0 + q));
        if d <= 1e-300 * half {
            return 0.0;
        }
        let x = if t < 0.0 { a + d } else { b - d };
        let v = f(x, d);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut acc = Sum::new();
    acc.add(eval(0.0));
    let mut k = 1;
    while k as f64 * h <= tmax {
        let t = k as f64 * h;
        acc.add(eval(t));
        acc.add(eval(-t));
        k += 1;
    }
    let mut prev = half * h * acc.value();
    let mut err = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= tmax {
            let t = k as f64 * h;
            acc.add(eval(t));
            acc.add(eval(-t));
            k += 2;
        }
        let cur = half * h * acc.value();
        err = (cur - prev).abs();
        prev = cur;
        if err <= tol * cur.abs().max(1e-300) && level >= 3 {
            break;
        }
    }
    QuadResult { value: prev, error: err }
}

/// Exp-sinh rule on [a, ∞) with length scale `scale`. Integrand receives `(x, x - a)`.
pub fn exp_sinh<F: FnMut(f64, f64) -> f64>(a: f64, scale: f64, tol: f64, mut f: F) -> QuadResult {
    let tmax = 4.5;
    let mut eval = |t: f64| -> f64 {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let d = scale * e;
        if !d.is_finite() || d <= 0.0 {
            return 0.0;
        }
        let w = scale * FRAC_PI_2 * t.cosh() * e;
        let v = f(a + d, d);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut acc = Sum::new();
    acc.add(eval(0.0));
    let mut k = 1;
    while k as f64 * h <= tmax {
        let t = k as f64 * h;
        acc.add(eval(t));
        acc.add(eval(-t));
        k += 1;
    }
    let mut prev = h * acc.value();
    let mut err = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= tmax {
            let t = k as f64 * h;
            acc.add(eval(t));
            acc.add(eval(-t));
            k += 2;
        }
        let cur = h * acc.value();
        err = (cur - prev).abs();
        prev = cur;
        if err <= tol * cur.abs().max(1e-300) && level >= 3 {
            break;
        }
    }
    QuadResult { value: prev, error: err }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(a: f64, b: f64, abs_tol: f64, rel_tol: f64, mut f: F) -> QuadResult {
    let (v, e) = gk15(a, b, &mut f);
    let mut intervals = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total: f64 = sum_iter(intervals.iter().map(|iv| iv.2));
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (imax, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc });
        let (lo, hi, _, _) = intervals.swap_remove(imax);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(lo, mid, &mut f);
        let (v2, e2) = gk15(mid, hi, &mut f);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    QuadResult {
        value: sum_iter(intervals.iter().map(|iv| iv.2)),
        error: intervals.iter().map(|iv| iv.3).sum(),
    }
}

/// Brent's method on a bracketing interval.
pub fn brent<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, xtol: f64, mut f: F) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    Some(b)
}
