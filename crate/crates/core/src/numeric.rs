//! Small numerical kernels shared by the float-side modules: Gauss rules,
//! polynomial roots, and float views of big rationals.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Nearest `f64` to an exact rational (may be ±inf for huge values).
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let l = ln_abs(r);
        if r.is_negative() {
            -l.exp()
        } else {
            l.exp()
        }
    })
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.abs().to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        let top: BigInt = x.abs() >> shift;
        top.to_f64().expect("finite").ln() + shift as f64 * LN_2
    }
}

/// `ln |r|`; `-inf` for zero. Works far beyond the `f64` exponent range.
pub fn ln_abs(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// `ln k!` for `k = 0..=n`, accumulated by summation.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Horner evaluation of `Σ c_i x^i`.
pub fn horner(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::zero(), |acc, &c| acc * x + c)
}

fn horner_with_derivative(coeffs: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Derivative coefficients of `Σ c_i x^i`.
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect()
}

/// All complex roots of `Σ c_i x^i` (ascending coefficients) by Aberth–Ehrlich
/// iteration. Trailing zero coefficients are dropped; roots at the origin are
/// reported explicitly.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    let mut zero_roots = 0;
    while c.len() > 1 && c[0] == 0.0 {
        c.remove(0);
        zero_roots += 1;
    }
    let deg = c.len().saturating_sub(1);
    let mut roots = vec![Complex64::zero(); zero_roots];
    if deg == 0 {
        return roots;
    }
    if deg == 1 {
        roots.push(Complex64::new(-c[0] / c[1], 0.0));
        return roots;
    }

    // initial guesses on a circle at the geometric-mean root modulus
    let radius = (c[0].abs() / c[deg].abs())
        .powf(1.0 / deg as f64)
        .max(1e-12);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();

    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = horner_with_derivative(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::zero()
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // final Newton polish on the undeflated polynomial
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(&c, *zi);
            let step = p / dp;
            if step.is_finite() {
                *zi -= step;
            }
        }
    }
    roots.extend(z);
    roots
}

/// Fixed-point complex number with `FX_BITS` fractional bits.
#[derive(Clone, Debug)]
struct Fx {
    re: BigInt,
    im: BigInt,
}

const FX_BITS: u64 = 256;

impl Fx {
    fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    fn from_c64(z: Complex64) -> Self {
        let conv = |x: f64| -> BigInt {
            let r = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
            (r.numer() << FX_BITS) / r.denom()
        };
        Self {
            re: conv(z.re),
            im: conv(z.im),
        }
    }

    fn to_c64(&self) -> Complex64 {
        let d = BigInt::one() << FX_BITS;
        Complex64::new(
            to_f64(&BigRational::new(self.re.clone(), d.clone())),
            to_f64(&BigRational::new(self.im.clone(), d)),
        )
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Self {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            re: (&self.re * &o.re - &self.im * &o.im) >> FX_BITS,
            im: (&self.re * &o.im + &self.im * &o.re) >> FX_BITS,
        }
    }

    fn div(&self, o: &Self) -> Option<Self> {
        let d = &o.re * &o.re + &o.im * &o.im;
        if d.is_zero() {
            return None;
        }
        Some(Self {
            re: ((&self.re * &o.re + &self.im * &o.im) << FX_BITS) / &d,
            im: ((&self.im * &o.re - &self.re * &o.im) << FX_BITS) / &d,
        })
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// Horner with coefficients already shifted to fixed point.
fn fx_horner(shifted: &[BigInt], z: &Fx) -> (Fx, Fx) {
    let mut p = Fx::zero();
    let mut dp = Fx::zero();
    for c in shifted.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z);
        p.re += c;
    }
    (p, dp)
}

fn shifted(coeffs: &[BigInt]) -> Vec<BigInt> {
    coeffs.iter().map(|c| c << FX_BITS).collect()
}

/// `Σ c_i z^i` for exact integer coefficients, evaluated in extended
/// fixed-point precision and rounded once.
pub fn eval_exact(coeffs: &[BigInt], z: Complex64) -> Complex64 {
    fx_horner(&shifted(coeffs), &Fx::from_c64(z)).0.to_c64()
}

/// `p(z) / (scale * q(z))` for exact integer polynomials, rounded once.
pub fn ratio_exact(p: &[BigInt], q: &[BigInt], scale: &BigInt, z: Complex64) -> Complex64 {
    let zf = Fx::from_c64(z);
    let num = fx_horner(&shifted(p), &zf).0;
    let den = fx_horner(&shifted(q), &zf).0;
    let den = Fx {
        re: den.re * scale,
        im: den.im * scale,
    };
    num.div(&den)
        .map_or(Complex64::new(f64::NAN, f64::NAN), |r| r.to_c64())
}

/// Roots of an exact integer polynomial (ascending coefficients). Float
/// Aberth iteration supplies starting points, which are then refined by
/// Aberth iteration in extended precision, so clustered roots are resolved to
/// full double accuracy.
pub fn poly_roots_exact(coeffs: &[BigInt]) -> Vec<Complex64> {
    let mut c: Vec<BigInt> = coeffs.to_vec();
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    let mut zero_roots = 0;
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        zero_roots += 1;
    }
    let mut roots = vec![Complex64::zero(); zero_roots];
    if c.len() <= 1 {
        return roots;
    }
    // float seeds from a normalized copy; huge coefficients are scaled first
    let top = c.iter().map(|x| x.bits()).max().unwrap_or(0);
    let shift = top.saturating_sub(900);
    let cf: Vec<f64> = c
        .iter()
        .map(|x| to_f64(&BigRational::new(x.clone(), BigInt::one() << shift)))
        .collect();
    let seeds = poly_roots(&cf);
    let mut z: Vec<Fx> = seeds.iter().map(|&s| Fx::from_c64(s)).collect();
    let deg = z.len();
    // only the leading ~520 bits of the coefficients matter at FX_BITS
    // working precision
    let drop = top.saturating_sub(520);
    let cs: Vec<BigInt> = c.iter().map(|x| (x >> drop) << FX_BITS).collect();
    let one = Fx {
        re: BigInt::one() << FX_BITS,
        im: BigInt::zero(),
    };
    let mut done = vec![false; deg];
    for _ in 0..200 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (p, dp) = fx_horner(&cs, &z[i]);
            if p.is_zero() {
                continue;
            }
            let Some(w) = p.div(&dp) else { continue };
            // differences are exact, so the repulsion sum only needs double
            // precision: its error enters the step at second order in w
            let rep: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| z[i].sub(&z[j]).to_c64())
                .filter(|d| d.norm() != 0.0)
                .map(|d| d.inv())
                .sum();
            let Some(step) = w.div(&one.sub(&w.mul(&Fx::from_c64(rep)))) else {
                continue;
            };
            z[i] = z[i].sub(&step);
            let s = step.to_c64().norm() / z[i].to_c64().norm().max(1e-300);
            // cubic convergence: one more step would change nothing
            done[i] = s < 1e-35;
            max_step = max_step.max(s);
        }
        if max_step < 1e-30 {
            break;
        }
    }
    roots.extend(z.iter().map(Fx::to_c64));
    roots
}

/// Quadrature rule on a reference interval.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss–Legendre on `[-1, 1]`.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_p(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_p(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Gauss–Hermite for `∫ e^{-x²} f(x) dx`.
    pub fn hermite(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z: f64 = 0.0;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[n - 1],
                3 => 1.91 * z - 0.91 * nodes[n - 2],
                _ => 2.0 * z - nodes[n - i + 1],
            };
            let mut pp = 0.0;
            for _ in 0..200 {
                let (p, d) = hermite_orthonormal(n, z);
                pp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = hermite_orthonormal(n, z);
            pp = if d != 0.0 { d } else { pp };
            let w = 2.0 / (pp * pp);
            nodes[n - 1 - i] = z;
            nodes[i] = -z;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Hermite polynomial normalized as in the classic `gauher` routine and its
/// derivative, `(p_n, p_n')`.
fn hermite_orthonormal(n: usize, x: f64) -> (f64, f64) {
    let pim4 = PI.powf(-0.25);
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = x * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    let d = (2.0 * n as f64).sqrt() * p2;
    (p1, d)
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels.
pub fn composite<F, T>(rule: &GaussRule, a: f64, b: f64, panels: usize, f: F) -> T
where
    F: Fn(f64) -> T,
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Zero,
{
    let h = (b - a) / panels as f64;
    let mut total = T::zero();
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mut part = T::zero();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            part = part + f(lo + 0.5 * h * (x + 1.0)) * *w;
        }
        total = total + part * (0.5 * h);
    }
    total
}
