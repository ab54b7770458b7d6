//! Coherent-state layer on the holomorphic (Bargmann) space: displacement and
//! instanton operators, the trans-series energy ratio, Husimi functions, the
//! reproducing kernel, Toeplitz elements and the Segal–Bargmann transform.
//!
//! States are stored by their coefficients in the orthonormal basis
//! `φ_m = z^m/√m!` under the measure `e^{-|z|²} d²z/π`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::numeric::{composite, ln_factorials, GaussRule};
use crate::report::fmt_f64;
use crate::spectral::build_matrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherentError {
    #[error("e^(αz) re-expansion needs more than {cap} terms (tail {tail:e} above tolerance)")]
    DegreeOverflow { cap: usize, tail: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("quadrature did not converge after {nodes} nodes (last change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },
    #[error("trans-series denominator vanishes; partial sums {partial_sums:?}")]
    DenominatorVanishes { partial_sums: Vec<Complex64> },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown symbol '{0}' (expected z, conj-z, abs-z-squared or coherent:<re>[,<im>])")]
    UnknownSymbol(String),
    #[error("unknown measure '{0}' (expected paper or normalized)")]
    UnknownMeasure(String),
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `α^j e^{s}` without intermediate overflow.
fn alpha_pow_scaled(alpha: Complex64, j: usize, log_scale: f64) -> Complex64 {
    if j == 0 {
        return c(log_scale.exp());
    }
    if alpha.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let jf = j as f64;
    Complex64::from_polar((jf * alpha.norm().ln() + log_scale).exp(), jf * alpha.arg())
}

/// Finite expansion `Σ a_m φ_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloPoly {
    pub coeffs: Vec<Complex64>,
}

impl HoloPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    /// `φ_n`.
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = c(1.0);
        Self { coeffs }
    }

    /// Normalized coherent state `e^{-|α|²/2} e^{αz}`, truncated adaptively.
    pub fn coherent(alpha: Complex64) -> Result<Self, CoherentError> {
        displace(alpha, &Self::basis(0))
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|a| a.norm() != 0.0)
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self {
            coeffs: (0..n).map(|m| self.coeff(m) + other.coeff(m)).collect(),
        }
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        let n = self.len().max(other.len());
        (0..n)
            .map(|m| (self.coeff(m) - other.coeff(m)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `f(z) = Σ a_m z^m/√m!`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut phi = c(1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, a) in self.coeffs.iter().enumerate() {
            if m > 0 {
                phi *= z / (m as f64).sqrt();
            }
            acc += a * phi;
        }
        acc
    }

    /// Coefficients of `∂_z f`: `(∂f)_m = √(m+1) a_{m+1}`.
    pub fn derivative(&self) -> Self {
        Self {
            coeffs: (1..self.len())
                .map(|m| self.coeffs[m] * (m as f64).sqrt())
                .collect(),
        }
    }
}

/// Truncation controls for the `e^{αz}` re-expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisplaceOptions {
    /// Dropped tail relative to the running norm.
    pub tail_tol: f64,
    pub max_degree: usize,
}

impl Default for DisplaceOptions {
    fn default() -> Self {
        Self {
            tail_tol: 1e-12,
            max_degree: 512,
        }
    }
}

/// `f(z − ᾱ)` in orthonormal coefficients; exact finite binomial sums.
fn translate(alpha: Complex64, f: &HoloPoly, lf: &[f64]) -> Vec<Complex64> {
    let deg = f.degree();
    let shift = -alpha.conj();
    (0..=deg)
        .map(|k| {
            (k..=deg)
                .map(|m| {
                    f.coeffs[m] * alpha_pow_scaled(shift, m - k, 0.5 * (lf[m] - lf[k]) - lf[m - k])
                })
                .sum()
        })
        .collect()
}

/// Coefficient `n` of `e^{-|α|²/2} e^{αz} g(z)` given the coefficients of `g`.
fn exp_mul_coeff(alpha: Complex64, g: &[Complex64], n: usize, lf: &[f64]) -> Complex64 {
    let gauss = -0.5 * alpha.norm_sqr();
    (0..=n.min(g.len() - 1))
        .map(|k| g[k] * alpha_pow_scaled(alpha, n - k, gauss + 0.5 * (lf[n] - lf[k]) - lf[n - k]))
        .sum()
}

/// Unitary displacement `e^{-|α|²/2} e^{αz} f(z − ᾱ)`, truncated once the
/// geometric tail estimate falls below the tolerance.
pub fn displace(alpha: Complex64, f: &HoloPoly) -> Result<HoloPoly, CoherentError> {
    displace_with(alpha, f, DisplaceOptions::default())
}

pub fn displace_with(
    alpha: Complex64,
    f: &HoloPoly,
    opts: DisplaceOptions,
) -> Result<HoloPoly, CoherentError> {
    if alpha.norm() == 0.0 {
        return Ok(f.clone());
    }
    let lf = ln_factorials(opts.max_degree.max(f.len()) + 1);
    let g = translate(alpha, f, &lf);
    let a = alpha.norm();
    let mut out = Vec::new();
    let mut norm2 = 0.0;
    for n in 0..=opts.max_degree {
        let h = exp_mul_coeff(alpha, &g, n, &lf);
        norm2 += h.norm_sqr();
        out.push(h);
        // beyond deg g the coefficients fall off at least like |α|/√n per step
        let ratio = 2.0 * a / ((n + 1) as f64).sqrt();
        if n >= g.len() && (n as f64) > a * a + 1.0 && ratio < 0.5 {
            let tail = h.norm() * ratio / (1.0 - ratio);
            if tail <= opts.tail_tol * norm2.sqrt() {
                return Ok(HoloPoly::new(out));
            }
        }
    }
    let tail = out.last().map_or(0.0, |h| h.norm()) / norm2.sqrt();
    Err(CoherentError::DegreeOverflow {
        cap: opts.max_degree,
        tail,
    })
}

/// First `dim` coefficients of the displaced state, without tail control.
pub fn displace_truncated(alpha: Complex64, f: &HoloPoly, dim: usize) -> HoloPoly {
    let lf = ln_factorials(dim.max(f.len()) + 1);
    let g = translate(alpha, f, &lf);
    HoloPoly::new((0..dim).map(|n| exp_mul_coeff(alpha, &g, n, &lf)).collect())
}

/// Dense `N × N` matrix of `D(α)` in the `φ` basis; column `n` holds the
/// first `N` coefficients of `displace(α, φ_n)`.
pub fn displacement_matrix(
    alpha: Complex64,
    dim: usize,
) -> Result<Vec<Vec<Complex64>>, CoherentError> {
    if dim < 4 {
        return Err(CoherentError::InvalidParameter(format!(
            "dimension {dim} below 4"
        )));
    }
    let cols: Vec<HoloPoly> = (0..dim)
        .map(|n| displace_truncated(alpha, &HoloPoly::basis(n), dim))
        .collect();
    Ok((0..dim)
        .map(|m| (0..dim).map(|n| cols[n].coeffs[m]).collect())
        .collect())
}

/// Largest entry of `|D†D − I|` on the leading `block × block` corner.
pub fn unitarity_defect(d: &[Vec<Complex64>], block: usize) -> f64 {
    let dim = d.len();
    let mut worst: f64 = 0.0;
    for i in 0..block {
        for j in 0..block {
            let s: Complex64 = (0..dim).map(|k| d[k][i].conj() * d[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstantonParams {
    pub s_inst: f64,
    pub g: f64,
    pub theta: f64,
}

impl InstantonParams {
    pub fn new(s_inst: f64, g: f64, theta: f64) -> Result<Self, CoherentError> {
        if !(s_inst.is_finite() && s_inst > 0.0) {
            return Err(CoherentError::InvalidParameter(format!(
                "instanton action must be positive, got {s_inst}"
            )));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(CoherentError::InvalidParameter(format!(
                "coupling must be positive, got {g}"
            )));
        }
        if !theta.is_finite() {
            return Err(CoherentError::InvalidParameter(
                "phase must be finite".into(),
            ));
        }
        Ok(Self { s_inst, g, theta })
    }

    /// `α = √(S/2g) e^{iθ}`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar((self.s_inst / (2.0 * self.g)).sqrt(), self.theta)
    }

    /// `e^{-S/g}`.
    pub fn weight(&self) -> f64 {
        (-self.s_inst / self.g).exp()
    }
}

/// `e^{-S/g} D(α) f`.
pub fn instanton_apply(p: &InstantonParams, f: &HoloPoly) -> Result<HoloPoly, CoherentError> {
    Ok(displace(p.alpha(), f)?.scale(c(p.weight())))
}

/// `a_n ↦ e^{-i(n+½)t} a_n`.
pub fn evolve(f: &HoloPoly, t: f64) -> HoloPoly {
    HoloPoly::new(
        f.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * Complex64::from_polar(1.0, -(n as f64 + 0.5) * t))
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransSeriesParams {
    pub sigma: Complex64,
    pub lmax: usize,
    pub level: usize,
}

/// Trans-series energy and the pieces it is assembled from.
#[derive(Clone, Debug, PartialEq)]
pub struct TransSeriesResult {
    pub value: Complex64,
    /// `R_L`, the ratio truncated at `ℓ ≤ L`, for `L = 0..=lmax`.
    pub ratios: Vec<Complex64>,
    /// `Δ_ℓ = R_ℓ − R_{ℓ−1}` for `ℓ = 1..=lmax`.
    pub corrections: Vec<Complex64>,
    /// `⟨φ_n | D(α)^ℓ φ_n⟩` for `ℓ = 0..=lmax`.
    pub overlaps: Vec<Complex64>,
}

/// `E(g; σ) = Φ⁰ + Σ_{ℓ=1..lmax} σ^ℓ Δ_ℓ`, where `Δ_ℓ` are the successive
/// changes of the truncated ratio
/// `Σ_ℓ e^{-ℓS/g}/ℓ! ⟨φ_n|H D^ℓ|φ_n⟩ / Σ_ℓ e^{-ℓS/g}/ℓ! ⟨φ_n|D^ℓ|φ_n⟩`.
/// `Φ⁰` is the resummed perturbative value when supplied and the Rayleigh
/// quotient `R_0` otherwise.
pub fn transseries_energy(
    tp: &TransSeriesParams,
    p: &InstantonParams,
    phi0: Option<f64>,
) -> Result<TransSeriesResult, CoherentError> {
    let n = tp.level;
    let h = build_matrix(p.g, (n + 5).max(8))
        .map_err(|e| CoherentError::InvalidParameter(e.to_string()))?;
    // H φ_n, real and symmetric
    let h_phi = HoloPoly::new((0..n + 5).map(|m| c(h.get(m, n))).collect());
    let phi = HoloPoly::basis(n);

    let alpha = p.alpha();
    let mut state = phi.clone();
    let mut num = Vec::with_capacity(tp.lmax + 1);
    let mut den = Vec::with_capacity(tp.lmax + 1);
    let mut overlaps = Vec::with_capacity(tp.lmax + 1);
    let mut weight = 1.0;
    for l in 0..=tp.lmax {
        if l > 0 {
            state = displace(alpha, &state)?;
            weight *= p.weight() / l as f64;
        }
        let ov = phi.inner(&state);
        overlaps.push(ov);
        num.push(h_phi.inner(&state) * weight);
        den.push(ov * weight);
    }

    let mut ratios = Vec::with_capacity(tp.lmax + 1);
    let (mut sn, mut sd) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut partial = Vec::with_capacity(tp.lmax + 1);
    let mut mag = 0.0;
    for l in 0..=tp.lmax {
        sn += num[l];
        sd += den[l];
        mag += den[l].norm();
        partial.push(sd);
        if sd.norm() <= 1e-14 * mag {
            return Err(CoherentError::DenominatorVanishes {
                partial_sums: partial,
            });
        }
        ratios.push(sn / sd);
    }
    let corrections: Vec<Complex64> = ratios.windows(2).map(|w| w[1] - w[0]).collect();
    let base = phi0.map_or(ratios[0], c);
    let mut value = base;
    let mut sp = c(1.0);
    for d in &corrections {
        sp *= tp.sigma;
        value += sp * d;
    }
    Ok(TransSeriesResult {
        value,
        ratios,
        corrections,
        overlaps,
    })
}

/// `(1/π) e^{-|z|²} |f(z)|²` for a normalized state.
pub fn husimi(f: &HoloPoly, z: Complex64) -> Result<f64, CoherentError> {
    let norm = f.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(CoherentError::NotNormalized { norm });
    }
    Ok(husimi_unchecked(f, z))
}

fn husimi_unchecked(f: &HoloPoly, z: Complex64) -> f64 {
    (-z.norm_sqr()).exp() * f.eval(z).norm_sqr() / PI
}

/// Husimi samples on a `nx × ny` grid of cell midpoints covering
/// `[x0, x1] × [y0, y1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HusimiGrid {
    pub points: Vec<(f64, f64, f64)>,
    pub cell_area: f64,
}

impl HusimiGrid {
    /// Midpoint-rule integral of `Q` over the grid.
    pub fn integral(&self) -> f64 {
        self.points.iter().map(|p| p.2).sum::<f64>() * self.cell_area
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_z,im_z,q\n");
        for (x, y, q) in &self.points {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(*x),
                fmt_f64(*y),
                fmt_f64(*q)
            ));
        }
        out
    }
}

pub fn husimi_grid(
    f: &HoloPoly,
    x: (f64, f64),
    y: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<HusimiGrid, CoherentError> {
    if nx == 0 || ny == 0 {
        return Err(CoherentError::InvalidParameter(
            "grid needs at least one cell per axis".into(),
        ));
    }
    husimi(f, Complex64::new(0.0, 0.0))?;
    let hx = (x.1 - x.0) / nx as f64;
    let hy = (y.1 - y.0) / ny as f64;
    let mut points = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let im = y.0 + (j as f64 + 0.5) * hy;
        for i in 0..nx {
            let re = x.0 + (i as f64 + 0.5) * hx;
            points.push((re, im, husimi_unchecked(f, Complex64::new(re, im))));
        }
    }
    Ok(HusimiGrid {
        points,
        cell_area: hx * hy,
    })
}

/// `K(z, w) = e^{z w̄}`.
pub fn kernel(z: Complex64, w: Complex64) -> Complex64 {
    (z * w.conj()).exp()
}

/// `Σ_{m ≤ M} φ_m(z) conj(φ_m(w))` and the bound
/// `(|z||w|)^{M+1}/(M+1)! · e^{|z||w|}` on the omitted tail.
pub fn kernel_series(z: Complex64, w: Complex64, m_max: usize) -> (Complex64, f64) {
    let zw = z * w.conj();
    let mut term = c(1.0);
    let mut acc = term;
    for m in 1..=m_max {
        term *= zw / m as f64;
        acc += term;
    }
    let x = zw.norm();
    let lf = ln_factorials(m_max + 1);
    let bound = if x == 0.0 {
        0.0
    } else {
        ((m_max + 1) as f64 * x.ln() - lf[m_max + 1] + x).exp()
    };
    (acc, bound)
}

/// Tensor Gauss–Hermite integral of `g` against `e^{-x²-y²}`, doubling the
/// rule until successive values agree to `tol`.
fn gauss_hermite_2d<F: Fn(Complex64) -> Complex64>(
    g: F,
    tol: f64,
) -> Result<Complex64, CoherentError> {
    let mut prev: Option<Complex64> = None;
    let mut last_change = f64::INFINITY;
    for n in [20, 40, 80, 160] {
        let r = GaussRule::hermite(n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, wx) in r.nodes.iter().zip(&r.weights) {
            let mut row = Complex64::new(0.0, 0.0);
            for (y, wy) in r.nodes.iter().zip(&r.weights) {
                row += g(Complex64::new(*x, *y)) * *wy;
            }
            acc += row * *wx;
        }
        if let Some(p) = prev {
            last_change = (acc - p).norm();
            if last_change <= tol * acc.norm().max(1.0) {
                return Ok(acc);
            }
        }
        prev = Some(acc);
    }
    Err(CoherentError::QuadratureNotConverged {
        nodes: 160 * 160,
        change: last_change,
    })
}

/// `⟨K(·, w), f⟩ = ∫ e^{z̄ w} f(z) e^{-|z|²} d²z/π`, which must reproduce `f(w)`.
pub fn reproducing_check(f: &HoloPoly, w: Complex64) -> Result<Complex64, CoherentError> {
    gauss_hermite_2d(|z| kernel(z, w).conj() * f.eval(z) / PI, 1e-12)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    Z,
    ConjZ,
    AbsZSquared,
    /// `e^{-|α|²/2} e^{αz}`.
    Coherent(Complex64),
}

impl Symbol {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Z => z,
            Self::ConjZ => z.conj(),
            Self::AbsZSquared => c(z.norm_sqr()),
            Self::Coherent(a) => (a * z - 0.5 * a.norm_sqr()).exp(),
        }
    }
}

impl FromStr for Symbol {
    type Err = CoherentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z" => Ok(Self::Z),
            "conj-z" => Ok(Self::ConjZ),
            "abs-z-squared" => Ok(Self::AbsZSquared),
            _ => {
                let bad = || CoherentError::UnknownSymbol(s.to_string());
                let rest = s.strip_prefix("coherent:").ok_or_else(bad)?;
                let mut parts = rest.split(',');
                let re: f64 = parts
                    .next()
                    .and_then(|p| p.trim().parse().ok())
                    .ok_or_else(bad)?;
                let im: f64 = match parts.next() {
                    Some(p) => p.trim().parse().map_err(|_| bad())?,
                    None => 0.0,
                };
                if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
                    return Err(bad());
                }
                Ok(Self::Coherent(Complex64::new(re, im)))
            }
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Z => f.write_str("z"),
            Self::ConjZ => f.write_str("conj-z"),
            Self::AbsZSquared => f.write_str("abs-z-squared"),
            Self::Coherent(a) if a.im == 0.0 => write!(f, "coherent:{}", a.re),
            Self::Coherent(a) => write!(f, "coherent:{},{}", a.re, a.im),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Measure {
    /// `d²z`, in which `‖φ_n‖² = π`.
    Paper,
    /// `d²z/π`.
    #[default]
    Normalized,
}

impl FromStr for Measure {
    type Err = CoherentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "normalized" => Ok(Self::Normalized),
            _ => Err(CoherentError::UnknownMeasure(s.to_string())),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Normalized => "normalized",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToeplitzSpec {
    pub symbol: Symbol,
    pub measure: Measure,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToeplitzElement {
    pub m: usize,
    pub n: usize,
    pub value: Complex64,
    pub spec: ToeplitzSpec,
}

impl ToeplitzElement {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"m\":{},\"n\":{},\"re\":{},\"im\":{},\"measure\":\"{}\",\"symbol\":\"{}\"}}",
            self.m,
            self.n,
            fmt_f64(self.value.re),
            fmt_f64(self.value.im),
            self.spec.measure,
            self.spec.symbol
        )
    }
}

/// `(m!n!)^{-1/2} ∫ z̄^m f(z) z^n e^{-|z|²} dμ(z)` on a polar grid: composite
/// Gauss–Legendre in `r` and the uniform rule in the angle, both doubled until
/// successive values agree to `1e-10`.
pub fn toeplitz_element(
    spec: &ToeplitzSpec,
    m: usize,
    n: usize,
) -> Result<ToeplitzElement, CoherentError> {
    let lf = ln_factorials(m + n);
    let norm = -0.5 * (lf[m] + lf[n]);
    let reach = match spec.symbol {
        Symbol::Coherent(a) => a.norm(),
        _ => 1.0,
    };
    let r_max = ((m + n + 2) as f64).sqrt() + reach + 8.0;
    let rule = GaussRule::legendre(20);
    let mut panels = 4;
    let mut angles = 2 * (m + n) + 16;
    let mut prev: Option<Complex64> = None;
    let mut change = f64::INFINITY;
    for _ in 0..8 {
        let nphi = angles;
        let radial = |r: f64| -> Complex64 {
            if r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let radial_w = ((m + n) as f64 * r.ln() - r * r + norm).exp() * r;
            let mut ang = Complex64::new(0.0, 0.0);
            for k in 0..nphi {
                let phi = 2.0 * PI * k as f64 / nphi as f64;
                let z = Complex64::from_polar(r, phi);
                ang +=
                    spec.symbol.eval(z) * Complex64::from_polar(1.0, (n as f64 - m as f64) * phi);
            }
            ang * (2.0 * PI / nphi as f64) * radial_w
        };
        let mut v = composite(&rule, 0.0, r_max, panels, radial);
        if spec.measure == Measure::Normalized {
            v /= PI;
        }
        if let Some(p) = prev {
            change = (v - p).norm();
            if change <= 1e-10 * v.norm().max(1e-3) {
                return Ok(ToeplitzElement {
                    m,
                    n,
                    value: v,
                    spec: *spec,
                });
            }
        }
        prev = Some(v);
        panels *= 2;
        angles *= 2;
    }
    Err(CoherentError::QuadratureNotConverged {
        nodes: panels * rule.len() * angles,
        change,
    })
}

/// Largest Hermite index accepted by the transform quadrature.
pub const SB_MAX_INDEX: usize = 12;

/// Hermite functions `ψ_k(x) e^{x²/2}` for `k = 0..=n`.
fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![PI.powf(-0.25)];
    if n >= 1 {
        p.push(2f64.sqrt() * x * p[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * p[k] - (kf / (kf + 1.0)).sqrt() * p[k - 1];
        p.push(next);
    }
    p
}

/// Segal–Bargmann transform of `Σ c_k ψ_k` at `z`:
/// `π^{-1/4} ∫ e^{-(z² + x²)/2 + √2 z x} f(x) dx`.
pub fn sb_transform_combination(
    coeffs: &[Complex64],
    z: Complex64,
) -> Result<Complex64, CoherentError> {
    if coeffs.len() > SB_MAX_INDEX + 1 {
        return Err(CoherentError::InvalidParameter(format!(
            "Hermite index above {SB_MAX_INDEX}"
        )));
    }
    let n = coeffs.len().saturating_sub(1);
    let pre = PI.powf(-0.25) * (-0.5 * z * z).exp();
    let mut prev: Option<Complex64> = None;
    let mut change = f64::INFINITY;
    for nodes in [32, 64, 128] {
        let r = GaussRule::hermite(nodes);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in r.nodes.iter().zip(&r.weights) {
            let h = hermite_functions(n, *x);
            let f: Complex64 = coeffs.iter().zip(&h).map(|(ck, hk)| ck * hk).sum();
            acc += (2f64.sqrt() * z * x).exp() * f * *w;
        }
        acc *= pre;
        if let Some(p) = prev {
            change = (acc - p).norm();
            if change <= 1e-12 * acc.norm().max(1.0) {
                return Ok(acc);
            }
        }
        prev = Some(acc);
    }
    Err(CoherentError::QuadratureNotConverged { nodes: 128, change })
}

/// Transform of the `n`-th Hermite function; equals `φ_n(z)`.
pub fn sb_transform(n: usize, z: Complex64) -> Result<Complex64, CoherentError> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0);
    sb_transform_combination(&coeffs, z)
}
