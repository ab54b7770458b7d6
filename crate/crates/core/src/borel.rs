//! Borel transform, exact Padé continuation, Borel-plane singularity
//! estimates, Laplace resummation and large-order fits.
//!
//! Everything that touches the Taylor data is exact; floats enter only when
//! the approximant is evaluated, its poles located, or integrated.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::{
    composite, ln_abs, ln_factorials, poly_roots_exact, ratio_exact, to_f64, GaussRule,
};
use crate::series::EnergySeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BorelError {
    #[error("need at least {needed} coefficients, have {available}")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("Padé system of size {size} is singular (rank {rank})")]
    SingularPadeSystem { size: usize, rank: usize },
    #[error("approximant has a pole on the integration contour at {location}")]
    PoleOnContour { location: Complex64 },
    #[error("coupling must be positive, got {0}")]
    InvalidCoupling(f64),
    #[error("invalid fit window [{k_min}, {k_max}]")]
    InvalidWindow { k_min: usize, k_max: usize },
}

/// `b_k = E^{(k)} / k!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelSeries {
    pub level: usize,
    pub coeffs: Vec<BigRational>,
}

impl BorelSeries {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncated(&self, order: usize) -> Self {
        let len = (order + 1).min(self.coeffs.len());
        Self {
            level: self.level,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }
}

pub fn borel_transform(s: &EnergySeries) -> BorelSeries {
    let mut fact = BigInt::one();
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, e)| {
            if k > 0 {
                fact *= k;
            }
            e / BigRational::from_integer(fact.clone())
        })
        .collect();
    BorelSeries {
        level: s.level,
        coeffs,
    }
}

/// `[L/M]` Padé approximant `N(ξ)/D(ξ)` with `D(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadeApproximant {
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
    pub l: usize,
    pub m: usize,
    // N/D = p_int / (scale * q_int)
    p_int: Vec<BigInt>,
    q_int: Vec<BigInt>,
    scale: BigInt,
    poles: Vec<Complex64>,
    zeros: Vec<Complex64>,
    // (pole index, zero index) of cancelled Froissart pairs
    doublets: Vec<(usize, usize)>,
    num_f: Vec<f64>,
    den_f: Vec<f64>,
}

/// Pole-zero pairs closer than this (relative to the pole modulus) are
/// candidate Froissart doublets.
pub const DOUBLET_PAIRING: f64 = 1e-6;
/// A candidate pair is cancelled when the residue, relative to
/// `|p|·|f̃(p)|` with `f̃` the approximant stripped of the pair, is below this.
pub const DOUBLET_RESIDUE: f64 = 1e-8;

impl PadeApproximant {
    fn new(p_int: Vec<BigInt>, q_int: Vec<BigInt>, scale: BigInt, l: usize, m: usize) -> Self {
        let q0 = BigRational::from_integer(q_int[0].clone());
        let denominator: Vec<BigRational> = q_int
            .iter()
            .map(|x| BigRational::from_integer(x.clone()) / &q0)
            .collect();
        let nscale = &q0 * BigRational::from_integer(scale.clone());
        let numerator: Vec<BigRational> = p_int
            .iter()
            .map(|x| BigRational::from_integer(x.clone()) / &nscale)
            .collect();
        let poles = poly_roots_exact(&q_int);
        let zeros = poly_roots_exact(&p_int);
        let num_f = numerator.iter().map(to_f64).collect();
        let den_f = denominator.iter().map(to_f64).collect();
        let mut out = Self {
            numerator,
            denominator,
            l,
            m,
            p_int,
            q_int,
            scale,
            poles,
            zeros,
            doublets: Vec::new(),
            num_f,
            den_f,
        };
        out.doublets = out.find_doublets();
        out
    }

    fn find_doublets(&self) -> Vec<(usize, usize)> {
        let mut used = vec![false; self.zeros.len()];
        let mut out = Vec::new();
        for (i, &p) in self.poles.iter().enumerate() {
            let r = p.norm();
            let nearest = self
                .zeros
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .min_by(|a, b| (a.1 - p).norm().total_cmp(&(b.1 - p).norm()));
            let Some((j, &z)) = nearest else { continue };
            if (z - p).norm() > DOUBLET_PAIRING * r {
                continue;
            }
            let local = self.eval_factored(p, &[(i, j)]).norm() * r;
            if self.residue(p).norm() < DOUBLET_RESIDUE * local {
                used[j] = true;
                out.push((i, j));
            }
        }
        out
    }

    fn eval_factored(&self, x: Complex64, skip: &[(usize, usize)]) -> Complex64 {
        let Some(s) = self.num_f.iter().position(|c| *c != 0.0) else {
            return Complex64::zero();
        };
        let one = Complex64::new(1.0, 0.0);
        let mut v = Complex64::new(self.num_f[s], 0.0) * x.powu(s as u32);
        for (j, z) in self.zeros.iter().enumerate() {
            if z.norm() != 0.0 && !skip.iter().any(|d| d.1 == j) {
                v *= one - x / z;
            }
        }
        for (i, p) in self.poles.iter().enumerate() {
            if !skip.iter().any(|d| d.0 == i) {
                v /= one - x / p;
            }
        }
        v
    }

    /// Exact Taylor coefficients of `N/D` through `order`.
    pub fn taylor(&self, order: usize) -> Vec<BigRational> {
        let mut t: Vec<BigRational> = Vec::with_capacity(order + 1);
        for i in 0..=order {
            let mut v = self
                .numerator
                .get(i)
                .cloned()
                .unwrap_or_else(BigRational::zero);
            for j in 1..=i.min(self.m) {
                v -= &self.denominator[j] * &t[i - j];
            }
            t.push(v);
        }
        t
    }

    /// Evaluates the factored form `c ξ^s Π(1 - ξ/z_i) / Π(1 - ξ/p_j)` with
    /// Froissart doublets cancelled. This stays accurate where the expanded
    /// polynomials cancel.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.eval_factored(x, &self.doublets)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(Complex64::new(x, 0.0)).re
    }

    /// `N/D` evaluated from the exact coefficients in extended precision.
    pub fn eval_exact(&self, x: Complex64) -> Complex64 {
        ratio_exact(&self.p_int, &self.q_int, &self.scale, x)
    }

    pub fn numerator_f64(&self) -> &[f64] {
        &self.num_f
    }

    pub fn denominator_f64(&self) -> &[f64] {
        &self.den_f
    }

    /// All roots of the denominator.
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// All roots of the numerator.
    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn residue(&self, pole: Complex64) -> Complex64 {
        let dq: Vec<BigInt> = self
            .q_int
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i)
            .collect();
        ratio_exact(&self.p_int, &dq, &self.scale, pole)
    }

    /// Cancelled Froissart pairs as `(pole, zero)`.
    pub fn doublets(&self) -> Vec<(Complex64, Complex64)> {
        self.doublets
            .iter()
            .map(|&(i, j)| (self.poles[i], self.zeros[j]))
            .collect()
    }

    /// Poles that are not Froissart doublets.
    pub fn physical_poles(&self) -> Vec<Complex64> {
        self.poles
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.doublets.iter().any(|d| d.0 == *i))
            .map(|(_, p)| *p)
            .collect()
    }
}

/// Solve the integer system `A x = rhs` (augmented as the last column) by
/// fraction-free Bareiss elimination and exact back-substitution. Returns
/// `(det, y)` with `x = y / det`, or the rank on failure.
fn solve_fraction_free(mut mat: Vec<Vec<BigInt>>) -> Result<(BigInt, Vec<BigInt>), usize> {
    let n = mat.len();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !mat[r][k].is_zero()) else {
            return Err(rank_of(&mat, n));
        };
        mat.swap(k, p);
        let (top, bottom) = mat.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            for j in k + 1..=n {
                row[j] = (&row[j] * &pivot_row[k] - &row[k] * &pivot_row[j]) / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = mat[k][k].clone();
    }
    // y = det·x is integral (Cramer), so every division below is exact
    let det = prev;
    let mut y = vec![BigInt::zero(); n];
    for i in (0..n).rev() {
        let mut acc = &det * &mat[i][n];
        for j in i + 1..n {
            acc -= &mat[i][j] * &y[j];
        }
        y[i] = acc / &mat[i][i];
    }
    Ok((det, y))
}

fn rank_of(mat: &[Vec<BigInt>], cols: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = mat
        .iter()
        .map(|r| {
            r[..cols]
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let rows = m.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[rank][c];
            for j in c..cols {
                let v = &f * &m[rank][j];
                m[r][j] -= v;
            }
        }
        rank += 1;
    }
    rank
}

/// Exact `[L/M]` Padé approximant of the Borel series.
pub fn pade(b: &BorelSeries, l: usize, m: usize) -> Result<PadeApproximant, BorelError> {
    pade_coeffs(&b.coeffs, l, m)
}

/// As [`pade`] on a raw coefficient slice.
pub fn pade_coeffs(c: &[BigRational], l: usize, m: usize) -> Result<PadeApproximant, BorelError> {
    if c.len() < l + m + 1 {
        return Err(BorelError::InsufficientOrder {
            needed: l + m + 1,
            available: c.len(),
        });
    }
    let c = &c[..=l + m];
    let scale = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&scale / x.denom())).collect();
    let at = |i: isize| -> BigInt {
        if i < 0 {
            BigInt::zero()
        } else {
            ints[i as usize].clone()
        }
    };
    let mut q = vec![BigInt::one()];
    if m > 0 {
        let rows: Vec<Vec<BigInt>> = (l + 1..=l + m)
            .map(|i| {
                let mut row: Vec<BigInt> = (1..=m).map(|j| at(i as isize - j as isize)).collect();
                row.push(-at(i as isize));
                row
            })
            .collect();
        let (det, y) = solve_fraction_free(rows)
            .map_err(|rank| BorelError::SingularPadeSystem { size: m, rank })?;
        q = std::iter::once(det).chain(y).collect();
        let g = q.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if q[0].is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let g = g * sign;
        for x in &mut q {
            *x = &*x / &g;
        }
    }
    let conv = |i: usize| -> BigInt {
        (0..=i.min(m)).fold(BigInt::zero(), |acc, j| acc + &q[j] * &ints[i - j])
    };
    // the defining equations D·b - N = O(ξ^{L+M+1})
    if (l + 1..=l + m).any(|i| !conv(i).is_zero()) {
        return Err(BorelError::SingularPadeSystem {
            size: m,
            rank: m.saturating_sub(1),
        });
    }
    let p: Vec<BigInt> = (0..=l).map(conv).collect();
    Ok(PadeApproximant::new(p, q, scale, l, m))
}

/// [`pade`], decrementing `L` while the system is singular.
pub fn pade_with_fallback(
    b: &BorelSeries,
    l: usize,
    m: usize,
) -> Result<PadeApproximant, BorelError> {
    let mut l = l;
    loop {
        match pade(b, l, m) {
            Err(BorelError::SingularPadeSystem { .. }) if l > 0 => l -= 1,
            other => return other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityMethod {
    PadePole,
    RatioTest,
}

impl SingularityMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::PadePole => "pade-pole",
            Self::RatioTest => "ratio-test",
        }
    }
}

/// Estimated location of the Borel singularity nearest the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityEstimate {
    pub level: usize,
    pub location: Complex64,
    pub method: SingularityMethod,
    pub order_used: usize,
    /// Relative change against the previous window (`K - 2` for Padé, `K - 1`
    /// for the ratio test).
    pub stability: f64,
}

/// Minimum number of Borel coefficients for a singularity estimate.
pub const MIN_SINGULARITY_COEFFS: usize = 12;

pub fn singularity_estimate(
    b: &BorelSeries,
    method: SingularityMethod,
) -> Result<SingularityEstimate, BorelError> {
    if b.len() < MIN_SINGULARITY_COEFFS {
        return Err(BorelError::InsufficientOrder {
            needed: MIN_SINGULARITY_COEFFS,
            available: b.len(),
        });
    }
    let k = b.len() - 1;
    let (loc, prev) = match method {
        SingularityMethod::PadePole => (nearest_pole(b, k)?, nearest_pole(b, k - 2)?),
        SingularityMethod::RatioTest => {
            let r = borel_ratios(b);
            let last = r.len() - 1 - 3;
            (
                Complex64::new(richardson(&r, last, 3), 0.0),
                Complex64::new(richardson(&r, last - 1, 3), 0.0),
            )
        }
    };
    Ok(SingularityEstimate {
        level: b.level,
        location: loc,
        method,
        order_used: k,
        stability: (loc - prev).norm() / loc.norm(),
    })
}

/// Borel singularity location combined from the Padé-pole and ratio-test
/// estimates. The uncertainty is the disagreement of the two methods plus
/// their stabilities across `K`, so it captures the slow convergence of the
/// nearest Padé pole toward a branch point.
#[derive(Clone, Debug, PartialEq)]
pub struct LocationConsensus {
    pub level: usize,
    pub location: f64,
    pub uncertainty: f64,
    pub pade: SingularityEstimate,
    pub ratio: SingularityEstimate,
}

impl LocationConsensus {
    pub fn relative_uncertainty(&self) -> f64 {
        self.uncertainty / self.location.abs()
    }

    /// Relative disagreement of the two methods.
    pub fn method_spread(&self) -> f64 {
        (self.pade.location - self.ratio.location).norm() / self.location.abs()
    }
}

pub fn singularity_consensus(b: &BorelSeries) -> Result<LocationConsensus, BorelError> {
    let pade = singularity_estimate(b, SingularityMethod::PadePole)?;
    let ratio = singularity_estimate(b, SingularityMethod::RatioTest)?;
    let location = 0.5 * (pade.location.re + ratio.location.re);
    let uncertainty = (pade.location - ratio.location).norm()
        + pade.stability * pade.location.norm()
        + ratio.stability * ratio.location.norm();
    Ok(LocationConsensus {
        level: b.level,
        location,
        uncertainty,
        pade,
        ratio,
    })
}

/// Nearest physical pole of the `[M/M]` (or `[M+1/M]`) approximant built
/// from `b_0..=b_k`.
fn nearest_pole(b: &BorelSeries, k: usize) -> Result<Complex64, BorelError> {
    let m = k / 2;
    let l = k - m;
    let p = pade_with_fallback(&b.truncated(k), l, m)?;
    p.physical_poles()
        .into_iter()
        .min_by(|a, c| a.norm().total_cmp(&c.norm()))
        .ok_or(BorelError::SingularPadeSystem { size: m, rank: 0 })
}

/// `r_k = b_k / b_{k+1}` as floats; index `k` in the returned vector.
pub fn borel_ratios(b: &BorelSeries) -> Vec<f64> {
    b.coeffs
        .windows(2)
        .map(|w| {
            if w[1].is_zero() {
                f64::NAN
            } else {
                to_f64(&(&w[0] / &w[1]))
            }
        })
        .collect()
}

/// Richardson extrapolation of `s_k` in powers of `1/k` using
/// `s_k, ..., s_{k+order}`.
pub fn richardson(s: &[f64], k: usize, order: usize) -> f64 {
    let n = order as i32;
    let mut fact = vec![1.0; order + 1];
    for i in 1..=order {
        fact[i] = fact[i - 1] * i as f64;
    }
    (0..=order)
        .map(|j| {
            let sign = if (j + order) % 2 == 0 { 1.0 } else { -1.0 };
            let kj = (k + j).max(1) as f64;
            sign * kj.powi(n) * s[k + j] / (fact[j] * fact[order - j])
        })
        .sum()
}

/// Quadrature controls for the Laplace integral.
#[derive(Clone, Debug)]
pub struct LaplaceOptions {
    /// Gauss–Legendre points per panel.
    pub rule_points: usize,
    pub initial_panels: usize,
    /// Truncation point `T` of the reduced variable `t = ξ/g`.
    pub cutoff: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
    /// Distance from the positive real axis below which a pole is rejected.
    pub pole_tol: f64,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        Self {
            rule_points: 20,
            initial_panels: 4,
            cutoff: 60.0,
            rel_tol: 1e-10,
            max_nodes: 1 << 14,
            pole_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureOutcome {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes: usize,
    pub tail_bound: f64,
    /// `(nodes, value)` for every refinement level.
    pub history: Vec<(usize, f64)>,
}

impl QuadratureOutcome {
    /// Successive differences `|I_j - I_{j-1}|`.
    pub fn refinement_errors(&self) -> Vec<f64> {
        self.history
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .collect()
    }
}

fn check_contour(p: &PadeApproximant, tol: f64) -> Result<(), BorelError> {
    for pole in p.physical_poles() {
        let scale = pole.norm().max(1.0);
        let on_axis = if pole.re >= 0.0 {
            pole.im.abs()
        } else {
            pole.norm()
        };
        if on_axis <= tol * scale {
            return Err(BorelError::PoleOnContour { location: pole });
        }
    }
    Ok(())
}

/// `∫_0^∞ e^{-t} P(g t) dt`, the Borel sum of the series whose Borel
/// transform is approximated by `p`.
fn reduced_integral(
    p: &PadeApproximant,
    g: f64,
    opts: &LaplaceOptions,
) -> Result<QuadratureOutcome, BorelError> {
    if g.is_nan() || g <= 0.0 {
        return Err(BorelError::InvalidCoupling(g));
    }
    check_contour(p, opts.pole_tol)?;
    let rule = GaussRule::legendre(opts.rule_points);
    let f = |t: f64| (-t).exp() * p.eval_real(g * t);

    // |∫_T^∞ e^{-t} P(gt) dt| <= e^{-T} sup_{t>=T} |P(gt)|, sup sampled on a
    // geometric grid plus the value at infinity
    let t_cut = opts.cutoff;
    let mut sup: f64 = (0..40)
        .map(|i| p.eval_real(g * t_cut * 1.5f64.powi(i)).abs())
        .fold(0.0, f64::max);
    if p.l <= p.m {
        let lead_n = if p.l == p.m {
            p.numerator_f64()[p.l]
        } else {
            0.0
        };
        sup = sup.max((lead_n / p.denominator_f64()[p.m]).abs());
    }
    let tail_bound = (-t_cut).exp() * sup;

    let mut panels = opts.initial_panels.max(1);
    let mut history = Vec::new();
    let mut prev: Option<f64> = None;
    loop {
        let nodes = panels * rule.len();
        let v = composite(&rule, 0.0, t_cut, panels, f);
        history.push((nodes, v));
        if let Some(pv) = prev {
            let change = (v - pv).abs();
            if change <= opts.rel_tol * v.abs() || nodes * 2 > opts.max_nodes {
                return Ok(QuadratureOutcome {
                    value: v,
                    error_estimate: change + tail_bound,
                    nodes,
                    tail_bound,
                    history,
                });
            }
        }
        prev = Some(v);
        panels *= 2;
    }
}

/// `∫_0^∞ e^{-ξ/g} P(ξ) dξ` as written in the Borel–Laplace formula; equals
/// `g` times the resummed value.
pub fn laplace_integral(
    p: &PadeApproximant,
    g: f64,
    opts: &LaplaceOptions,
) -> Result<QuadratureOutcome, BorelError> {
    let mut out = reduced_integral(p, g, opts)?;
    out.value *= g;
    out.error_estimate *= g;
    out.tail_bound *= g;
    for h in &mut out.history {
        h.1 *= g;
    }
    Ok(out)
}

/// Borel–Padé–Laplace value of the resummed energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ResummationResult {
    pub level: usize,
    pub g: f64,
    pub value: f64,
    /// Quadrature error plus Padé-order variation.
    pub error_estimate: f64,
    pub quadrature: QuadratureOutcome,
    /// `|value([L/M]) - value([L-1/M-1])|` when the lower approximant exists.
    pub pade_variation: Option<f64>,
    pub order_used: usize,
    pub l: usize,
    pub m: usize,
}

impl ResummationResult {
    /// Relative Padé-order variation (zero when unavailable).
    pub fn stability(&self) -> f64 {
        self.pade_variation.map_or(0.0, |d| d / self.value.abs())
    }
}

/// `E(g) = (1/g) ∫_0^∞ e^{-ξ/g} P(ξ) dξ` for one approximant.
pub fn laplace_sum(p: &PadeApproximant, g: f64) -> Result<QuadratureOutcome, BorelError> {
    reduced_integral(p, g, &LaplaceOptions::default())
}

/// Resum a perturbative series at coupling `g` through an `[L/M]` Borel–Padé
/// approximant, estimating the error from quadrature refinement and from the
/// `[L-1/M-1]` neighbour.
pub fn resum(
    s: &EnergySeries,
    g: f64,
    l: usize,
    m: usize,
) -> Result<ResummationResult, BorelError> {
    resum_with(s, g, l, m, &LaplaceOptions::default())
}

pub fn resum_with(
    s: &EnergySeries,
    g: f64,
    l: usize,
    m: usize,
    opts: &LaplaceOptions,
) -> Result<ResummationResult, BorelError> {
    if g.is_nan() || g <= 0.0 {
        return Err(BorelError::InvalidCoupling(g));
    }
    let b = borel_transform(s);
    let p = pade_with_fallback(&b, l, m)?;
    let q = reduced_integral(&p, g, opts)?;
    // nearest lower diagonal approximant that is integrable
    let pade_variation = (1..=3)
        .filter(|d| p.l >= *d && p.m >= *d)
        .find_map(|d| {
            pade_with_fallback(&b, p.l - d, p.m - d)
                .and_then(|lower| reduced_integral(&lower, g, opts))
                .ok()
        })
        .map(|lower| (lower.value - q.value).abs());
    Ok(ResummationResult {
        level: s.level,
        g,
        value: q.value,
        error_estimate: q.error_estimate + pade_variation.unwrap_or(0.0),
        order_used: p.l + p.m,
        l: p.l,
        m: p.m,
        quadrature: q,
        pade_variation,
    })
}

/// `E^{(k)} ≈ ± K · k! · A^k · k^b · (1 + c/k)` fitted on
/// `log|E^{(k)}| - log k!`. The `c/k` term absorbs the leading finite-order
/// correction and is not reported.
#[derive(Clone, Debug, PartialEq)]
pub struct LargeOrderFit {
    pub level: usize,
    /// Growth rate `A`; the nearest Borel singularity sits at distance `1/A`.
    pub growth: f64,
    /// Subleading power `b`.
    pub exponent: f64,
    /// Amplitude `K`.
    pub amplitude: f64,
    /// Least-squares standard errors of `(ln A, b, ln K)`.
    pub std_errors: [f64; 3],
    /// Absolute uncertainties of `(A, b, K)`: the shift when the fit is
    /// repeated on the upper half of the window, plus the standard errors.
    pub uncertainty: [f64; 3],
    pub residuals: Vec<f64>,
    pub k_min: usize,
    pub k_max: usize,
    /// `sign E^{(k)} = (-1)^{k+1}` throughout the window.
    pub alternating: bool,
    /// The data show no factorial growth (or contain zeros); parameters are
    /// meaningless.
    pub degenerate: bool,
}

/// Default lower edge of the fit window.
pub const DEFAULT_FIT_KMIN: usize = 20;

pub fn fit_large_order(
    s: &EnergySeries,
    k_min: usize,
    k_max: usize,
) -> Result<LargeOrderFit, BorelError> {
    if k_max < k_min + 8 {
        return Err(BorelError::InvalidWindow { k_min, k_max });
    }
    if k_max >= s.coeffs.len() {
        return Err(BorelError::InsufficientOrder {
            needed: k_max + 1,
            available: s.coeffs.len(),
        });
    }
    let lf = ln_factorials(k_max);
    let mut points = Vec::with_capacity(k_max - k_min + 1);
    let mut alternating = true;
    let mut has_zero = false;
    for k in k_min..=k_max {
        let e = &s.coeffs[k];
        if e.is_zero() {
            has_zero = true;
            continue;
        }
        let expected_positive = k % 2 == 1;
        if e.is_positive() != expected_positive {
            alternating = false;
        }
        points.push((k, ln_abs(e) - lf[k]));
    }
    let mut fit = fit_log_magnitudes(&points)?;
    fit.level = s.level;
    fit.alternating = alternating;
    fit.degenerate |= has_zero;
    Ok(fit)
}

struct Lsq {
    x: DVector<f64>,
    se: [f64; 3],
    resid: Vec<f64>,
}

fn lsq(points: &[(usize, f64)]) -> Option<Lsq> {
    let n = points.len();
    let a = DMatrix::from_fn(n, 4, |i, j| {
        let k = points[i].0 as f64;
        [k, k.ln(), 1.0, 1.0 / k][j]
    });
    let y = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let x = a.clone().svd(true, true).solve(&y, 1e-14).ok()?;
    let resid = &y - &a * &x;
    let sigma2 = resid.norm_squared() / (n as f64 - 4.0);
    let cov = (a.transpose() * &a)
        .try_inverse()
        .unwrap_or_else(|| DMatrix::from_element(4, 4, f64::NAN));
    let se = [0, 1, 2].map(|i| (sigma2 * cov[(i, i)]).abs().sqrt());
    Some(Lsq {
        x,
        se,
        resid: resid.iter().copied().collect(),
    })
}

/// Least-squares fit of `y_k = k ln A + b ln k + ln K + c/k` to `(k, y_k)`
/// pairs, where `y_k = ln|E^{(k)}| - ln k!`.
pub fn fit_log_magnitudes(points: &[(usize, f64)]) -> Result<LargeOrderFit, BorelError> {
    let (k_min, k_max) = match (points.first(), points.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => {
            return Err(BorelError::InsufficientOrder {
                needed: 9,
                available: 0,
            })
        }
    };
    if points.len() < 9 || k_min == 0 {
        return Err(BorelError::InvalidWindow { k_min, k_max });
    }
    let full = lsq(points).ok_or(BorelError::InvalidWindow { k_min, k_max })?;
    let params = |x: &DVector<f64>| [x[0].exp(), x[1], x[2].exp()];
    let p = params(&full.x);
    let half = &points[points.len() / 2..];
    let shift = match (half.len() >= 9).then(|| lsq(half)).flatten() {
        Some(h) => {
            let q = params(&h.x);
            [0, 1, 2].map(|i| (p[i] - q[i]).abs())
        }
        None => [0.0; 3],
    };
    let uncertainty = [
        shift[0] + p[0] * full.se[0],
        shift[1] + full.se[1],
        shift[2] + p[2] * full.se[2],
    ];

    // factorial growth means ln|E_{k+1}/E_k| rises like ln k; a flat or
    // falling trend means no Gevrey-1 behaviour to fit
    let lf = ln_factorials(k_max + 1);
    let incr: Vec<(f64, f64)> = points
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            (
                (w[0].0 as f64).ln(),
                (w[1].1 + lf[w[1].0]) - (w[0].1 + lf[w[0].0]),
            )
        })
        .collect();
    let degenerate = !(trend_slope(&incr) >= 0.5);

    Ok(LargeOrderFit {
        level: 0,
        growth: p[0],
        exponent: p[1],
        amplitude: p[2],
        std_errors: full.se,
        uncertainty,
        residuals: full.resid,
        k_min,
        k_max,
        alternating: true,
        degenerate,
    })
}

fn trend_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rs_recursion;
    use crate::weyl::q;

    fn borel(coeffs: Vec<BigRational>) -> BorelSeries {
        BorelSeries { level: 0, coeffs }
    }

    #[test]
    fn transform_divides_by_factorial() {
        let s = EnergySeries::new(0, vec![q(1, 2), q(3, 4), q(-21, 8)]);
        assert_eq!(
            borel_transform(&s).coeffs,
            vec![q(1, 2), q(3, 4), q(-21, 16)]
        );
        assert!(borel_transform(&EnergySeries::new(0, vec![])).is_empty());
        let (s, _) = rs_recursion(0, 6);
        assert_eq!(borel_transform(&s).coeffs[6], q(-65518401, 1024 * 720));
    }

    #[test]
    fn pade_recovers_geometric_series() {
        let c: Vec<BigRational> = (0..4)
            .map(|k| q(if k % 2 == 0 { 1 } else { -1 }, 1))
            .collect();
        let p = pade(&borel(c), 0, 1).unwrap();
        assert_eq!(p.denominator, vec![q(1, 1), q(1, 1)]);
        assert_eq!(p.numerator, vec![q(1, 1)]);
    }

    #[test]
    fn pade_of_exponential() {
        let c = vec![q(1, 1), q(1, 1), q(1, 2), q(1, 6), q(1, 24)];
        let p = pade(&borel(c.clone()), 2, 2).unwrap();
        assert_eq!(p.numerator, vec![q(1, 1), q(1, 2), q(1, 12)]);
        assert_eq!(p.denominator, vec![q(1, 1), q(-1, 2), q(1, 12)]);
        assert_eq!(p.taylor(4), c);
    }

    #[test]
    fn pade_reports_singular_system() {
        // 1 + ξ² has no [1/1] approximant
        let c = vec![q(1, 1), q(0, 1), q(1, 1)];
        match pade(&borel(c.clone()), 1, 1) {
            Err(BorelError::SingularPadeSystem { size: 1, rank: 0 }) => {}
            other => panic!("{other:?}"),
        }
        let p = pade_with_fallback(&borel(c), 1, 1).unwrap();
        assert_eq!((p.l, p.m), (0, 1));
    }

    #[test]
    fn pade_needs_enough_coefficients() {
        assert!(matches!(
            pade(&borel(vec![q(1, 1); 3]), 2, 2),
            Err(BorelError::InsufficientOrder {
                needed: 5,
                available: 3
            })
        ));
    }

    #[test]
    fn simple_pole_located_exactly() {
        // 1/(1+3ξ) = Σ (-3)^k ξ^k
        let c: Vec<BigRational> = (0..14)
            .map(|k| BigRational::from_integer(BigInt::from(-3).pow(k as u32)))
            .collect();
        for method in [SingularityMethod::PadePole, SingularityMethod::RatioTest] {
            let est = singularity_estimate(&borel(c.clone()), method).unwrap();
            assert!(
                (est.location.re + 1.0 / 3.0).abs() < 1e-14,
                "{method:?} {:?}",
                est.location
            );
            assert!(est.location.im.abs() < 1e-14);
        }
        assert!(
            singularity_estimate(&borel(c[..11].to_vec()), SingularityMethod::RatioTest).is_err()
        );
    }

    #[test]
    fn richardson_removes_inverse_powers() {
        let s: Vec<f64> = (0..40)
            .map(|k| {
                let k = k.max(1) as f64;
                2.0 + 1.0 / k - 3.0 / (k * k) + 0.5 / (k * k * k)
            })
            .collect();
        assert!((richardson(&s, 30, 3) - 2.0).abs() < 1e-10);
        assert!((richardson(&s, 30, 1) - 2.0).abs() > 1e-4);
    }

    #[test]
    fn constant_approximant_laplace() {
        let p = pade_coeffs(&[q(5, 2)], 0, 0).unwrap();
        for g in [0.01, 0.3, 2.0] {
            let out = laplace_integral(&p, g, &LaplaceOptions::default()).unwrap();
            assert!((out.value - 2.5 * g).abs() < 1e-13 * g);
        }
    }

    #[test]
    fn small_coupling_limit() {
        let (s, _) = rs_recursion(1, 20);
        let r = resum(&s, 1e-6, 10, 10).unwrap();
        assert!((r.value - 1.5).abs() < 1e-5);
    }

    #[test]
    fn rejects_nonpositive_coupling() {
        let (s, _) = rs_recursion(0, 10);
        assert_eq!(
            resum(&s, 0.0, 5, 5).unwrap_err(),
            BorelError::InvalidCoupling(0.0)
        );
        assert!(resum(&s, -0.1, 5, 5).is_err());
    }

    #[test]
    fn pole_on_contour_detected() {
        // 1/(1 - ξ): pole at +1
        let c = vec![q(1, 1); 4];
        let p = pade_coeffs(&c, 0, 1).unwrap();
        match laplace_sum(&p, 0.1) {
            Err(BorelError::PoleOnContour { location }) => {
                assert!((location.re - 1.0).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fit_on_synthetic_coefficients() {
        let lf = ln_factorials(120);
        let pts: Vec<(usize, f64)> = (40..=120)
            .map(|k| {
                (
                    k,
                    (2.0f64).ln() + lf[k] + k as f64 * 0.75f64.ln() - 1.5 * (k as f64).ln() - lf[k],
                )
            })
            .collect();
        let fit = fit_log_magnitudes(&pts).unwrap();
        assert!((fit.growth - 0.75).abs() < 1e-3);
        assert!((fit.exponent + 1.5).abs() < 1e-3);
        assert!((fit.amplitude - 2.0).abs() < 1e-3);
        assert!(!fit.degenerate);
    }

    #[test]
    fn fit_on_synthetic_rational_series() {
        // E^{(k)} = (-1)^{k+1} 2 k! (3/4)^k k^{-3/2}, rounded to nearby rationals
        let lf = ln_factorials(80);
        let coeffs: Vec<BigRational> = (0..=80)
            .map(|k| {
                if k == 0 {
                    return q(1, 1);
                }
                let mag =
                    (2.0f64.ln() + lf[k] + k as f64 * 0.75f64.ln() - 1.5 * (k as f64).ln()).exp();
                let v = BigRational::from_float(mag).unwrap();
                if k % 2 == 1 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let fit = fit_large_order(&EnergySeries::new(0, coeffs), 40, 80).unwrap();
        assert!((fit.growth - 0.75).abs() < 1e-3 && (fit.exponent + 1.5).abs() < 1e-3);
        assert!((fit.amplitude - 2.0).abs() < 1e-3);
        assert!(fit.alternating);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = EnergySeries::new(0, vec![q(1, 1); 40]);
        let fit = fit_large_order(&s, 20, 39).unwrap();
        assert!(fit.degenerate);
        assert!(matches!(
            fit_large_order(&s, 20, 25),
            Err(BorelError::InvalidWindow { .. })
        ));
        assert!(matches!(
            fit_large_order(&s, 20, 60),
            Err(BorelError::InsufficientOrder { .. })
        ));
    }
}
