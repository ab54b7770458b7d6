//! Normal-ordered polynomials in the Bargmann variables `z` and `∂z`.
//!
//! A [`WeylPoly`] is stored as a sparse map `(zpow, dpow) -> coefficient`
//! meaning `Σ c · z^zpow ∂z^dpow` with every `z` to the left of every `∂z`.
//! Operators act on [`MonomialVector`]s written in the *unnormalized* basis
//! `{z^m}`, where `z` and `∂z` have integer matrix elements and everything
//! stays exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Build a rational `num/den`.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Falling factorial `m (m-1) ... (m-j+1)`; zero when `j > m`.
pub fn falling(m: usize, j: usize) -> BigInt {
    if j > m {
        return BigInt::zero();
    }
    (m - j + 1..=m).fold(BigInt::one(), |acc, x| acc * BigInt::from(x))
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Normal-ordered operator polynomial `Σ c_{ij} z^i ∂z^j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeylPoly {
    terms: BTreeMap<(usize, usize), BigRational>,
}

impl WeylPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, BigRational::one())
    }

    /// `c · z^zpow ∂z^dpow`.
    pub fn monomial(zpow: usize, dpow: usize, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(zpow, dpow, c);
        p
    }

    /// The multiplication operator `z` (creation).
    pub fn z() -> Self {
        Self::monomial(1, 0, BigRational::one())
    }

    /// The derivative `∂z` (annihilation).
    pub fn dz() -> Self {
        Self::monomial(0, 1, BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn add_term(&mut self, zpow: usize, dpow: usize, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let key = (zpow, dpow);
        let merged = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    /// Coefficient of `z^zpow ∂z^dpow` (zero if absent).
    pub fn coeff(&self, zpow: usize, dpow: usize) -> BigRational {
        self.terms
            .get(&(zpow, dpow))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `zpow + dpow` among stored terms.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&(i, j), v) in &self.terms {
            out.add_term(i, j, v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| weyl_mul(&acc, self))
    }

    /// Act on a vector in the unnormalized monomial basis.
    pub fn apply(&self, v: &MonomialVector) -> MonomialVector {
        weyl_apply(self, v)
    }
}

/// Normal-ordered product `a · b`.
///
/// Uses `∂^b z^c = Σ_k k! C(b,k) C(c,k) z^{c-k} ∂^{b-k}`.
pub fn weyl_mul(a: &WeylPoly, b: &WeylPoly) -> WeylPoly {
    let mut out = WeylPoly::zero();
    for (&(za, da), ca) in &a.terms {
        for (&(zb, db), cb) in &b.terms {
            let cc = ca * cb;
            for k in 0..=da.min(zb) {
                let w = falling(da, k) * binom(zb, k);
                let c = &cc * BigRational::from_integer(w);
                out.add_term(za + zb - k, da - k + db, c);
            }
        }
    }
    out
}

/// Apply `op` to `v`: `z^i ∂z^j · z^m = m!/(m-j)! · z^{m-j+i}`.
pub fn weyl_apply(op: &WeylPoly, v: &MonomialVector) -> MonomialVector {
    let mut out = MonomialVector::zero();
    for (&m, cm) in &v.coeffs {
        for (&(i, j), c) in &op.terms {
            if j > m {
                continue;
            }
            let f = falling(m, j);
            out.add_coeff(m - j + i, c * cm * BigRational::from_integer(f));
        }
    }
    out
}

impl Add for &WeylPoly {
    type Output = WeylPoly;
    fn add(self, rhs: &WeylPoly) -> WeylPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &WeylPoly {
    type Output = WeylPoly;
    fn sub(self, rhs: &WeylPoly) -> WeylPoly {
        self + &(-rhs)
    }
}

impl Neg for &WeylPoly {
    type Output = WeylPoly;
    fn neg(self) -> WeylPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &WeylPoly {
    type Output = WeylPoly;
    fn mul(self, rhs: &WeylPoly) -> WeylPoly {
        weyl_mul(self, rhs)
    }
}

impl fmt::Display for WeylPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if i > 0 {
                write!(f, "·z^{i}")?;
            }
            if j > 0 {
                write!(f, "·∂^{j}")?;
            }
        }
        Ok(())
    }
}

/// Vector of coefficients of `z^m` in the unnormalized monomial basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomialVector {
    coeffs: BTreeMap<usize, BigRational>,
}

impl MonomialVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The monomial `z^m`.
    pub fn basis(m: usize) -> Self {
        let mut v = Self::zero();
        v.add_coeff(m, BigRational::one());
        v
    }

    pub fn add_coeff(&mut self, m: usize, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let merged = match self.coeffs.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero() {
            self.coeffs.insert(m, merged);
        }
    }

    pub fn get(&self, m: usize) -> BigRational {
        self.coeffs
            .get(&m)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&m, v) in &self.coeffs {
            out.add_coeff(m, v * c);
        }
        out
    }
}

impl Add for &MonomialVector {
    type Output = MonomialVector;
    fn add(self, rhs: &MonomialVector) -> MonomialVector {
        let mut out = self.clone();
        for (&m, c) in &rhs.coeffs {
            out.add_coeff(m, c.clone());
        }
        out
    }
}

impl Sub for &MonomialVector {
    type Output = MonomialVector;
    fn sub(self, rhs: &MonomialVector) -> MonomialVector {
        self + &rhs.scale(&-BigRational::one())
    }
}

impl FromIterator<(usize, BigRational)> for MonomialVector {
    fn from_iter<I: IntoIterator<Item = (usize, BigRational)>>(iter: I) -> Self {
        let mut v = Self::zero();
        for (m, c) in iter {
            v.add_coeff(m, c);
        }
        v
    }
}

/// The quartic oscillator split `H = H₀ + g V` in the Bargmann picture.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    /// `z∂z + ½`
    pub h0: WeylPoly,
    /// normal-ordered `¼ (z + ∂z)⁴`, i.e. `x⁴` with `x = (a + a†)/√2`
    pub v: WeylPoly,
}

pub fn build_hamiltonian() -> Hamiltonian {
    let h0 = &WeylPoly::monomial(1, 1, BigRational::one()) + &WeylPoly::constant(q(1, 2));
    let x = &WeylPoly::z() + &WeylPoly::dz();
    let v = x.pow(4).scale(&q(1, 4));
    Hamiltonian { h0, v }
}
