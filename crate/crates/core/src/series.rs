//! Rayleigh–Schrödinger (Bender–Wu) expansion of the quartic oscillator in
//! exact rational arithmetic.
//!
//! For level `n` the eigenfunction is expanded as `ψ = Σ_k g^k c^{(k)}` with
//! `c^{(k)}` a polynomial in the unnormalized monomials `z^m`. Collecting
//! powers of `g` in `(H₀ + gV) ψ = E ψ` gives at every order
//!
//! ```text
//! (m - n) c_m^{(k)} = Σ_{j=1..k} E^{(j)} c_m^{(k-j)} - (V c^{(k-1)})_m
//! ```
//!
//! The `m = n` row has a vanishing left side and fixes `E^{(k)}`; the gauge
//! `c_n^{(k)} = δ_{k0}` removes the free homogeneous component.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::weyl::{build_hamiltonian, falling, q, MonomialVector};

/// Tag written into coefficient cache files. Bump whenever the Hamiltonian
/// convention or gauge changes.
pub const CONVENTION_TAG: &str = "table1-v1";

/// Default highest order for which wavefunction coefficients are retained.
pub const DEFAULT_TABLE_CAP: usize = 200;

/// Perturbative energy coefficients `E_n^{(k)}`, `k = 0..=order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergySeries {
    pub level: usize,
    pub coeffs: Vec<BigRational>,
}

impl EnergySeries {
    pub fn new(level: usize, coeffs: Vec<BigRational>) -> Self {
        Self { level, coeffs }
    }

    /// Highest available order, `None` for an empty series.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn truncated(&self, order: usize) -> Self {
        let len = (order + 1).min(self.coeffs.len());
        Self::new(self.level, self.coeffs[..len].to_vec())
    }
}

/// Wavefunction coefficients `c_m^{(n,k)}` for `k = 0..=orders()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WavefunctionTable {
    pub level: usize,
    orders: Vec<MonomialVector>,
}

impl WavefunctionTable {
    pub fn new(level: usize, orders: Vec<MonomialVector>) -> Self {
        Self { level, orders }
    }

    /// `c_m^{(k)}`; zero outside the stored range.
    pub fn get(&self, m: usize, k: usize) -> BigRational {
        self.orders
            .get(k)
            .map(|v| v.get(m))
            .unwrap_or_else(BigRational::zero)
    }

    /// The polynomial `c^{(k)}`.
    pub fn order(&self, k: usize) -> Option<&MonomialVector> {
        self.orders.get(k)
    }

    /// Number of stored orders.
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Nonzero entries as `(m, k, c)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.orders
            .iter()
            .enumerate()
            .flat_map(|(k, v)| v.iter().map(move |(m, c)| (m, k, c)))
    }
}

/// Integer form of `4V`: `(zpow, dpow, coefficient)`.
struct QuarticAction {
    terms: Vec<(usize, usize, BigInt)>,
}

impl QuarticAction {
    fn new() -> Self {
        let h = build_hamiltonian();
        let four = q(4, 1);
        let terms =
            h.v.terms()
                .map(|((i, j), c)| {
                    let w = c * &four;
                    debug_assert!(w.is_integer());
                    (i, j, w.to_integer())
                })
                .collect();
        Self { terms }
    }

    /// `4V C` for a dense integer vector indexed by degree.
    fn apply_dense(&self, c: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); c.len() + 4];
        for (m, cm) in c.iter().enumerate() {
            if cm.is_zero() {
                continue;
            }
            for (i, j, w) in &self.terms {
                if *j > m {
                    continue;
                }
                out[m - j + i] += cm * (w * falling(m, *j));
            }
        }
        out
    }
}

/// One order of the wavefunction, `c_m = numer[m] / denom`.
struct ScaledOrder {
    numer: Vec<BigInt>,
    denom: BigInt,
}

impl ScaledOrder {
    fn to_vector(&self) -> MonomialVector {
        self.numer
            .iter()
            .enumerate()
            .map(|(m, c)| (m, BigRational::new(c.clone(), self.denom.clone())))
            .collect()
    }
}

/// Exact perturbation series for level `n` through order `order`.
///
/// Wavefunction orders above [`DEFAULT_TABLE_CAP`] are computed but not
/// returned.
pub fn rs_recursion(n: usize, order: usize) -> (EnergySeries, WavefunctionTable) {
    rs_recursion_capped(n, order, DEFAULT_TABLE_CAP)
}

/// As [`rs_recursion`] with an explicit cap on the returned wavefunction table.
///
/// Each order is held as an integer vector over a single common denominator
/// so the `O(k)` convolution with earlier orders runs on integers only.
pub fn rs_recursion_capped(
    n: usize,
    order: usize,
    table_cap: usize,
) -> (EnergySeries, WavefunctionTable) {
    let vq = QuarticAction::new();
    let mut energies = vec![q(2 * n as i64 + 1, 2)];
    let mut c0 = vec![BigInt::zero(); n + 1];
    c0[n] = BigInt::one();
    let mut cs = vec![ScaledOrder {
        numer: c0,
        denom: BigInt::one(),
    }];

    for k in 1..=order {
        let width = n + 4 * k + 1;
        let prev = &cs[k - 1];
        let vc = vq.apply_dense(&prev.numer);
        let vc_denom = &prev.denom * 4u32;

        // solvability row m = n, with c_n^{(j)} = δ_{j0}
        energies.push(BigRational::new(vc[n].clone(), vc_denom.clone()));

        // common denominator of every term on the right-hand side
        let mut lcm = vc_denom.clone();
        for j in 1..=k {
            if !energies[j].is_zero() {
                lcm = lcm.lcm(&(energies[j].denom() * &cs[k - j].denom));
            }
        }
        let vc_scale = -(&lcm / &vc_denom);
        let scales: Vec<(usize, BigInt)> = (1..=k)
            .filter(|&j| !energies[j].is_zero())
            .map(|j| {
                let e = &energies[j];
                (j, &lcm / (e.denom() * &cs[k - j].denom) * e.numer())
            })
            .collect();

        let lo = n.saturating_sub(4 * k);
        let mut nums = vec![BigInt::zero(); width];
        let mut dens = vec![BigInt::one(); width];
        for m in (lo..width).filter(|&m| m != n && (m + n) % 2 == 0) {
            let mut rhs = vc
                .get(m)
                .map(|v| v * &vc_scale)
                .unwrap_or_else(BigInt::zero);
            for (j, s) in &scales {
                if let Some(c) = cs[k - j].numer.get(m) {
                    if !c.is_zero() {
                        rhs += s * c;
                    }
                }
            }
            let shift = m as i64 - n as i64;
            assert!(shift != 0, "zero denominator off the solvability row");
            let mut den = &lcm * shift;
            let g = rhs.gcd(&den);
            if !g.is_zero() && !g.is_one() {
                rhs /= &g;
                den /= &g;
            }
            if den.is_negative() {
                rhs = -rhs;
                den = -den;
            }
            nums[m] = rhs;
            dens[m] = den;
        }
        let denom = dens.iter().fold(BigInt::one(), |acc, d| acc.lcm(d));
        let numer = nums
            .into_iter()
            .zip(&dens)
            .map(|(c, d)| if c.is_zero() { c } else { c * (&denom / d) })
            .collect();
        cs.push(ScaledOrder { numer, denom });
    }

    let orders = cs
        .iter()
        .take(table_cap.saturating_add(1))
        .map(ScaledOrder::to_vector)
        .collect();
    (
        EnergySeries::new(n, energies),
        WavefunctionTable::new(n, orders),
    )
}

/// Residual of the order-`k` equation,
/// `(H₀ - E⁰) c^{(k)} + V c^{(k-1)} - Σ_{j=1..k} E^{(j)} c^{(k-j)}`,
/// computed with the generic operator algebra. Identically zero for a
/// correct table.
pub fn order_residual(
    series: &EnergySeries,
    table: &WavefunctionTable,
    k: usize,
) -> MonomialVector {
    let h = build_hamiltonian();
    let order = |j: usize| table.order(j).cloned().unwrap_or_default();
    let mut terms: Vec<(MonomialVector, BigRational)> = Vec::with_capacity(k + 3);
    let ck = order(k);
    terms.push((h.h0.apply(&ck), BigRational::one()));
    terms.push((ck, -series.coeffs[0].clone()));
    if k >= 1 {
        terms.push((h.v.apply(&order(k - 1)), BigRational::one()));
        for j in 1..=k {
            if !series.coeffs[j].is_zero() {
                terms.push((order(k - j), -series.coeffs[j].clone()));
            }
        }
    }
    // sum over one common denominator; rational addition term by term is
    // quadratic in the coefficient size
    let mut common = BigInt::one();
    for (v, s) in &terms {
        for (_, c) in v.iter() {
            common = common.lcm(&(c.denom() * s.denom()));
        }
    }
    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (v, s) in &terms {
        for (m, c) in v.iter() {
            let w = &common / (c.denom() * s.denom()) * c.numer() * s.numer();
            *acc.entry(m).or_insert_with(BigInt::zero) += w;
        }
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| (m, BigRational::new(c, common.clone())))
        .collect()
}

/// Published coefficients for `n = 0..=6`, `k = 0..=6`.
pub const TABLE1: [[&str; 7]; 7] = [
    [
        "1/2",
        "3/4",
        "-21/8",
        "333/16",
        "-30885/128",
        "916731/256",
        "-65518401/1024",
    ],
    [
        "3/2",
        "15/4",
        "-165/8",
        "3585/16",
        "-408765/128",
        "14036355/256",
        "-1102501125/1024",
    ],
    [
        "5/2",
        "39/4",
        "-567/8",
        "15561/16",
        "-2235795/128",
        "88733079/256",
        "-7928041569/1024",
    ],
    [
        "7/2",
        "75/4",
        "-1269/8",
        "42375/16",
        "-7146225/128",
        "326056275/256",
        "-32402055375/1024",
    ],
    [
        "9/2",
        "123/4",
        "-2331/8",
        "92313/16",
        "-17802045/128",
        "905732019/256",
        "-99842432409/1024",
    ],
    [
        "11/2",
        "183/4",
        "-3819/8",
        "174345/16",
        "-38044245/128",
        "2165447079/256",
        "-262564394475/1024",
    ],
    [
        "13/2",
        "255/4",
        "-5805/8",
        "299325/16",
        "-72274845/128",
        "4445205075/256",
        "-593254422225/1024",
    ],
];

/// Parsed reference table, `table1()[n][k]`.
pub fn table1() -> Vec<Vec<BigRational>> {
    TABLE1
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| parse_rational(s).expect("embedded table"))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCheck {
    pub level: usize,
    pub order: usize,
    pub expected: BigRational,
    pub got: BigRational,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub cells: Vec<CellCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.matches)
    }

    pub fn matched(&self) -> usize {
        self.cells.iter().filter(|c| c.matches).count()
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(|c| !c.matches)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("level {0} missing from input")]
    MissingLevel(usize),
    #[error("level {level} only has order {order}, need at least 6")]
    InsufficientOrder { level: usize, order: usize },
}

/// Compare levels 0..=6, orders 0..=6 against the embedded table.
pub fn verify_table(series: &[EnergySeries]) -> Result<VerificationReport, VerifyError> {
    let reference = table1();
    let mut cells = Vec::with_capacity(49);
    for (n, row) in reference.iter().enumerate() {
        let s = series
            .iter()
            .find(|s| s.level == n)
            .ok_or(VerifyError::MissingLevel(n))?;
        if s.coeffs.len() < 7 {
            return Err(VerifyError::InsufficientOrder {
                level: n,
                order: s.coeffs.len().saturating_sub(1),
            });
        }
        for (k, expected) in row.iter().enumerate() {
            let got = s.coeffs[k].clone();
            cells.push(CellCheck {
                level: n,
                order: k,
                matches: &got == expected,
                expected: expected.clone(),
                got,
            });
        }
    }
    Ok(VerificationReport { cells })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Canonical ASCII form `p/q` (always with a denominator).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `-?digits(/digits)?` in lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    parse_rational_at(s, 1, 1)
}

fn parse_rational_at(s: &str, line: usize, col0: usize) -> Result<BigRational, ParseError> {
    if s.is_empty() {
        return Err(ParseError::new(line, col0, "empty rational"));
    }
    let bytes = s.as_bytes();
    let mut slash = None;
    for (i, ch) in s.char_indices() {
        let ok = ch.is_ascii_digit() || (ch == '-' && i == 0) || (ch == '/' && slash.is_none());
        if !ok {
            return Err(ParseError::new(
                line,
                col0 + i,
                format!("unexpected character {ch:?}"),
            ));
        }
        if ch == '/' {
            slash = Some(i);
        }
    }
    let (num_s, den_s) = match slash {
        Some(i) => (&s[..i], &s[i + 1..]),
        None => (s, "1"),
    };
    let digits = num_s.strip_prefix('-').unwrap_or(num_s);
    if digits.is_empty() {
        return Err(ParseError::new(line, col0, "missing numerator"));
    }
    if den_s.is_empty() {
        return Err(ParseError::new(
            line,
            col0 + bytes.len(),
            "missing denominator",
        ));
    }
    let num: BigInt = num_s
        .parse()
        .map_err(|_| ParseError::new(line, col0, "bad numerator"))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| ParseError::new(line, col0 + slash.unwrap_or(0) + 1, "bad denominator"))?;
    if den.is_zero() {
        return Err(ParseError::new(
            line,
            col0 + slash.unwrap_or(0) + 1,
            "zero denominator",
        ));
    }
    if !num.gcd(&den).is_one() {
        return Err(ParseError::new(line, col0, "rational not in lowest terms"));
    }
    if num.is_zero() && !den.is_one() {
        return Err(ParseError::new(line, col0, "zero must be written 0/1"));
    }
    if num_s.starts_with('-') && num.is_zero() {
        return Err(ParseError::new(line, col0, "negative zero"));
    }
    debug_assert!(den.is_positive());
    Ok(BigRational::new_raw(num, den))
}

/// One `p/q` per line.
pub fn serialize_series(s: &EnergySeries) -> String {
    s.coeffs.iter().map(|c| format_rational(c) + "\n").collect()
}

/// Inverse of [`serialize_series`]. Blank trailing lines are ignored.
pub fn parse_series(text: &str, level: usize) -> Result<EnergySeries, ParseError> {
    let mut coeffs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        coeffs.push(parse_rational_at(line, i + 1, 1)?);
    }
    Ok(EnergySeries::new(level, coeffs))
}

/// Contents of a coefficient cache file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub series: EnergySeries,
    pub table: Option<WavefunctionTable>,
}

impl fmt::Display for CacheEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = self.series.coeffs.len().saturating_sub(1);
        writeln!(
            f,
            "level={} order={} convention={}",
            self.series.level, order, CONVENTION_TAG
        )?;
        for (k, e) in self.series.coeffs.iter().enumerate() {
            writeln!(f, "E {k} {}", format_rational(e))?;
        }
        if let Some(t) = &self.table {
            for (m, k, c) in t.entries() {
                writeln!(f, "c {m} {k} {}", format_rational(c))?;
            }
        }
        Ok(())
    }
}

/// Parse a cache file. Rejects foreign convention tags, gaps in the energy
/// list and anything that is not strictly ASCII.
pub fn parse_cache(text: &str) -> Result<CacheEntry, ParseError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, 1, "empty cache file"))?;
    let mut level = None;
    let mut order = None;
    let mut convention = None;
    let mut col = 1;
    for field in header.split(' ') {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| ParseError::new(1, col, format!("malformed header field {field:?}")))?;
        let num = || {
            val.parse::<usize>()
                .map_err(|_| ParseError::new(1, col + key.len() + 1, "bad integer"))
        };
        match key {
            "level" => level = Some(num()?),
            "order" => order = Some(num()?),
            "convention" => convention = Some(val.to_string()),
            _ => {
                return Err(ParseError::new(
                    1,
                    col,
                    format!("unknown header key {key:?}"),
                ))
            }
        }
        col += field.len() + 1;
    }
    let (Some(level), Some(order), Some(convention)) = (level, order, convention) else {
        return Err(ParseError::new(
            1,
            1,
            "header needs level, order and convention",
        ));
    };
    if convention != CONVENTION_TAG {
        return Err(ParseError::new(
            1,
            1,
            format!("convention {convention:?} != {CONVENTION_TAG:?}"),
        ));
    }

    let mut energies = Vec::with_capacity(order + 1);
    let mut orders: Vec<MonomialVector> = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(' ').collect();
        let idx = |p: &str, c: usize| {
            p.parse::<usize>()
                .map_err(|_| ParseError::new(ln, c, "bad index"))
        };
        match parts.as_slice() {
            ["E", k, r] => {
                let k = idx(k, 3)?;
                if k != energies.len() {
                    return Err(ParseError::new(
                        ln,
                        3,
                        format!("expected order {}, found {k}", energies.len()),
                    ));
                }
                energies.push(parse_rational_at(r, ln, 4 + parts[1].len())?);
            }
            ["c", m, k, r] => {
                let mcol = 3;
                let m = idx(m, mcol)?;
                let kcol = mcol + parts[1].len() + 1;
                let k = idx(k, kcol)?;
                if k > order {
                    return Err(ParseError::new(
                        ln,
                        kcol,
                        "wavefunction order exceeds header order",
                    ));
                }
                let c = parse_rational_at(r, ln, kcol + parts[2].len() + 1)?;
                if orders.len() <= k {
                    orders.resize_with(k + 1, MonomialVector::zero);
                }
                orders[k].add_coeff(m, c);
            }
            _ => return Err(ParseError::new(ln, 1, "expected 'E k p/q' or 'c m k p/q'")),
        }
    }
    if energies.len() != order + 1 {
        return Err(ParseError::new(
            text.lines().count().max(1),
            1,
            format!(
                "header promises order {order}, found {} energy lines",
                energies.len()
            ),
        ));
    }
    let table = (!orders.is_empty()).then(|| WavefunctionTable::new(level, orders));
    Ok(CacheEntry {
        series: EnergySeries::new(level, energies),
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_row() {
        let (s, _) = rs_recursion(0, 6);
        let row: Vec<String> = s.coeffs.iter().map(format_rational).collect();
        assert_eq!(row, TABLE1[0]);
    }

    #[test]
    fn second_order_matches_sum_over_states() {
        // E^{(2)} = -Σ_{m≠n} V_mn V_nm / (m - n) with monomial-basis elements
        let h = build_hamiltonian();
        for n in 0..=10usize {
            let vn = h.v.apply(&MonomialVector::basis(n));
            let mut e2 = BigRational::zero();
            for (m, vmn) in vn.iter() {
                if m == n {
                    continue;
                }
                let vnm = h.v.apply(&MonomialVector::basis(m)).get(n);
                e2 -= vmn * vnm / BigRational::from_integer(BigInt::from(m as i64 - n as i64));
            }
            let (s, _) = rs_recursion(n, 2);
            assert_eq!(s.coeffs[2], e2, "level {n}");
            let n = n as i64;
            assert_eq!(e2, q(-(34 * n * n * n + 51 * n * n + 59 * n + 21), 8));
        }
    }

    #[test]
    fn published_first_order_column() {
        let reference = table1();
        for (n, row) in reference.iter().enumerate() {
            let (s, _) = rs_recursion(n, 1);
            assert_eq!(s.coeffs[..2], row[..2]);
        }
    }

    #[test]
    fn order_zero_only() {
        let (s, t) = rs_recursion(3, 0);
        assert_eq!(s.coeffs, vec![q(7, 2)]);
        assert_eq!(t.get(3, 0), q(1, 1));
    }

    #[test]
    fn gauge_and_normalization() {
        let (_, t) = rs_recursion(2, 8);
        assert_eq!(t.get(2, 0), q(1, 1));
        for k in 1..=8 {
            assert!(t.get(2, k).is_zero());
        }
    }

    #[test]
    fn table_cap_limits_wavefunction_orders() {
        let (s, t) = rs_recursion_capped(0, 10, 4);
        assert_eq!(s.coeffs.len(), 11);
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn verify_detects_injected_error() {
        let mut all: Vec<EnergySeries> = table1()
            .into_iter()
            .enumerate()
            .map(|(n, row)| EnergySeries::new(n, row))
            .collect();
        assert_eq!(verify_table(&all).unwrap().matched(), 49);
        all[0].coeffs[2] = q(-21, 9);
        let report = verify_table(&all).unwrap();
        assert!(!report.passed());
        let bad: Vec<_> = report.mismatches().map(|c| (c.level, c.order)).collect();
        assert_eq!(bad, vec![(0, 2)]);
    }

    #[test]
    fn verify_preconditions() {
        let short: Vec<EnergySeries> = (0..7).map(|n| rs_recursion(n, 4).0).collect();
        assert_eq!(
            verify_table(&short),
            Err(VerifyError::InsufficientOrder { level: 0, order: 4 })
        );
        let missing: Vec<EnergySeries> = (0..6).map(|n| rs_recursion(n, 6).0).collect();
        assert_eq!(verify_table(&missing), Err(VerifyError::MissingLevel(6)));
    }

    #[test]
    fn serialize_simple() {
        let s = EnergySeries::new(0, vec![q(1, 2), q(3, 4)]);
        let text = serialize_series(&s);
        assert_eq!(text, "1/2\n3/4\n");
        assert_eq!(parse_series(&text, 0).unwrap(), s);
    }

    #[test]
    fn unicode_minus_rejected() {
        let err = parse_series("1/2\n\u{2212}21/8\n", 0).unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
    }

    #[test]
    fn malformed_rationals() {
        for bad in [
            "", "-", "1/", "/2", "1/0", "2/4", "1 /2", "+1/2", "1/-2", "1//2", "-0/1",
        ] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("0/1").unwrap(), q(0, 1));
    }

    #[test]
    fn cache_round_trip_with_table() {
        let (s, t) = rs_recursion(1, 5);
        let entry = CacheEntry {
            series: s,
            table: Some(t),
        };
        let text = entry.to_string();
        assert!(text.starts_with("level=1 order=5 convention=table1-v1\nE 0 3/2\n"));
        assert!(text.is_ascii());
        assert_eq!(parse_cache(&text).unwrap(), entry);
    }

    #[test]
    fn cache_rejects_foreign_convention_and_gaps() {
        let err = parse_cache("level=0 order=1 convention=old\nE 0 1/2\nE 1 3/4\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err =
            parse_cache("level=0 order=1 convention=table1-v1\nE 0 1/2\nE 2 3/4\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err =
            parse_cache("level=0 order=2 convention=table1-v1\nE 0 1/2\nE 1 3/4\n").unwrap_err();
        assert!(err.message.contains("order 2"));
        let err =
            parse_cache("level=0 order=1 convention=table1-v1\nE 0 1/2\nE 1 3/x\n").unwrap_err();
        assert_eq!((err.line, err.column), (3, 7));
    }
}
