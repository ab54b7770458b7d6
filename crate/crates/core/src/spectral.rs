//! Truncated Hamiltonian in the orthonormal basis `φ_m = z^m/√m!` and its
//! low-lying spectrum, used as non-perturbative ground truth.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::numeric::to_f64;
use crate::report::fmt_f64;
use crate::weyl::{build_hamiltonian, MonomialVector};

/// Half-bandwidth of the quartic Hamiltonian.
pub const BAND: usize = 4;
pub const MIN_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix dimension {0} is below the minimum of {MIN_DIM}")]
    DimensionTooSmall(usize),
    #[error("coupling must be finite and non-negative, got {0}")]
    InvalidCoupling(f64),
    #[error("requested {requested} levels from a {dim}-dimensional truncation; at most dim/4 are reliable")]
    TooManyLevels { requested: usize, dim: usize },
    #[error("eigensolver did not converge within {iterations} sweeps (dim {dim})")]
    ConvergenceFailure { iterations: usize, dim: usize },
    #[error("dimension ladder must be strictly ascending")]
    UnsortedDims,
}

/// Symmetric banded matrix; `bands[d][i]` holds element `(i + d, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub g: f64,
    pub dim: usize,
    bands: [Vec<f64>; BAND + 1],
}

impl OperatorMatrix {
    pub fn get(&self, m: usize, n: usize) -> f64 {
        let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
        let d = hi - lo;
        if hi >= self.dim || d > BAND {
            0.0
        } else {
            self.bands[d][lo]
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                (i.saturating_sub(BAND)..(i + BAND + 1).min(self.dim))
                    .map(|j| self.get(i, j).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim, |i, _| {
            (i.saturating_sub(BAND)..(i + BAND + 1).min(self.dim))
                .map(|j| self.get(i, j) * v[j])
                .sum()
        })
    }

    /// Rows and columns with the given indices.
    fn submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.get(idx[i], idx[j]))
    }
}

/// `√(m!/n!)`, the change of basis from `z^n` to `φ_n`.
fn factorial_ratio_sqrt(m: usize, n: usize) -> f64 {
    if m >= n {
        ((n + 1..=m).map(|k| k as f64).product::<f64>()).sqrt()
    } else {
        1.0 / ((m + 1..=n).map(|k| k as f64).product::<f64>()).sqrt()
    }
}

/// `H₀ + gV` truncated to `N` basis states. Each column is obtained by
/// applying the exact Weyl-algebra operators to `z^n`; the lower triangle is
/// computed and mirrored.
pub fn build_matrix(g: f64, dim: usize) -> Result<OperatorMatrix, SpectralError> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(SpectralError::InvalidCoupling(g));
    }
    if dim < MIN_DIM {
        return Err(SpectralError::DimensionTooSmall(dim));
    }
    let h = build_hamiltonian();
    let mut bands: [Vec<f64>; BAND + 1] = std::array::from_fn(|d| vec![0.0; dim.saturating_sub(d)]);
    for n in 0..dim {
        let basis = MonomialVector::basis(n);
        let free = h.h0.apply(&basis);
        let quartic = h.v.apply(&basis);
        for d in 0..=BAND.min(dim - 1 - n) {
            let m = n + d;
            let c = to_f64(&free.get(m)) + g * to_f64(&quartic.get(m));
            bands[d][n] = c * factorial_ratio_sqrt(m, n);
        }
    }
    Ok(OperatorMatrix { g, dim, bands })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    #[default]
    Full,
    /// Even and odd parity sectors solved separately.
    ParityBlocks,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub g: f64,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    /// `‖Hv − λv‖₂` for each returned pair.
    pub residuals: Vec<f64>,
    pub eigenvectors: Vec<DVector<f64>>,
}

impl EigenResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        self.append_csv(&mut out);
        out
    }

    pub fn append_csv(&self, out: &mut String) {
        for (i, (e, r)) in self.eigenvalues.iter().zip(&self.residuals).enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(self.g),
                self.dim,
                i,
                fmt_f64(*e),
                fmt_f64(*r)
            ));
        }
    }
}

pub const CSV_HEADER: &str = "g,N,level,eigenvalue,residual";

const MAX_SWEEPS: usize = 10_000;

fn solve_dense(a: DMatrix<f64>) -> Result<(Vec<f64>, Vec<DVector<f64>>), SpectralError> {
    let dim = a.nrows();
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, MAX_SWEEPS).ok_or(
        SpectralError::ConvergenceFailure {
            iterations: MAX_SWEEPS,
            dim,
        },
    )?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    Ok((values, vectors))
}

/// The `count` smallest eigenvalues with their residual norms.
pub fn eigenvalues(m: &OperatorMatrix, count: usize) -> Result<EigenResult, SpectralError> {
    eigenvalues_with(m, count, Solver::Full)
}

pub fn eigenvalues_with(
    m: &OperatorMatrix,
    count: usize,
    solver: Solver,
) -> Result<EigenResult, SpectralError> {
    if count > m.dim / 4 {
        return Err(SpectralError::TooManyLevels {
            requested: count,
            dim: m.dim,
        });
    }
    let mut pairs: Vec<(f64, DVector<f64>)> = match solver {
        Solver::Full => {
            let (vals, vecs) = solve_dense(m.to_dense())?;
            vals.into_iter().zip(vecs).collect()
        }
        Solver::ParityBlocks => {
            let mut all = Vec::with_capacity(m.dim);
            for parity in 0..2 {
                let idx: Vec<usize> = (parity..m.dim).step_by(2).collect();
                let (vals, vecs) = solve_dense(m.submatrix(&idx))?;
                for (val, v) in vals.into_iter().zip(vecs) {
                    let mut full = DVector::zeros(m.dim);
                    for (k, &i) in idx.iter().enumerate() {
                        full[i] = v[k];
                    }
                    all.push((val, full));
                }
            }
            all.sort_by(|a, b| a.0.total_cmp(&b.0));
            all
        }
    };
    pairs.truncate(count);
    let residuals = pairs
        .iter()
        .map(|(val, v)| (m.mul_vec(v) - v * *val).norm())
        .collect();
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(EigenResult {
        g: m.g,
        dim: m.dim,
        eigenvalues,
        residuals,
        eigenvectors,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelConvergence {
    pub level: usize,
    /// `(N, eigenvalue)` along the dimension ladder.
    pub values: Vec<(usize, f64)>,
    /// `|λ(N_{i+1}) − λ(N_i)|`.
    pub deltas: Vec<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub g: f64,
    pub tolerance: f64,
    pub levels: Vec<LevelConvergence>,
}

impl ConvergenceTable {
    pub fn all_converged(&self) -> bool {
        self.levels.iter().all(|l| l.converged)
    }
}

/// Eigenvalues of the lowest `levels` states along an ascending ladder of
/// truncations. A level is flagged converged when its last delta is at most
/// `tolerance` (relative to the eigenvalue).
pub fn convergence_study(
    g: f64,
    levels: usize,
    dims: &[usize],
    tolerance: f64,
) -> Result<ConvergenceTable, SpectralError> {
    if dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::UnsortedDims);
    }
    let mut rows: Vec<LevelConvergence> = (0..levels)
        .map(|level| LevelConvergence {
            level,
            values: Vec::new(),
            deltas: Vec::new(),
            converged: false,
        })
        .collect();
    for &n in dims {
        let res = eigenvalues_with(&build_matrix(g, n)?, levels, Solver::ParityBlocks)?;
        for (row, e) in rows.iter_mut().zip(res.eigenvalues) {
            if let Some(&(_, prev)) = row.values.last() {
                row.deltas.push((e - prev).abs());
            }
            row.values.push((n, e));
        }
    }
    for row in &mut rows {
        let last = row.values.last().map_or(0.0, |v| v.1.abs());
        row.converged = row.deltas.last().is_some_and(|d| *d <= tolerance * last);
    }
    Ok(ConvergenceTable {
        g,
        tolerance,
        levels: rows,
    })
}
