//! Small dense real linear algebra.
//!
//! Everything here is sized for ingredient matrices and desk-scale composed
//! matrices: Householder QR with column pivoting for rank, least squares and
//! null spaces, and a dense two-phase simplex (Bland's rule) for the linear
//! programs behind ℓ1 recovery and ℓ1 null-space certification.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable that overrides the default zero threshold.
pub const TOLERANCE_ENV: &str = "COLREP_TOLERANCE";

/// Default bound on the number of LP variables.
pub const DEFAULT_LP_MAX_VARIABLES: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("system is underdetermined ({rows} rows < {cols} columns)")]
    Underdetermined { rows: usize, cols: usize },
    #[error("linear program has {vars} variables, limit is {limit}")]
    SizeExceeded { vars: usize, limit: usize },
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("tolerance must be positive and finite")]
    BadTolerance,
}

/// Zero threshold for rank, residual and sign decisions.
///
/// Every "is this zero" decision in the crate is `|v| <= eps * scale` for a
/// scale chosen by the caller (largest column norm, `‖y‖`, and so on).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self, LinalgError> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Tolerance { eps })
        } else {
            Err(LinalgError::BadTolerance)
        }
    }

    /// The default, or the value of `COLREP_TOLERANCE` when set and valid.
    pub fn from_env() -> Self {
        std::env::var(TOLERANCE_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .and_then(|eps| Tolerance::new(eps).ok())
            .unwrap_or_default()
    }

    /// Absolute threshold for quantities of magnitude `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.eps * scale.abs().max(f64::MIN_POSITIVE)
    }

    pub fn is_zero(&self, value: f64, scale: f64) -> bool {
        value.abs() <= self.threshold(scale)
    }
}

/// Row-major real matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Panics on non-finite values.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(v.is_finite(), "matrix entries must be finite");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (c, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + c] = self.get(i, j);
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if other.rows != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Largest Euclidean column norm.
    pub fn max_column_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| norm2(&self.column(j)))
            .fold(0.0, f64::max)
    }
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Householder QR with column pivoting: `A P = Q R`.
struct PivotedQr {
    rows: usize,
    /// Row-major working copy; R lives in the upper triangle.
    r: Vec<f64>,
    /// Householder vectors (length `rows - k`) and their `beta`.
    reflectors: Vec<(Vec<f64>, f64)>,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    fn new(a: &DenseMatrix, tol: &Tolerance) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut r = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::new();
        let scale = a.max_column_norm();
        let cutoff = tol.threshold(scale);
        let mut rank = 0;
        for k in 0..m.min(n) {
            // pivot: largest remaining column norm over rows k..m
            let (mut best, mut best_norm) = (k, -1.0);
            for j in k..n {
                let s: f64 = (k..m).map(|i| r[i * n + j] * r[i * n + j]).sum();
                if s > best_norm {
                    best = j;
                    best_norm = s;
                }
            }
            if best_norm.sqrt() <= cutoff {
                break;
            }
            if best != k {
                perm.swap(k, best);
                for i in 0..m {
                    r.swap(i * n + k, i * n + best);
                }
            }
            let x: Vec<f64> = (k..m).map(|i| r[i * n + k]).collect();
            let xn = norm2(&x);
            let alpha = if x[0] >= 0.0 { -xn } else { xn };
            let mut v = x;
            v[0] -= alpha;
            let vv: f64 = v.iter().map(|t| t * t).sum();
            let beta = if vv > 0.0 { 2.0 / vv } else { 0.0 };
            for j in k..n {
                let s: f64 = (k..m).map(|i| v[i - k] * r[i * n + j]).sum();
                if s != 0.0 {
                    for i in k..m {
                        r[i * n + j] -= beta * s * v[i - k];
                    }
                }
            }
            for i in k + 1..m {
                r[i * n + k] = 0.0;
            }
            reflectors.push((v, beta));
            rank += 1;
        }
        PivotedQr {
            rows: m,
            r,
            reflectors,
            perm,
            rank,
        }
    }

    /// `Qᵀ y`.
    fn qt_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        for (k, (v, beta)) in self.reflectors.iter().enumerate() {
            let s: f64 = v.iter().zip(&out[k..]).map(|(a, b)| a * b).sum();
            for (o, vi) in out[k..].iter_mut().zip(v) {
                *o -= beta * s * vi;
            }
        }
        out
    }

    /// Full orthogonal `Q` (rows × rows), row-major.
    fn q_full(&self) -> Vec<f64> {
        let m = self.rows;
        let mut q = vec![0.0; m * m];
        for i in 0..m {
            q[i * m + i] = 1.0;
        }
        // Q = H_0 H_1 ... H_{r-1}; apply to the identity from the right side
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            for j in 0..m {
                let s: f64 = (k..m).map(|i| v[i - k] * q[i * m + j]).sum();
                if s != 0.0 {
                    for i in k..m {
                        q[i * m + j] -= beta * s * v[i - k];
                    }
                }
            }
        }
        q
    }
}

/// Numerical rank by pivoted QR.
pub fn rank(m: &DenseMatrix, tol: &Tolerance) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    PivotedQr::new(m, tol).rank
}

/// Solution of `min ‖Ax − y‖₂` and its residual norm.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    pub residual_norm: f64,
}

pub fn least_squares(
    a: &DenseMatrix,
    y: &[f64],
    tol: &Tolerance,
) -> Result<LeastSquares, LinalgError> {
    if y.len() != a.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows,
            got: y.len(),
        });
    }
    if a.rows < a.cols {
        return Err(LinalgError::Underdetermined {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.cols;
    if n == 0 {
        return Ok(LeastSquares {
            x: Vec::new(),
            residual_norm: norm2(y),
        });
    }
    let qr = PivotedQr::new(a, tol);
    if qr.rank < n {
        return Err(LinalgError::RankDeficient {
            rank: qr.rank,
            cols: n,
        });
    }
    let qty = qr.qt_mul(y);
    let mut z = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| qr.r[i * n + j] * z[j]).sum();
        z[i] = (qty[i] - s) / qr.r[i * n + i];
    }
    let mut x = vec![0.0; n];
    for (j, &p) in qr.perm.iter().enumerate() {
        x[p] = z[j];
    }
    let ax = a.mul_vec(&x)?;
    let residual_norm = norm2(&ax.iter().zip(y).map(|(u, v)| u - v).collect::<Vec<_>>());
    Ok(LeastSquares { x, residual_norm })
}

/// Orthonormal basis of `N(A)` as the columns of an `n × (n − rank)` matrix.
pub fn nullspace_basis(a: &DenseMatrix, tol: &Tolerance) -> DenseMatrix {
    let n = a.cols;
    if a.rows == 0 {
        return DenseMatrix::identity(n);
    }
    let at = a.transpose();
    let qr = PivotedQr::new(&at, tol);
    let q = qr.q_full();
    let r = qr.rank;
    let mut basis = DenseMatrix::zeros(n, n - r);
    for i in 0..n {
        for c in r..n {
            basis.data[i * (n - r) + (c - r)] = q[i * n + c];
        }
    }
    basis
}

/// `maximize objᵀx` subject to `E x = f`, `G x ≤ h`, with `x` free.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub inequalities: Vec<(Vec<f64>, f64)>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            ..Default::default()
        }
    }

    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.equalities.push((row, rhs));
        self
    }

    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.inequalities.push((row, rhs));
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Unbounded,
    Infeasible,
}

pub fn lp_maximize(lp: &LinearProgram) -> Result<LpOutcome, LinalgError> {
    lp_maximize_with_limit(lp, DEFAULT_LP_MAX_VARIABLES)
}

const LP_EPS: f64 = 1e-9;
const LP_MAX_PIVOTS: usize = 100_000;

pub fn lp_maximize_with_limit(
    lp: &LinearProgram,
    max_vars: usize,
) -> Result<LpOutcome, LinalgError> {
    let n = lp.num_vars();
    if n > max_vars {
        return Err(LinalgError::SizeExceeded {
            vars: n,
            limit: max_vars,
        });
    }
    for (row, rhs) in lp.equalities.iter().chain(&lp.inequalities) {
        if row.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
    }
    if lp.objective.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite);
    }

    // Standard form columns: x+ (n), x- (n), slacks (ineq), artificials (rows).
    let n_eq = lp.equalities.len();
    let n_in = lp.inequalities.len();
    let rows = n_eq + n_in;
    let n_struct = 2 * n + n_in;
    let width = n_struct + rows;
    let mut t = Tableau {
        a: vec![0.0; rows * width],
        b: vec![0.0; rows],
        basis: (n_struct..width).collect(),
        width,
        rows,
    };
    for (r, (row, rhs)) in lp.equalities.iter().chain(&lp.inequalities).enumerate() {
        let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t.a[r * width + j] = sign * row[j];
            t.a[r * width + n + j] = -sign * row[j];
        }
        if r >= n_eq {
            t.a[r * width + 2 * n + (r - n_eq)] = sign;
        }
        t.a[r * width + n_struct + r] = 1.0;
        t.b[r] = sign * rhs;
    }

    // Phase I: maximize -sum(artificials).
    let mut phase1 = vec![0.0; width];
    phase1[n_struct..].iter_mut().for_each(|c| *c = -1.0);
    let rhs_scale = t.b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    match t.run(&phase1, width)? {
        Some(()) => {}
        None => unreachable!("phase one is bounded"),
    }
    let infeas: f64 = t
        .basis
        .iter()
        .zip(&t.b)
        .filter(|(&bv, _)| bv >= n_struct)
        .map(|(_, v)| *v)
        .sum();
    if infeas > 1e-7 * rhs_scale {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows {
        if t.basis[r] >= n_struct {
            match (0..n_struct).find(|&j| t.a[r * width + j].abs() > LP_EPS) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.remove_row(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut phase2 = vec![0.0; width];
    for j in 0..n {
        phase2[j] = lp.objective[j];
        phase2[n + j] = -lp.objective[j];
    }
    match t.run(&phase2, n_struct)? {
        None => Ok(LpOutcome::Unbounded),
        Some(()) => {
            let mut x = vec![0.0; n];
            for (r, &bv) in t.basis.iter().enumerate() {
                if bv < n {
                    x[bv] += t.b[r];
                } else if bv < 2 * n {
                    x[bv - n] -= t.b[r];
                }
            }
            let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
            Ok(LpOutcome::Optimal { x, value })
        }
    }
}

struct Tableau {
    a: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
    rows: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        self.b[r] /= p;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.a[i * w + j] -= f * self.a[r * w + j];
                }
                self.b[i] -= f * self.b[r];
                self.a[i * w + c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width;
        self.a.drain(r * w..(r + 1) * w);
        self.b.remove(r);
        self.basis.remove(r);
        self.rows -= 1;
    }

    /// Bland's rule simplex maximizing `cost`; only columns `< allowed` may
    /// enter. `None` means unbounded.
    fn run(&mut self, cost: &[f64], allowed: usize) -> Result<Option<()>, LinalgError> {
        let w = self.width;
        for _ in 0..LP_MAX_PIVOTS {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: f64 = (0..self.rows)
                    .map(|i| cost[self.basis[i]] * self.a[i * w + j])
                    .sum();
                cost[j] - z > LP_EPS
            });
            let Some(c) = entering else {
                return Ok(Some(()));
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aic = self.a[i * w + c];
                if aic > LP_EPS {
                    let ratio = self.b[i] / aic;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - LP_EPS
                                || ((ratio - lr).abs() <= LP_EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(None),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(LinalgError::IterationLimit(LP_MAX_PIVOTS))
    }
}
