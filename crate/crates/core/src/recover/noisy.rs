//! Interval estimates for almost-sparse signals.
//!
//! Each row's signature `‖z_ρ‖₁` is compared with the largest signature `q`.
//! A class with `z_ρσ ≥ 0` gives the upper estimate `|z_ρσ| + ½(q − ‖z_ρ‖₁)`
//! and the lower estimate `−½(q − ‖z_ρ‖₁)` for each of its coordinates;
//! negative entries give the mirror image. Intersecting over rows bounds
//! every coordinate.

use serde::Serialize;

use super::{per_row_solve, RecoverError, RecoveryOptions, RowOutcome};
use crate::compose::ComposedMatrix;
use crate::hash_family::HashFamily;
use crate::linalg::{least_squares, norm1};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyParams {
    pub t: usize,
    /// ℓ1 mass allowed outside the `t` dominant coordinates.
    pub s: f64,
    /// ℓ1 error allowed in each row's solution.
    pub eps: f64,
    /// Also least-squares refit on the support of `x*`.
    pub refit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoisyEstimate {
    /// `ℓ(i)`, the largest row lower estimate.
    pub lower: Vec<f64>,
    /// `u(i)`, the smallest row upper estimate.
    pub upper: Vec<f64>,
    /// `u_ρσ` indexed `[ρ][σ − 1]`.
    pub row_upper: Vec<Vec<f64>>,
    /// `ℓ_ρσ` indexed `[ρ][σ − 1]`.
    pub row_lower: Vec<Vec<f64>>,
    pub signatures: Vec<f64>,
    pub max_signature: f64,
    pub x_star: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refit: Option<Vec<f64>>,
}

impl NoisyEstimate {
    /// `(ℓ_ρ(j), u_ρ(j))`: the estimates row `ρ` gives for coordinate `j`.
    pub fn row_bounds(&self, pattern: &HashFamily, row: usize, j: usize) -> (f64, f64) {
        let s = pattern.entry(row, j) as usize - 1;
        (self.row_lower[row][s], self.row_upper[row][s])
    }
}

/// Estimates `x` from `y = B x` when `x` is only close to `t`-sparse.
///
/// Each row's scheme is called with bound `min(k_i, r_i)` so it may return
/// the full projection rather than a `t`-sparse approximation.
pub fn recover_noisy(
    c: &ComposedMatrix,
    y: &[f64],
    params: &NoisyParams,
    opts: &RecoveryOptions,
) -> Result<(Vec<f64>, NoisyEstimate), RecoverError> {
    let p = c.pattern();
    if p.has_missing() {
        return Err(RecoverError::MissingSymbolPresent);
    }
    if params.t == 0
        || !(params.s >= 0.0 && params.s.is_finite())
        || !(params.eps >= 0.0 && params.eps.is_finite())
    {
        return Err(RecoverError::BadParameter(
            "need t ≥ 1 and finite s, ε ≥ 0".into(),
        ));
    }
    let bounds: Vec<usize> = (0..p.rows())
        .map(|i| c.ingredient(i).cols().min(c.ingredient(i).rows()))
        .collect();
    let outcomes = per_row_solve(c, y, &bounds, opts)?;
    let mut z = Vec::with_capacity(outcomes.len());
    for (row, o) in outcomes.into_iter().enumerate() {
        match o {
            RowOutcome::Solved(v) => z.push(v),
            RowOutcome::NoSparseSolution => {
                return Err(RecoverError::SchemeFailed {
                    row,
                    message: "no solution within the bound".into(),
                })
            }
            RowOutcome::Failed(message) => return Err(RecoverError::SchemeFailed { row, message }),
        }
    }
    let signatures: Vec<f64> = z.iter().map(|v| norm1(v)).collect();
    let q = signatures.iter().copied().fold(0.0, f64::max);
    let mut row_upper = Vec::with_capacity(z.len());
    let mut row_lower = Vec::with_capacity(z.len());
    for (zr, &sig) in z.iter().zip(&signatures) {
        let slack = 0.5 * (q - sig);
        row_upper.push(
            zr.iter()
                .map(|&v| if v >= 0.0 { v + slack } else { slack })
                .collect::<Vec<_>>(),
        );
        row_lower.push(
            zr.iter()
                .map(|&v| if v >= 0.0 { -slack } else { v - slack })
                .collect::<Vec<_>>(),
        );
    }
    let n = p.cols();
    let mut upper = vec![f64::INFINITY; n];
    let mut lower = vec![f64::NEG_INFINITY; n];
    for row in 0..p.rows() {
        for (j, (u, l)) in upper.iter_mut().zip(lower.iter_mut()).enumerate() {
            let s = p.entry(row, j) as usize - 1;
            *u = u.min(row_upper[row][s]);
            *l = l.max(row_lower[row][s]);
        }
    }
    let cut = params.s + params.eps;
    let x_star: Vec<f64> = upper
        .iter()
        .zip(&lower)
        .map(|(&u, &l)| {
            if u.abs() <= cut && l.abs() <= cut {
                0.0
            } else if u.abs() >= l.abs() {
                u
            } else {
                l
            }
        })
        .collect();
    let refit = if params.refit {
        let cols: Vec<usize> = (0..n).filter(|&j| x_star[j] != 0.0).collect();
        least_squares(&c.columns(&cols), y, &opts.tol)
            .ok()
            .map(|ls| {
                let mut x = vec![0.0; n];
                for (&j, &v) in cols.iter().zip(&ls.x) {
                    x[j] = v;
                }
                x
            })
    } else {
        None
    };
    let estimate = NoisyEstimate {
        lower,
        upper,
        row_upper,
        row_lower,
        signatures,
        max_signature: q,
        x_star: x_star.clone(),
        refit,
    };
    Ok((x_star, estimate))
}
