//! Recovery of `x` from `y = B x`.
//!
//! Every algorithm follows the same outline: each pattern row's ingredient
//! solves its own small system, the per-row solutions label the symbol
//! classes of that row, the labels of a chosen set of rows are intersected
//! to find the signed support, and a final least-squares solve on that
//! support produces the values.

mod noisy;
mod sublinear;
mod support;

pub use noisy::{recover_noisy, NoisyEstimate, NoisyParams};
pub use sublinear::{identify_sublinear, recover_sublinear, SublinearStats};
pub use support::{identify_naive, ClassLabel, RowAnalysis, RowRule, SignedSupport};

use serde::Serialize;
use thiserror::Error;

use crate::compose::{ComposeError, ComposedMatrix};
use crate::ingredient::IngredientError;
use crate::linalg::{least_squares, norm2, LinalgError, Tolerance};
use crate::par::{self, Execution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecoverError {
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("declared support of size {size} cannot be certified (limit {limit})")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("final solve left residual {residual:.3e} above {limit:.3e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("no row produced a solution")]
    NoMaximumRow,
    #[error("pattern is not a labelled linear family: {0}")]
    NotLinearPattern(String),
    #[error("need {needed} maximum rows, found {available}")]
    InsufficientRows { needed: usize, available: usize },
    #[error("pattern contains the missing symbol")]
    MissingSymbolPresent,
    #[error("row {row}: {message}")]
    SchemeFailed { row: usize, message: String },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<ComposeError> for RecoverError {
    fn from(e: ComposeError) -> Self {
        match e {
            ComposeError::DimensionMismatch { expected, got } => {
                RecoverError::DimensionMismatch { expected, got }
            }
            other => RecoverError::BadParameter(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryOptions {
    pub tol: Tolerance,
    pub execution: Execution,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            tol: Tolerance::from_env(),
            execution: Execution::default(),
        }
    }
}

/// What one row's scheme returned.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "z", rename_all = "snake_case")]
pub enum RowOutcome {
    Solved(Vec<f64>),
    NoSparseSolution,
    Failed(String),
}

impl RowOutcome {
    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            RowOutcome::Solved(z) => Some(z),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryResult {
    pub x: Vec<f64>,
    pub support: SignedSupport,
    pub rows: Vec<RowOutcome>,
    /// Per-row class labels indexed by `σ - 1`; `None` for rows without a solution.
    pub labels: Vec<Option<Vec<ClassLabel>>>,
    pub positive_rows: Vec<usize>,
    pub negative_rows: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<SublinearStats>,
    pub residual: f64,
}

/// Runs each row's scheme on its slice of `y` with bound `bounds[i]`.
pub fn per_row_solve(
    c: &ComposedMatrix,
    y: &[f64],
    bounds: &[usize],
    opts: &RecoveryOptions,
) -> Result<Vec<RowOutcome>, RecoverError> {
    let m = c.pattern().rows();
    if bounds.len() != m {
        return Err(RecoverError::DimensionMismatch {
            expected: m,
            got: bounds.len(),
        });
    }
    let slices = c.split(y)?;
    Ok(par::map_collect(opts.execution, m, |i| {
        let ing = c.ingredient(i);
        match ing.recover(slices[i], bounds[i], &opts.tol) {
            Ok(z) if z.len() == ing.cols() => RowOutcome::Solved(z),
            Ok(z) => RowOutcome::Failed(format!(
                "scheme returned {} entries for {} columns",
                z.len(),
                ing.cols()
            )),
            Err(IngredientError::NoSparseSolution) => RowOutcome::NoSparseSolution,
            Err(e) => RowOutcome::Failed(e.to_string()),
        }
    }))
}

/// Least squares on the declared support, checked by its residual.
pub fn solve_on_support(
    c: &ComposedMatrix,
    y: &[f64],
    support: &SignedSupport,
    tol: &Tolerance,
) -> Result<(Vec<f64>, f64), RecoverError> {
    let cols = support.all();
    if cols.len() > c.rows() {
        return Err(RecoverError::SupportTooLarge {
            size: cols.len(),
            limit: c.rows(),
        });
    }
    let sub = c.columns(&cols);
    let ls = match least_squares(&sub, y, tol) {
        Ok(ls) => ls,
        Err(LinalgError::RankDeficient { rank, cols }) => {
            return Err(RecoverError::SupportTooLarge {
                size: cols,
                limit: rank,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let limit = tol.threshold(norm2(y));
    if ls.residual_norm > limit {
        return Err(RecoverError::ResidualTooLarge {
            residual: ls.residual_norm,
            limit,
        });
    }
    let mut x = vec![0.0; c.cols()];
    for (&j, &v) in cols.iter().zip(&ls.x) {
        x[j] = v;
    }
    Ok((x, ls.residual_norm))
}

fn run(
    c: &ComposedMatrix,
    y: &[f64],
    bounds: &[usize],
    rule: RowRule,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult, RecoverError> {
    let rows = per_row_solve(c, y, bounds, opts)?;
    let analysis = RowAnalysis::new(c.pattern(), &rows, rule, &opts.tol)?;
    let support = identify_naive(c.pattern(), &analysis, opts.execution);
    finish(c, y, rows, analysis, support, None, opts)
}

fn finish(
    c: &ComposedMatrix,
    y: &[f64],
    rows: Vec<RowOutcome>,
    analysis: RowAnalysis,
    support: SignedSupport,
    candidates: Option<SublinearStats>,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult, RecoverError> {
    let (x, residual) = solve_on_support(c, y, &support, &opts.tol)?;
    Ok(RecoveryResult {
        x,
        support,
        rows,
        positive_rows: analysis.positive_rows().to_vec(),
        negative_rows: analysis.negative_rows().to_vec(),
        labels: analysis.into_labels(),
        candidates,
        residual,
    })
}

/// Recovery of a nonnegative `t`-sparse signal.
///
/// `ℓ` is declared positive when, in every row with a solution, its class is
/// significant positive or discarded.
pub fn recover_positive(
    c: &ComposedMatrix,
    y: &[f64],
    t: usize,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult, RecoverError> {
    run(c, y, &vec![t; c.pattern().rows()], RowRule::Positive, opts)
}

/// Recovery of a mixed-sign `t`-sparse signal using the maximum positive
/// and maximum negative rows.
pub fn recover_general(
    c: &ComposedMatrix,
    y: &[f64],
    t: usize,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult, RecoverError> {
    run(c, y, &vec![t; c.pattern().rows()], RowRule::General, opts)
}

/// Recovery with per-row bounds `d`, trusting only the rows whose solution
/// has maximum ℓ1 norm.
pub fn recover_strengthened(
    c: &ComposedMatrix,
    y: &[f64],
    d: &[usize],
    opts: &RecoveryOptions,
) -> Result<RecoveryResult, RecoverError> {
    run(c, y, d, RowRule::Strengthened, opts)
}
