//! Support identification over a linear pattern without scanning columns.
//!
//! Choose the first `α` trusted rows. Every tuple of significant symbols,
//! one per chosen row, fixes a unique polynomial of degree below `α`, hence
//! a unique column. Only those candidate columns are tested against the
//! remaining trusted rows, so the work depends on `t^α` and `m`, not on `n`.

use serde::Serialize;

use super::support::{RowAnalysis, RowRule, SignedSupport};
use super::{finish, per_row_solve, RecoverError, RecoveryOptions, RecoveryResult};
use crate::compose::ComposedMatrix;
use crate::hash_family::{LinearPattern, RowLabel};
use crate::par::{self, Execution};

const PARALLEL_CANDIDATES: usize = 256;

/// Sizes of the candidate sets `|V⁺|` and `|V⁻|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SublinearStats {
    pub positive_candidates: usize,
    pub negative_candidates: usize,
}

impl SublinearStats {
    pub fn max(&self) -> usize {
        self.positive_candidates.max(self.negative_candidates)
    }
}

struct Locator<'a> {
    lp: &'a LinearPattern,
    chosen: Vec<usize>,
    /// Position of the ∞ row within `chosen`, if present.
    infinity: Option<usize>,
}

impl<'a> Locator<'a> {
    fn new(lp: &'a LinearPattern, rows: &[usize]) -> Result<Self, RecoverError> {
        let alpha = lp.alpha();
        if rows.len() < alpha {
            return Err(RecoverError::InsufficientRows {
                needed: alpha,
                available: rows.len(),
            });
        }
        let chosen = rows[..alpha].to_vec();
        let infinity = chosen
            .iter()
            .position(|&r| lp.labels()[r] == RowLabel::Infinity);
        Ok(Locator {
            lp,
            chosen,
            infinity,
        })
    }

    /// Coefficients of the polynomial taking the given field values on the chosen rows.
    fn polynomial(&self, values: &[u32], coeffs: &mut [u32]) {
        let f = self.lp.field();
        let alpha = self.lp.alpha();
        let node = |r: usize| match self.lp.labels()[r] {
            RowLabel::Element(b) => b,
            RowLabel::Infinity => unreachable!("the ∞ row is handled separately"),
        };
        match self.infinity {
            None => {
                let nodes: Vec<u32> = self.chosen.iter().map(|&r| node(r)).collect();
                f.interpolate_raw(&nodes, values, coeffs);
            }
            Some(pos) => {
                let lead = values[pos];
                let mut nodes = Vec::with_capacity(alpha - 1);
                let mut adjusted = Vec::with_capacity(alpha - 1);
                for (k, &r) in self.chosen.iter().enumerate() {
                    if k == pos {
                        continue;
                    }
                    let b = node(r);
                    nodes.push(b);
                    let top = f.mul_raw(lead, f.pow_raw(b, (alpha - 1) as u64));
                    adjusted.push(f.sub_raw(values[k], top));
                }
                f.interpolate_raw(&nodes, &adjusted, &mut coeffs[..alpha - 1]);
                coeffs[alpha - 1] = lead;
            }
        }
    }

    /// Columns whose symbol lies in `symbols(ρ)` for every trusted row `ρ`.
    fn locate<'s, F>(&self, rows: &[usize], symbols: F, exec: Execution) -> (Vec<usize>, usize)
    where
        F: Fn(usize) -> &'s [u32] + Sync,
    {
        let sets: Vec<&[u32]> = self.chosen.iter().map(|&r| symbols(r)).collect();
        let total = sets
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))
            .unwrap_or(usize::MAX);
        if total == 0 {
            return (Vec::new(), 0);
        }
        let alpha = self.lp.alpha();
        let check = |idx: usize| -> Option<usize> {
            let mut rest = idx;
            let values: Vec<u32> = sets
                .iter()
                .map(|s| {
                    let v = s[rest % s.len()] - 1;
                    rest /= s.len();
                    v
                })
                .collect();
            let mut coeffs = vec![0u32; alpha];
            self.polynomial(&values, &mut coeffs);
            rows.iter()
                .all(|&r| symbols(r).contains(&self.lp.symbol_of(&coeffs, r)))
                .then(|| self.lp.column_index(&coeffs))
        };
        let exec = if total >= PARALLEL_CANDIDATES {
            exec
        } else {
            Execution::Sequential
        };
        let mut found: Vec<usize> = par::map_collect(exec, total, check)
            .into_iter()
            .flatten()
            .collect();
        found.sort_unstable();
        found.dedup();
        (found, total)
    }
}

/// Signed support from the candidate sets of the trusted rows.
pub fn identify_sublinear(
    lp: &LinearPattern,
    analysis: &RowAnalysis,
    exec: Execution,
) -> Result<(SignedSupport, SublinearStats), RecoverError> {
    let mut support = SignedSupport::default();
    let mut stats = SublinearStats::default();
    let pos_rows = analysis.positive_rows();
    if !pos_rows.is_empty() {
        let loc = Locator::new(lp, pos_rows)?;
        let (found, count) = loc.locate(pos_rows, |r| analysis.positive_symbols(r), exec);
        support.positive = found;
        stats.positive_candidates = count;
    }
    if analysis.rule() != RowRule::Positive {
        let neg_rows = analysis.negative_rows();
        if !neg_rows.is_empty() {
            let loc = Locator::new(lp, neg_rows)?;
            let (found, count) = loc.locate(neg_rows, |r| analysis.negative_symbols(r), exec);
            support.negative = found
                .into_iter()
                .filter(|j| support.positive.binary_search(j).is_err())
                .collect();
            stats.negative_candidates = count;
        }
    }
    Ok((support, stats))
}

/// Mixed-sign recovery over a labelled linear pattern; never materializes `B`.
pub fn recover_sublinear(
    c: &ComposedMatrix,
    y: &[f64],
    t: usize,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult, RecoverError> {
    let lp = c
        .linear()
        .ok_or_else(|| RecoverError::NotLinearPattern("no implicit linear description".into()))?;
    let rows = per_row_solve(c, y, &vec![t; c.pattern().rows()], opts)?;
    let analysis = RowAnalysis::new(c.pattern(), &rows, RowRule::General, &opts.tol)?;
    let (support, stats) = identify_sublinear(lp, &analysis, opts.execution)?;
    finish(c, y, rows, analysis, support, Some(stats), opts)
}
