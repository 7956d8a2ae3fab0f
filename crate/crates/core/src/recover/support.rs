use serde::Serialize;

use super::{RecoverError, RowOutcome};
use crate::hash_family::{HashFamily, MISSING};
use crate::linalg::{norm_inf, Tolerance};
use crate::par::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Discarded,
    Insignificant,
    SignificantPositive,
    SignificantNegative,
}

/// Coordinates declared positive and negative, each sorted ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignedSupport {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

impl SignedSupport {
    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Union of both sets, sorted.
    pub fn all(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .positive
            .iter()
            .chain(&self.negative)
            .copied()
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Which rows are trusted, and how a coordinate is tested in them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowRule {
    /// Every solved row; a discarded class also counts as positive. No negatives.
    Positive,
    /// Rows maximizing `‖z⁺‖₁` for positives and `‖z⁻‖₁` for negatives.
    General,
    /// Rows maximizing `‖z‖₁`, for both signs.
    Strengthened,
}

/// Class labels of every row and the rows selected by a [`RowRule`].
#[derive(Clone, Debug, PartialEq)]
pub struct RowAnalysis {
    rule: RowRule,
    labels: Vec<Option<Vec<ClassLabel>>>,
    positive_symbols: Vec<Vec<u32>>,
    negative_symbols: Vec<Vec<u32>>,
    positive_rows: Vec<usize>,
    negative_rows: Vec<usize>,
}

fn max_rows(norms: &[Option<f64>], tol: &Tolerance) -> Vec<usize> {
    let best = norms.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let cut = best - tol.threshold(best);
    norms
        .iter()
        .enumerate()
        .filter_map(|(i, n)| n.filter(|&v| v >= cut).map(|_| i))
        .collect()
}

impl RowAnalysis {
    /// Labels each row's classes and selects the trusted rows.
    ///
    /// Entries of `z_i` count as zero below the tolerance scaled by the
    /// largest `‖z_i‖∞` over all rows.
    pub fn new(
        pattern: &HashFamily,
        rows: &[RowOutcome],
        rule: RowRule,
        tol: &Tolerance,
    ) -> Result<Self, RecoverError> {
        if rows.len() != pattern.rows() {
            return Err(RecoverError::DimensionMismatch {
                expected: pattern.rows(),
                got: rows.len(),
            });
        }
        if rows.iter().all(|r| r.solution().is_none()) {
            return Err(RecoverError::NoMaximumRow);
        }
        let scale = rows
            .iter()
            .filter_map(|r| r.solution())
            .map(norm_inf)
            .fold(0.0, f64::max);
        let m = rows.len();
        let mut labels = Vec::with_capacity(m);
        let mut positive_symbols = vec![Vec::new(); m];
        let mut negative_symbols = vec![Vec::new(); m];
        let mut pos_norm = vec![None; m];
        let mut neg_norm = vec![None; m];
        let mut abs_norm = vec![None; m];
        for (i, row) in rows.iter().enumerate() {
            let Some(z) = row.solution() else {
                labels.push(None);
                continue;
            };
            let (mut p, mut n) = (0.0, 0.0);
            let row_labels: Vec<ClassLabel> = z
                .iter()
                .enumerate()
                .map(|(s, &v)| {
                    if tol.is_zero(v, scale) {
                        ClassLabel::Insignificant
                    } else if v > 0.0 {
                        p += v;
                        positive_symbols[i].push(s as u32 + 1);
                        ClassLabel::SignificantPositive
                    } else {
                        n -= v;
                        negative_symbols[i].push(s as u32 + 1);
                        ClassLabel::SignificantNegative
                    }
                })
                .collect();
            labels.push(Some(row_labels));
            pos_norm[i] = Some(p);
            neg_norm[i] = Some(n);
            abs_norm[i] = Some(p + n);
        }
        let (positive_rows, negative_rows) = match rule {
            RowRule::Positive => (
                (0..m).filter(|&i| labels[i].is_some()).collect(),
                Vec::new(),
            ),
            RowRule::General => (max_rows(&pos_norm, tol), max_rows(&neg_norm, tol)),
            RowRule::Strengthened => {
                let best = max_rows(&abs_norm, tol);
                (best.clone(), best)
            }
        };
        Ok(RowAnalysis {
            rule,
            labels,
            positive_symbols,
            negative_symbols,
            positive_rows,
            negative_rows,
        })
    }

    pub fn rule(&self) -> RowRule {
        self.rule
    }

    /// Label of the class of symbol `symbol` in `row`, or `None` if the row failed.
    pub fn label(&self, row: usize, symbol: u32) -> Option<ClassLabel> {
        let labels = self.labels[row].as_ref()?;
        Some(match symbol {
            MISSING => ClassLabel::Discarded,
            s => labels[s as usize - 1],
        })
    }

    pub fn labels(&self) -> &[Option<Vec<ClassLabel>>] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<Option<Vec<ClassLabel>>> {
        self.labels
    }

    /// Symbols of `row` labelled significant positive, ascending.
    pub fn positive_symbols(&self, row: usize) -> &[u32] {
        &self.positive_symbols[row]
    }

    pub fn negative_symbols(&self, row: usize) -> &[u32] {
        &self.negative_symbols[row]
    }

    /// Rows consulted for positive coordinates.
    pub fn positive_rows(&self) -> &[usize] {
        &self.positive_rows
    }

    /// Rows consulted for negative coordinates.
    pub fn negative_rows(&self) -> &[usize] {
        &self.negative_rows
    }

    /// Overrides one class label, keeping the selected rows unchanged.
    pub fn relabel(&mut self, row: usize, symbol: u32, label: ClassLabel) {
        let Some(labels) = self.labels[row].as_mut() else {
            return;
        };
        if symbol == MISSING || label == ClassLabel::Discarded {
            return;
        }
        labels[symbol as usize - 1] = label;
        self.positive_symbols[row].retain(|&s| s != symbol);
        self.negative_symbols[row].retain(|&s| s != symbol);
        let target = match label {
            ClassLabel::SignificantPositive => &mut self.positive_symbols[row],
            ClassLabel::SignificantNegative => &mut self.negative_symbols[row],
            _ => return,
        };
        let at = target.partition_point(|&s| s < symbol);
        target.insert(at, symbol);
    }

    pub(crate) fn accepts(&self, label: Option<ClassLabel>, want: ClassLabel) -> bool {
        match label {
            Some(l) if l == want => true,
            Some(ClassLabel::Discarded) => self.rule == RowRule::Positive,
            _ => false,
        }
    }
}

/// Signed support by testing every coordinate against the selected rows.
pub fn identify_naive(
    pattern: &HashFamily,
    analysis: &RowAnalysis,
    exec: Execution,
) -> SignedSupport {
    let test = |rows: &[usize], j: usize, want: ClassLabel| {
        !rows.is_empty()
            && rows
                .iter()
                .all(|&r| analysis.accepts(analysis.label(r, pattern.entry(r, j)), want))
    };
    let signs = par::map_collect(exec, pattern.cols(), |j| {
        if test(analysis.positive_rows(), j, ClassLabel::SignificantPositive) {
            1i8
        } else if test(analysis.negative_rows(), j, ClassLabel::SignificantNegative) {
            -1
        } else {
            0
        }
    });
    let mut out = SignedSupport::default();
    for (j, s) in signs.into_iter().enumerate() {
        match s {
            1 => out.positive.push(j),
            -1 => out.negative.push(j),
            _ => {}
        }
    }
    out
}
