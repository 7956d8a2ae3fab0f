//! Linear hash families over GF(q).
//!
//! Column `j` is the polynomial whose coefficients `c_0, …, c_{α-1}` are the
//! base-`q` digits of `j`, least significant first. The row labelled `β`
//! holds `f(β)`; the row labelled ∞ holds `c_{α-1}`. Symbols are the field
//! element index plus one.

use super::{HashFamily, HashFamilyError, RowLabel};
use crate::field::Field;

/// Largest number of cells `gen_linear` will materialize.
pub const MAX_LINEAR_CELLS: usize = 1 << 26;

/// Row count `(α-1)·w₁·w₂ + 1` that makes a linear family `{w₁,w₂}`-separating.
pub fn linear_row_requirement(alpha: usize, w1: usize, w2: usize) -> usize {
    (alpha - 1) * w1 * w2 + 1
}

/// Implicit description of a linear family: field, degree bound and the
/// labels of the kept rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPattern {
    field: Field,
    alpha: usize,
    labels: Vec<RowLabel>,
}

fn column_count(q: u32, alpha: usize) -> Option<usize> {
    (q as usize).checked_pow(alpha as u32)
}

impl LinearPattern {
    pub fn new(field: &Field, alpha: usize, m: usize) -> Result<Self, HashFamilyError> {
        let q = field.order();
        if alpha < 2 || alpha > q as usize {
            return Err(HashFamilyError::AlphaOutOfRange { alpha, q });
        }
        if m == 0 || m > q as usize + 1 {
            return Err(HashFamilyError::TooManyRows {
                m,
                max: q as usize + 1,
            });
        }
        let labels = std::iter::once(RowLabel::Infinity)
            .chain((0..q).map(RowLabel::Element))
            .take(m)
            .collect();
        Ok(LinearPattern {
            field: field.clone(),
            alpha,
            labels,
        })
    }

    /// Recovers the implicit description of `p` and checks every entry.
    pub fn from_family(p: &HashFamily) -> Result<Self, HashFamilyError> {
        let labels = p
            .row_labels()
            .ok_or_else(|| HashFamilyError::NotLinear("no row labels".into()))?
            .to_vec();
        let q = p.alphabet(0);
        if p.alphabet_sizes().iter().any(|&k| k != q) {
            return Err(HashFamilyError::NotLinear("alphabet sizes differ".into()));
        }
        let field = Field::of_order(q)
            .map_err(|_| HashFamilyError::NotLinear(format!("{q} is not a prime power")))?;
        let mut alpha = 0usize;
        let mut n = 1usize;
        while n < p.cols() {
            n = n.saturating_mul(q as usize);
            alpha += 1;
        }
        if n != p.cols() || alpha < 2 || alpha > q as usize {
            return Err(HashFamilyError::NotLinear(format!(
                "{} columns is not q^alpha",
                p.cols()
            )));
        }
        let mut seen = Vec::with_capacity(labels.len());
        for &l in &labels {
            if let RowLabel::Element(e) = l {
                if e >= q {
                    return Err(HashFamilyError::NotLinear(format!(
                        "row label {e} outside GF({q})"
                    )));
                }
            }
            if seen.contains(&l) {
                return Err(HashFamilyError::NotLinear("repeated row label".into()));
            }
            seen.push(l);
        }
        let lp = LinearPattern {
            field,
            alpha,
            labels,
        };
        let mut coeffs = vec![0u32; alpha];
        for j in 0..p.cols() {
            lp.fill_coefficients(j, &mut coeffs);
            for i in 0..p.rows() {
                if p.entry(i, j) != lp.symbol_of(&coeffs, i) {
                    return Err(HashFamilyError::NotLinear(format!(
                        "entry ({i}, {j}) disagrees"
                    )));
                }
            }
        }
        Ok(lp)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn labels(&self) -> &[RowLabel] {
        &self.labels
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn cols(&self) -> usize {
        column_count(self.field.order(), self.alpha).unwrap_or(usize::MAX)
    }

    /// Low-first coefficient indices of column `j`.
    pub fn coefficients(&self, j: usize) -> Vec<u32> {
        let mut out = vec![0; self.alpha];
        self.fill_coefficients(j, &mut out);
        out
    }

    pub(crate) fn fill_coefficients(&self, mut j: usize, out: &mut [u32]) {
        let q = self.field.order() as usize;
        for c in out.iter_mut() {
            *c = (j % q) as u32;
            j /= q;
        }
    }

    /// Column index of the polynomial with the given coefficient indices.
    pub fn column_index(&self, coeffs: &[u32]) -> usize {
        let q = self.field.order() as usize;
        coeffs.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
    }

    /// Entry in row `row` of the column with these coefficients.
    pub(crate) fn symbol_of(&self, coeffs: &[u32], row: usize) -> u32 {
        let value = match self.labels[row] {
            RowLabel::Infinity => coeffs[self.alpha - 1],
            RowLabel::Element(b) => self.field.eval_raw(coeffs, b),
        };
        value + 1
    }

    /// Entry `(row, j)` computed without materializing the family.
    pub fn symbol(&self, row: usize, j: usize) -> u32 {
        let mut coeffs = vec![0; self.alpha];
        self.fill_coefficients(j, &mut coeffs);
        self.symbol_of(&coeffs, row)
    }

    pub fn to_family(&self) -> Result<HashFamily, HashFamilyError> {
        let q = self.field.order();
        let n = match column_count(q, self.alpha) {
            Some(n) if n.saturating_mul(self.rows()) <= MAX_LINEAR_CELLS => n,
            _ => {
                return Err(HashFamilyError::Format(format!(
                    "GF({q}) with alpha = {} has too many columns",
                    self.alpha
                )))
            }
        };
        let m = self.rows();
        let mut cells = vec![0u32; m * n];
        let mut coeffs = vec![0u32; self.alpha];
        for j in 0..n {
            self.fill_coefficients(j, &mut coeffs);
            for i in 0..m {
                cells[i * n + j] = self.symbol_of(&coeffs, i);
            }
        }
        HashFamily::from_cells(m, n, vec![q; m], cells)?.with_row_labels(self.labels.clone())
    }
}

/// The first `m` rows (∞, ω₀, ω₁, …) of the linear family of degree bound `alpha`.
pub fn gen_linear(field: &Field, alpha: usize, m: usize) -> Result<HashFamily, HashFamilyError> {
    LinearPattern::new(field, alpha, m)?.to_family()
}
