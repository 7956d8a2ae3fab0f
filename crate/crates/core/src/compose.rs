//! Column replacement.
//!
//! Row `i` of the pattern contributes a block of `r_i` rows: column `j` of
//! the block is column `p_ij` of `A^i`, or zeros when `p_ij = ○`. The stacked
//! matrix is kept implicit; entries and columns are computed on demand and
//! the dense form is built only when asked for.

use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash_family::{HashFamily, HashFamilyError, LinearPattern, MISSING};
use crate::ingredient::{Ingredient, IngredientError};
use crate::linalg::DenseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComposeError {
    #[error("pattern has {expected} rows but {got} ingredients were given")]
    RowCountMismatch { expected: usize, got: usize },
    #[error("row {row} uses {k} symbols but its ingredient has {cols} columns")]
    AlphabetMismatch { row: usize, k: u32, cols: usize },
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row index {row} out of range for {m} rows")]
    RowOutOfRange { row: usize, m: usize },
    #[error(transparent)]
    HashFamily(#[from] HashFamilyError),
    #[error(transparent)]
    Ingredient(#[from] IngredientError),
    #[error("malformed composition file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// The column replacement of `A^1, …, A^m` into `P`.
#[derive(Debug)]
pub struct ComposedMatrix {
    pattern: HashFamily,
    ingredients: Vec<Arc<Ingredient>>,
    offsets: Vec<usize>,
    linear: Option<LinearPattern>,
    dense: OnceLock<DenseMatrix>,
}

impl Clone for ComposedMatrix {
    fn clone(&self) -> Self {
        ComposedMatrix {
            pattern: self.pattern.clone(),
            ingredients: self.ingredients.clone(),
            offsets: self.offsets.clone(),
            linear: self.linear.clone(),
            dense: OnceLock::new(),
        }
    }
}

/// Heterogeneous column replacement: one ingredient per pattern row.
pub fn column_replace(
    pattern: &HashFamily,
    ingredients: &[Ingredient],
) -> Result<ComposedMatrix, ComposeError> {
    let shared: Vec<Arc<Ingredient>> = ingredients.iter().cloned().map(Arc::new).collect();
    ComposedMatrix::from_shared(pattern.clone(), shared)
}

/// `w_iσ = Σ_{j ∈ S_iσ} x_j` for `σ = 1..=k_i`.
pub fn project(pattern: &HashFamily, row: usize, x: &[f64]) -> Result<Vec<f64>, ComposeError> {
    if row >= pattern.rows() {
        return Err(ComposeError::RowOutOfRange {
            row,
            m: pattern.rows(),
        });
    }
    if x.len() != pattern.cols() {
        return Err(ComposeError::DimensionMismatch {
            expected: pattern.cols(),
            got: x.len(),
        });
    }
    let mut w = vec![0.0; pattern.alphabet(row) as usize];
    for (&s, &v) in pattern.row(row).iter().zip(x) {
        if s != MISSING {
            w[s as usize - 1] += v;
        }
    }
    Ok(w)
}

impl ComposedMatrix {
    /// Homogeneous column replacement: the same ingredient in every row.
    pub fn homogeneous(
        pattern: &HashFamily,
        ingredient: &Ingredient,
    ) -> Result<Self, ComposeError> {
        let shared = Arc::new(ingredient.clone());
        Self::from_shared(pattern.clone(), vec![shared; pattern.rows()])
    }

    pub fn from_shared(
        pattern: HashFamily,
        ingredients: Vec<Arc<Ingredient>>,
    ) -> Result<Self, ComposeError> {
        if ingredients.len() != pattern.rows() {
            return Err(ComposeError::RowCountMismatch {
                expected: pattern.rows(),
                got: ingredients.len(),
            });
        }
        let mut offsets = Vec::with_capacity(ingredients.len() + 1);
        offsets.push(0);
        for (i, ing) in ingredients.iter().enumerate() {
            if ing.cols() != pattern.alphabet(i) as usize {
                return Err(ComposeError::AlphabetMismatch {
                    row: i,
                    k: pattern.alphabet(i),
                    cols: ing.cols(),
                });
            }
            offsets.push(offsets[i] + ing.rows());
        }
        let linear = pattern
            .row_labels()
            .and_then(|_| LinearPattern::from_family(&pattern).ok());
        Ok(ComposedMatrix {
            pattern,
            ingredients,
            offsets,
            linear,
            dense: OnceLock::new(),
        })
    }

    pub fn pattern(&self) -> &HashFamily {
        &self.pattern
    }

    pub fn ingredient(&self, row: usize) -> &Ingredient {
        &self.ingredients[row]
    }

    pub fn ingredients(&self) -> impl Iterator<Item = &Ingredient> {
        self.ingredients.iter().map(|a| a.as_ref())
    }

    /// The implicit description, when the pattern is a labelled linear family.
    pub fn linear(&self) -> Option<&LinearPattern> {
        self.linear.as_ref()
    }

    pub fn rows(&self) -> usize {
        *self.offsets.last().expect("offsets start with 0")
    }

    pub fn cols(&self) -> usize {
        self.pattern.cols()
    }

    /// Rows of `B` contributed by pattern row `i`.
    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn entry(&self, r: usize, j: usize) -> f64 {
        let i = self.offsets.partition_point(|&o| o <= r) - 1;
        match self.pattern.entry(i, j) {
            MISSING => 0.0,
            s => self.ingredients[i]
                .matrix()
                .get(r - self.offsets[i], s as usize - 1),
        }
    }

    /// Column `j` of `B`, computed from the pattern and ingredients.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.add_column(j, 1.0, &mut out);
        out
    }

    fn add_column(&self, j: usize, scale: f64, out: &mut [f64]) {
        for (i, ing) in self.ingredients.iter().enumerate() {
            let s = self.pattern.entry(i, j);
            if s == MISSING {
                continue;
            }
            let a = ing.matrix();
            for (local, slot) in out[self.block(i)].iter_mut().enumerate() {
                *slot += scale * a.get(local, s as usize - 1);
            }
        }
    }

    /// The submatrix of `B` on the given columns.
    pub fn columns(&self, cols: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows(), cols.len());
        for (c, &j) in cols.iter().enumerate() {
            for (r, v) in self.column(j).into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        out
    }

    /// The dense `B`, built on first use.
    pub fn dense(&self) -> &DenseMatrix {
        self.dense.get_or_init(|| {
            let all: Vec<usize> = (0..self.cols()).collect();
            self.columns(&all)
        })
    }

    /// `y = B x`, accumulated column by column over the nonzeros of `x`.
    pub fn sample(&self, x: &[f64]) -> Result<Vec<f64>, ComposeError> {
        if x.len() != self.cols() {
            return Err(ComposeError::DimensionMismatch {
                expected: self.cols(),
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.rows()];
        for (j, &v) in x.iter().enumerate() {
            if v != 0.0 {
                self.add_column(j, v, &mut y);
            }
        }
        Ok(y)
    }

    /// Splits `y` into the per-row slices `y_i`.
    pub fn split<'a>(&self, y: &'a [f64]) -> Result<Vec<&'a [f64]>, ComposeError> {
        if y.len() != self.rows() {
            return Err(ComposeError::DimensionMismatch {
                expected: self.rows(),
                got: y.len(),
            });
        }
        Ok((0..self.pattern.rows())
            .map(|i| &y[self.block(i)])
            .collect())
    }

    /// Dense `B` as CSV, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let b = self.dense();
        let mut out = String::new();
        for i in 0..b.rows() {
            let line: Vec<String> = b.row(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// On-disk composition: paths to a pattern and its ingredients, relative
/// to the directory of the composition file. A single ingredient is used
/// for every row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionFile {
    pub pattern: PathBuf,
    pub ingredients: Vec<PathBuf>,
}

impl CompositionFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("composition serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ComposeError> {
        serde_json::from_str(text).map_err(|e| ComposeError::Format(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, ComposeError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ComposeError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    /// Loads the referenced files, resolving relative paths against `base`.
    pub fn load(&self, base: &Path) -> Result<ComposedMatrix, ComposeError> {
        let resolve = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let pattern = HashFamily::read(resolve(&self.pattern))?;
        let ingredients = self
            .ingredients
            .iter()
            .map(|p| Ingredient::read(resolve(p)).map(Arc::new))
            .collect::<Result<Vec<_>, _>>()?;
        match ingredients.len() {
            0 => Err(ComposeError::Format("no ingredients listed".into())),
            1 => {
                let m = pattern.rows();
                ComposedMatrix::from_shared(pattern, vec![ingredients[0].clone(); m])
            }
            _ => ComposedMatrix::from_shared(pattern, ingredients),
        }
    }
}

/// Reads a composition file and everything it references.
pub fn read_composed(path: impl AsRef<Path>) -> Result<ComposedMatrix, ComposeError> {
    let path = path.as_ref();
    let file = CompositionFile::read(path)?;
    file.load(path.parent().unwrap_or_else(|| Path::new(".")))
}
