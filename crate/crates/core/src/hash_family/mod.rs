//! Pattern matrices (hash families) and their separation properties.
//!
//! Symbols in row `i` are `1..=k_i`; the missing symbol ○ is stored as
//! [`MISSING`] (`0`), both in memory and in the JSON file format.

mod check;
mod linear;
mod shape;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::FieldError;

pub use check::{
    check_distributing, check_perfect, check_separating, check_strengthening, perfect_rows,
    separating_rows, strengthening_rows, CheckOptions, Verdict, Witness, DEFAULT_BUDGET,
    DEFAULT_SAMPLE_TRIALS,
};
pub use linear::{gen_linear, linear_row_requirement, LinearPattern};
pub use shape::{distributing_shapes, PartitionShape};

/// The missing symbol ○.
pub const MISSING: u32 = 0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HashFamilyError {
    #[error("hash family needs at least one row and one column")]
    Empty,
    #[error("expected {expected} rows, got {got}")]
    RowCountMismatch { expected: usize, got: usize },
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("alphabet size of row {0} must be positive")]
    ZeroAlphabet(usize),
    #[error("entry ({row}, {col}) = {symbol} is outside 0..={k}")]
    SymbolOutOfRange {
        row: usize,
        col: usize,
        symbol: u32,
        k: u32,
    },
    #[error("row index {row} out of range for {m} rows")]
    RowOutOfRange { row: usize, m: usize },
    #[error("the array contains the missing symbol")]
    ContainsMissingSymbol,
    #[error("strength {t} exceeds the {n} columns")]
    SparsityExceedsColumns { t: usize, n: usize },
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid partition shape: {0}")]
    BadShape(String),
    #[error("alpha = {alpha} must satisfy 2 <= alpha <= q = {q}")]
    AlphaOutOfRange { alpha: usize, q: u32 },
    #[error("m = {m} rows requested, at most q + 1 = {max} available")]
    TooManyRows { m: usize, max: usize },
    #[error("invalid row labels: {0}")]
    BadRowLabels(String),
    #[error("not a linear hash family: {0}")]
    NotLinear(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed hash family file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Row label of a linear hash family: ∞ or the field element `ω_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowLabel {
    Infinity,
    /// Index of the field element.
    Element(u32),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Infinity => write!(f, "inf"),
            RowLabel::Element(i) => write!(f, "{i}"),
        }
    }
}

impl Serialize for RowLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RowLabel::Infinity => s.serialize_str("inf"),
            RowLabel::Element(i) => s.serialize_u32(*i),
        }
    }
}

impl<'de> Deserialize<'de> for RowLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Index(u32),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::Index(i) => Ok(RowLabel::Element(i)),
            Repr::Name(s) if s == "inf" || s == "∞" => Ok(RowLabel::Infinity),
            Repr::Name(s) => Err(serde::de::Error::custom(format!("unknown row label {s:?}"))),
        }
    }
}

/// An `m × n` array whose row `i` uses symbols from `{○, 1, …, k_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFamily {
    m: usize,
    n: usize,
    k: Vec<u32>,
    cells: Vec<u32>,
    row_labels: Option<Vec<RowLabel>>,
}

/// The partition `{S_○, S_1, …, S_k}` of the columns induced by one row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowClasses {
    /// `S_○`.
    pub missing: Vec<usize>,
    /// `classes[σ - 1] = S_σ`.
    pub classes: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct HashFamilyFile {
    m: usize,
    n: usize,
    k: Vec<u32>,
    rows: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row_labels: Option<Vec<RowLabel>>,
}

impl HashFamily {
    /// Builds a family from explicit rows and per-row alphabet sizes.
    pub fn new(k: Vec<u32>, rows: Vec<Vec<u32>>) -> Result<Self, HashFamilyError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(HashFamilyError::Empty);
        }
        if k.len() != m {
            return Err(HashFamilyError::RowCountMismatch {
                expected: m,
                got: k.len(),
            });
        }
        let mut cells = Vec::with_capacity(m * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(HashFamilyError::RaggedRow {
                    row: i,
                    expected: n,
                    got: row.len(),
                });
            }
            cells.extend_from_slice(row);
        }
        Self::from_cells(m, n, k, cells)
    }

    /// Same alphabet size on every row.
    pub fn homogeneous(k: u32, rows: Vec<Vec<u32>>) -> Result<Self, HashFamilyError> {
        let m = rows.len();
        Self::new(vec![k; m], rows)
    }

    pub fn from_cells(
        m: usize,
        n: usize,
        k: Vec<u32>,
        cells: Vec<u32>,
    ) -> Result<Self, HashFamilyError> {
        if m == 0 || n == 0 {
            return Err(HashFamilyError::Empty);
        }
        if k.len() != m {
            return Err(HashFamilyError::RowCountMismatch {
                expected: m,
                got: k.len(),
            });
        }
        if cells.len() != m * n {
            return Err(HashFamilyError::DimensionMismatch {
                expected: m * n,
                got: cells.len(),
            });
        }
        for (i, &ki) in k.iter().enumerate() {
            if ki == 0 {
                return Err(HashFamilyError::ZeroAlphabet(i));
            }
            for j in 0..n {
                let symbol = cells[i * n + j];
                if symbol > ki {
                    return Err(HashFamilyError::SymbolOutOfRange {
                        row: i,
                        col: j,
                        symbol,
                        k: ki,
                    });
                }
            }
        }
        Ok(HashFamily {
            m,
            n,
            k,
            cells,
            row_labels: None,
        })
    }

    pub fn with_row_labels(mut self, labels: Vec<RowLabel>) -> Result<Self, HashFamilyError> {
        if labels.len() != self.m {
            return Err(HashFamilyError::BadRowLabels(format!(
                "{} labels for {} rows",
                labels.len(),
                self.m
            )));
        }
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn alphabet_sizes(&self) -> &[u32] {
        &self.k
    }

    pub fn alphabet(&self, row: usize) -> u32 {
        self.k[row]
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.cells[row * self.n..(row + 1) * self.n]
    }

    pub fn row_labels(&self) -> Option<&[RowLabel]> {
        self.row_labels.as_deref()
    }

    pub fn has_missing(&self) -> bool {
        self.cells.contains(&MISSING)
    }

    /// The class partition induced by `row`.
    pub fn row_classes(&self, row: usize) -> Result<RowClasses, HashFamilyError> {
        if row >= self.m {
            return Err(HashFamilyError::RowOutOfRange { row, m: self.m });
        }
        let mut out = RowClasses {
            missing: Vec::new(),
            classes: vec![Vec::new(); self.k[row] as usize],
        };
        for (j, &s) in self.row(row).iter().enumerate() {
            if s == MISSING {
                out.missing.push(j);
            } else {
                out.classes[s as usize - 1].push(j);
            }
        }
        Ok(out)
    }

    /// The family restricted to the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self, HashFamilyError> {
        let mut cells = Vec::with_capacity(self.m * cols.len());
        for i in 0..self.m {
            for &j in cols {
                if j >= self.n {
                    return Err(HashFamilyError::DimensionMismatch {
                        expected: self.n,
                        got: j,
                    });
                }
                cells.push(self.entry(i, j));
            }
        }
        Self::from_cells(self.m, cols.len(), self.k.clone(), cells)
    }

    pub fn to_json(&self) -> String {
        let file = HashFamilyFile {
            m: self.m,
            n: self.n,
            k: self.k.clone(),
            rows: (0..self.m).map(|i| self.row(i).to_vec()).collect(),
            row_labels: self.row_labels.clone(),
        };
        let mut s = serde_json::to_string(&file).expect("hash family serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, HashFamilyError> {
        let file: HashFamilyFile =
            serde_json::from_str(text).map_err(|e| HashFamilyError::Format(e.to_string()))?;
        let hf = Self::new(file.k, file.rows)?;
        if hf.m != file.m || hf.n != file.n {
            return Err(HashFamilyError::Format(format!(
                "declared {}x{} but rows give {}x{}",
                file.m, file.n, hf.m, hf.n
            )));
        }
        match file.row_labels {
            Some(labels) => hf.with_row_labels(labels),
            None => Ok(hf),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, HashFamilyError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| HashFamilyError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

impl fmt::Display for HashFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.m {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|&s| {
                    if s == MISSING {
                        "o".to_string()
                    } else {
                        s.to_string()
                    }
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
