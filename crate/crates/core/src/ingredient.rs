//! Ingredient matrices, their recovery schemes and null-space checks.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{
    self, least_squares, lp_maximize_with_limit, norm2, norm_inf, nullspace_basis, DenseMatrix,
    LinalgError, LinearProgram, LpOutcome, Tolerance, DEFAULT_LP_MAX_VARIABLES,
};
use crate::par::{self, Execution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngredientError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("sparsity bound {d} exceeds the {rows} rows of the matrix")]
    SparsityTooLarge { d: usize, rows: usize },
    #[error("no sparse solution within the bound")]
    NoSparseSolution,
    #[error("the system has no solution")]
    Infeasible,
    #[error("Vandermonde nodes must be distinct")]
    DuplicateNodes,
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("external scheme failed: {0}")]
    External(String),
    #[error("malformed ingredient file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// A recovery algorithm for one ingredient.
///
/// Given `A`, `y` and a sparsity bound `d` it returns the `d`-sparse `z`
/// with `A z = y`, or [`IngredientError::NoSparseSolution`].
pub trait RecoveryScheme: Send + Sync + fmt::Debug {
    fn recover(
        &self,
        a: &DenseMatrix,
        y: &[f64],
        d: usize,
        tol: &Tolerance,
    ) -> Result<Vec<f64>, IngredientError>;
}

#[derive(Clone, Debug)]
pub enum SchemeKind {
    L0BruteForce,
    L1Program,
    /// Program and arguments of a subprocess speaking the JSON protocol.
    External {
        command: Vec<String>,
    },
    /// In-process scheme; not serializable.
    Custom(Arc<dyn RecoveryScheme>),
}

impl PartialEq for SchemeKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SchemeKind::L0BruteForce, SchemeKind::L0BruteForce) => true,
            (SchemeKind::L1Program, SchemeKind::L1Program) => true,
            (SchemeKind::External { command: a }, SchemeKind::External { command: b }) => a == b,
            (SchemeKind::Custom(a), SchemeKind::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl RecoveryScheme for SchemeKind {
    fn recover(
        &self,
        a: &DenseMatrix,
        y: &[f64],
        d: usize,
        tol: &Tolerance,
    ) -> Result<Vec<f64>, IngredientError> {
        match self {
            SchemeKind::L0BruteForce => l0_brute_recover(a, y, d, tol),
            SchemeKind::L1Program => l1_sparse_recover(a, y, d, tol),
            SchemeKind::External { command } => external_recover(command, a, y, d),
            SchemeKind::Custom(s) => s.recover(a, y, d, tol),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SchemeRepr {
    Name(String),
    External { external: Vec<String> },
}

impl Serialize for SchemeKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            SchemeKind::L0BruteForce => SchemeRepr::Name("l0_brute_force".into()),
            SchemeKind::L1Program => SchemeRepr::Name("l1_program".into()),
            SchemeKind::External { command } => SchemeRepr::External {
                external: command.clone(),
            },
            SchemeKind::Custom(_) => {
                return Err(serde::ser::Error::custom(
                    "custom schemes cannot be serialized",
                ))
            }
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SchemeKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match SchemeRepr::deserialize(d)? {
            SchemeRepr::Name(n) if n == "l0_brute_force" => Ok(SchemeKind::L0BruteForce),
            SchemeRepr::Name(n) if n == "l1_program" => Ok(SchemeKind::L1Program),
            SchemeRepr::Name(n) => Err(serde::de::Error::custom(format!("unknown scheme {n:?}"))),
            SchemeRepr::External { external } if !external.is_empty() => {
                Ok(SchemeKind::External { command: external })
            }
            SchemeRepr::External { .. } => Err(serde::de::Error::custom("empty external command")),
        }
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Smallest-support solution by exhaustive search over supports of size
/// `0..=d`, lexicographic within each size.
pub fn l0_brute_recover(
    a: &DenseMatrix,
    y: &[f64],
    d: usize,
    tol: &Tolerance,
) -> Result<Vec<f64>, IngredientError> {
    if y.len() != a.rows() {
        return Err(IngredientError::DimensionMismatch {
            expected: a.rows(),
            got: y.len(),
        });
    }
    let k = a.cols();
    let d = d.min(k);
    if d > a.rows() {
        return Err(IngredientError::SparsityTooLarge { d, rows: a.rows() });
    }
    let limit = tol.threshold(norm2(y));
    if norm2(y) <= limit {
        return Ok(vec![0.0; k]);
    }
    for size in 1..=d {
        let mut support: Vec<usize> = (0..size).collect();
        loop {
            let sub = a.select_columns(&support);
            if let Ok(ls) = least_squares(&sub, y, tol) {
                if ls.residual_norm <= limit {
                    let mut z = vec![0.0; k];
                    for (&j, &v) in support.iter().zip(&ls.x) {
                        z[j] = v;
                    }
                    return Ok(z);
                }
            }
            if !next_combination(&mut support, k) {
                break;
            }
        }
    }
    Err(IngredientError::NoSparseSolution)
}

/// `argmin ‖z‖₁` subject to `A z = y`, via the positive/negative split.
pub fn l1_recover(a: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>, IngredientError> {
    l1_recover_with_limit(a, y, DEFAULT_LP_MAX_VARIABLES)
}

pub fn l1_recover_with_limit(
    a: &DenseMatrix,
    y: &[f64],
    max_vars: usize,
) -> Result<Vec<f64>, IngredientError> {
    if y.len() != a.rows() {
        return Err(IngredientError::DimensionMismatch {
            expected: a.rows(),
            got: y.len(),
        });
    }
    let k = a.cols();
    // variables (p, n), z = p - n
    let mut lp = LinearProgram::new(vec![-1.0; 2 * k]);
    for i in 0..a.rows() {
        let mut row = a.row(i).to_vec();
        row.extend(a.row(i).iter().map(|v| -v));
        lp = lp.eq(row, y[i]);
    }
    for j in 0..2 * k {
        let mut row = vec![0.0; 2 * k];
        row[j] = -1.0;
        lp = lp.le(row, 0.0);
    }
    match lp_maximize_with_limit(&lp, max_vars)? {
        LpOutcome::Optimal { x, .. } => Ok((0..k).map(|j| x[j] - x[k + j]).collect()),
        LpOutcome::Infeasible => Err(IngredientError::Infeasible),
        LpOutcome::Unbounded => Err(IngredientError::External(
            "ℓ1 program reported unbounded".into(),
        )),
    }
}

/// Number of entries of `z` above the zero threshold relative to `‖z‖∞`.
pub fn support_size(z: &[f64], tol: &Tolerance) -> usize {
    let scale = norm_inf(z);
    z.iter().filter(|v| !tol.is_zero(**v, scale)).count()
}

fn l1_sparse_recover(
    a: &DenseMatrix,
    y: &[f64],
    d: usize,
    tol: &Tolerance,
) -> Result<Vec<f64>, IngredientError> {
    let z = match l1_recover(a, y) {
        Ok(z) => z,
        Err(IngredientError::Infeasible) => return Err(IngredientError::NoSparseSolution),
        Err(e) => return Err(e),
    };
    if support_size(&z, tol) > d {
        return Err(IngredientError::NoSparseSolution);
    }
    Ok(z)
}

#[derive(Serialize)]
struct ExternalRequest<'a> {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    y: &'a [f64],
    d: usize,
}

#[derive(Deserialize)]
struct ExternalResponse {
    z: Option<Vec<f64>>,
    status: Option<String>,
}

fn external_recover(
    command: &[String],
    a: &DenseMatrix,
    y: &[f64],
    d: usize,
) -> Result<Vec<f64>, IngredientError> {
    let (prog, args) = command
        .split_first()
        .ok_or_else(|| IngredientError::External("empty command".into()))?;
    let request = serde_json::to_string(&ExternalRequest {
        a: a.to_rows(),
        y,
        d,
    })
    .map_err(|e| IngredientError::External(e.to_string()))?;
    let mut child = Command::new(prog)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| IngredientError::External(format!("{prog}: {e}")))?;
    child
        .stdin
        .take()
        .expect("stdin is piped")
        .write_all(request.as_bytes())
        .map_err(|e| IngredientError::External(e.to_string()))?;
    let out = child
        .wait_with_output()
        .map_err(|e| IngredientError::External(e.to_string()))?;
    if !out.status.success() {
        return Err(IngredientError::External(format!(
            "{prog} exited with {}",
            out.status
        )));
    }
    let resp: ExternalResponse = serde_json::from_slice(&out.stdout)
        .map_err(|e| IngredientError::External(format!("bad reply: {e}")))?;
    match (resp.z, resp.status.as_deref()) {
        (_, Some("no_sparse_solution")) => Err(IngredientError::NoSparseSolution),
        (Some(z), _) if z.len() == a.cols() && z.iter().all(|v| v.is_finite()) => Ok(z),
        (Some(z), _) => Err(IngredientError::External(format!(
            "reply z has {} entries (expected {}) or non-finite values",
            z.len(),
            a.cols()
        ))),
        (None, s) => Err(IngredientError::External(format!(
            "reply without z (status {s:?})"
        ))),
    }
}

/// Every `min(2t, k)` columns of `a` are linearly independent.
pub fn check_l0_nsc(a: &DenseMatrix, t: usize, tol: &Tolerance) -> bool {
    check_l0_nsc_with(a, t, tol, Execution::default())
}

pub fn check_l0_nsc_with(a: &DenseMatrix, t: usize, tol: &Tolerance, exec: Execution) -> bool {
    let k = a.cols();
    let s = (2 * t).min(k);
    if s == 0 {
        return true;
    }
    if s > a.rows() {
        return false;
    }
    par::all(exec, k + 1 - s, |first| {
        let mut cols: Vec<usize> = (first..first + s).collect();
        loop {
            if linalg::rank(&a.select_columns(&cols), tol) < s {
                return false;
            }
            if s == 1 || !next_combination(&mut cols[1..], k) {
                return true;
            }
        }
    })
}

/// `‖y_C‖₁ < ½‖y‖₁` for every nonzero null vector `y` and every `|C| = t`.
///
/// Solved as one linear program per column set and sign pattern over the
/// null-space coordinates.
pub fn check_l1_nsc(a: &DenseMatrix, t: usize, tol: &Tolerance) -> Result<bool, IngredientError> {
    check_l1_nsc_with(a, t, tol, DEFAULT_LP_MAX_VARIABLES, Execution::default())
}

pub fn check_l1_nsc_with(
    a: &DenseMatrix,
    t: usize,
    tol: &Tolerance,
    max_vars: usize,
    exec: Execution,
) -> Result<bool, IngredientError> {
    let k = a.cols();
    if t == 0 {
        return Ok(true);
    }
    if t > k {
        return Err(IngredientError::BadParameter(format!(
            "t = {t} exceeds {k} columns"
        )));
    }
    let basis = nullspace_basis(a, tol);
    let p = basis.cols();
    if p == 0 {
        return Ok(true);
    }
    if p + k > max_vars {
        return Err(IngredientError::Linalg(LinalgError::SizeExceeded {
            vars: p + k,
            limit: max_vars,
        }));
    }
    // variables (c, u): y = N c, |y_i| <= u_i, Σ u <= 1
    let mut base = LinearProgram::new(Vec::new());
    for i in 0..k {
        let mut pos = basis.row(i).to_vec();
        pos.extend((0..k).map(|j| if j == i { -1.0 } else { 0.0 }));
        let mut neg: Vec<f64> = basis.row(i).iter().map(|v| -v).collect();
        neg.extend((0..k).map(|j| if j == i { -1.0 } else { 0.0 }));
        base = base.le(pos, 0.0).le(neg, 0.0);
    }
    let mut total = vec![0.0; p];
    total.extend(std::iter::repeat_n(1.0, k));
    base = base.le(total, 1.0);
    let bound = 0.5 - tol.eps;

    let mut sets = Vec::new();
    let mut c: Vec<usize> = (0..t).collect();
    loop {
        sets.push(c.clone());
        if !next_combination(&mut c, k) {
            break;
        }
    }
    // y and -y give the same |y_C|, so the first sign is fixed to +1
    let patterns = 1usize << (t - 1);
    let jobs = sets.len() * patterns;
    let failure = par::find_map_first(exec, jobs, |job| {
        let set = &sets[job / patterns];
        let mask = job % patterns;
        let mut objective = vec![0.0; p + k];
        for (pos, &col) in set.iter().enumerate() {
            let sign = if pos > 0 && (mask >> (pos - 1)) & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            for (c, o) in basis.row(col).iter().zip(objective.iter_mut()) {
                *o += sign * c;
            }
        }
        let mut lp = base.clone();
        lp.objective = objective;
        match lp_maximize_with_limit(&lp, max_vars) {
            Ok(LpOutcome::Optimal { value, .. }) => (value >= bound).then_some(Ok(())),
            Ok(_) => Some(Err(IngredientError::External(
                "null-space program not bounded".into(),
            ))),
            Err(e) => Some(Err(e.into())),
        }
    });
    match failure {
        None => Ok(true),
        Some(Ok(())) => Ok(false),
        Some(Err(e)) => Err(e),
    }
}

/// Which null-space condition a certification record refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NscKind {
    L0,
    L1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationRecord {
    pub kind: NscKind,
    pub t: usize,
    pub holds: bool,
    pub tolerance: f64,
}

/// An `r × k` measurement matrix with its recovery scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct Ingredient {
    matrix: DenseMatrix,
    scheme: SchemeKind,
    certified_t: Option<usize>,
    certification: Vec<CertificationRecord>,
}

#[derive(Serialize, Deserialize)]
struct IngredientFile {
    r: usize,
    k: usize,
    entries: Vec<Vec<f64>>,
    scheme: SchemeKind,
    #[serde(default)]
    certified_t: Option<usize>,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    certification: Vec<CertificationRecord>,
}

impl Ingredient {
    pub fn new(matrix: DenseMatrix, scheme: SchemeKind) -> Self {
        Ingredient {
            matrix,
            scheme,
            certified_t: None,
            certification: Vec::new(),
        }
    }

    /// The 1×1 matrix `[1]`.
    pub fn identity() -> Self {
        Self::new(DenseMatrix::identity(1), SchemeKind::L0BruteForce)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn scheme(&self) -> &SchemeKind {
        &self.scheme
    }

    pub fn with_scheme(mut self, scheme: SchemeKind) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn certified_t(&self) -> Option<usize> {
        self.certified_t
    }

    pub fn certification(&self) -> &[CertificationRecord] {
        &self.certification
    }

    /// Runs a null-space check and records the outcome. A passing check
    /// raises the certified sparsity to at least `t`.
    pub fn certify(
        &mut self,
        kind: NscKind,
        t: usize,
        tol: &Tolerance,
    ) -> Result<bool, IngredientError> {
        let holds = match kind {
            NscKind::L0 => check_l0_nsc(&self.matrix, t, tol),
            NscKind::L1 => check_l1_nsc(&self.matrix, t, tol)?,
        };
        self.certification.push(CertificationRecord {
            kind,
            t,
            holds,
            tolerance: tol.eps,
        });
        if holds {
            self.certified_t = Some(self.certified_t.map_or(t, |c| c.max(t)));
        }
        Ok(holds)
    }

    pub fn recover(
        &self,
        y: &[f64],
        d: usize,
        tol: &Tolerance,
    ) -> Result<Vec<f64>, IngredientError> {
        self.scheme.recover(&self.matrix, y, d, tol)
    }

    pub fn to_json(&self) -> Result<String, IngredientError> {
        let file = IngredientFile {
            r: self.rows(),
            k: self.cols(),
            entries: self.matrix.to_rows(),
            scheme: self.scheme.clone(),
            certified_t: self.certified_t,
            tolerance: self.certification.last().map(|c| c.tolerance),
            certification: self.certification.clone(),
        };
        let mut s =
            serde_json::to_string(&file).map_err(|e| IngredientError::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, IngredientError> {
        let file: IngredientFile =
            serde_json::from_str(text).map_err(|e| IngredientError::Format(e.to_string()))?;
        if file.entries.len() != file.r || file.entries.iter().any(|row| row.len() != file.k) {
            return Err(IngredientError::Format(format!(
                "entries do not form a {}x{} matrix",
                file.r, file.k
            )));
        }
        let matrix = if file.r == 0 {
            DenseMatrix::zeros(0, file.k)
        } else {
            DenseMatrix::from_rows(&file.entries)?
        };
        Ok(Ingredient {
            matrix,
            scheme: file.scheme,
            certified_t: file.certified_t,
            certification: file.certification,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, IngredientError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| IngredientError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

/// Default Vandermonde nodes: `1, 2, …, k`.
pub fn default_nodes(k: usize) -> Vec<f64> {
    (1..=k).map(|v| v as f64).collect()
}

/// `k` nodes spread evenly over `[-1, 1]`; better conditioned for large `k`.
pub fn spread_nodes(k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![0.5];
    }
    (0..k)
        .map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64)
        .collect()
}

/// The `rows × k` Vandermonde matrix, row `p` holding `node^p`.
pub fn vandermonde(nodes: &[f64], rows: usize) -> Result<DenseMatrix, IngredientError> {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(IngredientError::DuplicateNodes);
    }
    let k = nodes.len();
    let mut data = Vec::with_capacity(rows * k);
    for p in 0..rows {
        data.extend(nodes.iter().map(|x| x.powi(p as i32)));
    }
    Ok(DenseMatrix::new(rows, k, data)?)
}

/// A `2t × k` Vandermonde ingredient with the ℓ0 scheme, certified for `t`.
pub fn make_vandermonde_ingredient(
    k: usize,
    t: usize,
    nodes: Option<&[f64]>,
    tol: &Tolerance,
) -> Result<Ingredient, IngredientError> {
    if k == 0 || t == 0 {
        return Err(IngredientError::BadParameter(
            "k and t must be positive".into(),
        ));
    }
    let nodes = match nodes {
        Some(n) if n.len() != k => {
            return Err(IngredientError::DimensionMismatch {
                expected: k,
                got: n.len(),
            })
        }
        Some(n) => n.to_vec(),
        None => default_nodes(k),
    };
    let mut ing = Ingredient::new(vandermonde(&nodes, 2 * t)?, SchemeKind::L0BruteForce);
    ing.certify(NscKind::L0, t, tol)?;
    Ok(ing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn v46() -> DenseMatrix {
        vandermonde(&default_nodes(6), 4).unwrap()
    }

    #[test]
    fn l0_examples() {
        let id = DenseMatrix::identity(2);
        assert_eq!(
            l0_brute_recover(&id, &[3.0, 0.0], 1, &tol()).unwrap(),
            vec![3.0, 0.0]
        );
        assert_eq!(
            l0_brute_recover(&id, &[0.0, 0.0], 1, &tol()).unwrap(),
            vec![0.0, 0.0]
        );
        let a = v46();
        let mut x = vec![0.0; 6];
        x[1] = 1.5;
        x[4] = -2.0;
        let y = a.mul_vec(&x).unwrap();
        let z = l0_brute_recover(&a, &y, 2, &tol()).unwrap();
        for (u, v) in z.iter().zip(&x) {
            assert!((u - v).abs() < 1e-9);
        }
        let l1 = l1_recover(&a, &y).unwrap();
        for (u, v) in l1.iter().zip(&x) {
            assert!((u - v).abs() < 1e-8);
        }
        assert!(matches!(
            l0_brute_recover(&id, &[1.0, 1.0], 1, &tol()),
            Err(IngredientError::NoSparseSolution)
        ));
        assert!(l0_brute_recover(&DenseMatrix::identity(1), &[1.0], 3, &tol()).is_ok());
        let wide = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(
            l0_brute_recover(&wide, &[1.0], 2, &tol()),
            Err(IngredientError::SparsityTooLarge { d: 2, rows: 1 })
        ));
    }

    #[test]
    fn l1_examples() {
        let id = DenseMatrix::identity(3);
        let z = l1_recover(&id, &[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(z, vec![1.0, -2.0, 0.5]);
        let ones = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let z = l1_recover(&ones, &[2.0]).unwrap();
        assert!((linalg::norm1(&z) - 2.0).abs() < 1e-12);
        assert!(z.contains(&0.0));
        let zero_row = DenseMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        assert_eq!(
            l1_recover(&zero_row, &[1.0]),
            Err(IngredientError::Infeasible)
        );
    }

    #[test]
    fn nsc_examples() {
        assert!(check_l0_nsc(&DenseMatrix::identity(4), 2, &tol()));
        let ones = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(!check_l0_nsc(&ones, 1, &tol()));
        assert!(check_l0_nsc(&v46(), 2, &tol()));
        assert!(check_l1_nsc(&DenseMatrix::identity(3), 1, &tol()).unwrap());
        assert!(!check_l1_nsc(&ones, 1, &tol()).unwrap());
        // difference matrix: null space spanned by (1,1,1), |y_C| = 1/3 of the mass
        let diff = DenseMatrix::from_rows(&[vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]]).unwrap();
        assert!(check_l1_nsc(&diff, 1, &tol()).unwrap());
        assert!(!check_l1_nsc(&diff, 2, &tol()).unwrap());
    }

    #[test]
    fn vandermonde_ingredients() {
        let ing = make_vandermonde_ingredient(2, 1, None, &tol()).unwrap();
        assert_eq!(ing.matrix().to_rows(), vec![vec![1.0, 1.0], vec![1.0, 2.0]]);
        assert_eq!(ing.certified_t(), Some(1));
        let ing = make_vandermonde_ingredient(6, 2, None, &tol()).unwrap();
        assert_eq!(ing.certified_t(), Some(2));
        let ing = make_vandermonde_ingredient(1, 3, None, &tol()).unwrap();
        assert_eq!((ing.rows(), ing.cols()), (6, 1));
        assert_eq!(ing.certified_t(), Some(3));
        assert_eq!(
            make_vandermonde_ingredient(2, 1, Some(&[1.0, 1.0]), &tol()),
            Err(IngredientError::DuplicateNodes)
        );
    }

    #[test]
    fn json_round_trip() {
        let ing = make_vandermonde_ingredient(3, 1, None, &tol())
            .unwrap()
            .with_scheme(SchemeKind::External {
                command: vec!["python3".into(), "solver.py".into()],
            });
        let text = ing.to_json().unwrap();
        assert!(text.contains("\"scheme\":{\"external\":[\"python3\",\"solver.py\"]}"));
        assert_eq!(Ingredient::from_json(&text).unwrap(), ing);
        let l1 = Ingredient::new(DenseMatrix::identity(2), SchemeKind::L1Program);
        assert!(l1.to_json().unwrap().contains("\"l1_program\""));
        assert!(
            Ingredient::from_json(r#"{"r":1,"k":2,"entries":[[1]],"scheme":"l1_program"}"#)
                .is_err()
        );
        assert!(
            Ingredient::from_json(r#"{"r":1,"k":1,"entries":[[1]],"scheme":"magic"}"#).is_err()
        );
    }

    #[test]
    fn l1_scheme_reports_dense_minimizers() {
        let id = DenseMatrix::identity(3);
        let scheme = SchemeKind::L1Program;
        assert!(scheme.recover(&id, &[1.0, 0.0, 0.0], 1, &tol()).is_ok());
        assert_eq!(
            scheme.recover(&id, &[1.0, 1.0, 0.0], 1, &tol()),
            Err(IngredientError::NoSparseSolution)
        );
    }
}
