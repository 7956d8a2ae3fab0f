//! Separation checkers.
//!
//! Every check enumerates column sets in lexicographic order and, inside a
//! set, the canonical part assignments of each shape. When the estimated
//! number of row tests exceeds the budget the shape is checked on uniformly
//! sampled instances instead, and a passing result is reported as sampled.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::shape::{distributing_shapes, PartitionShape};
use super::{HashFamily, HashFamilyError, MISSING};
use crate::par::{self, Execution};

/// Default limit on estimated row tests before switching to sampling.
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Default number of sampled instances per shape.
pub const DEFAULT_SAMPLE_TRIALS: u64 = 100_000;

const SAMPLE_BLOCK: u64 = 1024;
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub budget: u64,
    pub sample_trials: u64,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: DEFAULT_BUDGET,
            sample_trials: DEFAULT_SAMPLE_TRIALS,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

/// A column set and partition that no row separates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub shape: PartitionShape,
    pub columns: Vec<usize>,
    /// `parts[j]` has `shape.parts()[j]` columns.
    pub parts: Vec<Vec<usize>>,
    /// The τ-set, for strengthening checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_set: Option<Vec<usize>>,
}

impl Witness {
    /// Replays the witness: true iff no row of `p` qualifies.
    ///
    /// `d` gives per-row symbol bounds when the witness came from a
    /// strengthening check.
    pub fn confirms_failure(&self, p: &HashFamily, d: Option<&[u32]>) -> bool {
        let rows = match (&self.tau_set, d) {
            (Some(t), Some(d)) => {
                strengthening_rows_marked(p, &self.parts, self.shape.marked(), d, t)
            }
            _ => separating_rows(p, &self.parts, self.shape.marked()),
        };
        rows.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    /// No failure among `trials` sampled instances.
    HoldsSampled {
        trials: u64,
    },
    Fails(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::Fails(_))
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fails(w) => Some(w),
            _ => None,
        }
    }
}

fn separates(symbols: &[u32], assign: &[u8], marked: &[bool]) -> bool {
    for a in 0..symbols.len() {
        if symbols[a] == MISSING && !marked[assign[a] as usize] {
            return false;
        }
        for b in a + 1..symbols.len() {
            if assign[a] != assign[b] && symbols[a] == symbols[b] {
                return false;
            }
        }
    }
    true
}

fn distinct_count(symbols: impl Iterator<Item = u32>) -> usize {
    let mut seen: Vec<u32> = symbols.collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn flatten(parts: &[Vec<usize>]) -> (Vec<usize>, Vec<u8>) {
    let mut cols = Vec::new();
    let mut assign = Vec::new();
    for (j, part) in parts.iter().enumerate() {
        for &c in part {
            cols.push(c);
            assign.push(j as u8);
        }
    }
    (cols, assign)
}

/// Rows in which every listed column has a distinct symbol (○ excluded).
pub fn perfect_rows(p: &HashFamily, columns: &[usize]) -> Vec<usize> {
    let parts: Vec<Vec<usize>> = columns.iter().map(|&c| vec![c]).collect();
    separating_rows(p, &parts, &vec![false; parts.len()])
}

/// Rows separating the given parts, with ○ only allowed in marked parts.
pub fn separating_rows(p: &HashFamily, parts: &[Vec<usize>], marked: &[bool]) -> Vec<usize> {
    let (cols, assign) = flatten(parts);
    (0..p.rows())
        .filter(|&i| {
            let symbols: Vec<u32> = cols.iter().map(|&c| p.entry(i, c)).collect();
            separates(&symbols, &assign, marked)
        })
        .collect()
}

/// Rows separating the given (unmarked) parts while using at most `d[ρ]`
/// distinct symbols on `tau_set`.
pub fn strengthening_rows(
    p: &HashFamily,
    parts: &[Vec<usize>],
    d: &[u32],
    tau_set: &[usize],
) -> Vec<usize> {
    strengthening_rows_marked(p, parts, &vec![false; parts.len()], d, tau_set)
}

fn strengthening_rows_marked(
    p: &HashFamily,
    parts: &[Vec<usize>],
    marked: &[bool],
    d: &[u32],
    tau_set: &[usize],
) -> Vec<usize> {
    separating_rows(p, parts, marked)
        .into_iter()
        .filter(|&i| distinct_count(tau_set.iter().map(|&c| p.entry(i, c))) <= d[i] as usize)
        .collect()
}

/// Is there a PHF row for every `t` columns?
pub fn check_perfect(
    p: &HashFamily,
    t: usize,
    opts: &CheckOptions,
) -> Result<Verdict, HashFamilyError> {
    if p.has_missing() {
        return Err(HashFamilyError::ContainsMissingSymbol);
    }
    if t == 0 {
        return Err(HashFamilyError::BadShape(
            "strength must be positive".into(),
        ));
    }
    let shape = PartitionShape::unmarked(&vec![1; t])?;
    check_separating(p, &[shape], opts)
}

pub fn check_separating(
    p: &HashFamily,
    shapes: &[PartitionShape],
    opts: &CheckOptions,
) -> Result<Verdict, HashFamilyError> {
    run(p, shapes, None, opts)
}

/// `{w_1,…,w_s}`-separation for every multiset of `s` parts summing to `t`.
pub fn check_distributing(
    p: &HashFamily,
    t: usize,
    s: usize,
    opts: &CheckOptions,
) -> Result<Verdict, HashFamilyError> {
    if s == 0 || s > t {
        return Err(HashFamilyError::BadShape(format!(
            "need 1 <= s <= t, got s={s}, t={t}"
        )));
    }
    if t > p.cols() {
        return Err(HashFamilyError::SparsityExceedsColumns { t, n: p.cols() });
    }
    check_separating(p, &distributing_shapes(t, s), opts)
}

pub fn check_strengthening(
    p: &HashFamily,
    d: &[u32],
    tau: usize,
    shapes: &[PartitionShape],
    opts: &CheckOptions,
) -> Result<Verdict, HashFamilyError> {
    if d.len() != p.rows() {
        return Err(HashFamilyError::DimensionMismatch {
            expected: p.rows(),
            got: d.len(),
        });
    }
    if tau == 0 || tau > p.cols() {
        return Err(HashFamilyError::SparsityExceedsColumns {
            t: tau,
            n: p.cols(),
        });
    }
    run(p, shapes, Some((d, tau)), opts)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn tau_set_count(n: usize, sigma: usize, tau: usize) -> f64 {
    if tau <= sigma {
        binomial(sigma, tau)
    } else {
        binomial(n - sigma, tau - sigma)
    }
}

/// Advances `c` to the next `c.len()`-subset of `0..n` in lexicographic order.
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

struct ShapeJob<'a> {
    p: &'a HashFamily,
    shape: &'a PartitionShape,
    assignments: Vec<Vec<u8>>,
    strength: Option<(&'a [u32], usize)>,
}

impl ShapeJob<'_> {
    fn sigma(&self) -> usize {
        self.shape.total()
    }

    /// First (assignment, τ-set) with no qualifying row for column set `cols`.
    fn failure_for(
        &self,
        cols: &[usize],
        scratch: &mut Vec<u32>,
    ) -> Option<(usize, Option<Vec<usize>>)> {
        let m = self.p.rows();
        let sigma = cols.len();
        scratch.clear();
        for i in 0..m {
            scratch.extend(cols.iter().map(|&c| self.p.entry(i, c)));
        }
        let marked = self.shape.marked();
        match self.strength {
            None => self
                .assignments
                .iter()
                .position(|a| {
                    !(0..m).any(|i| separates(&scratch[i * sigma..(i + 1) * sigma], a, marked))
                })
                .map(|a| (a, None)),
            Some((d, tau)) => {
                let tau_sets = self.tau_sets(cols, tau);
                let ok: Vec<Vec<bool>> = tau_sets
                    .iter()
                    .map(|t| {
                        (0..m)
                            .map(|i| {
                                distinct_count(t.iter().map(|&c| self.p.entry(i, c)))
                                    <= d[i] as usize
                            })
                            .collect()
                    })
                    .collect();
                for (ai, a) in self.assignments.iter().enumerate() {
                    let sep: Vec<bool> = (0..m)
                        .map(|i| separates(&scratch[i * sigma..(i + 1) * sigma], a, marked))
                        .collect();
                    for (ti, t) in tau_sets.iter().enumerate() {
                        if !(0..m).any(|i| sep[i] && ok[ti][i]) {
                            return Some((ai, Some(t.clone())));
                        }
                    }
                }
                None
            }
        }
    }

    fn tau_sets(&self, cols: &[usize], tau: usize) -> Vec<Vec<usize>> {
        let sigma = cols.len();
        let mut out = Vec::new();
        if tau <= sigma {
            let mut idx: Vec<usize> = (0..tau).collect();
            loop {
                out.push(idx.iter().map(|&i| cols[i]).collect());
                if tau == 0 || !next_combination(&mut idx, sigma) {
                    break;
                }
            }
        } else {
            let rest: Vec<usize> = (0..self.p.cols()).filter(|c| !cols.contains(c)).collect();
            let extra = tau - sigma;
            let mut idx: Vec<usize> = (0..extra).collect();
            loop {
                let mut t = cols.to_vec();
                t.extend(idx.iter().map(|&i| rest[i]));
                t.sort_unstable();
                out.push(t);
                if !next_combination(&mut idx, rest.len()) {
                    break;
                }
            }
        }
        out
    }

    fn witness(&self, cols: &[usize], assignment: usize, tau_set: Option<Vec<usize>>) -> Witness {
        let mut parts = vec![Vec::new(); self.shape.num_parts()];
        for (pos, &j) in self.assignments[assignment].iter().enumerate() {
            parts[j as usize].push(cols[pos]);
        }
        Witness {
            shape: self.shape.clone(),
            columns: cols.to_vec(),
            parts,
            tau_set,
        }
    }

    fn cost(&self) -> f64 {
        let n = self.p.cols();
        let sigma = self.sigma();
        let t_sets = self
            .strength
            .map_or(1.0, |(_, tau)| tau_set_count(n, sigma, tau));
        binomial(n, sigma) * self.assignments.len() as f64 * self.p.rows() as f64 * t_sets
    }

    fn exhaustive(&self, exec: Execution) -> Option<Witness> {
        let n = self.p.cols();
        let sigma = self.sigma();
        par::find_map_first(exec, n + 1 - sigma, |first| {
            let mut cols: Vec<usize> = (first..first + sigma).collect();
            let mut scratch = Vec::new();
            loop {
                if let Some((a, t)) = self.failure_for(&cols, &mut scratch) {
                    return Some(self.witness(&cols, a, t));
                }
                if sigma == 1 || !next_tail(&mut cols, n) {
                    return None;
                }
            }
        })
    }

    fn sampled(&self, opts: &CheckOptions, shape_index: usize) -> Option<Witness> {
        let n = self.p.cols();
        let sigma = self.sigma();
        let trials = opts.sample_trials;
        let blocks = trials.div_ceil(SAMPLE_BLOCK) as usize;
        let base = opts.seed ^ (shape_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
        par::find_map_first(opts.execution, blocks, |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(base ^ (b as u64).wrapping_mul(GOLDEN));
            let count = SAMPLE_BLOCK.min(trials - b as u64 * SAMPLE_BLOCK);
            let mut scratch = Vec::new();
            for _ in 0..count {
                let mut cols = sample_indices(&mut rng, n, sigma).into_vec();
                cols.sort_unstable();
                let a = rng.gen_range(0..self.assignments.len());
                if let Some(w) = self.check_sampled(&cols, a, &mut rng, &mut scratch) {
                    return Some(w);
                }
            }
            None
        })
    }

    fn check_sampled(
        &self,
        cols: &[usize],
        a: usize,
        rng: &mut ChaCha8Rng,
        scratch: &mut Vec<u32>,
    ) -> Option<Witness> {
        let m = self.p.rows();
        let sigma = cols.len();
        scratch.clear();
        for i in 0..m {
            scratch.extend(cols.iter().map(|&c| self.p.entry(i, c)));
        }
        let assign = &self.assignments[a];
        let marked = self.shape.marked();
        let sep = |i: usize| separates(&scratch[i * sigma..(i + 1) * sigma], assign, marked);
        match self.strength {
            None => (!(0..m).any(sep)).then(|| self.witness(cols, a, None)),
            Some((d, tau)) => {
                let t: Vec<usize> = if tau <= sigma {
                    let mut idx = sample_indices(rng, sigma, tau).into_vec();
                    idx.sort_unstable();
                    idx.into_iter().map(|i| cols[i]).collect()
                } else {
                    let rest: Vec<usize> =
                        (0..self.p.cols()).filter(|c| !cols.contains(c)).collect();
                    let mut t = cols.to_vec();
                    t.extend(
                        sample_indices(rng, rest.len(), tau - sigma)
                            .into_iter()
                            .map(|i| rest[i]),
                    );
                    t.sort_unstable();
                    t
                };
                let qualifies = |i: usize| {
                    sep(i) && distinct_count(t.iter().map(|&c| self.p.entry(i, c))) <= d[i] as usize
                };
                (!(0..m).any(qualifies)).then(|| self.witness(cols, a, Some(t)))
            }
        }
    }
}

/// Advances `cols[1..]` keeping `cols[0]` fixed.
fn next_tail(cols: &mut [usize], n: usize) -> bool {
    next_combination(&mut cols[1..], n)
}

fn run(
    p: &HashFamily,
    shapes: &[PartitionShape],
    strength: Option<(&[u32], usize)>,
    opts: &CheckOptions,
) -> Result<Verdict, HashFamilyError> {
    if shapes.is_empty() {
        return Err(HashFamilyError::BadShape("no shapes given".into()));
    }
    for shape in shapes {
        if shape.total() > p.cols() {
            return Err(HashFamilyError::SparsityExceedsColumns {
                t: shape.total(),
                n: p.cols(),
            });
        }
        if shape.num_parts() > u8::MAX as usize {
            return Err(HashFamilyError::BadShape("too many parts".into()));
        }
    }
    let mut sampled_trials = 0u64;
    for (idx, shape) in shapes.iter().enumerate() {
        let job = ShapeJob {
            p,
            shape,
            assignments: shape.assignments(),
            strength,
        };
        let failure = if job.cost() <= opts.budget as f64 {
            job.exhaustive(opts.execution)
        } else {
            sampled_trials += opts.sample_trials;
            job.sampled(opts, idx)
        };
        if let Some(w) = failure {
            return Ok(Verdict::Fails(w));
        }
    }
    Ok(if sampled_trials > 0 {
        Verdict::HoldsSampled {
            trials: sampled_trials,
        }
    } else {
        Verdict::Holds
    })
}
