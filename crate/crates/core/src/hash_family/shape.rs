use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HashFamilyError;

/// Part sizes `{w_1, …, w_s}` of a separation, each optionally marked.
///
/// A marked part may contain columns holding the missing symbol in the
/// separating row; an unmarked part may not. Textual form: `1,3o` is the
/// shape `{1, 3°}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionShape {
    parts: Vec<usize>,
    marked: Vec<bool>,
}

impl PartitionShape {
    pub fn new(parts: Vec<usize>, marked: Vec<bool>) -> Result<Self, HashFamilyError> {
        if parts.is_empty() {
            return Err(HashFamilyError::BadShape("no parts".into()));
        }
        if parts.len() != marked.len() {
            return Err(HashFamilyError::BadShape("one mark flag per part".into()));
        }
        if parts.contains(&0) {
            return Err(HashFamilyError::BadShape(
                "part sizes must be positive".into(),
            ));
        }
        Ok(PartitionShape { parts, marked })
    }

    pub fn unmarked(parts: &[usize]) -> Result<Self, HashFamilyError> {
        Self::new(parts.to_vec(), vec![false; parts.len()])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn marked(&self) -> &[bool] {
        &self.marked
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn is_marked(&self) -> bool {
        self.marked.iter().any(|&m| m)
    }

    /// All canonical part assignments for `total()` sorted positions.
    ///
    /// Parts with equal size and equal mark are interchangeable, so an
    /// assignment is kept only if such parts are first used in index order.
    pub(crate) fn assignments(&self) -> Vec<Vec<u8>> {
        let s = self.parts.len();
        let equiv_prev: Vec<Option<usize>> = (0..s)
            .map(|j| {
                (0..j)
                    .rev()
                    .find(|&i| self.parts[i] == self.parts[j] && self.marked[i] == self.marked[j])
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.total());
        let mut fill = vec![0usize; s];
        self.assign_rec(&equiv_prev, &mut fill, &mut cur, &mut out);
        out
    }

    fn assign_rec(
        &self,
        equiv_prev: &[Option<usize>],
        fill: &mut [usize],
        cur: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if cur.len() == self.total() {
            out.push(cur.clone());
            return;
        }
        for j in 0..self.parts.len() {
            if fill[j] == self.parts[j] {
                continue;
            }
            if fill[j] == 0 {
                if let Some(i) = equiv_prev[j] {
                    if fill[i] == 0 {
                        continue;
                    }
                }
            }
            fill[j] += 1;
            cur.push(j as u8);
            self.assign_rec(equiv_prev, fill, cur, out);
            cur.pop();
            fill[j] -= 1;
        }
    }
}

impl fmt::Display for PartitionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .parts
            .iter()
            .zip(&self.marked)
            .map(|(w, &m)| if m { format!("{w}o") } else { w.to_string() })
            .collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl FromStr for PartitionShape {
    type Err = HashFamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut parts = Vec::new();
        let mut marked = Vec::new();
        for item in body.split(',') {
            let item = item.trim();
            let (num, mark) = match item.strip_suffix('o').or_else(|| item.strip_suffix('°')) {
                Some(rest) => (rest, true),
                None => (item, false),
            };
            let w = num
                .parse::<usize>()
                .map_err(|_| HashFamilyError::BadShape(format!("cannot parse part {item:?}")))?;
            parts.push(w);
            marked.push(mark);
        }
        Self::new(parts, marked)
    }
}

/// Every multiset of `s` positive parts summing to `t`, unmarked.
pub fn distributing_shapes(t: usize, s: usize) -> Vec<PartitionShape> {
    fn rec(
        remaining: usize,
        slots: usize,
        max: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if slots == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let hi = max.min(remaining.saturating_sub(slots - 1));
        for w in (1..=hi).rev() {
            if w * slots < remaining {
                break;
            }
            cur.push(w);
            rec(remaining - w, slots - 1, w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if s == 0 || s > t {
        return Vec::new();
    }
    rec(t, s, t, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|mut parts| {
            parts.reverse();
            PartitionShape::unmarked(&parts).expect("positive parts")
        })
        .collect()
}
