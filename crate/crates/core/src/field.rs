//! Exact arithmetic over GF(p^e) and polynomials of bounded degree.
//!
//! Elements are canonically the coefficient vectors of residues modulo a
//! monic irreducible polynomial of degree `e` over GF(p). Internally a vector
//! `(c_0, ..., c_{e-1})` is packed into the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`,
//! which is a bijection onto `0..q`; that integer is the element's *index*.
//! The element with index `i` is the `ω_i` used to label the rows of a linear
//! hash family.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order accepted by [`Field::new`].
pub const DEFAULT_MAX_ORDER: u32 = 1 << 16;

/// Fields up to this order get log/antilog tables for multiplication.
const LOG_TABLE_MAX_ORDER: u32 = 1 << 12;

/// Fields up to this order get a full addition table.
const ADD_TABLE_MAX_ORDER: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{e} exceeds the configured bound {bound}")]
    UnsupportedOrder { p: u32, e: u32, bound: u32 },
    #[error("no irreducible polynomial of degree {e} over GF({p}) was found")]
    NoIrreducibleFound { p: u32, e: u32 },
    #[error("division by zero")]
    DivideByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("element index {index} is out of range for a field of order {order}")]
    ElementOutOfRange { index: u32, order: u32 },
    #[error("interpolation nodes are not distinct")]
    DuplicateNode,
    #[error("expected {expected} interpolation points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
}

/// The four field operations accepted by [`Field::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// Trial division; `n` never exceeds 2^16 here.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// A finite field GF(p^e). Cheap to clone; all clones share tables.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic reduction polynomial, low coefficient first, length `e + 1`.
    modulus: Vec<u32>,
    add_table: Option<Vec<u32>>,
    logs: Option<LogTables>,
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}^{}) mod {:?}",
            self.inner.p, self.inner.e, self.inner.modulus
        )
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.e == other.inner.e
    }
}

impl Eq for Field {}

/// An element of some [`Field`], identified by its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    p: u32,
    e: u32,
    index: u32,
}

impl FieldElement {
    /// The packed coefficient vector.
    pub fn index(self) -> u32 {
        self.index
    }

    /// Canonical coefficient vector `(c_0, ..., c_{e-1})`.
    pub fn coefficients(self) -> Vec<u32> {
        digits(self.index, self.p, self.e as usize)
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }
}

fn digits(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `num` modulo the monic `den` over GF(p); both low-first.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                let t = (lead * c) % p;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    r
}

fn has_factor_of_degree(f: &[u32], p: u32, deg: usize) -> bool {
    let count = p.pow(deg as u32);
    (0..count).any(|low| {
        let mut g = digits(low, p, deg);
        g.push(1);
        poly_rem(f, &g, p).iter().all(|&c| c == 0)
    })
}

/// Monic degree-`e` irreducible with the smallest packed low coefficients.
fn find_irreducible(p: u32, e: u32) -> Option<Vec<u32>> {
    let count = p.checked_pow(e)?;
    (0..count).find_map(|low| {
        let mut f = digits(low, p, e as usize);
        f.push(1);
        let reducible = (1..=(e as usize) / 2).any(|d| has_factor_of_degree(&f, p, d));
        (!reducible).then_some(f)
    })
}

impl Field {
    /// GF(p^e) with order at most [`DEFAULT_MAX_ORDER`].
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        Self::with_bound(p, e, DEFAULT_MAX_ORDER)
    }

    /// The field of order `q`.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, e) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, e)
    }

    pub fn with_bound(p: u32, e: u32, bound: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = match p.checked_pow(e) {
            Some(q) if q <= bound => q,
            _ => return Err(FieldError::UnsupportedOrder { p, e, bound }),
        };
        let modulus = find_irreducible(p, e).ok_or(FieldError::NoIrreducibleFound { p, e })?;
        let mut inner = Inner {
            p,
            e,
            q,
            modulus,
            add_table: None,
            logs: None,
        };
        if q <= ADD_TABLE_MAX_ORDER {
            let mut table = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = inner.add_slow(a, b);
                }
            }
            inner.add_table = Some(table);
        }
        if q <= LOG_TABLE_MAX_ORDER {
            inner.logs = Some(
                inner
                    .build_logs()
                    .ok_or(FieldError::NoIrreducibleFound { p, e })?,
            );
        }
        Ok(Field {
            inner: Arc::new(inner),
        })
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    /// Reduction polynomial, lowest coefficient first (monic).
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    /// `ω_index`.
    pub fn element(&self, index: u32) -> Result<FieldElement, FieldError> {
        if index >= self.inner.q {
            return Err(FieldError::ElementOutOfRange {
                index,
                order: self.inner.q,
            });
        }
        Ok(self.wrap(index))
    }

    /// Element with the given coefficient vector (reduced mod p, zero-padded).
    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        let p = self.inner.p;
        let e = self.inner.e as usize;
        if coeffs.len() > e {
            let mut v: Vec<u32> = coeffs.iter().map(|c| c % p).collect();
            v = poly_rem(&v, &self.inner.modulus, p);
            return Ok(self.wrap(pack(&v, p)));
        }
        let v: Vec<u32> = coeffs.iter().map(|c| c % p).collect();
        Ok(self.wrap(pack(&v, p)))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.inner.q).map(|i| self.wrap(i))
    }

    /// Does `a` belong to this field?
    pub fn contains(&self, a: FieldElement) -> bool {
        a.p == self.inner.p && a.e == self.inner.e
    }

    fn wrap(&self, index: u32) -> FieldElement {
        FieldElement {
            p: self.inner.p,
            e: self.inner.e,
            index,
        }
    }

    fn check(&self, a: FieldElement) -> Result<u32, FieldError> {
        if self.contains(a) {
            Ok(a.index)
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn arith(
        &self,
        a: FieldElement,
        b: FieldElement,
        op: Op,
    ) -> Result<FieldElement, FieldError> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        let r = match op {
            Op::Add => self.add_raw(x, y),
            Op::Sub => self.sub_raw(x, y),
            Op::Mul => self.mul_raw(x, y),
            Op::Div => {
                if y == 0 {
                    return Err(FieldError::DivideByZero);
                }
                self.mul_raw(x, self.inv_raw(y))
            }
        };
        Ok(self.wrap(r))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(a, b, Op::Add)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(a, b, Op::Sub)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(a, b, Op::Mul)
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(a, b, Op::Div)
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.neg_raw(self.check(a)?)))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let x = self.check(a)?;
        if x == 0 {
            return Err(FieldError::DivideByZero);
        }
        Ok(self.wrap(self.inv_raw(x)))
    }

    pub fn pow(&self, a: FieldElement, exp: u64) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.pow_raw(self.check(a)?, exp)))
    }

    // Index-level arithmetic for hot loops; callers guarantee indices < q.

    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        match &self.inner.add_table {
            Some(t) => t[(a * self.inner.q + b) as usize],
            None => self.inner.add_slow(a, b),
        }
    }

    pub(crate) fn neg_raw(&self, a: u32) -> u32 {
        let p = self.inner.p;
        if self.inner.e == 1 {
            return (p - a) % p;
        }
        let d: Vec<u32> = digits(a, p, self.inner.e as usize)
            .into_iter()
            .map(|c| (p - c) % p)
            .collect();
        pack(&d, p)
    }

    pub(crate) fn sub_raw(&self, a: u32, b: u32) -> u32 {
        self.add_raw(a, self.neg_raw(b))
    }

    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.inner.logs {
            Some(t) => {
                let s = t.log[a as usize] + t.log[b as usize];
                t.exp[(s % (self.inner.q - 1)) as usize]
            }
            None => self.inner.mul_slow(a, b),
        }
    }

    pub(crate) fn inv_raw(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        match &self.inner.logs {
            Some(t) => {
                let n = self.inner.q - 1;
                t.exp[((n - t.log[a as usize]) % n) as usize]
            }
            // a^(q-2)
            None => self.pow_raw(a, (self.inner.q - 2) as u64),
        }
    }

    pub(crate) fn pow_raw(&self, a: u32, mut exp: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Horner evaluation of a low-first coefficient slice at `x`.
    pub(crate) fn eval_raw(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add_raw(self.mul_raw(acc, x), c))
    }

    /// Unique polynomial of degree `< nodes.len()` through the given points,
    /// written low-first into `out`. Nodes must be distinct.
    pub(crate) fn interpolate_raw(&self, nodes: &[u32], values: &[u32], out: &mut [u32]) {
        let n = nodes.len();
        debug_assert_eq!(values.len(), n);
        debug_assert_eq!(out.len(), n);
        out.iter_mut().for_each(|c| *c = 0);
        if n == 0 {
            return;
        }
        // master(x) = prod (x - b_j), degree n, low-first
        let mut master = vec![0u32; n + 1];
        master[0] = 1;
        for (deg, &b) in nodes.iter().enumerate() {
            let nb = self.neg_raw(b);
            for i in (0..=deg + 1).rev() {
                let shifted = if i > 0 { master[i - 1] } else { 0 };
                master[i] = self.add_raw(shifted, self.mul_raw(master[i], nb));
            }
        }
        let mut quotient = vec![0u32; n];
        for (i, &bi) in nodes.iter().enumerate() {
            // master / (x - b_i) by synthetic division
            let mut carry = 0;
            for d in (0..n).rev() {
                carry = self.add_raw(master[d + 1], self.mul_raw(carry, bi));
                quotient[d] = carry;
            }
            let denom = self.eval_raw(&quotient, bi);
            let scale = self.mul_raw(values[i], self.inv_raw(denom));
            for d in 0..n {
                out[d] = self.add_raw(out[d], self.mul_raw(scale, quotient[d]));
            }
        }
    }
}

impl Inner {
    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        if self.e == 1 {
            return (a + b) % p;
        }
        let (mut x, mut y) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.e == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let e = self.e as usize;
        let x = digits(a, self.p, e);
        let y = digits(b, self.p, e);
        let mut prod = vec![0u32; 2 * e - 1];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + xi as u64 * yj as u64) % p) as u32;
            }
        }
        pack(&poly_rem(&prod, &self.modulus, self.p), self.p)
    }

    fn build_logs(&self) -> Option<LogTables> {
        let q = self.q;
        let n = q - 1;
        for g in 1..q {
            let mut exp = Vec::with_capacity(n as usize);
            let mut log = vec![0u32; q as usize];
            let mut x = 1u32;
            let mut ok = true;
            for k in 0..n {
                if k > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp.push(x);
                log[x as usize] = k;
                x = self.mul_slow(x, g);
            }
            if ok && x == 1 {
                return Some(LogTables { exp, log });
            }
        }
        None
    }
}

/// A polynomial of degree less than `degree_bound()` over a field.
///
/// Stored with a fixed number of coefficients, so the leading stored
/// coefficient may be zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<u32>,
}

impl Poly {
    /// Coefficients low-first; the degree bound is `coeffs.len()`.
    pub fn new(field: &Field, coeffs: &[FieldElement]) -> Result<Self, FieldError> {
        let coeffs = coeffs
            .iter()
            .map(|&c| field.check(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn zero(field: &Field, degree_bound: usize) -> Self {
        Poly {
            field: field.clone(),
            coeffs: vec![0; degree_bound],
        }
    }

    pub(crate) fn from_indices(field: &Field, coeffs: Vec<u32>) -> Self {
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, i: usize) -> FieldElement {
        self.field.wrap(self.coeffs[i])
    }

    pub fn coefficients(&self) -> Vec<FieldElement> {
        self.coeffs.iter().map(|&c| self.field.wrap(c)).collect()
    }

    pub fn eval(&self, beta: FieldElement) -> Result<FieldElement, FieldError> {
        let x = self.field.check(beta)?;
        Ok(self.field.wrap(self.field.eval_raw(&self.coeffs, x)))
    }
}

/// Polynomial evaluation, `f(β)`.
pub fn poly_eval(f: &Poly, beta: FieldElement) -> Result<FieldElement, FieldError> {
    f.eval(beta)
}

/// The unique polynomial of degree `< alpha` through `points`.
pub fn lagrange_interpolate(
    field: &Field,
    points: &[(FieldElement, FieldElement)],
    alpha: usize,
) -> Result<Poly, FieldError> {
    if points.len() != alpha || alpha == 0 {
        return Err(FieldError::WrongPointCount {
            expected: alpha,
            got: points.len(),
        });
    }
    let mut nodes = Vec::with_capacity(alpha);
    let mut values = Vec::with_capacity(alpha);
    for &(b, g) in points {
        nodes.push(field.check(b)?);
        values.push(field.check(g)?);
    }
    let mut sorted = nodes.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(FieldError::DuplicateNode);
    }
    let mut out = vec![0; alpha];
    field.interpolate_raw(&nodes, &values, &mut out);
    Ok(Poly::from_indices(field, out))
}
