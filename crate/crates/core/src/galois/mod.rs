//! Exact arithmetic in small Galois fields GF(p^m).
//!
//! Elements are encoded as integers in `[0, p^m)`: the coefficient of `α^j`
//! is the j-th base-p digit (little-endian polynomial encoding). For prime
//! fields this is just the residue mod p. All operations are table driven.

mod matrix;
mod projective;

pub use matrix::FieldMatrix;
pub use projective::{projective_count, projective_reps, ParityVector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted, built-in or user supplied.
pub const MAX_ORDER: usize = 256;

/// Serializable description of a field: characteristic, extension degree and
/// reduction polynomial (little-endian coefficients, monic, `m + 1` entries).
/// The polynomial is empty for prime fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub m: u32,
    #[serde(default)]
    pub poly: Vec<u64>,
}

// Conway polynomials, little-endian.
const BUILTIN_POLYS: &[(u64, u32, &[u64])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 2, &[3, 6, 1]),
];

fn builtin_poly(p: u64, m: u32) -> Option<&'static [u64]> {
    BUILTIN_POLYS
        .iter()
        .find(|(bp, bm, _)| *bp == p && *bm == m)
        .map(|(_, _, poly)| *poly)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A concrete finite field with precomputed arithmetic tables.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GaloisField {
    spec: FieldSpec,
    order: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    inv: Vec<usize>,
}

impl GaloisField {
    /// Builds GF(p^m). When `poly` is `None` a built-in irreducible
    /// polynomial is used (available for every prime power up to 64).
    pub fn new(p: u64, m: u32, poly: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = p
            .checked_pow(m)
            .filter(|&o| o <= MAX_ORDER as u64)
            .ok_or(Error::FieldTooLarge(p.saturating_pow(m)))?;

        let poly: Vec<u64> = if m == 1 {
            Vec::new()
        } else {
            match poly {
                Some(c) => c.to_vec(),
                None if order <= 64 => builtin_poly(p, m)
                    .ok_or(Error::NoBuiltinPolynomial { p, m })?
                    .to_vec(),
                None => return Err(Error::NoBuiltinPolynomial { p, m }),
            }
        };
        if m > 1 {
            if poly.len() != m as usize + 1 {
                return Err(Error::BadPolynomial(format!(
                    "expected {} coefficients, got {}",
                    m + 1,
                    poly.len()
                )));
            }
            if let Some(&c) = poly.iter().find(|&&c| c >= p) {
                return Err(Error::BadPolynomial(format!(
                    "coefficient {c} not below {p}"
                )));
            }
            if poly[m as usize] != 1 {
                return Err(Error::BadPolynomial("not monic".into()));
            }
        }

        let order = order as usize;
        let spec = FieldSpec { p, m, poly };
        let (add, neg) = additive_tables(&spec, order);
        let mul = multiplicative_table(&spec, order);

        let mut inv = vec![0; order];
        for a in 1..order {
            match (1..order).find(|&b| mul[a * order + b] == 1) {
                Some(b) => inv[a] = b,
                None => return Err(Error::BadPolynomial("reducible over GF(p)".into())),
            }
        }

        Ok(Self {
            spec,
            order,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        let poly = (spec.m > 1 && !spec.poly.is_empty()).then_some(spec.poly.as_slice());
        Self::new(spec.p, spec.m, poly)
    }

    /// Prime field GF(p).
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Number of elements, |A| = p^m.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn characteristic(&self) -> u64 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.m
    }

    fn check(&self, a: usize) -> Result<()> {
        if a < self.order {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                elem: a,
                order: self.order,
            })
        }
    }

    pub fn add(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_raw(a, b))
    }

    pub fn sub(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_raw(a, self.neg[b]))
    }

    pub fn neg(&self, a: usize) -> Result<usize> {
        self.check(a)?;
        Ok(self.neg[a])
    }

    pub fn mul(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_raw(a, b))
    }

    pub fn inv(&self, a: usize) -> Result<usize> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv[a])
    }

    /// The additive inverse of one, which is what `-1` means in a parity
    /// check row. Equals 1 in characteristic 2.
    pub fn minus_one(&self) -> usize {
        self.neg[1]
    }

    /// Σᵢ aᵢ·xᵢ over the field.
    pub fn dot(&self, a: &[usize], x: &[usize]) -> Result<usize> {
        if a.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: a.len(),
                got: x.len(),
            });
        }
        let mut acc = 0;
        for (&ai, &xi) in a.iter().zip(x) {
            self.check(ai)?;
            self.check(xi)?;
            acc = self.add_raw(acc, self.mul_raw(ai, xi));
        }
        Ok(acc)
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b]
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: usize) -> usize {
        self.neg[a]
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// Base-p digits of an element (little-endian, `m` entries).
    pub fn digits(&self, a: usize) -> Vec<u64> {
        to_digits(a, self.spec.p, self.spec.m)
    }

    /// Syndrome `a·x` for every outcome `x` of GF(|A|)^N in flat order
    /// (x₁ most significant), N = `a.len()`.
    pub(crate) fn syndromes(&self, a: &[usize]) -> Vec<usize> {
        let q = self.order;
        let mut syn = vec![0usize];
        for &ai in a {
            let mut next = Vec::with_capacity(syn.len() * q);
            for &s in &syn {
                for x in 0..q {
                    next.push(self.add_raw(s, self.mul_raw(ai, x)));
                }
            }
            syn = next;
        }
        syn
    }
}

fn to_digits(mut a: usize, p: u64, m: u32) -> Vec<u64> {
    let mut d = Vec::with_capacity(m as usize);
    for _ in 0..m {
        d.push((a as u64) % p);
        a /= p as usize;
    }
    d
}

fn from_digits(d: &[u64], p: u64) -> usize {
    d.iter()
        .rev()
        .fold(0, |acc, &c| acc * p as usize + c as usize)
}

fn additive_tables(spec: &FieldSpec, order: usize) -> (Vec<usize>, Vec<usize>) {
    let p = spec.p;
    let digits: Vec<Vec<u64>> = (0..order).map(|a| to_digits(a, p, spec.m)).collect();
    let mut add = vec![0; order * order];
    for a in 0..order {
        for b in 0..order {
            let s: Vec<u64> = digits[a]
                .iter()
                .zip(&digits[b])
                .map(|(x, y)| (x + y) % p)
                .collect();
            add[a * order + b] = from_digits(&s, p);
        }
    }
    let neg = (0..order)
        .map(|a| {
            let n: Vec<u64> = digits[a].iter().map(|&x| (p - x) % p).collect();
            from_digits(&n, p)
        })
        .collect();
    (add, neg)
}

fn multiplicative_table(spec: &FieldSpec, order: usize) -> Vec<usize> {
    let p = spec.p;
    let m = spec.m as usize;
    let digits: Vec<Vec<u64>> = (0..order).map(|a| to_digits(a, p, spec.m)).collect();
    let mut mul = vec![0; order * order];
    for a in 0..order {
        for b in 0..order {
            let mut prod = vec![0u64; 2 * m - 1];
            for (i, &x) in digits[a].iter().enumerate() {
                for (j, &y) in digits[b].iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            // reduce modulo the monic polynomial, top degree first
            for d in (m..prod.len()).rev() {
                let c = prod[d];
                if c != 0 {
                    for (j, &f) in spec.poly[..m].iter().enumerate() {
                        let t = (c * f) % p;
                        prod[d - m + j] = (prod[d - m + j] + p - t) % p;
                    }
                    prod[d] = 0;
                }
            }
            mul[a * order + b] = from_digits(&prod[..m], p);
        }
    }
    mul
}
