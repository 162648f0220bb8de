use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::GaloisField;
use crate::error::{Error, Result};

/// A nonzero parity check coefficient vector in canonical projective form:
/// its first nonzero coefficient is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParityVector(Vec<usize>);

impl ParityVector {
    /// Scales `coeffs` by the inverse of its first nonzero entry.
    pub fn new(field: &GaloisField, coeffs: &[usize]) -> Result<Self> {
        for &c in coeffs {
            field.neg(c)?;
        }
        let lead = *coeffs.iter().find(|&&c| c != 0).ok_or(Error::ZeroVector)?;
        let s = field.inv_raw(lead);
        Ok(Self(coeffs.iter().map(|&c| field.mul_raw(s, c)).collect()))
    }

    /// Unit vector eᵢ (zero-based `i`) of length `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn coeffs(&self) -> &[usize] {
        &self.0
    }

    /// Hamming weight; the order of the interaction it defines.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    /// Index of the variable when this is a unit vector.
    pub fn unit_index(&self) -> Option<usize> {
        if self.weight() == 1 {
            self.0.iter().position(|&c| c == 1)
        } else {
            None
        }
    }

    pub(crate) fn is_canonical(&self) -> bool {
        self.0.iter().find(|&&c| c != 0) == Some(&1)
    }
}

impl Deref for ParityVector {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// M = (|A|^N − 1)/(|A| − 1), the number of one-dimensional subspaces of
/// GF(|A|)^N.
pub fn projective_count(order: usize, n: usize) -> usize {
    (order.pow(n as u32) - 1) / (order - 1)
}

/// One canonical representative per scalar-multiple class of nonzero vectors
/// in GF(|A|)^N. The unit vectors e₁…e_N come first, then the rest in
/// lexicographic order.
pub fn projective_reps(field: &GaloisField, n: usize) -> Vec<ParityVector> {
    let q = field.order();
    let mut reps: Vec<ParityVector> = (0..n).map(|i| ParityVector::unit(n, i)).collect();
    reps.reserve(projective_count(q, n) - n);
    let mut x = vec![0usize; n];
    for _ in 0..q.pow(n as u32) {
        if x.iter().find(|&&c| c != 0) == Some(&1) && x.iter().filter(|&&c| c != 0).count() >= 2 {
            reps.push(ParityVector(x.clone()));
        }
        // increment, last coordinate fastest
        for d in x.iter_mut().rev() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    reps
}
