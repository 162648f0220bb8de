//! Soft parity check interactions: joint PMFs of the form
//! `p(x) = q(a·xᵀ) / |A|^(N−1)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{projective_reps, GaloisField, ParityVector};
use crate::pmfspace::{JointPmf, Pmf};

/// Relative spread allowed inside a fiber when recognizing an interaction.
pub const DETECT_REL_TOL: f64 = 1e-9;

/// A parity check coefficient vector paired with the distribution of its
/// syndrome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpciFactor {
    pub a: ParityVector,
    pub q: Pmf,
}

impl SpciFactor {
    pub fn new(a: ParityVector, q: Pmf) -> Self {
        Self { a, q }
    }

    /// The interaction as a joint PMF over GF(|A|)^N, N = `a.len()`.
    pub fn joint(&self, field: &Arc<GaloisField>) -> Result<JointPmf> {
        spci_make(field, &self.a, &self.q)
    }

    pub fn order(&self) -> usize {
        spci_order(&self.a)
    }
}

/// Builds `q(a·xᵀ)/|A|^(N−1)` over GF(|A|)^N where N = `a.len()`. `a` need not
/// be canonical.
pub fn spci_make(field: &Arc<GaloisField>, a: &[usize], q: &Pmf) -> Result<JointPmf> {
    let order = field.order();
    if q.len() != order {
        return Err(Error::LengthMismatch {
            expected: order,
            got: q.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::NoVariables);
    }
    for &c in a {
        field.neg(c)?;
    }
    if a.iter().all(|&c| c == 0) {
        return Err(Error::ZeroVector);
    }
    let fiber = (order as f64).powi(a.len() as i32 - 1);
    let values = field
        .syndromes(a)
        .into_iter()
        .map(|c| q.values()[c] / fiber)
        .collect();
    JointPmf::new(field.clone(), a.len(), Pmf::from_normalized(values)?)
}

/// Looks for a canonical `a` whose fibers `p` is constant on, in
/// projective-representative order. The uniform PMF matches the first
/// representative.
pub fn spci_detect(p: &JointPmf) -> Option<SpciFactor> {
    let field = p.field();
    let order = field.order();
    let values = p.values();
    for a in projective_reps(field, p.num_vars()) {
        let syn = field.syndromes(&a);
        let mut lo = vec![f64::INFINITY; order];
        let mut hi = vec![f64::NEG_INFINITY; order];
        let mut sum = vec![0.0; order];
        for (&c, &v) in syn.iter().zip(values) {
            lo[c] = lo[c].min(v);
            hi[c] = hi[c].max(v);
            sum[c] += v;
        }
        let constant = lo
            .iter()
            .zip(&hi)
            .all(|(&l, &h)| h <= l * (1.0 + DETECT_REL_TOL));
        if constant {
            // fiber sum = |A|^(N−1)·p(x) for any x in the fiber
            let q = Pmf::new(sum).ok()?;
            return Some(SpciFactor::new(a, q));
        }
    }
    None
}

/// Order of the interaction: Hamming weight of its coefficient vector.
pub fn spci_order(a: &ParityVector) -> usize {
    a.weight()
}
