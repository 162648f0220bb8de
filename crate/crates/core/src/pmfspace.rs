//! The Hilbert space of strictly positive PMFs.
//!
//! Addition `⊞` is the renormalized pointwise product, scalar multiplication
//! `⊡` the renormalized pointwise power. The centered-log map [`l_map`] is a
//! linear isometry onto the zero-sum hyperplane of ℝ^|S|, so inner products
//! and projections reduce to Euclidean ones on log coordinates. Natural log
//! throughout; normalizers are computed with log-sum-exp.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::GaloisField;

/// Tolerance on Σ p = 1 for values accepted as already normalized.
pub const SUM_TOL: f64 = 1e-12;

/// Relative tolerance on the zero-sum constraint of log coordinates.
pub const ZERO_SUM_TOL: f64 = 1e-9;

/// A probability mass function over a finite outcome set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    values: Vec<f64>,
}

impl Pmf {
    /// Validates and normalizes (divides by the sum). Zeros are allowed here;
    /// the Hilbert-space operations reject them.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let sum = validate(&values)?;
        Ok(Self {
            values: values.into_iter().map(|v| v / sum).collect(),
        })
    }

    /// Like [`Pmf::new`] but keeps the values bit-for-bit when they already
    /// sum to one within [`SUM_TOL`].
    pub fn from_normalized(values: Vec<f64>) -> Result<Self> {
        let sum = validate(&values)?;
        if (sum - 1.0).abs() <= SUM_TOL {
            Ok(Self { values })
        } else {
            Self::new(values)
        }
    }

    /// Normalizes, raises every entry below `eps` to `eps`, then normalizes
    /// again.
    pub fn with_floor(values: Vec<f64>, eps: f64) -> Result<Self> {
        let p = Self::new(values)?;
        Self::new(p.values.into_iter().map(|v| v.max(eps)).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![1.0 / n as f64; n],
        }
    }

    /// Normalized `exp(logs)`; `logs` may carry any common offset.
    pub fn from_logs(logs: &[f64]) -> Self {
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logs.iter().map(|&l| (l - m).exp()).collect();
        let s: f64 = exps.iter().sum();
        Self {
            values: exps.into_iter().map(|e| e / s).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    pub fn require_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| v <= 0.0) {
            Some(index) => Err(Error::NonPositive {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }

    /// Natural logs of the probabilities; requires strict positivity.
    pub fn logs(&self) -> Result<Vec<f64>> {
        self.require_positive()?;
        Ok(self.values.iter().map(|v| v.ln()).collect())
    }

    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn l1_distance(&self, other: &Pmf) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// `‖l_map(p)‖` is below `tol`.
    pub fn is_uniform_within(&self, tol: f64) -> bool {
        l_map(self).map(|v| v.norm() < tol).unwrap_or(false)
    }
}

fn validate(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooFewOutcomes(values.len()));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidProbability {
            index,
            value: values[index],
        });
    }
    let sum: f64 = values.iter().sum();
    if sum <= 0.0 {
        return Err(Error::ZeroSum);
    }
    Ok(sum)
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Pmf::from_normalized(values)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.values
    }
}

/// Image of a PMF under the centered-log map; components sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCoord(Vec<f64>);

impl LogCoord {
    pub fn new(v: Vec<f64>) -> Self {
        Self(v)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &LogCoord) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn add(&self, other: &LogCoord) -> LogCoord {
        LogCoord(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LogCoord) -> LogCoord {
        LogCoord(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, alpha: f64) -> LogCoord {
        LogCoord(self.0.iter().map(|a| alpha * a).collect())
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    fn zero_sum_ok(&self) -> bool {
        let scale = self.0.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        self.sum().abs() <= ZERO_SUM_TOL * scale
    }
}

fn same_len(p: &Pmf, q: &Pmf) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(())
}

/// `p ⊞ q`: pointwise product, renormalized.
pub fn box_plus(p: &Pmf, q: &Pmf) -> Result<Pmf> {
    same_len(p, q)?;
    let lp = p.logs()?;
    let lq = q.logs()?;
    let s: Vec<f64> = lp.iter().zip(&lq).map(|(a, b)| a + b).collect();
    Ok(Pmf::from_logs(&s))
}

/// `alpha ⊡ p`: pointwise power, renormalized.
pub fn box_dot(alpha: f64, p: &Pmf) -> Result<Pmf> {
    let lp = p.logs()?;
    let s: Vec<f64> = lp.iter().map(|l| alpha * l).collect();
    Ok(Pmf::from_logs(&s))
}

/// Component i is `|S|·log p(xᵢ) − Σⱼ log p(xⱼ)`.
pub fn l_map(p: &Pmf) -> Result<LogCoord> {
    let logs = p.logs()?;
    Ok(center_logs(&logs))
}

pub(crate) fn center_logs(logs: &[f64]) -> LogCoord {
    let n = logs.len() as f64;
    let total: f64 = logs.iter().sum();
    LogCoord(logs.iter().map(|l| n * l - total).collect())
}

/// Inverse of [`l_map`]: `p(xᵢ) ∝ exp(vᵢ / |S|)`.
pub fn l_inverse(v: &LogCoord) -> Result<Pmf> {
    if v.len() < 2 {
        return Err(Error::TooFewOutcomes(v.len()));
    }
    if !v.zero_sum_ok() {
        return Err(Error::NotZeroSum(v.sum()));
    }
    let n = v.len() as f64;
    let s: Vec<f64> = v.0.iter().map(|x| x / n).collect();
    Ok(Pmf::from_logs(&s))
}

pub fn inner_product(p: &Pmf, q: &Pmf) -> Result<f64> {
    same_len(p, q)?;
    Ok(l_map(p)?.dot(&l_map(q)?))
}

/// Hilbert-space norm, zero only for the uniform PMF.
pub fn norm(p: &Pmf) -> Result<f64> {
    Ok(l_map(p)?.norm())
}

/// A PMF over GF(|A|)^N. Outcome `(x₁,…,x_N)` sits at flat index
/// `Σ xᵢ·|A|^(N−i)`, x₁ most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    field: Arc<GaloisField>,
    num_vars: usize,
    pmf: Pmf,
}

impl JointPmf {
    pub fn new(field: Arc<GaloisField>, num_vars: usize, pmf: Pmf) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::NoVariables);
        }
        let expected = outcome_count(field.order(), num_vars)?;
        if pmf.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: pmf.len(),
            });
        }
        Ok(Self {
            field,
            num_vars,
            pmf,
        })
    }

    pub fn from_values(field: Arc<GaloisField>, num_vars: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(field, num_vars, Pmf::new(values)?)
    }

    pub fn uniform(field: Arc<GaloisField>, num_vars: usize) -> Result<Self> {
        let n = outcome_count(field.order(), num_vars)?;
        Self::new(field, num_vars, Pmf::uniform(n))
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    pub fn values(&self) -> &[f64] {
        self.pmf.values()
    }

    pub fn into_pmf(self) -> Pmf {
        self.pmf
    }

    /// Field elements of outcome `k`, x₁ first.
    pub fn outcome(&self, k: usize) -> Vec<usize> {
        outcome_digits(k, self.field.order(), self.num_vars)
    }

    pub fn index_of(&self, x: &[usize]) -> usize {
        let q = self.field.order();
        x.iter().fold(0, |acc, &xi| acc * q + xi)
    }
}

pub(crate) fn outcome_count(order: usize, num_vars: usize) -> Result<usize> {
    u32::try_from(num_vars)
        .ok()
        .and_then(|n| order.checked_pow(n))
        .ok_or(Error::CapExceeded {
            size: u128::MAX,
            cap: usize::MAX as u128,
        })
}

pub(crate) fn outcome_digits(mut k: usize, order: usize, n: usize) -> Vec<usize> {
    let mut x = vec![0; n];
    for d in x.iter_mut().rev() {
        *d = k % order;
        k /= order;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn construction() {
        let p = Pmf::new(vec![0.6, 0.1, 0.3]).unwrap();
        assert!(p.is_strictly_positive());
        assert_eq!(Pmf::new(vec![2.0, 2.0]).unwrap().values(), &[0.5, 0.5]);
        assert!(matches!(
            Pmf::new(vec![0.5, -0.5]),
            Err(Error::InvalidProbability { index: 1, .. })
        ));
        assert_eq!(Pmf::new(vec![0.0, 0.0]), Err(Error::ZeroSum));
        assert_eq!(Pmf::new(vec![1.0]), Err(Error::TooFewOutcomes(1)));
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn zeros_are_rejected_by_hilbert_ops() {
        let p = Pmf::new(vec![1.0, 0.0]).unwrap();
        assert!(!p.is_strictly_positive());
        assert!(matches!(
            l_map(&p),
            Err(Error::NonPositive { index: 1, .. })
        ));
        let floored = Pmf::with_floor(vec![1.0, 0.0], 1e-12).unwrap();
        assert!(floored.is_strictly_positive());
    }

    #[test]
    fn box_operations() {
        let half = Pmf::uniform(2);
        let p = Pmf::new(vec![0.8, 0.2]).unwrap();
        assert!(close(
            box_plus(&half, &p).unwrap().values(),
            &[0.8, 0.2],
            1e-15
        ));
        assert!(close(
            box_dot(2.0, &p).unwrap().values(),
            &[16.0 / 17.0, 1.0 / 17.0],
            1e-15
        ));
        assert!(close(box_dot(1.0, &p).unwrap().values(), p.values(), 1e-15));
        assert!(close(
            box_dot(0.0, &p).unwrap().values(),
            half.values(),
            1e-15
        ));
        let inv = box_plus(&p, &box_dot(-1.0, &p).unwrap()).unwrap();
        assert!(close(inv.values(), half.values(), 1e-15));
        assert!(box_plus(&p, &Pmf::uniform(3)).is_err());
    }

    #[test]
    fn l_map_values() {
        let p = Pmf::new(vec![0.6, 0.1, 0.3]).unwrap();
        let v = l_map(&p).unwrap();
        let expected = [12.0f64.ln(), (1.0f64 / 18.0).ln(), 1.5f64.ln()];
        assert!(close(v.as_slice(), &expected, 1e-12));
        assert!(close(v.as_slice(), &[2.4849, -2.8904, 0.4055], 1e-4));
        assert!(v.sum().abs() < 1e-12);
        assert!(close(
            l_map(&Pmf::uniform(4)).unwrap().as_slice(),
            &[0.0; 4],
            1e-15
        ));

        let back = l_inverse(&LogCoord::new(vec![2.4849, -2.8904, 0.4055])).unwrap();
        assert!(close(back.values(), &[0.6, 0.1, 0.3], 1e-4));
        assert!(close(l_inverse(&v).unwrap().values(), p.values(), 1e-12));
        assert_eq!(l_inverse(&LogCoord::zeros(3)).unwrap(), Pmf::uniform(3));
        assert!(matches!(
            l_inverse(&LogCoord::new(vec![1.0, 1.0])),
            Err(Error::NotZeroSum(_))
        ));
    }

    #[test]
    fn inner_products() {
        let p = Pmf::new(vec![0.6, 0.1, 0.3]).unwrap();
        let sq: f64 = [12.0f64.ln(), (1.0f64 / 18.0).ln(), 1.5f64.ln()]
            .iter()
            .map(|x| x * x)
            .sum();
        assert!((inner_product(&p, &p).unwrap() - sq).abs() < 1e-12);
        assert!((sq - 14.694).abs() < 1e-3);
        assert!(inner_product(&p, &Pmf::uniform(3)).unwrap().abs() < 1e-15);
        assert_eq!(norm(&Pmf::uniform(5)).unwrap(), 0.0);
    }

    #[test]
    fn joint_indexing() {
        let f = Arc::new(GaloisField::prime(3).unwrap());
        let j = JointPmf::uniform(f.clone(), 2).unwrap();
        assert_eq!(j.outcome(5), vec![1, 2]);
        assert_eq!(j.index_of(&[1, 2]), 5);
        assert!(JointPmf::new(f.clone(), 2, Pmf::uniform(8)).is_err());
        assert_eq!(JointPmf::uniform(f, 0), Err(Error::NoVariables));
    }

    fn pmf_strategy(n: usize) -> impl Strategy<Value = Pmf> {
        prop::collection::vec(0.01f64..1.0, n).prop_map(|v| Pmf::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn vector_space_axioms(p in pmf_strategy(6), q in pmf_strategy(6), r in pmf_strategy(6),
                               a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let pq = box_plus(&p, &q).unwrap();
            prop_assert!(close(pq.values(), box_plus(&q, &p).unwrap().values(), 1e-12));
            let left = box_plus(&pq, &r).unwrap();
            let right = box_plus(&p, &box_plus(&q, &r).unwrap()).unwrap();
            prop_assert!(close(left.values(), right.values(), 1e-12));
            let d1 = box_dot(a, &pq).unwrap();
            let d2 = box_plus(&box_dot(a, &p).unwrap(), &box_dot(a, &q).unwrap()).unwrap();
            prop_assert!(close(d1.values(), d2.values(), 1e-12));
            let s1 = box_dot(a + b, &p).unwrap();
            let s2 = box_plus(&box_dot(a, &p).unwrap(), &box_dot(b, &p).unwrap()).unwrap();
            prop_assert!(close(s1.values(), s2.values(), 1e-12));
            prop_assert!(close(box_plus(&p, &Pmf::uniform(6)).unwrap().values(), p.values(), 1e-12));
        }

        #[test]
        fn l_is_linear_and_zero_sum(p in pmf_strategy(5), q in pmf_strategy(5), a in -4.0f64..4.0) {
            let lp = l_map(&p).unwrap();
            let lq = l_map(&q).unwrap();
            prop_assert!(lp.sum().abs() <= 1e-9);
            let lsum = l_map(&box_plus(&p, &q).unwrap()).unwrap();
            prop_assert!(close(lsum.as_slice(), lp.add(&lq).as_slice(), 1e-9));
            let lscaled = l_map(&box_dot(a, &p).unwrap()).unwrap();
            prop_assert!(close(lscaled.as_slice(), lp.scale(a).as_slice(), 1e-9));
            prop_assert!(close(l_inverse(&lp).unwrap().values(), p.values(), 1e-12));
            prop_assert!(norm(&p).unwrap() >= 0.0);
            prop_assert!((inner_product(&p, &q).unwrap() - inner_product(&q, &p).unwrap()).abs() < 1e-9);
        }
    }
}
