//! Orthogonal projection of a joint PMF onto every soft parity check
//! subspace, and reassembly of the projections.
//!
//! The subspace for a coefficient vector `a` is, in log coordinates, exactly
//! the set of zero-sum vectors that are constant on the fibers
//! `{x : a·xᵀ = c}`. Since all fibers have the same size, orthogonal
//! projection onto it is fiber averaging of the centered logs. In PMF terms
//! the projected syndrome distribution is `q(c) ∝ exp(mean of log p over the
//! fiber c)`, a normalized geometric mean. [`project_by_basis`] computes the
//! same thing through an explicit orthonormal basis and is kept as an
//! independent route for cross-checking.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::{projective_count, projective_reps, GaloisField, ParityVector};
use crate::pmfspace::{center_logs, l_map, outcome_count, JointPmf, LogCoord, Pmf};
use crate::spci::SpciFactor;

/// Factors whose syndrome distribution has Hilbert norm below this are
/// reported as uniform and may be left out when writing the product.
pub const OMIT_TOL: f64 = 1e-9;

/// Mass tolerance used when checking a stored normalizer.
pub const LOG_Z_TOL: f64 = 1e-9;

/// Orthonormal basis (in log coordinates) of one interaction subspace.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub a: ParityVector,
    pub psis: Vec<LogCoord>,
}

/// Gram–Schmidt on the first |A|−1 centered fiber indicators of `a`.
pub fn subspace_basis(field: &GaloisField, a: &ParityVector) -> SubspaceBasis {
    let order = field.order();
    let syn = field.syndromes(a);
    let mean = 1.0 / order as f64;
    let mut psis: Vec<LogCoord> = Vec::with_capacity(order - 1);
    for c in 0..order - 1 {
        let mut v: Vec<f64> = syn
            .iter()
            .map(|&s| if s == c { 1.0 - mean } else { -mean })
            .collect();
        // modified Gram–Schmidt
        for psi in &psis {
            let proj: f64 = v.iter().zip(psi.as_slice()).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(psi.as_slice()) {
                *x -= proj * y;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        psis.push(LogCoord::new(v.into_iter().map(|x| x / n).collect()));
    }
    SubspaceBasis { a: a.clone(), psis }
}

/// Orthogonal projection of `p` onto the interaction subspace of `a`, by
/// fiber averaging.
pub fn project(p: &JointPmf, a: &ParityVector) -> Result<SpciFactor> {
    check_vector(p.field(), p.num_vars(), a)?;
    let logs = p.pmf().logs()?;
    Ok(project_logs(p.field(), &logs, a))
}

fn project_logs(field: &GaloisField, logs: &[f64], a: &ParityVector) -> SpciFactor {
    let order = field.order();
    let mut sums = vec![0.0; order];
    for (&c, &l) in field.syndromes(a).iter().zip(logs) {
        sums[c] += l;
    }
    // equal fiber sizes, so sums differ from means by a constant factor
    let fiber = (logs.len() / order) as f64;
    let means: Vec<f64> = sums.iter().map(|s| s / fiber).collect();
    SpciFactor::new(a.clone(), Pmf::from_logs(&means))
}

/// The same projection as [`project`], expanded over an orthonormal basis:
/// `Σⱼ ⟨p, ψⱼ⟩ ⊡ ψⱼ`.
pub fn project_by_basis(p: &JointPmf, basis: &SubspaceBasis) -> Result<SpciFactor> {
    check_vector(p.field(), p.num_vars(), &basis.a)?;
    let lp = l_map(p.pmf())?;
    let mut v = LogCoord::zeros(lp.len());
    for psi in &basis.psis {
        v = v.add(&psi.scale(lp.dot(psi)));
    }
    // v(x) = K·L_A(q)(a·x) with K = |A|^(N−1), so q ∝ exp(v / |S|)
    let field = p.field();
    let order = field.order();
    let size = lp.len() as f64;
    let mut sums = vec![0.0; order];
    for (&c, &x) in field.syndromes(&basis.a).iter().zip(v.as_slice()) {
        sums[c] += x;
    }
    let fiber = size / order as f64;
    let logs: Vec<f64> = sums.iter().map(|s| s / fiber / size).collect();
    Ok(SpciFactor::new(basis.a.clone(), Pmf::from_logs(&logs)))
}

fn check_vector(field: &GaloisField, num_vars: usize, a: &ParityVector) -> Result<()> {
    if a.len() != num_vars {
        return Err(Error::LengthMismatch {
            expected: num_vars,
            got: a.len(),
        });
    }
    if a.iter().any(|&c| c >= field.order()) {
        return Err(Error::ElementOutOfRange {
            elem: *a.iter().max().unwrap_or(&0),
            order: field.order(),
        });
    }
    Ok(())
}

/// A joint PMF written as `p(x) = exp(Σᵢ log qᵢ(aᵢ·xᵀ) − log_z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    field: Arc<GaloisField>,
    num_vars: usize,
    factors: Vec<SpciFactor>,
    log_z: f64,
}

impl Factorization {
    /// Builds a factorization and computes its normalizer.
    pub fn new(field: Arc<GaloisField>, num_vars: usize, factors: Vec<SpciFactor>) -> Result<Self> {
        let mut f = Self {
            field,
            num_vars,
            factors,
            log_z: 0.0,
        };
        f.validate()?;
        let s = f.log_weights();
        f.log_z = log_sum_exp(&s);
        Ok(f)
    }

    /// Reassembles a factorization with a known normalizer, e.g. from a
    /// serialized document.
    pub fn from_parts(
        field: Arc<GaloisField>,
        num_vars: usize,
        factors: Vec<SpciFactor>,
        log_z: f64,
    ) -> Result<Self> {
        if !log_z.is_finite() {
            return Err(Error::Malformed(format!(
                "logZ must be finite, got {log_z}"
            )));
        }
        let f = Self {
            field,
            num_vars,
            factors,
            log_z,
        };
        f.validate()?;
        Ok(f)
    }

    /// The trivial factorization of the uniform PMF.
    pub fn uniform(field: Arc<GaloisField>, num_vars: usize) -> Result<Self> {
        let order = field.order();
        let factors = projective_reps(&field, num_vars)
            .into_iter()
            .map(|a| SpciFactor::new(a, Pmf::uniform(order)))
            .collect();
        Self::new(field, num_vars, factors)
    }

    fn validate(&self) -> Result<()> {
        if self.num_vars == 0 {
            return Err(Error::NoVariables);
        }
        outcome_count(self.field.order(), self.num_vars)?;
        for f in &self.factors {
            if f.a.len() != self.num_vars {
                return Err(Error::LengthMismatch {
                    expected: self.num_vars,
                    got: f.a.len(),
                });
            }
            if f.a.iter().any(|&c| c >= self.field.order()) || f.a.weight() == 0 {
                return Err(Error::Malformed(format!(
                    "bad coefficient vector {:?}",
                    f.a.coeffs()
                )));
            }
            if f.q.len() != self.field.order() {
                return Err(Error::LengthMismatch {
                    expected: self.field.order(),
                    got: f.q.len(),
                });
            }
            f.q.require_positive()?;
        }
        Ok(())
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn factors(&self) -> &[SpciFactor] {
        &self.factors
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// `Σᵢ log qᵢ(aᵢ·xᵀ)` for every outcome.
    pub fn log_weights(&self) -> Vec<f64> {
        let size = self.field.order().pow(self.num_vars as u32);
        let mut s = vec![0.0; size];
        for f in &self.factors {
            let lq: Vec<f64> = f.q.values().iter().map(|v| v.ln()).collect();
            for (acc, c) in s.iter_mut().zip(self.field.syndromes(&f.a)) {
                *acc += lq[c];
            }
        }
        s
    }

    /// Per factor: whether its syndrome distribution is uniform, so the
    /// factor is a constant that can be left out of the product.
    pub fn omittable(&self) -> Vec<bool> {
        self.factors
            .iter()
            .map(|f| f.q.is_uniform_within(OMIT_TOL))
            .collect()
    }

    /// Hilbert norm of each factor's induced joint PMF.
    pub fn component_norms(&self) -> Vec<f64> {
        let k = (self.field.order() as f64).powi(self.num_vars as i32 - 1);
        self.factors
            .iter()
            .map(|f| k.powf(1.5) * l_map(&f.q).map(|v| v.norm()).unwrap_or(f64::NAN))
            .collect()
    }

    /// True when the factors are exactly the projective representatives in
    /// canonical order.
    pub fn is_canonical(&self) -> bool {
        self.factors.len() == projective_count(self.field.order(), self.num_vars)
            && self
                .factors
                .iter()
                .zip(projective_reps(&self.field, self.num_vars))
                .all(|(f, a)| f.a == a)
    }
}

fn log_sum_exp(s: &[f64]) -> f64 {
    let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + s.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Projects `p` onto all (|A|^N−1)/(|A|−1) interaction subspaces.
pub fn factorize(p: &JointPmf) -> Result<Factorization> {
    let logs = p.pmf().logs()?;
    let field = p.field();
    let factors = projective_reps(field, p.num_vars())
        .iter()
        .map(|a| project_logs(field, &logs, a))
        .collect();
    Factorization::new(field.clone(), p.num_vars(), factors)
}

/// Evaluates the product of all factors with the stored normalizer.
pub fn reconstruct(f: &Factorization) -> Result<JointPmf> {
    let values: Vec<f64> = f
        .log_weights()
        .into_iter()
        .map(|s| (s - f.log_z).exp())
        .collect();
    let mass: f64 = values.iter().sum();
    if (mass - 1.0).abs() > LOG_Z_TOL {
        return Err(Error::NormalizationMismatch(mass));
    }
    // absorbs rounding in a stored normalizer; larger deviations were rejected above
    JointPmf::new(f.field.clone(), f.num_vars, Pmf::from_normalized(values)?)
}

/// `‖L(p) − Σᵢ L(factorᵢ)‖`, which vanishes for a complete factorization.
pub fn residual_norm(p: &JointPmf, f: &Factorization) -> Result<f64> {
    if p.field().spec() != f.field.spec() || p.num_vars() != f.num_vars {
        return Err(Error::Malformed(
            "PMF and factorization live on different spaces".into(),
        ));
    }
    let mut r = l_map(p.pmf())?.into_vec();
    let k = (f.field.order() as f64).powi(f.num_vars as i32 - 1);
    for factor in &f.factors {
        let lq = center_logs(&factor.q.logs()?);
        for (acc, c) in r.iter_mut().zip(f.field.syndromes(&factor.a)) {
            *acc -= k * lq.as_slice()[c];
        }
    }
    Ok(LogCoord::new(r).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmfspace::inner_product;
    use crate::spci::spci_make;

    fn gf3() -> Arc<GaloisField> {
        Arc::new(GaloisField::prime(3).unwrap())
    }

    fn p2(f: &Arc<GaloisField>) -> JointPmf {
        let v = [144.0, 18.0, 6.0, 3.0, 18.0, 36.0, 3.0, 4.0, 6.0];
        JointPmf::from_values(f.clone(), 2, v.iter().map(|x| x / 238.0).collect()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn binary_pair_basis() {
        let f = GaloisField::prime(2).unwrap();
        let b = subspace_basis(&f, &ParityVector::new(&f, &[1, 1]).unwrap());
        assert_eq!(b.psis.len(), 1);
        assert_close(b.psis[0].as_slice(), &[0.5, -0.5, -0.5, 0.5], 1e-15);
    }

    #[test]
    fn bases_are_orthonormal_and_fiber_constant() {
        for (p, m, n) in [(3, 1, 1), (3, 1, 2), (2, 2, 2), (5, 1, 2), (2, 3, 1)] {
            let f = GaloisField::new(p, m, None).unwrap();
            for a in projective_reps(&f, n) {
                let b = subspace_basis(&f, &a);
                assert_eq!(b.psis.len(), f.order() - 1);
                let syn = f.syndromes(&a);
                for (i, u) in b.psis.iter().enumerate() {
                    assert!(u.sum().abs() < 1e-12);
                    for (j, v) in b.psis.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((u.dot(v) - want).abs() < 1e-10);
                    }
                    let mut seen = vec![None; f.order()];
                    for (&c, &x) in syn.iter().zip(u.as_slice()) {
                        let first = *seen[c].get_or_insert(x);
                        assert!((first - x).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn projections_of_the_3x3_example() {
        let f = gf3();
        let p = p2(&f);
        let q1 = project(&p, &ParityVector::unit(2, 0)).unwrap();
        assert_close(q1.q.values(), &[0.6, 0.3, 0.1], 1e-12);
        let q2 = project(&p, &ParityVector::unit(2, 1)).unwrap();
        assert_close(q2.q.values(), &[1.0 / 3.0; 3], 1e-12);

        let p1 = spci_make(&f, &[1, 2], &Pmf::new(vec![0.6, 0.1, 0.3]).unwrap()).unwrap();
        let fixed = project(&p1, &ParityVector::new(&f, &[1, 2]).unwrap()).unwrap();
        assert_close(fixed.q.values(), &[0.6, 0.1, 0.3], 1e-12);
    }

    #[test]
    fn factorize_the_3x3_example() {
        let f = gf3();
        let p = p2(&f);
        let fac = factorize(&p).unwrap();
        let expected = [
            [0.6, 0.3, 0.1],
            [1.0 / 3.0; 3],
            [4.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0],
            [0.6, 0.1, 0.3],
        ];
        assert_eq!(fac.factors().len(), 4);
        for (factor, want) in fac.factors().iter().zip(expected) {
            assert_close(factor.q.values(), &want, 1e-12);
        }
        assert_eq!(fac.omittable(), vec![false, true, false, false]);
        assert!(fac.is_canonical());
        let back = reconstruct(&fac).unwrap();
        assert_close(back.values(), p.values(), 1e-12);
        assert!(residual_norm(&p, &fac).unwrap() < 1e-9);
    }

    #[test]
    fn published_factors_reconstruct_the_table() {
        let f = gf3();
        let qs = [
            vec![6.0, 3.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![4.0, 1.0, 1.0],
            vec![6.0, 1.0, 3.0],
        ];
        let factors = projective_reps(&f, 2)
            .into_iter()
            .zip(qs)
            .map(|(a, q)| SpciFactor::new(a, Pmf::new(q).unwrap()))
            .collect();
        let fac = Factorization::new(f.clone(), 2, factors).unwrap();
        assert_close(reconstruct(&fac).unwrap().values(), p2(&f).values(), 1e-12);
    }

    #[test]
    fn uniform_cases() {
        let f = gf3();
        let u = JointPmf::uniform(f.clone(), 2).unwrap();
        let fac = factorize(&u).unwrap();
        assert!(fac.omittable().iter().all(|&o| o));
        let triv = Factorization::uniform(f.clone(), 2).unwrap();
        assert_close(reconstruct(&triv).unwrap().values(), u.values(), 1e-15);
        assert!(residual_norm(&u, &triv).unwrap() < 1e-15);
        // the normalizer makes exp(Σ log q − log_z) the uniform 1/9
        let expected = (9.0f64 * (1.0f64 / 3.0).powi(4)).ln();
        assert!((fac.log_z() - expected).abs() < 1e-12);
    }

    #[test]
    fn an_interaction_factorizes_to_itself() {
        let f = Arc::new(GaloisField::new(2, 2, None).unwrap());
        let q = Pmf::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let a = ParityVector::new(&f, &[1, 3]).unwrap();
        let p = spci_make(&f, &a, &q).unwrap();
        let fac = factorize(&p).unwrap();
        for (factor, omit) in fac.factors().iter().zip(fac.omittable()) {
            if factor.a == a {
                assert!(!omit);
                assert!(factor.q.max_abs_diff(&q) < 1e-12);
            } else {
                assert!(omit);
            }
        }
    }

    #[test]
    fn residual_with_a_dropped_factor_equals_its_projection_norm() {
        let f = gf3();
        let p = p2(&f);
        let fac = factorize(&p).unwrap();
        let mut factors = fac.factors().to_vec();
        let dropped = factors[3].clone();
        factors[3].q = Pmf::uniform(3);
        let partial = Factorization::new(f.clone(), 2, factors).unwrap();
        let r = residual_norm(&p, &partial).unwrap();
        let proj_norm = inner_product(
            dropped.joint(&f).unwrap().pmf(),
            dropped.joint(&f).unwrap().pmf(),
        )
        .unwrap()
        .sqrt();
        assert!(r > 0.0);
        assert!((r - proj_norm).abs() < 1e-9 * proj_norm.max(1.0));
        assert!((fac.component_norms()[3] - proj_norm).abs() < 1e-9 * proj_norm);
    }

    #[test]
    fn stale_normalizer_is_rejected() {
        let f = gf3();
        let fac = factorize(&p2(&f)).unwrap();
        let bad =
            Factorization::from_parts(f, 2, fac.factors().to_vec(), fac.log_z() + 0.1).unwrap();
        assert!(matches!(
            reconstruct(&bad),
            Err(Error::NormalizationMismatch(_))
        ));
    }

    #[test]
    fn non_positive_input_is_rejected() {
        let f = gf3();
        let mut v = vec![1.0; 9];
        v[4] = 0.0;
        let p = JointPmf::from_values(f, 2, v).unwrap();
        assert!(matches!(
            factorize(&p),
            Err(Error::NonPositive { index: 4, .. })
        ));
    }
}
