//! Invariant battery run against a single input PMF.

use serde::Serialize;

use crate::error::Result;
use crate::factorize::{
    factorize, project, project_by_basis, reconstruct, residual_norm, subspace_basis, OMIT_TOL,
};
use crate::pmfspace::{inner_product, l_map, JointPmf};
use crate::spci::spci_make;
use crate::tanner::{build_parity_matrices, lift_to_tanner};
use crate::umm::{brute_marginals, brute_marginals_lifted, DEFAULT_LIFTED_CAP};

// Pairwise checks above this many inner-product terms are skipped.
const PAIRWISE_BUDGET: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyTolerances {
    pub reconstruction: f64,
    pub residual: f64,
    pub orthogonality: f64,
    pub parseval: f64,
    pub cross_check: f64,
    pub idempotence: f64,
    pub marginals: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            reconstruction: 1e-10,
            residual: 1e-9,
            orthogonality: 1e-9,
            parseval: 1e-6,
            cross_check: 1e-9,
            idempotence: 1e-10,
            marginals: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// Measured value, absent when the check was skipped.
    pub value: Option<f64>,
    pub threshold: f64,
    pub passed: Option<bool>,
}

impl CheckResult {
    fn measured(name: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value: Some(value),
            threshold,
            passed: Some(value <= threshold),
        }
    }

    fn flag(name: &'static str, ok: bool) -> Self {
        Self {
            name,
            value: Some(if ok { 0.0 } else { 1.0 }),
            threshold: 0.0,
            passed: Some(ok),
        }
    }

    fn skipped(name: &'static str, threshold: f64) -> Self {
        Self {
            name,
            value: None,
            threshold,
            passed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    /// True when no executed check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed != Some(false))
    }
}

pub fn run_battery(p: &JointPmf, tol: &VerifyTolerances) -> Result<VerifyReport> {
    let field = p.field();
    let mut checks = Vec::new();
    let fac = factorize(p)?;

    let back = reconstruct(&fac)?;
    checks.push(CheckResult::measured(
        "reconstruction_max_abs_error",
        back.pmf().max_abs_diff(p.pmf()),
        tol.reconstruction,
    ));
    checks.push(CheckResult::measured(
        "residual_norm",
        residual_norm(p, &fac)?,
        tol.residual,
    ));

    let joints: Vec<JointPmf> = fac
        .factors()
        .iter()
        .map(|f| f.joint(field))
        .collect::<Result<_>>()?;
    let norms: Vec<f64> = joints
        .iter()
        .map(|j| l_map(j.pmf()).map(|v| v.norm()))
        .collect::<Result<_>>()?;

    let m = joints.len() as u128;
    if m * m * p.values().len() as u128 <= PAIRWISE_BUDGET {
        let mut worst: f64 = 0.0;
        for i in 0..joints.len() {
            for j in i + 1..joints.len() {
                // uniform components are the zero vector up to rounding
                if norms[i] > OMIT_TOL && norms[j] > OMIT_TOL {
                    let scale = norms[i] * norms[j];
                    let ip = inner_product(joints[i].pmf(), joints[j].pmf())?;
                    worst = worst.max(ip.abs() / scale);
                }
            }
        }
        checks.push(CheckResult::measured(
            "orthogonality_relative",
            worst,
            tol.orthogonality,
        ));
    } else {
        checks.push(CheckResult::skipped(
            "orthogonality_relative",
            tol.orthogonality,
        ));
    }

    let total = l_map(p.pmf())?.norm().powi(2);
    let parts: f64 = norms.iter().map(|n| n * n).sum();
    let parseval = (total - parts).abs() / total.max(f64::MIN_POSITIVE);
    checks.push(CheckResult::measured(
        "parseval_relative",
        if total == 0.0 { parts } else { parseval },
        tol.parseval,
    ));

    let mut cross: f64 = 0.0;
    let mut idem: f64 = 0.0;
    for factor in fac.factors() {
        let basis = subspace_basis(field, &factor.a);
        let via_basis = project_by_basis(p, &basis)?;
        cross = cross.max(via_basis.q.max_abs_diff(&factor.q));
        let again = project(&spci_make(field, &factor.a, &factor.q)?, &factor.a)?;
        idem = idem.max(again.q.max_abs_diff(&factor.q));
    }
    checks.push(CheckResult::measured(
        "fiber_mean_vs_basis",
        cross,
        tol.cross_check,
    ));
    checks.push(CheckResult::measured("idempotence", idem, tol.idempotence));

    let graph = lift_to_tanner(&fac)?;
    let (h, g) = build_parity_matrices(&graph);
    checks.push(CheckResult::flag(
        "generator_times_parity_is_zero",
        g.mul_transpose(&h, field).is_zero(),
    ));
    checks.push(CheckResult::flag(
        "parity_rank_full",
        h.rank(field) == graph.n_aux(),
    ));
    if m * m * field.order() as u128 <= PAIRWISE_BUDGET {
        checks.push(CheckResult::flag(
            "generator_columns_pairwise_independent",
            g.columns_pairwise_independent(field),
        ));
    } else {
        checks.push(CheckResult::skipped(
            "generator_columns_pairwise_independent",
            0.0,
        ));
    }

    match brute_marginals_lifted(&graph, DEFAULT_LIFTED_CAP) {
        Ok(lifted) => {
            let direct = brute_marginals(p);
            let gap = direct
                .iter()
                .zip(&lifted)
                .map(|(a, b)| a.max_abs_diff(b))
                .fold(0.0, f64::max);
            checks.push(CheckResult::measured(
                "lifted_marginal_gap",
                gap,
                tol.marginals,
            ));
        }
        Err(_) => checks.push(CheckResult::skipped("lifted_marginal_gap", tol.marginals)),
    }

    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::galois::GaloisField;

    #[test]
    fn battery_passes_on_the_3x3_example() {
        let f = Arc::new(GaloisField::prime(3).unwrap());
        let v = [144.0, 18.0, 6.0, 3.0, 18.0, 36.0, 3.0, 4.0, 6.0];
        let p = JointPmf::from_values(f, 2, v.to_vec()).unwrap();
        let report = run_battery(&p, &VerifyTolerances::default()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.checks.iter().all(|c| c.passed.is_some()));
    }

    #[test]
    fn single_interaction_input_passes() {
        let f = Arc::new(GaloisField::prime(3).unwrap());
        let t = 0.1 / 3.0;
        let p = JointPmf::from_values(f, 2, vec![0.2, 0.1, t, t, 0.2, 0.1, 0.1, t, 0.2]).unwrap();
        assert!(run_battery(&p, &VerifyTolerances::default())
            .unwrap()
            .passed());
    }

    #[test]
    fn impossible_tolerance_fails() {
        let f = Arc::new(GaloisField::prime(2).unwrap());
        let p = JointPmf::from_values(f, 3, (1..=8).map(f64::from).collect()).unwrap();
        let tol = VerifyTolerances {
            parseval: -1.0,
            ..Default::default()
        };
        assert!(!run_battery(&p, &tol).unwrap().passed());
    }

    #[test]
    fn uniform_input_passes() {
        let f = Arc::new(GaloisField::new(2, 2, None).unwrap());
        let p = JointPmf::uniform(f, 2).unwrap();
        assert!(run_battery(&p, &VerifyTolerances::default())
            .unwrap()
            .passed());
    }
}
