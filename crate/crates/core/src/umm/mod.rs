//! Marginalization on the lifted graph: brute-force enumeration as the
//! oracle, and flooding-schedule sum-product with transform-domain check
//! nodes.
//!
//! Loopy sum-product on the full dual-Hamming graph is approximate. Reports
//! carry the gap to the exact marginals when an oracle is supplied.

mod check;

pub use check::{check_node_naive, check_node_transform};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmfspace::{JointPmf, Pmf};
use crate::tanner::TannerGraph;

/// Default limit on |A|^M for [`brute_marginals_lifted`].
pub const DEFAULT_LIFTED_CAP: u128 = 1 << 22;

/// Added to every message entry before normalization.
pub const MESSAGE_FLOOR: f64 = 1e-30;

/// Exact single-variable marginals of a joint PMF by direct summation.
pub fn brute_marginals(p: &JointPmf) -> Vec<Pmf> {
    let order = p.field().order();
    let n = p.num_vars();
    let mut acc = vec![vec![0.0; order]; n];
    for (k, &v) in p.values().iter().enumerate() {
        let mut rest = k;
        for i in (0..n).rev() {
            acc[i][rest % order] += v;
            rest /= order;
        }
    }
    acc.into_iter()
        .map(|m| Pmf::new(m).expect("marginal of a normalized PMF"))
        .collect()
}

/// Exact marginals of `r(x, u)` for all M variables, enumerating every one
/// of the |A|^M assignments.
pub fn brute_marginals_lifted(g: &TannerGraph, cap: u128) -> Result<Vec<Pmf>> {
    let order = g.field().order();
    let m = g.n_vars();
    let size = (order as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    let mut acc = vec![vec![0.0; order]; m];
    let mut assignment = vec![0usize; m];
    for _ in 0..size {
        let w = g.weight(&assignment);
        if w != 0.0 {
            for (v, &x) in assignment.iter().enumerate() {
                acc[v][x] += w;
            }
        }
        for d in assignment.iter_mut().rev() {
            *d += 1;
            if *d < order {
                break;
            }
            *d = 0;
        }
    }
    acc.into_iter().map(Pmf::new).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    pub max_iters: usize,
    /// Weight kept from the previous check-to-variable message, in [0, 1).
    pub damping: f64,
    /// Convergence threshold on the L∞ change of check-to-variable messages.
    pub tol: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            damping: 0.0,
            tol: 1e-10,
        }
    }
}

impl BpConfig {
    pub fn new(max_iters: usize, damping: f64, tol: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&damping) {
            return Err(Error::InvalidConfig(format!(
                "damping {damping} outside [0, 1)"
            )));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance {tol} must be positive"
            )));
        }
        Ok(Self {
            max_iters,
            damping,
            tol,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    VarToCheck,
    CheckToVar,
}

/// A message on one edge of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub dist: Vec<f64>,
    pub var: usize,
    pub check: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpReport {
    /// Beliefs for x₁…x_N then u₁…u_{M−N}.
    pub marginals: Vec<Pmf>,
    pub iterations: usize,
    pub converged: bool,
    pub max_delta: f64,
    pub l1_gap: Option<f64>,
}

impl BpReport {
    /// Records the largest per-variable L1 distance to exact marginals.
    pub fn with_oracle(mut self, exact: &[Pmf]) -> Self {
        let gap = self
            .marginals
            .iter()
            .zip(exact)
            .map(|(b, e)| b.l1_distance(e))
            .fold(0.0, f64::max);
        self.l1_gap = Some(gap);
        self
    }
}

struct Edge {
    var: usize,
    check: usize,
    coeff: usize,
}

/// Mutable message state of one run.
struct BpState<'g> {
    graph: &'g TannerGraph,
    config: BpConfig,
    edges: Vec<Edge>,
    check_edges: Vec<Vec<usize>>,
    var_edges: Vec<Vec<usize>>,
    to_check: Vec<Message>,
    to_var: Vec<Message>,
}

impl<'g> BpState<'g> {
    fn new(graph: &'g TannerGraph, config: BpConfig) -> Self {
        let order = graph.field().order();
        let mut edges = Vec::new();
        let mut check_edges = vec![Vec::new(); graph.n_aux()];
        let mut var_edges = vec![Vec::new(); graph.n_vars()];
        for (i, ids) in check_edges.iter_mut().enumerate() {
            for (var, coeff) in graph.check_edges(i) {
                ids.push(edges.len());
                var_edges[var].push(edges.len());
                edges.push(Edge {
                    var,
                    check: i,
                    coeff,
                });
            }
        }
        let to_check = edges
            .iter()
            .map(|e| Message {
                dist: check::finish(graph.unary()[e.var].values().to_vec()),
                var: e.var,
                check: e.check,
                direction: Direction::VarToCheck,
            })
            .collect();
        let to_var = edges
            .iter()
            .map(|e| Message {
                dist: vec![1.0 / order as f64; order],
                var: e.var,
                check: e.check,
                direction: Direction::CheckToVar,
            })
            .collect();
        Self {
            graph,
            config,
            edges,
            check_edges,
            var_edges,
            to_check,
            to_var,
        }
    }

    /// One flooding round; returns the L∞ change of check-to-variable
    /// messages.
    fn step(&mut self) -> f64 {
        let field = self.graph.field();
        let order = field.order();
        let d = self.config.damping;
        let mut delta: f64 = 0.0;

        let mut fresh = Vec::with_capacity(self.edges.len());
        for (e, edge) in self.edges.iter().enumerate() {
            let others: Vec<usize> = self.check_edges[edge.check]
                .iter()
                .copied()
                .filter(|&o| o != e)
                .collect();
            let msgs: Vec<&[f64]> = others
                .iter()
                .map(|&o| self.to_check[o].dist.as_slice())
                .collect();
            let coeffs: Vec<usize> = others.iter().map(|&o| self.edges[o].coeff).collect();
            let s = check_node_transform(&msgs, &coeffs, field).expect("validated graph");
            // s + coeff·v = 0  ⇒  P(v) = P(s = −coeff·v)
            let raw: Vec<f64> = (0..order)
                .map(|v| s[field.neg_raw(field.mul_raw(edge.coeff, v))])
                .collect();
            let old = &self.to_var[e].dist;
            let mixed: Vec<f64> = raw
                .iter()
                .zip(old)
                .map(|(n, o)| (1.0 - d) * n + d * o)
                .collect();
            let mixed = check::finish(mixed);
            for (n, o) in mixed.iter().zip(old) {
                delta = delta.max((n - o).abs());
            }
            fresh.push(mixed);
        }
        for (msg, dist) in self.to_var.iter_mut().zip(fresh) {
            msg.dist = dist;
        }

        for e in 0..self.edges.len() {
            let v = self.edges[e].var;
            let mut dist = self.graph.unary()[v].values().to_vec();
            for &o in &self.var_edges[v] {
                if o != e {
                    for (x, y) in dist.iter_mut().zip(&self.to_var[o].dist) {
                        *x *= y;
                    }
                }
            }
            self.to_check[e].dist = check::finish(dist);
        }
        delta
    }

    fn beliefs(&self) -> Vec<Pmf> {
        (0..self.graph.n_vars())
            .map(|v| {
                let mut b = self.graph.unary()[v].values().to_vec();
                for &e in &self.var_edges[v] {
                    for (x, y) in b.iter_mut().zip(&self.to_var[e].dist) {
                        *x *= y;
                    }
                }
                Pmf::from_normalized(check::finish(b)).expect("floored belief")
            })
            .collect()
    }
}

/// Loopy sum-product with a synchronous flooding schedule. Exact on
/// cycle-free graphs; otherwise approximate. Non-convergence is reported,
/// not raised.
pub fn sum_product(g: &TannerGraph, config: &BpConfig) -> BpReport {
    let mut state = BpState::new(g, *config);
    let mut iterations = 0;
    let mut max_delta = 0.0;
    let mut converged = g.n_aux() == 0;
    while !converged && iterations < config.max_iters {
        max_delta = state.step();
        iterations += 1;
        converged = max_delta < config.tol;
    }
    BpReport {
        marginals: state.beliefs(),
        iterations,
        converged,
        max_delta,
        l1_gap: None,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::factorize::{factorize, Factorization};
    use crate::galois::GaloisField;
    use crate::tanner::lift_to_tanner;

    fn p2() -> JointPmf {
        let f = Arc::new(GaloisField::prime(3).unwrap());
        let v = [144.0, 18.0, 6.0, 3.0, 18.0, 36.0, 3.0, 4.0, 6.0];
        JointPmf::from_values(f, 2, v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn brute_marginals_of_the_3x3_example() {
        let m = brute_marginals(&p2());
        assert!(close(
            m[0].values(),
            &[168.0 / 238.0, 57.0 / 238.0, 13.0 / 238.0],
            1e-15
        ));
        assert!(close(
            m[1].values(),
            &[150.0 / 238.0, 40.0 / 238.0, 48.0 / 238.0],
            1e-15
        ));
    }

    #[test]
    fn lifted_marginals_preserve_the_original_ones() {
        let p = p2();
        let g = lift_to_tanner(&factorize(&p).unwrap()).unwrap();
        let lifted = brute_marginals_lifted(&g, DEFAULT_LIFTED_CAP).unwrap();
        assert_eq!(lifted.len(), 4);
        for (a, b) in lifted.iter().zip(brute_marginals(&p)) {
            assert!(close(a.values(), b.values(), 1e-12));
        }
        // u1 = x1 + x2, summed directly from the table
        let mut sum = [0.0; 3];
        for (k, &v) in p.values().iter().enumerate() {
            sum[(k / 3 + k % 3) % 3] += v;
        }
        assert!(close(lifted[2].values(), &sum, 1e-12));
    }

    #[test]
    fn lifted_cap_is_enforced() {
        let g = lift_to_tanner(&factorize(&p2()).unwrap()).unwrap();
        assert_eq!(
            brute_marginals_lifted(&g, 80),
            Err(Error::CapExceeded { size: 81, cap: 80 })
        );
    }

    #[test]
    fn uniform_graph_has_uniform_marginals() {
        let f = Arc::new(GaloisField::prime(3).unwrap());
        let g = lift_to_tanner(&Factorization::uniform(f, 2).unwrap()).unwrap();
        for m in brute_marginals_lifted(&g, DEFAULT_LIFTED_CAP).unwrap() {
            assert!(close(m.values(), &[1.0 / 3.0; 3], 1e-15));
        }
        let report = sum_product(&g, &BpConfig::default());
        assert!(report.converged);
        for m in report.marginals {
            assert!(close(m.values(), &[1.0 / 3.0; 3], 1e-12));
        }
    }

    #[test]
    fn no_checks_means_beliefs_are_the_unary_factors() {
        let f = Arc::new(GaloisField::prime(5).unwrap());
        let p = JointPmf::from_values(f, 1, vec![5.0, 1.0, 1.0, 2.0, 1.0]).unwrap();
        let g = lift_to_tanner(&factorize(&p).unwrap()).unwrap();
        let report = sum_product(&g, &BpConfig::default());
        assert_eq!(report.iterations, 0);
        assert!(report.converged);
        assert!(close(report.marginals[0].values(), p.values(), 1e-15));
    }

    #[test]
    fn single_check_tree_is_exact() {
        let f = Arc::new(GaloisField::prime(2).unwrap());
        let p = JointPmf::from_values(f, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let g = lift_to_tanner(&factorize(&p).unwrap()).unwrap();
        assert_eq!(g.n_aux(), 1);
        let exact = brute_marginals_lifted(&g, DEFAULT_LIFTED_CAP).unwrap();
        let report = sum_product(&g, &BpConfig::default()).with_oracle(&exact);
        assert!(report.converged);
        assert!(report.l1_gap.unwrap() < 1e-9);
    }

    #[test]
    fn messages_stay_normalized() {
        let g = lift_to_tanner(&factorize(&p2()).unwrap()).unwrap();
        let mut state = BpState::new(
            &g,
            BpConfig {
                damping: 0.3,
                ..BpConfig::default()
            },
        );
        for _ in 0..25 {
            state.step();
            for m in state.to_var.iter().chain(&state.to_check) {
                assert!((m.dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(m.dist.iter().all(|&x| x > 0.0));
            }
        }
    }

    #[test]
    fn loopy_example_reports_a_gap() {
        let p = p2();
        let g = lift_to_tanner(&factorize(&p).unwrap()).unwrap();
        let exact = brute_marginals_lifted(&g, DEFAULT_LIFTED_CAP).unwrap();
        let report = sum_product(&g, &BpConfig::default()).with_oracle(&exact);
        assert!(report.iterations <= 200);
        assert!(report.l1_gap.unwrap().is_finite());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"l1_gap\""));
    }

    #[test]
    fn config_validation() {
        assert!(BpConfig::new(10, 1.0, 1e-9).is_err());
        assert!(BpConfig::new(10, -0.1, 1e-9).is_err());
        assert!(BpConfig::new(10, 0.5, 0.0).is_err());
        assert!(BpConfig::new(10, 0.5, 1e-9).is_ok());
    }
}
