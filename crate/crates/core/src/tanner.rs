//! Auxiliary-variable form of a factorization: every interaction of order
//! two or more becomes a hard parity check `aᵢ·xᵀ − uᵢ = 0` plus a degree-one
//! factor `qᵢ(uᵢ)`. With factors in canonical order the checks form
//! `H = [P −I]`, the parity check matrix of the dual Hamming code.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::Factorization;
use crate::galois::{FieldMatrix, FieldSpec, GaloisField};
use crate::io::to_sorted_json;
use crate::pmfspace::Pmf;

/// Bipartite graph of variables (x₁…x_N, u₁…u_{M−N}) and parity checks,
/// with a unary factor on every variable.
#[derive(Debug, Clone, PartialEq)]
pub struct TannerGraph {
    field: Arc<GaloisField>,
    n_orig: usize,
    /// Row i: the N coefficients on x followed by the coefficient on uᵢ.
    checks: Vec<Vec<usize>>,
    unary: Vec<Pmf>,
}

impl TannerGraph {
    pub fn new(
        field: Arc<GaloisField>,
        n_orig: usize,
        checks: Vec<Vec<usize>>,
        unary: Vec<Pmf>,
    ) -> Result<Self> {
        if n_orig == 0 {
            return Err(Error::NoVariables);
        }
        let minus_one = field.minus_one();
        for (i, row) in checks.iter().enumerate() {
            if row.len() != n_orig + 1 {
                return Err(Error::InvalidGraph(format!(
                    "check {} has {} coefficients, expected {}",
                    i + 1,
                    row.len(),
                    n_orig + 1
                )));
            }
            if row.iter().any(|&c| c >= field.order()) {
                return Err(Error::InvalidGraph(format!(
                    "check {} has an out-of-range coefficient",
                    i + 1
                )));
            }
            if row[n_orig] != minus_one {
                return Err(Error::InvalidGraph(format!(
                    "check {} must carry -1 on its auxiliary variable",
                    i + 1
                )));
            }
            if row[..n_orig].iter().all(|&c| c == 0) {
                return Err(Error::InvalidGraph(format!(
                    "check {} touches no original variable",
                    i + 1
                )));
            }
        }
        let m = n_orig + checks.len();
        if unary.len() != m {
            return Err(Error::InvalidGraph(format!(
                "{} unary factors for {m} variables",
                unary.len()
            )));
        }
        if let Some(i) = unary.iter().position(|q| q.len() != field.order()) {
            return Err(Error::InvalidGraph(format!(
                "unary factor {} has the wrong length",
                i + 1
            )));
        }
        Ok(Self {
            field,
            n_orig,
            checks,
            unary,
        })
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn n_orig(&self) -> usize {
        self.n_orig
    }

    pub fn n_aux(&self) -> usize {
        self.checks.len()
    }

    /// Total number of variables, M.
    pub fn n_vars(&self) -> usize {
        self.n_orig + self.checks.len()
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn unary(&self) -> &[Pmf] {
        &self.unary
    }

    /// Variables touched by check `i` with their coefficients, auxiliary last.
    pub fn check_edges(&self, i: usize) -> Vec<(usize, usize)> {
        let row = &self.checks[i];
        let mut edges: Vec<(usize, usize)> = row[..self.n_orig]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c))
            .collect();
        edges.push((self.n_orig + i, row[self.n_orig]));
        edges
    }

    /// Unnormalized `r(x, u)`: product of unary factors times the parity
    /// indicators. `assignment` lists x₁…x_N then u₁…u_{M−N}.
    pub fn weight(&self, assignment: &[usize]) -> f64 {
        for i in 0..self.checks.len() {
            let s = self.check_edges(i).iter().fold(0, |acc, &(v, c)| {
                self.field
                    .add_raw(acc, self.field.mul_raw(c, assignment[v]))
            });
            if s != 0 {
                return 0.0;
            }
        }
        self.unary
            .iter()
            .zip(assignment)
            .map(|(q, &v)| q.values()[v])
            .product()
    }

    fn name(&self, v: usize) -> String {
        if v < self.n_orig {
            format!("x{}", v + 1)
        } else {
            format!("u{}", v - self.n_orig + 1)
        }
    }

    /// Inverse of [`export_graph`] with [`ExportFormat::Json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let field = Arc::new(GaloisField::from_spec(&doc.field)?);
        if doc.n_aux != doc.checks.len() {
            return Err(Error::InvalidGraph(format!(
                "n_aux = {} but {} checks listed",
                doc.n_aux,
                doc.checks.len()
            )));
        }
        Self::new(field, doc.n_orig, doc.checks, doc.unary)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    field: FieldSpec,
    n_orig: usize,
    n_aux: usize,
    checks: Vec<Vec<usize>>,
    unary: Vec<Pmf>,
}

/// Replaces every interaction of order ≥ 2 with a parity check on an
/// auxiliary variable. Requires the factors in projective-representative
/// order (unit vectors first).
pub fn lift_to_tanner(f: &Factorization) -> Result<TannerGraph> {
    if !f.is_canonical() {
        return Err(Error::NonCanonicalOrder(
            "expected one factor per projective representative, unit vectors first".into(),
        ));
    }
    let n = f.num_vars();
    let field = f.field().clone();
    let minus_one = field.minus_one();
    let checks = f.factors()[n..]
        .iter()
        .map(|factor| {
            let mut row = factor.a.coeffs().to_vec();
            row.push(minus_one);
            row
        })
        .collect();
    let unary = f.factors().iter().map(|factor| factor.q.clone()).collect();
    TannerGraph::new(field, n, checks, unary)
}

/// `H = [P −I]` ((M−N)×M) and `G = [I Pᵀ]` (N×M).
pub fn build_parity_matrices(g: &TannerGraph) -> (FieldMatrix, FieldMatrix) {
    let n = g.n_orig;
    let m = g.n_vars();
    let mut h = FieldMatrix::zeros(g.n_aux(), m);
    let mut gen = FieldMatrix::zeros(n, m);
    for j in 0..n {
        gen.set(j, j, 1);
    }
    for (i, row) in g.checks.iter().enumerate() {
        for (j, &c) in row[..n].iter().enumerate() {
            h.set(i, j, c);
            gen.set(j, n + i, c);
        }
        h.set(i, n + i, row[n]);
    }
    (h, gen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(Self::Dot),
            "json" => Ok(Self::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

pub fn export_graph(g: &TannerGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => to_sorted_json(&GraphDoc {
            field: g.field.spec().clone(),
            n_orig: g.n_orig,
            n_aux: g.n_aux(),
            checks: g.checks.clone(),
            unary: g.unary.clone(),
        }),
        ExportFormat::Dot => export_dot(g),
    }
}

fn export_dot(g: &TannerGraph) -> String {
    let mut out = String::from("graph tanner {\n");
    for (v, q) in g.unary.iter().enumerate() {
        let probs: Vec<String> = q.values().iter().map(|p| format!("{p:.6}")).collect();
        let name = g.name(v);
        let _ = writeln!(
            out,
            "  {name} [shape=circle, label=\"{name}\\n[{}]\"];",
            probs.join(", ")
        );
    }
    for i in 0..g.n_aux() {
        let _ = writeln!(out, "  c{} [shape=square, label=\"c{}\"];", i + 1, i + 1);
    }
    for i in 0..g.n_aux() {
        for (v, c) in g.check_edges(i) {
            let _ = writeln!(out, "  {} -- c{} [label=\"{c}\"];", g.name(v), i + 1);
        }
    }
    out.push_str("}\n");
    out
}
