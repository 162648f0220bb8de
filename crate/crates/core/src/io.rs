//! JSON documents for PMFs and factorizations.
//!
//! All writers go through [`to_sorted_json`], so object keys come out sorted
//! and floats in shortest round-trip form; output bytes depend only on the
//! values.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::Factorization;
use crate::galois::{FieldSpec, GaloisField};
use crate::pmfspace::{JointPmf, Pmf};
use crate::spci::SpciFactor;

/// Serializes with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // serde_json::Value keeps objects in a BTreeMap
    let v = serde_json::to_value(value).expect("serializable document");
    serde_json::to_string(&v).expect("serializable value")
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct PmfDoc {
    field: FieldSpec,
    num_vars: usize,
    probs: Vec<f64>,
}

/// A joint PMF as loaded from disk, with how far its probabilities were
/// from summing to one.
#[derive(Debug, Clone)]
pub struct LoadedPmf {
    pub pmf: JointPmf,
    /// `|Σ probs − 1|` before renormalization.
    pub correction: f64,
}

/// Parses `{"field": {...}, "num_vars": N, "probs": [...]}`, renormalizing
/// the probabilities. With `floor` set, entries below it are raised to it.
pub fn load_pmf(text: &str, floor: Option<f64>) -> Result<LoadedPmf> {
    let doc: PmfDoc = parse(text)?;
    let field = Arc::new(GaloisField::from_spec(&doc.field)?);
    let pmf = match floor {
        Some(eps) => Pmf::with_floor(doc.probs.clone(), eps)?,
        None => Pmf::from_normalized(doc.probs.clone())?,
    };
    let correction = (doc.probs.iter().sum::<f64>() - 1.0).abs();
    Ok(LoadedPmf {
        pmf: JointPmf::new(field, doc.num_vars, pmf)?,
        correction,
    })
}

pub fn pmf_to_json(p: &JointPmf) -> String {
    to_sorted_json(&PmfDoc {
        field: p.field().spec().clone(),
        num_vars: p.num_vars(),
        probs: p.values().to_vec(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct FactorizationDoc {
    field: FieldSpec,
    num_vars: usize,
    factors: Vec<SpciFactor>,
    #[serde(rename = "logZ")]
    log_z: f64,
}

pub fn factorization_to_json(f: &Factorization) -> String {
    to_sorted_json(&FactorizationDoc {
        field: f.field().spec().clone(),
        num_vars: f.num_vars(),
        factors: f.factors().to_vec(),
        log_z: f.log_z(),
    })
}

/// Coefficient vectors are re-canonicalized on load.
pub fn factorization_from_json(text: &str) -> Result<Factorization> {
    let doc: FactorizationDoc = parse(text)?;
    let field = Arc::new(GaloisField::from_spec(&doc.field)?);
    for f in &doc.factors {
        if !f.a.is_canonical() {
            return Err(Error::Malformed(format!(
                "coefficient vector {:?} is not in canonical form",
                f.a.coeffs()
            )));
        }
    }
    Factorization::from_parts(field, doc.num_vars, doc.factors, doc.log_z)
}

/// Rounds every non-integer number in `v` to `digits` significant digits.
pub fn round_significant(v: &mut serde_json::Value, digits: usize) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.prec$e}", prec = digits.saturating_sub(1))
                .parse()
                .unwrap_or(x);
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|i| round_significant(i, digits)),
        Value::Object(map) => map.values_mut().for_each(|i| round_significant(i, digits)),
        _ => {}
    }
}

/// `x` rounded to `digits` significant digits, in plain or scientific
/// notation, whichever is shorter to read.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}
