//! Check-node message computation as a convolution over the additive group
//! of GF(p^m), which is (ℤ_p)^m under the digit encoding. The group Fourier
//! transform is a size-p DFT along each of the m digit axes; for p = 2 it is
//! the Walsh–Hadamard transform and stays real.

use num_complex::Complex64;

use super::MESSAGE_FLOOR;
use crate::error::{Error, Result};
use crate::galois::GaloisField;

/// Distribution of `Σᵢ coeffsᵢ·vᵢ` given independent `vᵢ ~ incomingᵢ`.
///
/// Each input is permuted by `c ↦ coeffᵢ⁻¹·c` and the permuted inputs are
/// convolved in the transform domain.
pub fn check_node_transform(
    incoming: &[&[f64]],
    coeffs: &[usize],
    field: &GaloisField,
) -> Result<Vec<f64>> {
    validate(incoming, coeffs, field)?;
    let order = field.order();
    let out = if field.characteristic() == 2 {
        let mut acc = vec![1.0; order];
        for (msg, &c) in incoming.iter().zip(coeffs) {
            let mut t = permute(msg, c, field);
            walsh_hadamard(&mut t);
            for (a, b) in acc.iter_mut().zip(&t) {
                *a *= b;
            }
        }
        walsh_hadamard(&mut acc);
        acc.iter().map(|v| v / order as f64).collect::<Vec<f64>>()
    } else {
        let p = field.characteristic() as usize;
        let mut acc = vec![Complex64::new(1.0, 0.0); order];
        for (msg, &c) in incoming.iter().zip(coeffs) {
            let mut t: Vec<Complex64> = permute(msg, c, field)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            group_dft(&mut t, p, false);
            for (a, b) in acc.iter_mut().zip(&t) {
                *a *= b;
            }
        }
        group_dft(&mut acc, p, true);
        acc.iter().map(|v| v.re).collect()
    };
    Ok(finish(out))
}

/// Reference implementation: repeated direct convolution through the field
/// addition table, O(k·|A|²).
pub fn check_node_naive(
    incoming: &[&[f64]],
    coeffs: &[usize],
    field: &GaloisField,
) -> Result<Vec<f64>> {
    validate(incoming, coeffs, field)?;
    let order = field.order();
    let mut acc = vec![0.0; order];
    acc[0] = 1.0;
    for (msg, &c) in incoming.iter().zip(coeffs) {
        let mut next = vec![0.0; order];
        for (s, &ps) in acc.iter().enumerate() {
            for (v, &pv) in msg.iter().enumerate() {
                let t = field.add(s, field.mul(c, v)?)?;
                next[t] += ps * pv;
            }
        }
        acc = next;
    }
    Ok(finish(acc))
}

fn validate(incoming: &[&[f64]], coeffs: &[usize], field: &GaloisField) -> Result<()> {
    if incoming.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            expected: incoming.len(),
            got: coeffs.len(),
        });
    }
    for (i, (msg, &c)) in incoming.iter().zip(coeffs).enumerate() {
        if c == 0 {
            return Err(Error::ZeroCoefficient(i));
        }
        field.neg(c)?;
        if msg.len() != field.order() {
            return Err(Error::LengthMismatch {
                expected: field.order(),
                got: msg.len(),
            });
        }
    }
    Ok(())
}

/// Distribution of `c·v` from that of `v`.
fn permute(msg: &[f64], c: usize, field: &GaloisField) -> Vec<f64> {
    let mut out = vec![0.0; msg.len()];
    for (v, &pv) in msg.iter().enumerate() {
        out[field.mul_raw(c, v)] = pv;
    }
    out
}

/// Clamps transform round-off, floors, and normalizes.
pub(crate) fn finish(mut v: Vec<f64>) -> Vec<f64> {
    for x in v.iter_mut() {
        *x = x.max(0.0) + MESSAGE_FLOOR;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn walsh_hadamard(data: &mut [f64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (data[i], data[i + h]);
                data[i] = a + b;
                data[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Size-p DFT along every base-p digit axis. The inverse includes the 1/|A|
/// scaling.
fn group_dft(data: &mut [Complex64], p: usize, inverse: bool) {
    let n = data.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let roots: Vec<Complex64> = (0..p)
        .map(|k| {
            Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * k as f64 / p as f64)
        })
        .collect();
    let mut line = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1;
    while stride < n {
        for base in 0..n {
            // visit each line once, from the element whose digit on this axis is 0
            if (base / stride) % p != 0 {
                continue;
            }
            for (k, out) in line.iter_mut().enumerate() {
                *out = (0..p)
                    .map(|j| data[base + j * stride] * roots[(j * k) % p])
                    .sum();
            }
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
        stride *= p;
    }
    if inverse {
        let s = 1.0 / n as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}
