use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{LabError, Result};

/// `A_1, ..., A_n` with `A_1 = 1` and `A_n = sum_{k=1}^{n-1} A_k A_{n-k}`.
pub fn catalan_sequence(n: usize) -> Vec<BigUint> {
    let mut a: Vec<BigUint> = Vec::with_capacity(n);
    for m in 1..=n {
        if m == 1 {
            a.push(BigUint::one());
            continue;
        }
        let mut s = BigUint::zero();
        for k in 1..m {
            s += &a[k - 1] * &a[m - k - 1];
        }
        a.push(s);
    }
    a
}

/// `A_n` for `n >= 1`.
pub fn catalan(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(LabError::Param("Catalan index starts at 1".into()));
    }
    Ok(catalan_sequence(n).pop().expect("n >= 1"))
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(1 - sqrt(1 - 4z)) / 2` for real `|z| <= 1/4`.
pub fn generating_function(z: f64) -> Result<f64> {
    if !(z.abs() <= 0.25) {
        return Err(LabError::Param(format!(
            "generating function needs |z| <= 1/4, got {z}"
        )));
    }
    Ok(0.5 * (1.0 - (1.0 - 4.0 * z).max(0.0).sqrt()))
}

/// Partial sums `S_m = sum_{n=1}^m A_n z^n` for `m = 1..=terms`.
///
/// The terms `a_n = A_n z^n` obey the same convolution recursion with
/// `a_1 = z`, which keeps them in floating range for any `|z| <= 1/4`
/// without forming `A_n` itself.
pub fn catalan_partial_sums(z: f64, terms: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(terms);
    let mut sums = Vec::with_capacity(terms);
    let mut s = 0.0;
    for m in 1..=terms {
        let v = if m == 1 {
            z
        } else {
            // sum_{k=1}^{m-1} a_k a_{m-k}, folded over the symmetric half.
            let half = (m - 1) / 2;
            let mut acc = 0.0;
            for k in 1..=half {
                acc += a[k - 1] * a[m - k - 1];
            }
            acc *= 2.0;
            if (m - 1) % 2 == 1 {
                let c = a[m / 2 - 1];
                acc += c * c;
            }
            acc
        };
        a.push(v);
        s += v;
        sums.push(s);
    }
    sums
}

/// `sum_{n=1}^{terms} A_n z^n`.
pub fn catalan_series(z: f64, terms: usize) -> f64 {
    catalan_partial_sums(z, terms).last().copied().unwrap_or(0.0)
}
