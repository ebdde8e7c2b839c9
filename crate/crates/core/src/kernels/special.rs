//! Harmonic dimensions and normalized Gegenbauer polynomials.

use crate::error::{contract, GpError, Result};

fn binomial(m: u64, j: u64) -> Option<u128> {
    if m < j {
        return Some(0);
    }
    let j = j.min(m - j);
    let mut acc: u128 = 1;
    for i in 0..j {
        acc = acc.checked_mul(u128::from(m - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Dimension of the space of degree-`k` spherical harmonics on `S^{d-1}` (points in `R^d`).
///
/// `h(0) = 1` and `h(k) = C(k+d-1, d-1) - C(k+d-3, d-1)` for `k ≥ 1`.
pub fn harmonic_dimension(d: usize, k: usize) -> Result<u64> {
    if d < 3 {
        return Err(contract(format!("harmonic dimension needs d >= 3, got {d}")));
    }
    if k == 0 {
        return Ok(1);
    }
    let (d, k) = (d as u64, k as u64);
    let overflow = || contract(format!("harmonic dimension overflows for d={d}, k={k}"));
    let upper = binomial(k + d - 1, d - 1).ok_or_else(overflow)?;
    let lower = binomial(k + d - 3, d - 1).ok_or_else(overflow)?;
    u64::try_from(upper - lower).map_err(|_| overflow())
}

pub(crate) fn harmonic_dimension_f64(d: usize, k: usize) -> f64 {
    // Product form, exact for the moderate sizes used in sums; avoids u128 overflow for large k.
    if k == 0 {
        return 1.0;
    }
    let lambda2 = (d - 2) as f64;
    let kf = k as f64;
    // h(k) = (2k + d - 2)/(d - 2) * C(k + d - 3, d - 3)
    let mut c = 1.0;
    for i in 1..=(d - 3) {
        c *= (kf + i as f64) / i as f64;
    }
    (2.0 * kf + lambda2) / lambda2 * c
}

/// Normalized Gegenbauer polynomial `G_k(x) = C_k^λ(x) / C_k^λ(1)` with `λ = (d-2)/2`.
///
/// For `d = 3` this is the Legendre polynomial `P_k`. `G_k(1) = 1` exactly.
pub fn gegenbauer_normalized(k: usize, d: usize, x: f64) -> Result<f64> {
    let x = check_argument(d, x)?;
    let mut out = 0.0;
    gegenbauer_for_each(k, d, x, |j, g| {
        if j == k {
            out = g;
        }
    });
    Ok(out)
}

/// Values `G_0(x), …, G_k(x)`.
pub fn gegenbauer_sequence(k: usize, d: usize, x: f64) -> Result<Vec<f64>> {
    let x = check_argument(d, x)?;
    let mut out = Vec::with_capacity(k + 1);
    gegenbauer_for_each(k, d, x, |_, g| out.push(g));
    Ok(out)
}

fn check_argument(d: usize, x: f64) -> Result<f64> {
    if d < 3 {
        return Err(contract(format!("Gegenbauer evaluation needs d >= 3, got {d}")));
    }
    if !(x.abs() <= 1.0 + 1e-12) {
        return Err(GpError::Domain(format!("Gegenbauer argument {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Runs the normalized three-term recurrence
/// `G_{n+1} = (2(n+λ) x G_n − n G_{n−1}) / (n + 2λ)` and hands each value to `f`.
/// `x` must already lie in `[-1, 1]`.
pub(crate) fn gegenbauer_for_each(k: usize, d: usize, x: f64, mut f: impl FnMut(usize, f64)) {
    if x == 1.0 {
        for j in 0..=k {
            f(j, 1.0);
        }
        return;
    }
    let lambda = (d as f64 - 2.0) / 2.0;
    let mut prev = 1.0;
    f(0, prev);
    if k == 0 {
        return;
    }
    let mut cur = x;
    f(1, cur);
    for n in 1..k {
        let nf = n as f64;
        let next = (2.0 * (nf + lambda) * x * cur - nf * prev) / (nf + 2.0 * lambda);
        prev = cur;
        cur = next;
        f(n + 1, cur);
    }
}
