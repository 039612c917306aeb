//! Polylogarithm of non-positive order, `Li_{-γ}(z) = Σ_{l≥1} l^γ z^l` on `[0, 1)`.
//!
//! Two evaluation routes are used. Below `SERIES_LIMIT` the defining series
//! converges at least as fast as `2^-l` and is summed directly. Closer to 1
//! the series needs `O(1/(1-z))` terms, so the expansion in `μ = -ln z`
//!
//! ```text
//! Li_s(z) = Γ(1-s) μ^(s-1) + Σ_{k≥0} ζ(s-k) (-μ)^k / k!      (|μ| < 2π, s ∉ {1, 2, ...})
//! ```
//!
//! is used instead; its terms shrink like `(μ/2π)^k`.

use alloc::format;
use core::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 0.5;
const REL_TOL: f64 = 1e-17;

/// `Li_{-gamma}(z)` for `gamma ≥ 0` and `0 ≤ z < 1`.
pub fn polylog_negative_order(gamma: f64, z: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::Domain(format!("polylog order -{gamma} must be a finite non-positive number")));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!("polylog argument {z} outside [0, 1)")));
    }
    polylog_negative_order_log(gamma, z, -libm::log(z))
}

/// As [`polylog_negative_order`] with `μ = -ln z` supplied by the caller,
/// which keeps precision when `z` is within a few ulps of 1.
pub(crate) fn polylog_negative_order_log(gamma: f64, z: f64, mu: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::Domain(format!("polylog order -{gamma} must be a finite non-positive number")));
    }
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::Domain(format!("polylog argument {z} outside [0, 1)")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z < SERIES_LIMIT {
        Ok(series(gamma, z))
    } else {
        Ok(log_expansion(gamma, mu))
    }
}

/// Direct summation, stopped once a geometric bound on the remaining tail
/// falls below `REL_TOL` times the partial sum.
pub(crate) fn series(gamma: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zl = 1.0;
    let mut l = 1.0f64;
    loop {
        zl *= z;
        let term = libm::pow(l, gamma) * zl;
        sum += term;
        // successive term ratios decrease towards z
        let ratio = z * libm::pow((l + 1.0) / l, gamma);
        if ratio < 1.0 && term * ratio / (1.0 - ratio) <= REL_TOL * sum {
            return sum;
        }
        if zl == 0.0 {
            return sum;
        }
        l += 1.0;
    }
}

fn log_expansion(gamma: f64, mu: f64) -> f64 {
    let s = -gamma;
    let mut sum = libm::tgamma(1.0 + gamma) * libm::pow(mu, s - 1.0);
    let mut power = 1.0; // (-μ)^k / k!
    let mut k = 0u32;
    let mut previous = f64::INFINITY;
    loop {
        let t = s - f64::from(k);
        let term = zeta_nonpositive(t) * power;
        sum += term;
        // every other ζ(s - k) vanishes for integer s, so look at two terms
        if k > 2 && term.abs().max(previous) <= REL_TOL * sum.abs() {
            return sum;
        }
        previous = term.abs();
        k += 1;
        power *= -mu / f64::from(k);
        if k > 150 {
            return sum;
        }
    }
}

/// `sin(π t / 2)` with exact zeros at even integers.
fn sin_half_pi(t: f64) -> f64 {
    let r = t - 4.0 * libm::floor(t / 4.0);
    if r == 0.0 || r == 2.0 {
        0.0
    } else if r == 1.0 {
        1.0
    } else if r == 3.0 {
        -1.0
    } else {
        libm::sin(PI * r / 2.0)
    }
}

/// Riemann zeta at `t ≤ 0` through the reflection formula.
fn zeta_nonpositive(t: f64) -> f64 {
    if t == 0.0 {
        return -0.5;
    }
    let sine = sin_half_pi(t);
    if sine == 0.0 {
        return 0.0;
    }
    libm::pow(2.0, t) * libm::pow(PI, t - 1.0) * sine * libm::tgamma(1.0 - t) * zeta_above_one(1.0 - t)
}

// B_2, B_4, ..., B_18
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

/// Riemann zeta for real `sigma > 1` by Euler–Maclaurin summation.
pub(crate) fn zeta_above_one(sigma: f64) -> f64 {
    const N: f64 = 12.0;
    let mut sum = 0.0;
    for n in (1..12).rev() {
        sum += libm::pow(f64::from(n), -sigma);
    }
    let n_pow = libm::pow(N, -sigma);
    sum += N * n_pow / (sigma - 1.0) + 0.5 * n_pow;
    // B_2j / (2j)! · σ(σ+1)…(σ+2j-2) · N^(-σ-2j+1)
    let mut rising = sigma;
    let mut factorial = 2.0;
    let mut n_term = n_pow / N;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / factorial * rising * n_term;
        sum += term;
        if term.abs() < 1e-18 * sum {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (sigma + m - 1.0) * (sigma + m);
        factorial *= (m + 1.0) * (m + 2.0);
        n_term /= N * N;
    }
    sum
}
