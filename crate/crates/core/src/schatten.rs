//! Schatten p-norms and ℓ_p norms for `p ∈ (0, ∞]`.
//!
//! For `p < 1` these are quasi-norms; the API still calls them norms.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{singular_values, ComplexMatrix};

/// Singular values below this fraction of the largest are treated as exact zeros.
pub const ZERO_SV_RATIO: f64 = 1e-14;

/// Exponent of an ℓ_p or Schatten norm: a finite `p > 0` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(PExponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(format!(
                "{p} is not a finite positive exponent"
            )))
        }
    }

    /// Like [`PExponent::finite`] but maps `f64::INFINITY` to the infinite exponent.
    pub fn from_f64(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(PExponent::Infinity)
        } else {
            Self::finite(p)
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PExponent::Infinity)
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            PExponent::Finite(p) => Some(p),
            PExponent::Infinity => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.as_finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(PExponent::Infinity);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::InvalidExponent(format!("cannot parse {s:?}")))?;
        PExponent::finite(p)
    }
}

/// `(Σ a_k^p)^{1/p}` over non-negative magnitudes, or the maximum for `p = ∞`.
///
/// Values below `ZERO_SV_RATIO·max` are dropped when `zero_small` is set.
fn magnitude_norm(mags: &[f64], p: PExponent, zero_small: bool) -> f64 {
    let top = mags.iter().copied().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    match p {
        PExponent::Infinity => top,
        PExponent::Finite(p) => {
            let cutoff = if zero_small { ZERO_SV_RATIO * top } else { 0.0 };
            let sum: f64 = mags
                .iter()
                .filter(|&&m| m > cutoff)
                .map(|&m| (m / top).powf(p))
                .sum();
            top * sum.powf(1.0 / p)
        }
    }
}

fn magnitude_pow_sum(mags: &[f64], p: f64, zero_small: bool) -> f64 {
    let top = mags.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = if zero_small { ZERO_SV_RATIO * top } else { 0.0 };
    mags.iter()
        .filter(|&&m| m > cutoff)
        .map(|&m| m.powf(p))
        .sum()
}

/// Schatten norm `(Σ s_k^p)^{1/p}`; the operator norm for `p = ∞`.
pub fn schatten_norm(t: &ComplexMatrix, p: PExponent) -> f64 {
    magnitude_norm(&singular_values(t), p, true)
}

/// `‖T‖_p^p = Σ s_k^p` for finite `p`, summed directly.
pub fn schatten_norm_pow(t: &ComplexMatrix, p: f64) -> f64 {
    magnitude_pow_sum(&singular_values(t), p, true)
}

/// ℓ_p norm of a complex vector.
pub fn vector_pnorm(v: &[Complex64], p: PExponent) -> f64 {
    let mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    magnitude_norm(&mags, p, false)
}

/// ℓ_p norm of a real vector.
pub fn vector_pnorm_real(v: &[f64], p: PExponent) -> f64 {
    let mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    magnitude_norm(&mags, p, false)
}

/// `Σ |λ|^p` over real values.
pub fn abs_pow_sum(values: &[f64], p: f64) -> f64 {
    values.iter().map(|x| x.abs().powf(p)).sum()
}
