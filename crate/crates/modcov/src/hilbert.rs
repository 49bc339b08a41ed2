//! Truncated Hilbert-series arithmetic.
//!
//! A graded module over an algebra generated by a homogeneous system of
//! parameters with degrees d_i has H(M,t) = f(t) / Π(1−t^{d_i}) for a
//! polynomial f.  Evaluating f at 1 gives the rank of the module, the
//! derivative at 1 gives the s-invariant (the degree sum of any free
//! generating set).  Coefficients are dimensions, held as arbitrary-precision
//! integers; nothing here is reduced mod p and nothing is floating point.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error("hsop degrees must be positive")]
    ZeroDegree,
    #[error(
        "truncation bound {bound} too small: need at least expected_top + max degree = {need}"
    )]
    BoundTooSmall { bound: usize, need: usize },
    #[error(
        "series is not polynomial up to the bound: nonzero numerator coefficients at degrees {0:?}"
    )]
    NonPolynomialTail(Vec<usize>),
    #[error("denominator numerator evaluates to zero at t = 1")]
    ZeroDenominator,
    #[error(
        "rank/s computation did not produce nonnegative integers (r = {r}, s·g(1)² = {s_num})"
    )]
    NotIntegral { r: String, s_num: String },
}

/// Coefficients of a Hilbert series up to a truncation bound (index = degree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigUint>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigUint>) -> Self {
        TruncatedSeries { coeffs }
    }

    pub fn from_dims(dims: &[usize]) -> Self {
        TruncatedSeries {
            coeffs: dims.iter().map(|&d| BigUint::from(d)).collect(),
        }
    }

    /// Truncation bound D (series is known up to and including degree D).
    pub fn bound(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, d: usize) -> BigUint {
        self.coeffs.get(d).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }
}

/// The numerator f(t) of H(M,t) = f(t)/Π(1−t^{d_i}), with the hsop degrees
/// of the denominator it was extracted against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertNumerator {
    coeffs: Vec<BigInt>,
    hsop_degrees: Vec<u32>,
}

impl HilbertNumerator {
    pub fn new(coeffs: Vec<BigInt>, hsop_degrees: Vec<u32>) -> Self {
        let mut n = HilbertNumerator {
            coeffs,
            hsop_degrees,
        };
        while n.coeffs.last().is_some_and(Zero::is_zero) {
            n.coeffs.pop();
        }
        n
    }

    /// The constant polynomial 1 (numerator of the algebra over itself).
    pub fn one() -> Self {
        HilbertNumerator {
            coeffs: vec![BigInt::one()],
            hsop_degrees: Vec::new(),
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn hsop_degrees(&self) -> &[u32] {
        &self.hsop_degrees
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// f(1).
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// f'(1) = Σ i·coeffs[i], computed exactly.
    pub fn derivative_at_one(&self) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| BigInt::from(i) * c)
            .sum()
    }

    /// Rendered as `1 + t + t^2 + ...` (negative coefficients, which signal
    /// inconsistent inputs, render with explicit signs).
    pub fn display(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t_part = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            let body = if t_part.is_empty() {
                c.to_string()
            } else if c.is_one() {
                t_part
            } else if (-c).is_one() {
                format!("-{t_part}")
            } else {
                format!("{c}*{t_part}")
            };
            parts.push(body);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Rank and s-invariant pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankS {
    pub r: u64,
    pub s: u64,
}

/// Coefficients of Π 1/(1−t^{d_i}) up to the bound: the number of multisets
/// of the degrees d_i summing to each total.
pub fn hsop_series(degrees: &[u32], bound: usize) -> Result<TruncatedSeries, HilbertError> {
    if degrees.contains(&0) {
        return Err(HilbertError::ZeroDegree);
    }
    let mut coeffs = vec![BigUint::zero(); bound + 1];
    coeffs[0] = BigUint::one();
    for &d in degrees {
        for j in d as usize..=bound {
            let add = coeffs[j - d as usize].clone();
            coeffs[j] += add;
        }
    }
    Ok(TruncatedSeries { coeffs })
}

/// Multiplies a truncated series by Π(1−t^{d_i}) and checks that every
/// coefficient strictly above `expected_top` (up to the series bound) is
/// zero, which witnesses polynomiality of the quotient inside the window.
pub fn numerator(
    mod_series: &TruncatedSeries,
    degrees: &[u32],
    expected_top: usize,
) -> Result<HilbertNumerator, HilbertError> {
    if degrees.contains(&0) {
        return Err(HilbertError::ZeroDegree);
    }
    let bound = mod_series.bound();
    let max_deg = degrees.iter().max().copied().unwrap_or(0) as usize;
    if bound < expected_top + max_deg {
        return Err(HilbertError::BoundTooSmall {
            bound,
            need: expected_top + max_deg,
        });
    }
    let mut coeffs: Vec<BigInt> = mod_series
        .coeffs()
        .iter()
        .map(|c| BigInt::from(c.clone()))
        .collect();
    for &d in degrees {
        // Multiply by (1 - t^d) in place, highest degree first.
        for j in (d as usize..=bound).rev() {
            let sub = coeffs[j - d as usize].clone();
            coeffs[j] -= sub;
        }
    }
    let offending: Vec<usize> = (expected_top + 1..=bound)
        .filter(|&j| !coeffs[j].is_zero())
        .collect();
    if !offending.is_empty() {
        return Err(HilbertError::NonPolynomialTail(offending));
    }
    coeffs.truncate(expected_top + 1);
    Ok(HilbertNumerator::new(coeffs, degrees.to_vec()))
}

/// Rank and s-invariant of the quotient expansion about t = 1.
///
/// With no `g`, returns (f(1), f'(1)).  With `g`, computes the expansion of
/// f/g: r = f(1)/g(1) and s = (f'(1)g(1) − f(1)g'(1))/g(1)²; `g` is the
/// numerator of an intermediate algebra when working over a non-polynomial
/// base.  Both must come out as nonnegative integers.
pub fn rank_s(f: &HilbertNumerator, g: Option<&HilbertNumerator>) -> Result<RankS, HilbertError> {
    let one = HilbertNumerator::one();
    let g = g.unwrap_or(&one);
    let g1 = g.eval_at_one();
    if g1.is_zero() {
        return Err(HilbertError::ZeroDenominator);
    }
    let f1 = f.eval_at_one();
    let fd = f.derivative_at_one();
    let gd = g.derivative_at_one();
    let r_num = f1.clone();
    let s_num = fd * &g1 - &f1 * gd;
    let g1_sq = &g1 * &g1;
    let not_integral = || HilbertError::NotIntegral {
        r: r_num.to_string(),
        s_num: s_num.to_string(),
    };
    if (&r_num % &g1) != BigInt::zero() || (&s_num % &g1_sq) != BigInt::zero() {
        return Err(not_integral());
    }
    let r = &r_num / &g1;
    let s = &s_num / &g1_sq;
    if r.is_negative() || s.is_negative() {
        return Err(not_integral());
    }
    let to_u64 = |v: BigInt| u64::try_from(v).map_err(|_| not_integral());
    Ok(RankS {
        r: to_u64(r)?,
        s: to_u64(s)?,
    })
}

/// All six rank/s numbers for a module M and intermediate algebra A over a
/// polynomial base B, with the two change-of-base identities
/// (a) r(M,B) = r(M,A)·r(A,B) and (b) s(M,B) = r(M,A)·s(A,B) + r(A,B)·s(M,A).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SsubalgReport {
    pub r_m_b: u64,
    pub s_m_b: u64,
    pub r_a_b: u64,
    pub s_a_b: u64,
    pub r_m_a: u64,
    pub s_m_a: u64,
    pub identity_a: bool,
    pub identity_b: bool,
}

impl SsubalgReport {
    pub fn ok(&self) -> bool {
        self.identity_a && self.identity_b
    }
}

/// Checks the change-of-base identities given the numerator `f_m` of M over
/// B and the numerator `g_a` of A over B.
pub fn verify_ssubalg(
    f_m: &HilbertNumerator,
    g_a: &HilbertNumerator,
) -> Result<SsubalgReport, HilbertError> {
    let direct_m = rank_s(f_m, None)?;
    let direct_a = rank_s(g_a, None)?;
    let relative = rank_s(f_m, Some(g_a))?;
    Ok(SsubalgReport {
        r_m_b: direct_m.r,
        s_m_b: direct_m.s,
        r_a_b: direct_a.r,
        s_a_b: direct_a.s,
        r_m_a: relative.r,
        s_m_a: relative.s,
        identity_a: direct_m.r == relative.r * direct_a.r,
        identity_b: direct_m.s == relative.r * direct_a.s + direct_a.r * relative.s,
    })
}
