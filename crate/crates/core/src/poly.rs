//! Single-variable integer polynomials and exact integer-root isolation.
//!
//! Every real root of `a_0 + a_1 x + ... + a_n x^n` lies in `[-B, B]` with
//! `B = 1 + ceil(max_{i<n} |a_i| / |a_n|)`, so testing every integer in that
//! interval finds all integer roots.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest root bound that [`isolate_integer_roots`] will scan.
pub const SCAN_LIMIT: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polynomial {
    /// `coeffs[i]` multiplies `x^i`; no trailing zeros.
    coeffs: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has every integer as a root")]
    ZeroPolynomial,
    #[error("root bound {0} is too large to scan")]
    BoundTooLarge(BigInt),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Evaluation in machine words, `None` on overflow.
    fn eval_i128(coeffs: &[i128], x: i128) -> Option<i128> {
        coeffs.iter().rev().try_fold(0i128, |acc, &c| acc.checked_mul(x)?.checked_add(c))
    }

    /// `1 + ceil(max_{i<n} |a_i| / |a_n|)`.
    pub fn cauchy_bound(&self) -> Option<BigInt> {
        let (lead, rest) = self.coeffs.split_last()?;
        let lead = lead.abs();
        let max = rest.iter().map(Signed::abs).max().unwrap_or_else(BigInt::zero);
        Some(BigInt::one() + max.div_ceil(&lead))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        Polynomial::new(
            (0..n).map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)).collect(),
        )
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Parses sums of terms like `3x^2 - x + 7` (variable `x`).
    pub fn parse(text: &str) -> Result<Polynomial, PolyError> {
        let err = || PolyError::Parse(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let mut acc = Polynomial::zero();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            } else if i != 0 {
                return Err(err());
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let term = &s[start..i];
            if term.is_empty() {
                return Err(err());
            }
            let (coef, power) = match term.find('x') {
                None => (term.parse::<BigInt>().map_err(|_| err())?, 0usize),
                Some(p) => {
                    let c = match term[..p].trim_end_matches('*') {
                        "" => BigInt::one(),
                        c => c.parse::<BigInt>().map_err(|_| err())?,
                    };
                    let rest = &term[p + 1..];
                    let e = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(err)?.parse::<usize>().map_err(|_| err())?
                    };
                    (c, e)
                }
            };
            let mut cs = vec![BigInt::zero(); power + 1];
            cs[power] = sign * coef;
            acc = acc.add(&Polynomial::new(cs));
        }
        Ok(acc)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let show_coef = i == 0 || !mag.is_one();
            if show_coef {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerRoots {
    /// Sorted ascending.
    pub roots: Vec<BigInt>,
    /// Every real root lies in `[-bound, bound]`.
    pub bound: BigInt,
}

/// Returns exactly the integer roots of `p`, with the bound that makes the
/// scan complete.
pub fn isolate_integer_roots(p: &Polynomial) -> Result<IntegerRoots, PolyError> {
    let bound = p.cauchy_bound().ok_or(PolyError::ZeroPolynomial)?;
    let b = bound.to_u64().filter(|&b| b <= SCAN_LIMIT).ok_or_else(|| PolyError::BoundTooLarge(bound.clone()))? as i64;

    let small: Option<Vec<i128>> = p.coeffs.iter().map(|c| c.to_i128()).collect();
    let mut roots = Vec::new();
    for x in -b..=b {
        let is_root = match small.as_deref().and_then(|cs| Polynomial::eval_i128(cs, x as i128)) {
            Some(v) => v == 0,
            None => p.eval(&BigInt::from(x)).is_zero(),
        };
        if is_root {
            roots.push(BigInt::from(x));
        }
    }
    Ok(IntegerRoots { roots, bound })
}

/// Evidence that `μx[p(x) = 0 ∧ x > lower]` searches forever: the complete
/// integer root set of `p`, none of which is a natural above `lower`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCertificate {
    pub polynomial: Polynomial,
    /// Exclusive lower limit on the searched variable; `-1` admits every natural.
    pub lower: BigInt,
    pub bound: BigInt,
    pub roots: Vec<BigInt>,
}

impl RootCertificate {
    /// Re-checks the certificate from scratch: the bound is a valid root
    /// bound, the root list is exactly the integer zeros inside it, and no
    /// root is admissible for the search.
    pub fn verify(&self) -> bool {
        let Some(expected) = self.polynomial.cauchy_bound() else {
            return false;
        };
        if self.bound < expected {
            return false;
        }
        let Some(b) = self.bound.to_i64().filter(|b| *b as u64 <= SCAN_LIMIT) else {
            return false;
        };
        let found: Vec<BigInt> = (-b..=b).map(BigInt::from).filter(|x| self.polynomial.eval(x).is_zero()).collect();
        found == self.roots && !found.iter().any(|r| !r.is_negative() && r > &self.lower)
    }
}

/// Tries to show that no natural `x > lower` is a root of `body`.
/// Returns `None` when such a root exists (the search will find it) or when
/// the polynomial is out of scanning range.
pub fn prove_empty_search(body: &Polynomial, lower: &BigInt) -> Option<RootCertificate> {
    let IntegerRoots { roots, bound } = isolate_integer_roots(body).ok()?;
    if roots.iter().any(|r| !r.is_negative() && r > lower) {
        return None;
    }
    Some(RootCertificate { polynomial: body.clone(), lower: lower.clone(), bound, roots })
}
