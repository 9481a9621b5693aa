//! Scalar domains.
//!
//! Two domains are supported: exact arbitrary-precision rationals, used for
//! every identity check, and double-precision complex numbers, used by the
//! orbit algorithms where square and cube roots are unavoidable. Exact values
//! compare exactly; complex values are only ever compared through a
//! [`TolerancePolicy`].

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

pub type Rational = BigRational;
pub type Complex = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Rational,
    Complex,
}

/// Zero-test thresholds for the complex domain.
///
/// A value `z` is treated as zero when `|z| <= abs_eps + rel_eps * scale`,
/// where `scale` is the magnitude of the operands that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TolerancePolicy {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            abs_eps: 1e-9,
            rel_eps: 1e-9,
        }
    }
}

impl TolerancePolicy {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Result<Self> {
        for (name, e) in [("abs", abs_eps), ("rel", rel_eps)] {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::Tolerance(format!(
                    "{name} epsilon must be finite and >= 0, got {e}"
                )));
            }
        }
        Ok(TolerancePolicy { abs_eps, rel_eps })
    }

    pub fn bound(&self, scale: f64) -> f64 {
        self.abs_eps + self.rel_eps * scale
    }

    /// Three-way zero test with a guard band: below `bound` is zero, above
    /// `10 * bound` is nonzero, anything in between is ambiguous.
    pub fn classify(&self, magnitude: f64, scale: f64) -> ZeroTest {
        let b = self.bound(scale);
        if magnitude <= b {
            ZeroTest::Zero
        } else if magnitude > 10.0 * b {
            ZeroTest::NonZero
        } else {
            ZeroTest::Ambiguous
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    NonZero,
    Ambiguous,
}

/// Outcome of a rank computation. `ambiguous` is set when some pivot fell
/// inside the tolerance guard band (never for exact scalars).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOutcome {
    pub rank: usize,
    pub ambiguous: bool,
}

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const DOMAIN: Domain;

    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Absolute value as an `f64` (used for scales and reporting).
    fn magnitude(&self) -> f64;

    /// Exact zero for rationals; tolerance test for complex values.
    fn is_zero_within(&self, tol: &TolerancePolicy, scale: f64) -> bool;

    fn approx_eq(&self, other: &Self, tol: &TolerancePolicy) -> bool {
        let scale = self.magnitude().max(other.magnitude());
        (self.clone() - other.clone()).is_zero_within(tol, scale)
    }

    fn to_complex(&self) -> Complex;

    fn rank_of(m: &Matrix<Self>, tol: &TolerancePolicy) -> RankOutcome;
    fn det_of(m: &Matrix<Self>) -> Self;

    fn encode(&self) -> Value;
    fn decode(v: &Value) -> Result<Self>;
}

impl Scalar for Rational {
    const DOMAIN: Domain = Domain::Rational;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn is_zero_within(&self, _tol: &TolerancePolicy, _scale: f64) -> bool {
        self.is_zero()
    }

    fn to_complex(&self) -> Complex {
        Complex::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn rank_of(m: &Matrix<Self>, _tol: &TolerancePolicy) -> RankOutcome {
        RankOutcome {
            rank: matrix::fraction_free_echelon(m).rank,
            ambiguous: false,
        }
    }

    fn det_of(m: &Matrix<Self>) -> Self {
        matrix::fraction_free_echelon(m).det
    }

    fn encode(&self) -> Value {
        if self.is_integer() {
            Value::String(self.numer().to_string())
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn decode(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(Rational::from_i64).ok_or_else(|| {
                Error::Json(format!(
                    "rational must be an integer or \"p/q\" string, got {n}"
                ))
            }),
            other => Err(Error::Json(format!(
                "expected rational scalar, got {other}"
            ))),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Json(format!("malformed rational {s:?}"));
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

impl Scalar for Complex {
    const DOMAIN: Domain = Domain::Complex;

    fn from_i64(v: i64) -> Self {
        Complex::new(v as f64, 0.0)
    }

    fn from_rational(q: &Rational) -> Self {
        q.to_complex()
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_zero_within(&self, tol: &TolerancePolicy, scale: f64) -> bool {
        self.norm() <= tol.bound(scale)
    }

    fn to_complex(&self) -> Complex {
        *self
    }

    fn rank_of(m: &Matrix<Self>, tol: &TolerancePolicy) -> RankOutcome {
        matrix::pivoted_rank(m, tol)
    }

    fn det_of(m: &Matrix<Self>) -> Self {
        matrix::pivoted_det(m)
    }

    fn encode(&self) -> Value {
        serde_json::json!([self.re, self.im])
    }

    fn decode(v: &Value) -> Result<Self> {
        match v {
            Value::Array(parts) if parts.len() == 2 => {
                let re = parts[0].as_f64();
                let im = parts[1].as_f64();
                match (re, im) {
                    (Some(re), Some(im)) => Ok(Complex::new(re, im)),
                    _ => Err(Error::Json(format!(
                        "complex parts must be numbers, got {v}"
                    ))),
                }
            }
            Value::Number(n) => Ok(Complex::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::String(s) => Ok(parse_rational(s)?.to_complex()),
            other => Err(Error::Json(format!(
                "expected complex scalar [re, im], got {other}"
            ))),
        }
    }
}

/// Complex square root with an explicit branch: `0` is the principal root,
/// `1` its negative.
pub fn sqrt_branch(z: Complex, branch: usize) -> Complex {
    let r = z.sqrt();
    if branch.is_multiple_of(2) {
        r
    } else {
        -r
    }
}

/// The `branch`-th complex cube root (`0` is principal).
pub fn cbrt_branch(z: Complex, branch: usize) -> Complex {
    if z == Complex::zero() {
        return z;
    }
    let (r, theta) = z.to_polar();
    let k = (branch % 3) as f64;
    Complex::from_polar(r.cbrt(), (theta + 2.0 * std::f64::consts::PI * k) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_normalize() {
        let q = parse_rational("6/-4").unwrap();
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(q.encode(), Value::String("-3/2".into()));
        assert_eq!(Rational::from_i64(5).encode(), Value::String("5".into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn complex_zero_test_uses_policy() {
        let tol = TolerancePolicy::default();
        assert!(Complex::new(1e-10, 0.0).is_zero_within(&tol, 0.0));
        assert!(!Complex::new(1e-6, 0.0).is_zero_within(&tol, 0.0));
        assert!(Complex::new(1e-6, 0.0).is_zero_within(&tol, 1e4));
        assert_eq!(tol.classify(1e-9, 0.0), ZeroTest::Zero);
        assert_eq!(tol.classify(5e-9, 0.0), ZeroTest::Ambiguous);
        assert_eq!(tol.classify(1e-7, 0.0), ZeroTest::NonZero);
    }

    #[test]
    fn tolerance_rejects_negative() {
        assert!(TolerancePolicy::new(-1.0, 0.0).is_err());
        assert!(TolerancePolicy::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn roots_by_branch() {
        let z = Complex::new(-8.0, 0.0);
        for b in 0..3 {
            let c = cbrt_branch(z, b);
            assert!((c * c * c - z).norm() < 1e-12);
        }
        assert!((cbrt_branch(Complex::new(6.0, 0.0), 0).re - 6f64.cbrt()).abs() < 1e-15);
        let s = sqrt_branch(Complex::new(-4.0, 0.0), 1);
        assert!((s * s + Complex::new(4.0, 0.0)).norm() < 1e-12);
    }
}
