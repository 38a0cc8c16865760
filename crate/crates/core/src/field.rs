//! Exact scalars: arbitrary-precision rationals and residues modulo a prime.
//!
//! A [`Scalar`] carries its own field tag so that mixing fields can be
//! detected. Arithmetic operators on `&Scalar` panic on mixed fields; the
//! `checked_*` methods report [`Error::FieldMismatch`] instead. Matrices check
//! their field once at construction, so the operators are what the linear
//! algebra code uses.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 32;

/// The ground field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "field", try_from = "RawDescriptor", into = "RawDescriptor")]
pub enum FieldDescriptor {
    /// The rationals.
    Rational,
    /// The prime field with `p` elements, `p < 2^32`.
    Prime(u64),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "field")]
enum RawDescriptor {
    Q,
    Fp { p: u64 },
}

impl TryFrom<RawDescriptor> for FieldDescriptor {
    type Error = Error;

    fn try_from(raw: RawDescriptor) -> Result<Self> {
        match raw {
            RawDescriptor::Q => Ok(FieldDescriptor::Rational),
            RawDescriptor::Fp { p } => FieldDescriptor::prime(p),
        }
    }
}

impl From<FieldDescriptor> for RawDescriptor {
    fn from(d: FieldDescriptor) -> Self {
        match d {
            FieldDescriptor::Rational => RawDescriptor::Q,
            FieldDescriptor::Prime(p) => RawDescriptor::Fp { p },
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "Q"),
            FieldDescriptor::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

/// Trial division; moduli are bounded by 2^32 so this is at most 2^16 steps.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldDescriptor {
    /// The prime field of order `p`, rejecting composite or oversized moduli.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS || !is_prime(p) {
            return Err(Error::NonPrimeModulus(p));
        }
        Ok(FieldDescriptor::Prime(p))
    }

    /// Re-checks a descriptor that may have been built directly from the enum.
    pub fn validate(self) -> Result<Self> {
        match self {
            FieldDescriptor::Rational => Ok(self),
            FieldDescriptor::Prime(p) => FieldDescriptor::prime(p),
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(self) -> Option<u64> {
        match self {
            FieldDescriptor::Rational => None,
            FieldDescriptor::Prime(p) => Some(p),
        }
    }

    pub fn is_finite(self) -> bool {
        self.order().is_some()
    }

    pub fn zero(self) -> Scalar {
        match self {
            FieldDescriptor::Rational => Scalar::Rational(BigRational::zero()),
            FieldDescriptor::Prime(p) => Scalar::Prime { residue: 0, p },
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            FieldDescriptor::Rational => Scalar::Rational(BigRational::one()),
            FieldDescriptor::Prime(p) => Scalar::Prime { residue: 1 % p, p },
        }
    }

    /// Canonical image of a machine integer. Assumes a validated descriptor.
    pub fn int(self, n: i64) -> Scalar {
        match self {
            FieldDescriptor::Rational => Scalar::Rational(BigRational::from_integer(n.into())),
            FieldDescriptor::Prime(p) => Scalar::Prime {
                residue: n.rem_euclid(p as i64) as u64,
                p,
            },
        }
    }

    /// Canonical image of `num/den`.
    pub fn ratio(self, num: i64, den: i64) -> Result<Scalar> {
        self.int(num).checked_div(&self.int(den))
    }

    /// All elements of a finite field in residue order.
    pub fn elements(self) -> Option<Vec<Scalar>> {
        match self {
            FieldDescriptor::Rational => None,
            FieldDescriptor::Prime(p) => {
                Some((0..p).map(|residue| Scalar::Prime { residue, p }).collect())
            }
        }
    }

    /// Reads one scalar from its JSON encoding: rationals as `"num/den"`
    /// strings (bare integers and integer strings are accepted too), prime
    /// field elements as integers, reduced on entry.
    pub fn parse_value(self, value: &Value) -> Result<Scalar> {
        match value {
            Value::Number(n) => {
                let text = n.to_string();
                let int: BigInt = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("not an exact integer: {text}")))?;
                from_integer(&int, self)
            }
            Value::String(s) => self.parse_str(s),
            other => Err(Error::Parse(format!("not a scalar: {other}"))),
        }
    }

    pub fn parse_str(self, text: &str) -> Result<Scalar> {
        let text = text.trim();
        let bad = || Error::Parse(format!("not a scalar: {text:?}"));
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (
                n.trim().parse::<BigInt>().map_err(|_| bad())?,
                d.trim().parse::<BigInt>().map_err(|_| bad())?,
            ),
            None => (text.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        from_integer(&num, self)?.checked_div(&from_integer(&den, self)?)
    }
}

/// Embeds an integer into `field`, reduced. Fails on a non-prime modulus.
pub fn from_integer(n: &BigInt, field: FieldDescriptor) -> Result<Scalar> {
    match field.validate()? {
        FieldDescriptor::Rational => Ok(Scalar::Rational(BigRational::from_integer(n.clone()))),
        FieldDescriptor::Prime(p) => {
            let r = n.mod_floor(&BigInt::from(p));
            Ok(Scalar::Prime {
                residue: r.to_u64().expect("residue below modulus"),
                p,
            })
        }
    }
}

/// An exact field element.
///
/// Rationals are kept in lowest terms with a positive denominator (the
/// `num-rational` invariant); residues are always in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Prime { residue: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldDescriptor {
        match self {
            Scalar::Rational(_) => FieldDescriptor::Rational,
            Scalar::Prime { p, .. } => FieldDescriptor::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Prime { residue, .. } => *residue == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Prime { residue, .. } => *residue == 1,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.field(),
                right: other.field(),
            })
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self * other)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self * &other.invert()?)
    }

    /// Multiplicative inverse; `DivisionByZero` for zero.
    pub fn invert(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Prime { residue, p } => Scalar::Prime {
                residue: mod_pow(*residue, p - 2, *p),
                p: *p,
            },
        })
    }

    /// Numerator and denominator of a rational, or the residue over 1.
    pub fn to_fraction(&self) -> (BigInt, BigInt) {
        match self {
            Scalar::Rational(q) => (q.numer().clone(), q.denom().clone()),
            Scalar::Prime { residue, .. } => (BigInt::from(*residue), BigInt::one()),
        }
    }

    /// JSON encoding: `"num/den"` for rationals, an integer for residues.
    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Rational(q) => Value::String(format!("{}/{}", q.numer(), q.denom())),
            Scalar::Prime { residue, .. } => Value::from(*residue),
        }
    }

    /// Width-friendly text: integers without a `/1`.
    pub fn short(&self) -> String {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.numer().to_string(),
            _ => self.to_string(),
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_negative())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Prime { residue, .. } => write!(f, "{residue}"),
        }
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("mixed-field arithmetic: {} and {}", a.field(), b.field())
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { residue: a, p }, Scalar::Prime { residue: b, p: q }) if p == q => {
                Scalar::Prime {
                    residue: (a + b) % p,
                    p: *p,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Prime { residue: a, p }, Scalar::Prime { residue: b, p: q }) if p == q => {
                Scalar::Prime {
                    residue: (a + p - b) % p,
                    p: *p,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { residue: a, p }, Scalar::Prime { residue: b, p: q }) if p == q => {
                Scalar::Prime {
                    residue: a * b % p,
                    p: *p,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { residue, p } => Scalar::Prime {
                residue: (p - residue) % p,
                p: *p,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        FieldDescriptor::Rational.ratio(n, d).unwrap()
    }

    #[test]
    fn invert_examples() {
        assert_eq!(q(2, 3).invert().unwrap(), q(3, 2));
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert_eq!(f5.int(2).invert().unwrap(), f5.int(3));
        assert_eq!(q(0, 1).invert(), Err(Error::DivisionByZero));
        assert_eq!(f5.int(10).invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn from_integer_examples() {
        let seven = BigInt::from(7);
        let r = from_integer(&seven, FieldDescriptor::Rational).unwrap();
        assert_eq!(r.to_string(), "7/1");
        let f5 = from_integer(&seven, FieldDescriptor::prime(5).unwrap()).unwrap();
        assert_eq!(f5, Scalar::Prime { residue: 2, p: 5 });
        assert_eq!(
            from_integer(&BigInt::from(3), FieldDescriptor::Prime(4)),
            Err(Error::NonPrimeModulus(4))
        );
        assert_eq!(FieldDescriptor::prime(1), Err(Error::NonPrimeModulus(1)));
        assert_eq!(
            FieldDescriptor::prime(4_294_967_311),
            Err(Error::NonPrimeModulus(4_294_967_311))
        );
        assert!(FieldDescriptor::prime(4_294_967_291).is_ok());
    }

    #[test]
    fn negative_integers_reduce() {
        let f7 = FieldDescriptor::prime(7).unwrap();
        assert_eq!(f7.int(-1), f7.int(6));
        assert_eq!(f7.parse_str("-3").unwrap(), f7.int(4));
        assert_eq!(f7.parse_str("1/2").unwrap(), f7.int(4));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = FieldDescriptor::prime(5).unwrap().int(1);
        let b = FieldDescriptor::prime(7).unwrap().int(1);
        assert!(matches!(a.checked_add(&b), Err(Error::FieldMismatch { .. })));
        assert!(matches!(q(1, 2).checked_mul(&a), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    #[should_panic(expected = "mixed-field")]
    fn mixed_operator_panics() {
        let a = FieldDescriptor::prime(5).unwrap().int(1);
        let _ = &a + &q(1, 1);
    }

    #[test]
    fn json_scalar_encoding() {
        assert_eq!(q(-4, 6).to_json(), Value::String("-2/3".into()));
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert_eq!(f5.int(8).to_json(), Value::from(3));
        let rt = FieldDescriptor::Rational.parse_value(&q(-4, 6).to_json()).unwrap();
        assert_eq!(rt, q(-2, 3));
        assert!(FieldDescriptor::Rational.parse_str("1/0").is_err());
        assert!(FieldDescriptor::Rational.parse_str("x").is_err());
        assert!(FieldDescriptor::Rational.parse_value(&serde_json::json!(1.5)).is_err());
    }

    #[test]
    fn descriptor_json() {
        let q: FieldDescriptor = serde_json::from_str(r#"{"field":"Q"}"#).unwrap();
        assert_eq!(q, FieldDescriptor::Rational);
        let f: FieldDescriptor = serde_json::from_str(r#"{"field":"Fp","p":5}"#).unwrap();
        assert_eq!(f, FieldDescriptor::Prime(5));
        assert!(serde_json::from_str::<FieldDescriptor>(r#"{"field":"Fp","p":6}"#).is_err());
        assert_eq!(
            serde_json::to_string(&FieldDescriptor::Prime(5)).unwrap(),
            r#"{"field":"Fp","p":5}"#
        );
    }

    fn rational() -> impl Strategy<Value = Scalar> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| q(n, d))
    }

    fn residue() -> impl Strategy<Value = Scalar> {
        (0i64..13).prop_map(|n| FieldDescriptor::Prime(13).int(n))
    }

    fn check_axioms(a: &Scalar, b: &Scalar, c: &Scalar) {
        assert_eq!(&(a + b) + c, a + &(b + c));
        assert_eq!(&(a * b) * c, a * &(b * c));
        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        assert_eq!(a + b, b + a);
        assert_eq!(a * b, b * a);
        assert!((a - a).is_zero());
        assert_eq!(&(a - b) + b, *a);
        if !a.is_zero() {
            assert!((a * &a.invert().unwrap()).is_one());
        }
        if let Scalar::Rational(r) = a * b {
            assert!(r.denom().is_positive());
            assert!(num_integer::gcd(r.numer().clone(), r.denom().clone()).is_one());
        }
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
            check_axioms(&a, &b, &c);
        }

        #[test]
        fn prime_field_axioms(a in residue(), b in residue(), c in residue()) {
            check_axioms(&a, &b, &c);
        }
    }
}
