//! Exact scalars in the field `Q(q)` with `q^2 = b`.
//!
//! A [`Scalar`] is a pair of rationals `(a0, a1)` meaning `a0 + a1*q`. When `b`
//! is a perfect square the ring `Q[t]/(t^2 - b)` has zero divisors, so the
//! [`GroundField`] folds `q` into the rational `qsign * sqrt(b)` and every value
//! it produces has `a1 = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivideByZero,
    #[error("sigma is only defined pointwise in quadratic mode")]
    CalledInRationalMode,
    #[error("b must be a nonzero integer")]
    ZeroB,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// Which square root of `b` the symbol `q` denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl QSign {
    pub fn flipped(self) -> Self {
        match self {
            QSign::Plus => QSign::Minus,
            QSign::Minus => QSign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            QSign::Plus => 1,
            QSign::Minus => -1,
        }
    }
}

impl fmt::Display for QSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QSign::Plus => "+",
            QSign::Minus => "-",
        })
    }
}

impl FromStr for QSign {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "+1" | "1" | "plus" => Ok(QSign::Plus),
            "-" | "-1" | "minus" => Ok(QSign::Minus),
            _ => Err(FieldError::Parse(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMode {
    /// `b` is a perfect square and `q` is the rational `qsign * sqrt(b)`.
    Rational,
    /// `q` is a formal root of `t^2 - b`.
    Quadratic,
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldMode::Rational => "rational",
            FieldMode::Quadratic => "quadratic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundField {
    b: i64,
    qsign: QSign,
    mode: FieldMode,
    /// `sqrt(b)` in rational mode.
    root: Option<i64>,
}

impl GroundField {
    pub fn new(b: i64, qsign: QSign) -> Result<Self, FieldError> {
        if b == 0 {
            return Err(FieldError::ZeroB);
        }
        let root = if b > 0 {
            let r = Integer::from(b);
            if r.is_perfect_square() {
                Some(r.sqrt().to_i64().expect("sqrt of an i64 fits"))
            } else {
                None
            }
        } else {
            None
        };
        let mode = if root.is_some() {
            FieldMode::Rational
        } else {
            FieldMode::Quadratic
        };
        Ok(GroundField {
            b,
            qsign,
            mode,
            root,
        })
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn qsign(&self) -> QSign {
        self.qsign
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    /// The same field with `q` replaced by `-q`.
    pub fn flipped(&self) -> Self {
        GroundField {
            qsign: self.qsign.flipped(),
            ..self.clone()
        }
    }

    pub fn rational(&self, r: Rational) -> Scalar {
        Scalar {
            a0: r,
            a1: Rational::new(),
            b: self.b,
        }
    }

    pub fn int(&self, v: i64) -> Scalar {
        self.rational(Rational::from(v))
    }

    /// Builds `a0 + a1*q`, folding `q` to a rational in rational mode.
    pub fn scalar(&self, a0: Rational, a1: Rational) -> Scalar {
        match self.root {
            Some(root) => {
                let q = root * self.qsign.as_i64();
                self.rational(a0 + a1 * q)
            }
            None => Scalar { a0, a1, b: self.b },
        }
    }

    pub fn q(&self) -> Scalar {
        self.scalar(Rational::new(), Rational::from(1))
    }

    /// `q^n` for any integer `n`.
    pub fn qpow(&self, n: i64) -> Scalar {
        let k = n.div_euclid(2);
        let odd = n.rem_euclid(2) == 1;
        let bk = rational_pow(self.b, k);
        if odd {
            self.scalar(Rational::new(), bk)
        } else {
            self.rational(bk)
        }
    }

    /// The balanced q-integer `(q^n - q^-n) / (q - q^-1)`.
    pub fn q_int(&self, n: i64) -> Result<Scalar, FieldError> {
        let num = &self.qpow(n) - &self.qpow(-n);
        let den = &self.qpow(1) - &self.qpow(-1);
        num.checked_div(&den)
    }

    /// The field automorphism `q -> -q`.
    pub fn sigma(&self, s: &Scalar) -> Result<Scalar, FieldError> {
        match self.mode {
            FieldMode::Rational => Err(FieldError::CalledInRationalMode),
            FieldMode::Quadratic => Ok(s.flip_q()),
        }
    }

    /// Numerical value of `q`.
    pub fn q_complex(&self) -> Complex64 {
        let s = self.qsign.as_i64() as f64;
        if self.b > 0 {
            Complex64::new(s * (self.b as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, s * ((-self.b) as f64).sqrt())
        }
    }

    pub fn to_complex(&self, s: &Scalar) -> Complex64 {
        Complex64::new(s.a0.to_f64(), 0.0) + self.q_complex() * s.a1.to_f64()
    }

    /// Sign of a real scalar, or `None` when it is not real.
    pub fn real_sign(&self, s: &Scalar) -> Option<Ordering> {
        if s.a1.cmp0() == Ordering::Equal {
            return Some(s.a0.cmp0());
        }
        if self.b < 0 {
            return None;
        }
        // a0 + a1*q with q = qsign*sqrt(b)
        let t_sign = s.a1.cmp0() as i64 * self.qsign.as_i64();
        let a0_sign = s.a0.cmp0() as i64;
        let t_sign = match t_sign {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        };
        let a0_ord = match a0_sign {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        };
        if a0_ord == Ordering::Equal || a0_ord == t_sign {
            return Some(t_sign);
        }
        // opposite signs: compare a0^2 with a1^2 * b
        let lhs = Rational::from(s.a0.square_ref());
        let rhs = Rational::from(s.a1.square_ref()) * self.b;
        Some(match lhs.cmp(&rhs) {
            Ordering::Greater => a0_ord,
            Ordering::Less => t_sign,
            Ordering::Equal => Ordering::Equal,
        })
    }

    pub fn parse_scalar(&self, text: &str) -> Result<Scalar, FieldError> {
        let s = Scalar::parse(text)?;
        Ok(self.scalar(s.a0, s.a1))
    }
}

fn rational_pow(base: i64, exp: i64) -> Rational {
    let p = Integer::from(Integer::i_pow_u(base as i32, exp.unsigned_abs() as u32));
    if exp >= 0 {
        Rational::from(p)
    } else {
        Rational::from((Integer::from(1), p))
    }
}

/// An element `a0 + a1*q` of `Q(q)`.
///
/// `b` is carried along so products can reduce `q^2`; constants built without a
/// field use `b = 0`, which is only ever combined with `a1 = 0`.
#[derive(Clone, Debug)]
pub struct Scalar {
    a0: Rational,
    a1: Rational,
    b: i64,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.a0 == other.a0 && self.a1 == other.a1
    }
}

impl Eq for Scalar {}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from_rational(Rational::new())
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::from(1))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar {
            a0: r,
            a1: Rational::new(),
            b: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Scalar::from_rational(Rational::from(v))
    }

    pub fn a0(&self) -> &Rational {
        &self.a0
    }

    pub fn a1(&self) -> &Rational {
        &self.a1
    }

    pub fn is_zero(&self) -> bool {
        self.a0.cmp0() == Ordering::Equal && self.a1.cmp0() == Ordering::Equal
    }

    pub fn is_rational(&self) -> bool {
        self.a1.cmp0() == Ordering::Equal
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a0)
    }

    fn bind(&self, other: &Scalar) -> i64 {
        debug_assert!(
            self.b == 0 || other.b == 0 || self.b == other.b,
            "mixing scalars from different fields"
        );
        if self.b != 0 {
            self.b
        } else {
            other.b
        }
    }

    /// Complex conjugation: the identity for `b > 0`, `q -> -q` for `b < 0`.
    pub fn conj(&self) -> Scalar {
        if self.b < 0 && !self.is_rational() {
            self.flip_q()
        } else {
            self.clone()
        }
    }

    fn flip_q(&self) -> Scalar {
        Scalar {
            a0: self.a0.clone(),
            a1: Rational::from(-&self.a1),
            b: self.b,
        }
    }

    /// True when the value is fixed by complex conjugation.
    pub fn is_real(&self) -> bool {
        self.is_rational() || self.b > 0
    }

    pub fn recip(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        if self.is_rational() {
            return Ok(Scalar {
                a0: self.a0.clone().recip(),
                a1: Rational::new(),
                b: self.b,
            });
        }
        // (a0 - a1 q) / (a0^2 - b a1^2)
        let norm = Rational::from(self.a0.square_ref()) - Rational::from(self.a1.square_ref()) * self.b;
        if norm.cmp0() == Ordering::Equal {
            return Err(FieldError::DivideByZero);
        }
        let inv = norm.recip();
        Ok(Scalar {
            a0: Rational::from(&self.a0 * &inv),
            a1: -Rational::from(&self.a1 * &inv),
            b: self.b,
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, FieldError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn mul_rational(&self, r: &Rational) -> Scalar {
        Scalar {
            a0: Rational::from(&self.a0 * r),
            a1: Rational::from(&self.a1 * r),
            b: self.b,
        }
    }

    /// Parses the textual encoding `a0`, `a0+a1*r` or `a0-a1*r`.
    pub fn parse(text: &str) -> Result<Scalar, FieldError> {
        let err = || FieldError::Parse(text.to_string());
        let t = text.trim();
        let (head, tail) = match t.strip_suffix("*r") {
            None => {
                return Ok(Scalar::from_rational(t.parse::<Rational>().map_err(|_| err())?));
            }
            Some(rest) => {
                // split at the last sign that is not the leading character
                let idx = rest
                    .char_indices()
                    .skip(1)
                    .filter(|&(_, c)| c == '+' || c == '-')
                    .map(|(i, _)| i)
                    .last()
                    .ok_or_else(err)?;
                (&rest[..idx], &rest[idx..])
            }
        };
        let a0 = head.parse::<Rational>().map_err(|_| err())?;
        let a1 = tail
            .strip_prefix('+')
            .unwrap_or(tail)
            .parse::<Rational>()
            .map_err(|_| err())?;
        Ok(Scalar { a0, a1, b: 0 })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a0);
        }
        if self.a1.cmp0() == Ordering::Less {
            write!(f, "{}-{}*r", self.a0, Rational::from(-&self.a1))
        } else {
            write!(f, "{}+{}*r", self.a0, self.a1)
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar {
            a0: Rational::from(&self.a0 + &rhs.a0),
            a1: Rational::from(&self.a1 + &rhs.a1),
            b: self.bind(rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar {
            a0: Rational::from(&self.a0 - &rhs.a0),
            a1: Rational::from(&self.a1 - &rhs.a1),
            b: self.bind(rhs),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        let b = self.bind(rhs);
        if rhs.is_rational() {
            return Scalar {
                a0: Rational::from(&self.a0 * &rhs.a0),
                a1: Rational::from(&self.a1 * &rhs.a0),
                b,
            };
        }
        if self.is_rational() {
            return Scalar {
                a0: Rational::from(&self.a0 * &rhs.a0),
                a1: Rational::from(&self.a0 * &rhs.a1),
                b,
            };
        }
        let a0 = Rational::from(&self.a0 * &rhs.a0) + Rational::from(&self.a1 * &rhs.a1) * b;
        let a1 = Rational::from(&self.a0 * &rhs.a1) + Rational::from(&self.a1 * &rhs.a0);
        Scalar { a0, a1, b }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a0: Rational::from(-&self.a0),
            a1: Rational::from(-&self.a1),
            b: self.b,
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(b: i64) -> GroundField {
        GroundField::new(b, QSign::Plus).unwrap()
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::from((p, q))
    }

    #[test]
    fn difference_of_squares() {
        let k = f(2);
        let one = k.int(1);
        let q = k.q();
        assert_eq!(&(&one + &q) * &(&one - &q), k.int(-1));
    }

    #[test]
    fn q_squared_is_b() {
        let k = f(-2);
        assert_eq!(&k.q() * &k.q(), k.int(-2));
    }

    #[test]
    fn reciprocal_of_q() {
        let k = f(2);
        let inv = k.q().recip().unwrap();
        assert_eq!(inv, k.scalar(r(0, 1), r(1, 2)));
        assert_eq!(&inv * &k.q(), k.int(1));
    }

    #[test]
    fn division_by_zero() {
        let k = f(3);
        assert_eq!(k.int(1).checked_div(&k.int(0)), Err(FieldError::DivideByZero));
    }

    #[test]
    fn conjugation_depends_on_sign_of_b() {
        let s = |k: &GroundField| k.scalar(r(3, 1), r(2, 1));
        let pos = f(2);
        assert_eq!(s(&pos).conj(), s(&pos));
        let neg = f(-2);
        assert_eq!(s(&neg).conj(), neg.scalar(r(3, 1), r(-2, 1)));
        assert_eq!(neg.int(5).conj(), neg.int(5));
    }

    #[test]
    fn sigma_flips_q() {
        let k = f(2);
        let s = k.scalar(r(3, 1), r(1, 1));
        assert_eq!(k.sigma(&s).unwrap(), k.scalar(r(3, 1), r(-1, 1)));
        assert_eq!(k.sigma(&k.sigma(&s).unwrap()).unwrap(), s);
        let neg = f(-2);
        let t = neg.scalar(r(-1, 3), r(5, 7));
        assert_eq!(neg.sigma(&t).unwrap(), t.conj());
        assert_eq!(f(4).sigma(&f(4).int(1)), Err(FieldError::CalledInRationalMode));
    }

    #[test]
    fn powers_of_q() {
        let k = f(2);
        assert_eq!(k.qpow(4), k.int(4));
        assert_eq!(k.qpow(-1), k.scalar(r(0, 1), r(1, 2)));
        assert_eq!(&k.qpow(-1) * &k.q(), k.int(1));
        let neg = f(-2);
        assert_eq!(neg.qpow(3), neg.scalar(r(0, 1), r(-2, 1)));
        assert_eq!(neg.qpow(0), neg.int(1));
    }

    #[test]
    fn rational_mode_folds_q() {
        let k = GroundField::new(4, QSign::Minus).unwrap();
        assert_eq!(k.mode(), FieldMode::Rational);
        assert_eq!(k.q(), k.int(-2));
        assert_eq!(k.qpow(-3), k.rational(r(-1, 8)));
        assert!(k.qpow(5).is_rational());
        let neg = GroundField::new(-4, QSign::Plus).unwrap();
        assert_eq!(neg.mode(), FieldMode::Quadratic);
    }

    #[test]
    fn q_integer_three() {
        // (q^3 - q^-3)/(q - q^-1) = q^2 + 1 + q^-2 = 2 + 1 + 1/2
        let k = f(2);
        assert_eq!(k.q_int(3).unwrap(), k.rational(r(7, 2)));
    }

    #[test]
    fn text_encoding() {
        let k = f(2);
        for s in [
            k.int(7),
            k.rational(r(-3, 4)),
            k.scalar(r(1, 2), r(-5, 3)),
            k.scalar(r(0, 1), r(2, 1)),
            k.scalar(r(-1, 1), r(1, 9)),
        ] {
            let text = s.to_string();
            assert_eq!(k.parse_scalar(&text).unwrap(), s, "{text}");
        }
        assert_eq!(k.scalar(r(1, 2), r(-5, 3)).to_string(), "1/2-5/3*r");
        assert_eq!(k.scalar(r(0, 1), r(2, 1)).to_string(), "0+2*r");
        assert!(Scalar::parse("1+*r").is_err());
    }

    #[test]
    fn sign_of_real_quadratic_values() {
        let k = f(2);
        // 1 - q < 0 for q = sqrt(2)
        assert_eq!(k.real_sign(&k.scalar(r(1, 1), r(-1, 1))), Some(Ordering::Less));
        assert_eq!(k.real_sign(&k.scalar(r(3, 2), r(-1, 1))), Some(Ordering::Greater));
        let km = k.flipped();
        assert_eq!(km.real_sign(&km.scalar(r(1, 1), r(-1, 1))), Some(Ordering::Greater));
        assert_eq!(f(-2).real_sign(&f(-2).q()), None);
    }
}
