//! Exact scalars: arbitrary-precision rationals and Gaussian rationals `p + q·i`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::LinalgError;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let t = s.trim();
    let bad = || LinalgError::Parse(format!("not a rational literal: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
    }
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` when the
/// denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Serde adapter for a single rational stored as a string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` stored as a list of strings.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}

/// An element of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_real(re: Rational) -> Self {
        GaussRational { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_real(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_real(rat(n, d))
    }

    pub fn i() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|²`, always a non-negative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRational { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn is_positive_real(&self) -> bool {
        self.is_real() && self.re.is_positive()
    }
}

impl Zero for GaussRational {
    fn zero() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRational {
    fn one() -> Self {
        GaussRational { re: Rational::one(), im: Rational::zero() }
    }
}

impl From<Rational> for GaussRational {
    fn from(r: Rational) -> Self {
        GaussRational::from_real(r)
    }
}

impl From<i64> for GaussRational {
    fn from(n: i64) -> Self {
        GaussRational::from_int(n)
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl<'a> Add<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRational::from_real(&self.re * &o.re);
        }
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn div(self, o: &GaussRational) -> GaussRational {
        let inv = o.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $m(self, o: GaussRational) -> GaussRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $m(self, o: &GaussRational) -> GaussRational {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<GaussRational> for &'a GaussRational {
            type Output = GaussRational;
            fn $m(self, o: GaussRational) -> GaussRational {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, o: &GaussRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl AddAssign for GaussRational {
    fn add_assign(&mut self, o: GaussRational) {
        *self += &o;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, o: &GaussRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, o: &GaussRational) {
        *self = &*self * o;
    }
}

impl Sum for GaussRational {
    fn sum<I: Iterator<Item = GaussRational>>(iter: I) -> Self {
        iter.fold(GaussRational::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a GaussRational> for GaussRational {
    fn sum<I: Iterator<Item = &'a GaussRational>>(iter: I) -> Self {
        iter.fold(GaussRational::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl Serialize for GaussRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GaussRational", 2)?;
        st.serialize_field("re", &format_rational(&self.re))?;
        st.serialize_field("im", &format_rational(&self.im))?;
        st.end()
    }
}

/// Accepts `{"re": "p/q", "im": "p/q"}` (either key may be omitted) or a bare
/// real literal `"p/q"`.
impl<'de> Deserialize<'de> for GaussRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Real(String),
            Complex {
                #[serde(default)]
                re: Option<String>,
                #[serde(default)]
                im: Option<String>,
            },
        }
        let parse = |s: Option<String>| -> Result<Rational, D::Error> {
            match s {
                None => Ok(Rational::zero()),
                Some(s) => parse_rational(&s).map_err(de::Error::custom),
            }
        };
        match Repr::deserialize(d)? {
            Repr::Real(s) => Ok(GaussRational::from_real(parse(Some(s))?)),
            Repr::Complex { re, im } => Ok(GaussRational::new(parse(re)?, parse(im)?)),
        }
    }
}
