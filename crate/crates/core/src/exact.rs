//! Exact scalars of the form `a + b·√d` with `a, b` rational.
//!
//! Every value carries its radicand. Values with different nonzero radicands
//! cannot be combined; doing so panics. Scenario loading rejects mixed
//! radicands up front so the panic is only reachable from library misuse.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An element of `ℚ(√d)`.
///
/// Normal form: `radical == 0` iff `radicand == 0`, and a nonzero radicand is
/// square-free and greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: BigRational,
    radical: BigRational,
    radicand: u64,
}

fn square_free_split(mut n: u64) -> (u64, u64) {
    // n = k² m with m square-free
    let mut k = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        while n.is_multiple_of(p * p) {
            n /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, n)
}

fn join_radicand(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, d) | (d, 0) => d,
        (x, y) if x == y => x,
        (x, y) => panic!("cannot combine sqrt({x}) and sqrt({y}) in one exact value"),
    }
}

impl Surd {
    pub fn new(rational: BigRational, radical: BigRational, radicand: u64) -> Self {
        if radical.is_zero() || radicand == 0 {
            return Surd::from_rational(rational);
        }
        let (k, m) = square_free_split(radicand);
        let radical = radical * BigRational::from_integer(BigInt::from(k));
        if m == 1 {
            return Surd::from_rational(rational + radical);
        }
        Surd {
            rational,
            radical,
            radicand: m,
        }
    }

    pub fn from_rational(rational: BigRational) -> Self {
        Surd {
            rational,
            radical: BigRational::zero(),
            radicand: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Surd::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Surd::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `√n`, reduced to a rational when `n` is a perfect square.
    pub fn sqrt(n: u64) -> Self {
        Surd::new(BigRational::zero(), BigRational::one(), n)
    }

    pub fn zero() -> Self {
        Surd::from_int(0)
    }

    pub fn one() -> Self {
        Surd::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radical.is_zero()
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.radical
    }

    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.rational);
        let sb = sign_of(&self.radical);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² against b²·d
        let a2 = &self.rational * &self.rational;
        let b2d =
            &self.radical * &self.radical * BigRational::from_integer(BigInt::from(self.radicand));
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.radical.is_zero() {
            return a;
        }
        let b = self.radical.to_f64().unwrap_or(f64::NAN);
        a + b * (self.radicand as f64).sqrt()
    }

    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rational.floor().to_integer();
        }
        let approx = self.to_f64().floor();
        let mut k = BigInt::from(approx as i128);
        loop {
            let lower = Surd::from_rational(BigRational::from_integer(k.clone()));
            if lower > *self {
                k -= 1;
                continue;
            }
            let upper = Surd::from_rational(BigRational::from_integer(&k + 1));
            if upper <= *self {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// Representative in `[0, 1)`.
    pub fn fract(&self) -> Surd {
        self - &Surd::from_rational(BigRational::from_integer(self.floor()))
    }

    pub fn abs(&self) -> Surd {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn mul_int(&self, n: i64) -> Surd {
        self * &Surd::from_int(n)
    }

    pub fn recip(&self) -> Surd {
        &Surd::one() / self
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let d = join_radicand(self.radicand, rhs.radicand);
        Surd::new(
            &self.rational + &rhs.rational,
            &self.radical + &rhs.radical,
            d,
        )
    }
}

impl<'a> Sub<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let d = join_radicand(self.radicand, rhs.radicand);
        Surd::new(
            &self.rational - &rhs.rational,
            &self.radical - &rhs.radical,
            d,
        )
    }
}

impl<'a> Mul<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let d = join_radicand(self.radicand, rhs.radicand);
        let dd = BigRational::from_integer(BigInt::from(d));
        let rational = &self.rational * &rhs.rational + &self.radical * &rhs.radical * dd;
        let radical = &self.rational * &rhs.radical + &self.radical * &rhs.rational;
        Surd::new(rational, radical, d)
    }
}

impl<'a> Div<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn div(self, rhs: &Surd) -> Surd {
        assert!(!rhs.is_zero(), "division of an exact value by zero");
        let d = join_radicand(self.radicand, rhs.radicand);
        let dd = BigRational::from_integer(BigInt::from(d));
        let norm = &rhs.rational * &rhs.rational - &rhs.radical * &rhs.radical * dd;
        let conj = Surd {
            rational: rhs.rational.clone(),
            radical: -rhs.radical.clone(),
            radicand: rhs.radicand,
        };
        let num = self * &conj;
        Surd::new(num.rational / &norm, num.radical / &norm, d)
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            rational: -self.rational.clone(),
            radical: -self.radical.clone(),
            radicand: self.radicand,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl From<i64> for Surd {
    fn from(n: i64) -> Self {
        Surd::from_int(n)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radical.is_zero() {
            return write!(f, "{}", fmt_rational(&self.rational));
        }
        let coeff = if self.radical.is_one() {
            String::new()
        } else if (-&self.radical).is_one() {
            "-".to_string()
        } else {
            format!("{}*", fmt_rational(&self.radical))
        };
        let root = format!("{coeff}sqrt({})", self.radicand);
        if self.rational.is_zero() {
            write!(f, "{root}")
        } else if self.radical.is_positive() {
            write!(f, "{}+{root}", fmt_rational(&self.rational))
        } else {
            write!(f, "{}{root}", fmt_rational(&self.rational))
        }
    }
}

/// Parses sums of terms such as `1/3`, `-0.25`, `sqrt(2)-1`, `3*sqrt(5)/4`.
impl FromStr for Surd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut parser = Parser {
            chars: s.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            source: s,
        };
        let value = parser.expr()?;
        if parser.pos != parser.chars.len() {
            return Err(parser.error());
        }
        Ok(value)
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn error(&self) -> Error {
        Error::Parse(format!("malformed exact number `{}`", self.source))
    }

    fn compatible(&self, lhs: &Surd, rhs: Surd) -> Result<Surd, Error> {
        match (lhs.radicand, rhs.radicand) {
            (a, b) if a != 0 && b != 0 && a != b => Err(Error::Parse(format!(
                "`{}` mixes sqrt({a}) and sqrt({b})",
                self.source
            ))),
            _ => Ok(rhs),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Surd, Error> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    let rhs = {
                        let t = self.term()?;
                        self.compatible(&acc, t)?
                    };
                    acc = &acc + &rhs;
                }
                '-' => {
                    self.pos += 1;
                    let rhs = {
                        let t = self.term()?;
                        self.compatible(&acc, t)?
                    };
                    acc = &acc - &rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Surd, Error> {
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some('+') {
                self.pos += 1;
            }
            false
        };
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    let rhs = {
                        let t = self.factor()?;
                        self.compatible(&acc, t)?
                    };
                    acc = &acc * &rhs;
                }
                '/' => {
                    self.pos += 1;
                    let den = {
                        let t = self.factor()?;
                        self.compatible(&acc, t)?
                    };
                    if den.is_zero() {
                        return Err(self.error());
                    }
                    acc = &acc / &den;
                }
                _ => break,
            }
        }
        Ok(if negative { -acc } else { acc })
    }

    fn factor(&mut self) -> Result<Surd, Error> {
        if self.chars[self.pos..].starts_with(&['s', 'q', 'r', 't', '(']) {
            self.pos += 5;
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            if self.peek() != Some(')') || digits.is_empty() {
                return Err(self.error());
            }
            self.pos += 1;
            let n: u64 = digits.parse().map_err(|_| self.error())?;
            return Ok(Surd::sqrt(n));
        }
        if self.peek() == Some('(') {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(')') {
                return Err(self.error());
            }
            self.pos += 1;
            return Ok(inner);
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        let literal: String = self.chars[start..self.pos].iter().collect();
        parse_decimal(&literal).ok_or_else(|| self.error())
    }
}

fn parse_decimal(literal: &str) -> Option<Surd> {
    if literal.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match literal.split_once('.') {
        Some((i, f)) => (i, f),
        None => (literal, ""),
    };
    if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num::pow(BigInt::from(10), frac_part.len());
    Some(Surd::from_rational(BigRational::new(numer, denom)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Surd {
        text.parse().unwrap()
    }

    #[test]
    fn parses_rationals_and_roots() {
        assert_eq!(s("1/3"), Surd::ratio(1, 3));
        assert_eq!(s("-0.25"), Surd::ratio(-1, 4));
        assert_eq!(s("sqrt(4)"), Surd::from_int(2));
        assert_eq!(s("sqrt(8)"), &Surd::from_int(2) * &Surd::sqrt(2));
        let x = s("sqrt(2)-1");
        assert!((x.to_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(s("3*sqrt(5)/4").to_string(), "3/4*sqrt(5)");
        assert!("1/0".parse::<Surd>().is_err());
        assert!("abc".parse::<Surd>().is_err());
        assert!("1..2".parse::<Surd>().is_err());
        assert!("sqrt(2)+sqrt(3)".parse::<Surd>().is_err());
        assert!("sqrt(2)*sqrt(3)".parse::<Surd>().is_err());
    }

    #[test]
    fn exact_ordering_with_roots() {
        let x = s("sqrt(2)-1");
        assert!(x > s("0.414"));
        assert!(x < s("0.4143"));
        assert_eq!(x.floor(), BigInt::from(0));
        assert_eq!((-&x).floor(), BigInt::from(-1));
        assert_eq!(s("7/2").floor(), BigInt::from(3));
        assert_eq!(s("-7/2").fract(), Surd::ratio(1, 2));
    }

    #[test]
    fn field_operations() {
        let x = s("1+sqrt(3)");
        let y = s("2-sqrt(3)");
        let q = &x / &y;
        assert_eq!(&q * &y, x);
        assert_eq!(&s("sqrt(3)") * &s("sqrt(3)"), Surd::from_int(3));
    }

    #[test]
    #[should_panic]
    fn mixed_radicands_panic() {
        let _ = &s("sqrt(2)") + &s("sqrt(3)");
    }
}
