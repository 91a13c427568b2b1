//! Exact arithmetic in real quadratic fields `Q(sqrt d)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The number `p + q * sqrt(d)` with rational `p`, `q` and square-free `d`.
///
/// Rational values are stored with `q = 0` and `d = 1`; they combine with
/// elements of any field. Two irrational operands must share `d`: the checked
/// operations report a mismatch as a domain error and the operator impls panic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    p: BigRational,
    q: BigRational,
    d: u64,
}

fn square_free_part(mut d: u64) -> (u64, u64) {
    // d = s^2 * r with r square-free; returns (s, r)
    let mut s = 1u64;
    let mut r = 1u64;
    let mut f = 2u64;
    while f * f <= d {
        let mut e = 0;
        while d % f == 0 {
            d /= f;
            e += 1;
        }
        s *= f.pow(e / 2);
        if e % 2 == 1 {
            r *= f;
        }
        f += 1;
    }
    r *= d;
    (s, r)
}

impl QuadraticIrrational {
    pub fn new(p: BigRational, q: BigRational, d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("radicand must be positive"));
        }
        let (s, r) = square_free_part(d);
        let q = q * BigRational::from_integer(BigInt::from(s));
        if r == 1 {
            Ok(Self::rational(p + q))
        } else if q.is_zero() {
            Ok(Self::rational(p))
        } else {
            Ok(Self { p, q, d: r })
        }
    }

    pub fn rational(p: BigRational) -> Self {
        Self {
            p,
            q: <BigRational as Zero>::zero(),
            d: 1,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::rational(BigRational::from_integer(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `sqrt(d)` for square-free (or reducible) `d`.
    pub fn sqrt(d: u64) -> Result<Self> {
        Self::new(<BigRational as Zero>::zero(), BigRational::one(), d)
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    fn common_d(&self, other: &Self) -> Result<u64> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(1),
            (true, false) => Ok(other.d),
            (false, true) => Ok(self.d),
            (false, false) if self.d == other.d => Ok(self.d),
            _ => Err(Error::domain(format!(
                "mismatched quadratic fields: sqrt({}) vs sqrt({})",
                self.d, other.d
            ))),
        }
    }

    fn build(p: BigRational, q: BigRational, d: u64) -> Self {
        if q.is_zero() {
            Self::rational(p)
        } else {
            Self { p, q, d }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_d(other)?;
        Ok(Self::build(&self.p + &other.p, &self.q + &other.q, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let d = self.common_d(other)?;
        Ok(Self::build(&self.p - &other.p, &self.q - &other.q, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_d(other)?;
        let dr = BigRational::from_integer(BigInt::from(d));
        let p = &self.p * &other.p + &self.q * &other.q * dr;
        let q = &self.p * &other.q + &self.q * &other.p;
        Ok(Self::build(p, q, d))
    }

    /// Conjugate `p - q sqrt d`.
    pub fn conj(&self) -> Self {
        Self::build(self.p.clone(), -self.q.clone(), self.d)
    }

    /// Field norm `p^2 - d q^2`, always rational.
    pub fn norm(&self) -> BigRational {
        let dr = BigRational::from_integer(BigInt::from(self.d));
        &self.p * &self.p - &self.q * &self.q * dr
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("division by zero in quadratic field"));
        }
        let n = self.norm();
        let c = self.conj();
        Ok(Self::build(&c.p / &n, &c.q / &n, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.recip()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::build(&self.p * r, &self.q * r, self.d)
    }

    pub fn signum(&self) -> Ordering {
        let sp = rsign(&self.p);
        let sq = rsign(&self.q);
        if sq == Ordering::Equal {
            return sp;
        }
        if sp == Ordering::Equal || sp == sq {
            return sq;
        }
        // opposite signs: compare p^2 with d q^2
        let dr = BigRational::from_integer(BigInt::from(self.d));
        let lhs = &self.p * &self.p;
        let rhs = &self.q * &self.q * dr;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.p.floor().to_integer();
        }
        let approx = self.to_f64().floor();
        let mut m = if approx.is_finite() {
            BigInt::from(approx as i128)
        } else {
            self.p.floor().to_integer()
        };
        loop {
            let mq = Self::from_bigint(m.clone());
            if self.cmp_exact(&mq).expect("rational operand") == Ordering::Less {
                m -= 1;
                continue;
            }
            let m1 = Self::from_bigint(&m + 1);
            if self.cmp_exact(&m1).expect("rational operand") != Ordering::Less {
                m += 1;
                continue;
            }
            return m;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// Double-precision value; avoids cancellation when `p` and `q` have
    /// opposite signs by evaluating `(p^2 - d q^2) / (p - q sqrt d)`.
    pub fn to_f64(&self) -> f64 {
        let pf = ToPrimitive::to_f64(&self.p).unwrap_or(f64::NAN);
        if self.is_rational() {
            return pf;
        }
        let qs = ToPrimitive::to_f64(&self.q).unwrap_or(f64::NAN) * (self.d as f64).sqrt();
        if rsign(&self.p) == rsign(&self.q) || self.p.is_zero() {
            pf + qs
        } else {
            ToPrimitive::to_f64(&self.norm()).unwrap_or(f64::NAN) / (pf - qs)
        }
    }

    /// `m1 + m2 * self` for integers `m1`, `m2`.
    pub fn lattice(&self, m1: &BigInt, m2: &BigInt) -> Self {
        let r = BigRational::from_integer(m2.clone());
        Self::build(
            &self.p * &r + BigRational::from_integer(m1.clone()),
            &self.q * &r,
            self.d,
        )
    }

    /// `Some(k)` when `self = k * unit` for an integer `k`.
    pub fn integer_multiple_of(&self, unit: &Self) -> Result<Option<BigInt>> {
        let ratio = self.checked_div(unit)?;
        if ratio.is_rational() && ratio.p.is_integer() {
            Ok(Some(ratio.p.to_integer()))
        } else {
            Ok(None)
        }
    }
}

fn rsign(r: &BigRational) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Partial only across mismatched fields.
impl PartialOrd for QuadraticIrrational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

impl Add for QuadraticIrrational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("quadratic field mismatch")
    }
}

impl Sub for QuadraticIrrational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("quadratic field mismatch")
    }
}

impl Mul for QuadraticIrrational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("quadratic field mismatch")
    }
}

impl Div for QuadraticIrrational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("quadratic field mismatch or zero divisor")
    }
}

impl Neg for QuadraticIrrational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::build(-self.p, -self.q, self.d)
    }
}

impl Scalar for QuadraticIrrational {
    fn zero() -> Self {
        Self::from_int(0)
    }
    fn from_i64(v: i64) -> Self {
        Self::from_int(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        Self::from_bigint(v.clone())
    }
    fn div_i64(&self, d: i64) -> Self {
        self.scale(&BigRational::new(BigInt::one(), BigInt::from(d)))
    }
    fn sign(&self) -> Ordering {
        self.signum()
    }
    fn to_f64(&self) -> f64 {
        QuadraticIrrational::to_f64(self)
    }
    fn is_exact() -> bool {
        true
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats in the CLI syntax, e.g. `-14+10*sqrt:2` or `1/2`.
impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", fmt_rational(&self.p));
        }
        let mut out = String::new();
        if !self.p.is_zero() {
            out.push_str(&fmt_rational(&self.p));
        }
        let neg = self.q.is_negative();
        let mag = self.q.abs();
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if !mag.is_one() {
            out.push_str(&fmt_rational(&mag));
            out.push('*');
        }
        out.push_str(&format!("sqrt:{}", self.d));
        write!(f, "{out}")
    }
}

/// Parses `a/b`, an integer, or a decimal (read exactly, so `2.1 = 21/10`).
pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::domain(format!("cannot parse rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac_part.contains(['+', '-']) || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() {
        return Err(bad());
    } else {
        digits
    };
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-shift) as usize))
    })
}

/// Parses sums of terms `r`, `sqrt:d`, `r*sqrt:d` with rational `r`
/// (`a/b`, integer or decimal), e.g. `sqrt:2`, `1/2+3/2*sqrt:5`.
impl FromStr for QuadraticIrrational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::domain("empty number"));
        }
        // split into signed terms, keeping exponent signs of decimals intact
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..bytes.len() {
            let c = bytes[i] as char;
            let prev = bytes[i - 1] as char;
            if (c == '+' || c == '-') && prev != 'e' && prev != 'E' && prev != '*' && prev != '/' {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);

        let mut acc = QuadraticIrrational::from_int(0);
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(term)),
            };
            let value = if let Some(idx) = body.find("sqrt:") {
                let coeff = body[..idx].trim_end_matches('*');
                let coeff = if coeff.is_empty() {
                    BigRational::one()
                } else {
                    parse_rational(coeff)?
                };
                let d: u64 = body[idx + 5..]
                    .parse()
                    .map_err(|_| Error::domain(format!("bad radicand in '{term}'")))?;
                QuadraticIrrational::new(<BigRational as Zero>::zero(), coeff, d)?
            } else {
                QuadraticIrrational::rational(parse_rational(body)?)
            };
            let value = if sign < 0 { -value } else { value };
            acc = acc.checked_add(&value)?;
        }
        Ok(acc)
    }
}
