//! Exact arithmetic over the rationals and the real quadratic field Q(sqrt5).
//!
//! All algorithms in the crate are generic over [`Scalar`], which is
//! implemented for `f64`, [`Rational`] and [`QuadExt`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Scalar domain shared by the polynomial and certificate code.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Only floating domains accept arbitrary reals.
    fn from_f64(x: f64) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// -1, 0 or +1.
    fn sign(&self) -> i32;
    fn to_f64(&self) -> f64;
    /// Canonical text form.
    fn render(&self) -> String;
    fn parse_text(s: &str) -> Result<Self>;

    fn cmp_s(&self, other: &Self) -> Ordering {
        match (self.clone() - other.clone()).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    fn abs_s(&self) -> Self {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        result
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses "p", "p/q", or a decimal such as "-0.75" or "1.5e-3" exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(i));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Exact conversion of a finite double to a rational.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sign(&self) -> i32 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn render(&self) -> String {
        format!("{self:?}")
    }
    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(x) = s.parse::<f64>() {
            return Ok(x);
        }
        QuadExt::parse(s).map(|q| q.to_f64())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn from_i64(v: i64) -> Self {
        rat_int(v)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_f64(_x: f64) -> Option<Self> {
        None
    }
    fn is_zero(&self) -> bool {
        <Rational as Zero>::is_zero(self)
    }
    fn sign(&self) -> i32 {
        match self.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn parse_text(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

/// The real number a + b*sqrt5 with a, b rational.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadExt { a, b }
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadExt { a, b: <Rational as Zero>::zero() }
    }

    pub fn from_ints(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        QuadExt { a: rat(an, ad), b: rat(bn, bd) }
    }

    pub fn sqrt5() -> Self {
        QuadExt { a: <Rational as Zero>::zero(), b: <Rational as One>::one() }
    }

    pub fn golden() -> Self {
        QuadExt::from_ints(1, 2, 1, 2)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt5_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        <Rational as Zero>::is_zero(&self.b)
    }

    pub fn conjugate(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm a^2 - 5 b^2.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - rat_int(5) * &self.b * &self.b
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if Scalar::is_zero(other) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.div_ref(other))
    }

    pub fn arith(x: &Self, y: &Self, op: ArithOp) -> Result<Self> {
        Ok(match op {
            ArithOp::Add => x.add_ref(y),
            ArithOp::Sub => x.sub_ref(y),
            ArithOp::Mul => x.mul_ref(y),
            ArithOp::Div => x.checked_div(y)?,
            ArithOp::Neg => -x.clone(),
        })
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        QuadExt { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        QuadExt { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        let zb = <Rational as Zero>::is_zero(&self.b);
        let ob = <Rational as Zero>::is_zero(&o.b);
        if zb && ob {
            return QuadExt::from_rational(&self.a * &o.a);
        }
        if zb {
            return QuadExt { a: &self.a * &o.a, b: &self.a * &o.b };
        }
        if ob {
            return QuadExt { a: &self.a * &o.a, b: &self.b * &o.a };
        }
        QuadExt {
            a: &self.a * &o.a + rat_int(5) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    fn div_ref(&self, o: &Self) -> Self {
        if <Rational as Zero>::is_zero(&o.b) {
            return QuadExt { a: &self.a / &o.a, b: &self.b / &o.a };
        }
        let n = o.norm();
        let num = self.mul_ref(&o.conjugate());
        QuadExt { a: num.a / &n, b: num.b / n }
    }

    /// Exact sign under the embedding sqrt5 > 0.
    pub fn signum(&self) -> i32 {
        let sa = Scalar::sign(&self.a);
        let sb = Scalar::sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // opposite signs: compare a^2 with 5 b^2
        let a2 = &self.a * &self.a;
        let b2 = rat_int(5) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Dyadic approximation with `precision` significant bits;
    /// the error is below 2^(1-precision)*|x|.
    pub fn to_float(&self, precision: u32) -> FloatApprox {
        let precision = precision.max(53);
        if Scalar::is_zero(self) {
            return FloatApprox { value: <Rational as Zero>::zero(), precision };
        }
        if self.is_rational() {
            return FloatApprox { value: round_to_bits(&self.a, precision), precision };
        }
        let mut m = precision as u64 + 16;
        loop {
            let (lo, hi) = self.enclose(m);
            let same_sign = Scalar::sign(&lo) == Scalar::sign(&hi) && Scalar::sign(&lo) != 0;
            if same_sign {
                let width = &hi - &lo;
                let small = if lo.abs() < hi.abs() { lo.abs() } else { hi.abs() };
                let tol = small / Rational::from_integer(BigInt::one() << (precision as usize + 1));
                if width <= tol {
                    let mid = (lo + hi) / rat_int(2);
                    return FloatApprox { value: round_to_bits(&mid, precision), precision };
                }
            }
            m *= 2;
        }
    }

    /// Rational interval containing the value, from sqrt5 to m bits.
    fn enclose(&self, m: u64) -> (Rational, Rational) {
        let scale = BigUint::one() << (2 * m as usize);
        let s = (BigUint::from(5u32) * scale).sqrt();
        let den = BigInt::one() << (m as usize);
        let s_lo = Rational::new(BigInt::from(s.clone()), den.clone());
        let s_hi = Rational::new(BigInt::from(s) + BigInt::one(), den);
        let x1 = &self.a + &self.b * &s_lo;
        let x2 = &self.a + &self.b * &s_hi;
        if x1 <= x2 {
            (x1, x2)
        } else {
            (x2, x1)
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty field element".into()));
        }
        let mut terms = Vec::new();
        let bytes = compact.as_bytes();
        let mut start = 0;
        for i in 1..bytes.len() {
            let c = bytes[i];
            let prev = bytes[i - 1];
            if (c == b'+' || c == b'-') && prev != b'e' && prev != b'E' && prev != b'*' && prev != b'/' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut a = <Rational as Zero>::zero();
        let mut b = <Rational as Zero>::zero();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(t) => (true, t),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            let mut value;
            let is_root;
            if let Some(coef) = body.strip_suffix("*sqrt5") {
                value = parse_rational(coef)?;
                is_root = true;
            } else if body == "sqrt5" {
                value = <Rational as One>::one();
                is_root = true;
            } else if let Some(den) = body.strip_prefix("sqrt5/") {
                value = parse_rational(&format!("1/{den}"))?;
                is_root = true;
            } else {
                value = parse_rational(body)?;
                is_root = false;
            }
            if neg {
                value = -value;
            }
            if is_root {
                b += value;
            } else {
                a += value;
            }
        }
        Ok(QuadExt { a, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// Rounds a nonzero rational to the nearest dyadic with `bits` significant bits.
fn round_to_bits(x: &Rational, bits: u32) -> Rational {
    if <Rational as Zero>::is_zero(x) {
        return x.clone();
    }
    let ax = x.abs();
    let mut e = ax.numer().bits() as i64 - ax.denom().bits() as i64;
    let pow2 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(BigInt::one() << (k as usize))
        } else {
            Rational::new(BigInt::one(), BigInt::one() << ((-k) as usize))
        }
    };
    while pow2(e) > ax {
        e -= 1;
    }
    while pow2(e + 1) <= ax {
        e += 1;
    }
    let shift = bits as i64 - 1 - e;
    let scaled = x * pow2(shift);
    let two = BigInt::from(2);
    let (q, r) = scaled.numer().div_mod_floor(scaled.denom());
    let twice_r = r * &two;
    let rounded = if twice_r >= *scaled.denom() { q + 1 } else { q };
    Rational::from_integer(rounded) * pow2(-shift)
}

/// A dyadic approximation produced by [`QuadExt::to_float`].
#[derive(Clone, Debug, PartialEq)]
pub struct FloatApprox {
    pub value: Rational,
    pub precision: u32,
}

impl FloatApprox {
    pub fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.value).unwrap_or(f64::NAN)
    }

    /// Guaranteed bound on |approximation - true value|.
    pub fn error_bound(&self) -> Rational {
        let p = Rational::from_integer(BigInt::one() << (self.precision as usize - 1));
        self.value.abs() * rat_int(2) / p
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a_zero = <Rational as Zero>::is_zero(&self.a);
        let b_zero = <Rational as Zero>::is_zero(&self.b);
        if b_zero {
            return write!(f, "{}", self.a);
        }
        let mut out = String::new();
        if !a_zero {
            out.push_str(&self.a.to_string());
        }
        let b = &self.b;
        let neg = b.is_negative();
        let mag = b.abs();
        if neg {
            out.push('-');
        } else if !a_zero {
            out.push('+');
        }
        if mag.is_one() {
            out.push_str("sqrt5");
        } else {
            out.push_str(&format!("{mag}*sqrt5"));
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadExt({self})")
    }
}

impl FromStr for QuadExt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        QuadExt::parse(s)
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sub_ref(other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, o: QuadExt) -> QuadExt {
        QuadExt { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, o: QuadExt) -> QuadExt {
        QuadExt { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, o: QuadExt) -> QuadExt {
        self.mul_ref(&o)
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    /// Panics on division by zero; use [`QuadExt::checked_div`] to get an error.
    fn div(self, o: QuadExt) -> QuadExt {
        assert!(!Scalar::is_zero(&o), "division by zero in Q(sqrt5)");
        self.div_ref(&o)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -self.a, b: -self.b }
    }
}

impl Scalar for QuadExt {
    const EXACT: bool = true;
    fn zero() -> Self {
        QuadExt::default()
    }
    fn one() -> Self {
        QuadExt::from_rational(<Rational as One>::one())
    }
    fn from_i64(v: i64) -> Self {
        QuadExt::from_rational(rat_int(v))
    }
    fn from_rational(r: &Rational) -> Self {
        QuadExt::from_rational(r.clone())
    }
    fn from_f64(_x: f64) -> Option<Self> {
        None
    }
    fn is_zero(&self) -> bool {
        <Rational as Zero>::is_zero(&self.a) && <Rational as Zero>::is_zero(&self.b)
    }
    fn sign(&self) -> i32 {
        self.signum()
    }
    fn to_f64(&self) -> f64 {
        let sa = Scalar::sign(&self.a);
        let sb = Scalar::sign(&self.b);
        if sb == 0 {
            return Scalar::to_f64(&self.a);
        }
        if sa == 0 || sa == sb {
            // no cancellation
            return Scalar::to_f64(&self.a) + Scalar::to_f64(&self.b) * 5f64.sqrt();
        }
        self.to_float(64).to_f64()
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn parse_text(s: &str) -> Result<Self> {
        QuadExt::parse(s)
    }
    fn cmp_s(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

/// Either an exact field element or a double.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(QuadExt),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => Scalar::to_f64(q),
            Number::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&QuadExt> {
        match self {
            Number::Exact(q) => Some(q),
            Number::Float(_) => None,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(q) => write!(f, "{q}"),
            Number::Float(x) => write!(f, "{x:?}"),
        }
    }
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
