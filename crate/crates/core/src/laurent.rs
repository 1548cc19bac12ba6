//! Laurent polynomials in `t` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("NOT_DIVISIBLE: (1+t)-valuation is {valuation}, requested {requested}")]
    NotDivisible { valuation: Valuation, requested: u32 },
    #[error("PARSE_ERROR at {position}: {message}")]
    Parse { position: usize, message: String },
}

impl LaurentError {
    pub fn code(&self) -> &'static str {
        match self {
            LaurentError::NotDivisible { .. } => "NOT_DIVISIBLE",
            LaurentError::Parse { .. } => "PARSE_ERROR",
        }
    }
}

/// `(1+t)`-adic valuation. The zero polynomial has valuation `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinity,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("INFINITY"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinity => s.serialize_str("INFINITY"),
        }
    }
}

/// A finitely supported map `exponent -> coefficient`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn t() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn monomial(c: Rational, exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { terms }
    }

    /// `c * t^exp` with an integer coefficient.
    pub fn mono(c: i64, exp: i32) -> Self {
        Self::monomial(Rational::from_integer(c.into()), exp)
    }

    /// `(1+t)^k`.
    pub fn one_plus_t_pow(k: u32) -> Self {
        let base = Self::one() + Self::t();
        (0..k).fold(Self::one(), |acc, _| &acc * &base)
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, Rational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i32) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// Single term `c t^k`, if this polynomial is one.
    pub fn as_monomial(&self) -> Option<(i32, &Rational)> {
        if self.terms.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, exp: i32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval_at_minus_one(&self) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| if e.rem_euclid(2) == 0 { c.clone() } else { -c })
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Divide by `(1+t)` assuming `t = -1` is a root.
    fn div_one_plus_t_once(&self) -> Option<Self> {
        let lo = self.min_exp()?;
        let hi = self.max_exp().unwrap();
        // synthetic division of the ordinary polynomial t^{-lo} * self by (t + 1)
        let mut quotient = BTreeMap::new();
        let mut carry = Rational::zero();
        for e in (lo + 1..=hi).rev() {
            carry = self.coeff(e) - carry;
            // coefficient of t^{e-1} in the quotient
            if !carry.is_zero() {
                quotient.insert(e - 1, carry.clone());
            }
        }
        let remainder = self.coeff(lo) - carry;
        if remainder.is_zero() {
            Some(LaurentPoly { terms: quotient })
        } else {
            None
        }
    }

    pub fn one_plus_t_valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinity;
        }
        let mut v = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.div_one_plus_t_once() {
            v += 1;
            cur = q;
        }
        Valuation::Finite(v)
    }

    /// `self / (1+t)^k`, exact.
    pub fn exact_div_one_plus_t(&self, k: u32) -> Result<Self, LaurentError> {
        let mut cur = self.clone();
        if cur.is_zero() {
            return Ok(cur);
        }
        for done in 0..k {
            cur = cur
                .div_one_plus_t_once()
                .ok_or(LaurentError::NotDivisible { valuation: Valuation::Finite(done), requested: k })?;
        }
        Ok(cur)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in rhs.terms() {
            self.add_term(e, c.clone());
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c);
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Renders `|c| t^e` without sign; `c` is assumed nonzero.
fn fmt_abs_term(e: i32, c: &Rational) -> String {
    let a = c.abs();
    let tpart = match e {
        0 => return fmt_rational(&a),
        1 => "t".to_string(),
        _ => format!("t^{e}"),
    };
    if a.is_one() {
        tpart
    } else {
        format!("{}*{}", fmt_rational(&a), tpart)
    }
}

impl LaurentPoly {
    /// Splits off a leading sign for use as a coefficient in front of a symbol:
    /// monomials print bare (empty for `±1`), anything else in parentheses.
    pub fn signed_coefficient(&self) -> (bool, String) {
        match self.as_monomial() {
            Some((e, c)) if e == 0 && c.abs().is_one() => (c.is_negative(), String::new()),
            Some((e, c)) => (c.is_negative(), fmt_abs_term(e, c)),
            None if self.terms().next().is_some_and(|(_, c)| c.is_negative()) => (true, format!("({})", -self)),
            None => (false, format!("({self})")),
        }
    }
}

/// Ascending exponents, e.g. `-1/2*t^-5 - 1/2*t^-3`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            f.write_str(&fmt_abs_term(e, c))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Byte cursor shared by the text parsers in this crate.
pub(crate) struct Cursor<'a> {
    pub src: &'a [u8],
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src: src.as_bytes(), pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub fn peek_raw(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    pub fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Optional sign followed by decimal digits.
    pub fn int(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek_raw(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek_raw(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    /// Unsigned `p` or `p/q`.
    pub fn unsigned_rational(&mut self) -> Option<Rational> {
        self.skip_ws();
        if !matches!(self.peek_raw(), Some(b'0'..=b'9')) {
            return None;
        }
        let start = self.pos;
        while matches!(self.peek_raw(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let num: BigInt = std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()?;
        let save = self.pos;
        if self.eat(b'/') {
            self.skip_ws();
            let s = self.pos;
            while matches!(self.peek_raw(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
            if s == self.pos {
                self.pos = save;
                return Some(Rational::from_integer(num));
            }
            let den: BigInt = std::str::from_utf8(&self.src[s..self.pos]).ok()?.parse().ok()?;
            if den.is_zero() {
                return None;
            }
            return Some(Rational::new(num, den));
        }
        Some(Rational::from_integer(num))
    }

    pub fn error(&self, message: impl Into<String>) -> LaurentError {
        LaurentError::Parse { position: self.pos, message: message.into() }
    }
}

/// Unsigned Laurent monomial: `c`, `c*t^k`, `t^k`, `c*t`, `t`.
pub(crate) fn parse_laurent_monomial(cur: &mut Cursor) -> Result<LaurentPoly, LaurentError> {
    let coeff = cur.unsigned_rational();
    let has_coeff = coeff.is_some();
    let c = coeff.unwrap_or_else(Rational::one);
    let save = cur.pos;
    if has_coeff && !cur.eat(b'*') {
        return Ok(LaurentPoly::constant(c));
    }
    if cur.peek() == Some(b't') {
        cur.pos += 1;
        let mut e = 1i64;
        if cur.eat(b'^') {
            e = cur.int().ok_or_else(|| cur.error("expected integer exponent"))?;
        }
        let e = i32::try_from(e).map_err(|_| cur.error("exponent out of range"))?;
        return Ok(LaurentPoly::monomial(c, e));
    }
    if has_coeff {
        // `c*` followed by something that is not `t`: leave the `*` to the caller
        cur.pos = save;
        return Ok(LaurentPoly::constant(c));
    }
    Err(cur.error("expected rational coefficient or `t`"))
}

pub(crate) fn parse_laurent_sum(cur: &mut Cursor) -> Result<LaurentPoly, LaurentError> {
    let mut acc = LaurentPoly::zero();
    let mut negative = cur.eat(b'-');
    loop {
        let term = parse_laurent_monomial(cur)?;
        acc += &if negative { -term } else { term };
        match cur.peek() {
            Some(b'+') => {
                cur.pos += 1;
                negative = false;
            }
            Some(b'-') => {
                cur.pos += 1;
                negative = true;
            }
            _ => return Ok(acc),
        }
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, LaurentError> {
        let mut cur = Cursor::new(s);
        let p = parse_laurent_sum(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("unexpected trailing input"));
        }
        Ok(p)
    }
}
