//! Skeins on the torus as formal words of curves, SL₂ trace polynomials and the
//! specialization to the character ring at `t = -1`.
//!
//! Words are free: `[ℓ, ℓm]` and `[ℓm, ℓ]` are different elements. Nothing here
//! multiplies in the torus skein algebra.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use num_traits::Zero;

use crate::laurent::{parse_laurent_monomial, parse_laurent_sum, Cursor, LaurentError, LaurentPoly};
use crate::polyring::MultiPoly;

/// Unoriented curve `(a, b)`: `a` is the longitude exponent, `b` the meridian exponent.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusCurve {
    a: i64,
    b: i64,
}

impl TorusCurve {
    pub const L: TorusCurve = TorusCurve { a: 1, b: 0 };
    pub const M: TorusCurve = TorusCurve { a: 0, b: 1 };
    pub const LM: TorusCurve = TorusCurve { a: 1, b: 1 };

    /// Stores the curve with its first nonzero coordinate positive.
    pub fn new(a: i64, b: i64) -> Self {
        if a < 0 || (a == 0 && b < 0) {
            TorusCurve { a: -a, b: -b }
        } else {
            TorusCurve { a, b }
        }
    }

    pub fn a(self) -> i64 {
        self.a
    }

    pub fn b(self) -> i64 {
        self.b
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_primitive(self) -> bool {
        self.a.gcd(&self.b) == 1
    }
}

impl fmt::Display for TorusCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (1, 0) => f.write_str("L"),
            (0, 1) => f.write_str("M"),
            (1, 1) => f.write_str("LM"),
            (a, b) => write!(f, "({a},{b})"),
        }
    }
}

impl fmt::Debug for TorusCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Stacking word; the first curve is the innermost layer.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceWord(pub Vec<TorusCurve>);

impl SurfaceWord {
    pub fn empty() -> Self {
        SurfaceWord(Vec::new())
    }

    pub fn single(c: TorusCurve) -> Self {
        SurfaceWord(vec![c])
    }

    pub fn curves(&self) -> &[TorusCurve] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn concat(u: &SurfaceWord, v: &SurfaceWord) -> SurfaceWord {
    SurfaceWord(u.0.iter().chain(&v.0).copied().collect())
}

impl fmt::Display for SurfaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl fmt::Debug for SurfaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Formal Laurent-linear combination of words.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SurfaceElement {
    terms: BTreeMap<SurfaceWord, LaurentPoly>,
}

impl SurfaceElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: SurfaceWord) -> Self {
        Self::term(LaurentPoly::one(), w)
    }

    pub fn term(c: LaurentPoly, w: SurfaceWord) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (LaurentPoly, SurfaceWord)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (c, w) in it {
            e.add_term(w, c);
        }
        e
    }

    pub fn add_term(&mut self, w: SurfaceWord, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_insert_with(LaurentPoly::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SurfaceWord, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, x)| (x * c, w.clone())))
    }

    pub fn add(&self, other: &SurfaceElement) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for SurfaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let (neg, coeff) = c.signed_coefficient();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (coeff.is_empty(), w.is_empty()) {
                (true, true) => f.write_str("1")?,
                (true, false) => write!(f, "{w}")?,
                (false, true) => f.write_str(&coeff)?,
                (false, false) => write!(f, "{coeff}*{w}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SurfaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurfaceElement({self})")
    }
}

const EXPECTED_ATOM: &str = "expected one of `L`, `M`, `LM`, `x`, `y`, `z`, `(a,b)`";

fn parse_int_pair(cur: &mut Cursor) -> Option<(i64, i64)> {
    let save = cur.pos;
    let res = (|| {
        if !cur.eat(b'(') {
            return None;
        }
        let a = cur.int()?;
        if !cur.eat(b',') {
            return None;
        }
        let b = cur.int()?;
        cur.eat(b')').then_some((a, b))
    })();
    if res.is_none() {
        cur.pos = save;
    }
    res
}

fn parse_atom(cur: &mut Cursor) -> Result<TorusCurve, LaurentError> {
    if let Some((a, b)) = parse_int_pair(cur) {
        return Ok(TorusCurve::new(a, b));
    }
    match cur.peek() {
        Some(b'L') => {
            cur.pos += 1;
            if cur.peek_raw() == Some(b'M') {
                cur.pos += 1;
                return Ok(TorusCurve::LM);
            }
            Ok(TorusCurve::L)
        }
        Some(b'M') => {
            cur.pos += 1;
            Ok(TorusCurve::M)
        }
        Some(b'x') => {
            cur.pos += 1;
            Ok(TorusCurve::M)
        }
        Some(b'y') => {
            cur.pos += 1;
            Ok(TorusCurve::L)
        }
        Some(b'z') => {
            cur.pos += 1;
            Ok(TorusCurve::LM)
        }
        _ => Err(cur.error(EXPECTED_ATOM)),
    }
}

fn parse_word(cur: &mut Cursor) -> Result<SurfaceWord, LaurentError> {
    let mut w = vec![parse_atom(cur)?];
    while cur.eat(b'.') {
        w.push(parse_atom(cur)?);
    }
    Ok(SurfaceWord(w))
}

fn starts_atom(cur: &mut Cursor) -> bool {
    let save = cur.pos;
    let pair = parse_int_pair(cur).is_some();
    cur.pos = save;
    pair || matches!(cur.peek(), Some(b'L' | b'M' | b'x' | b'y' | b'z'))
}

fn parse_term(cur: &mut Cursor) -> Result<(LaurentPoly, SurfaceWord), LaurentError> {
    if starts_atom(cur) {
        return Ok((LaurentPoly::one(), parse_word(cur)?));
    }
    let coeff = if cur.peek() == Some(b'(') {
        cur.pos += 1;
        let c = parse_laurent_sum(cur)?;
        if !cur.eat(b')') {
            return Err(cur.error("expected `)`"));
        }
        c
    } else {
        parse_laurent_monomial(cur).map_err(|_| cur.error(format!("{EXPECTED_ATOM}, or a coefficient")))?
    };
    if cur.eat(b'*') {
        Ok((coeff, parse_word(cur)?))
    } else {
        Ok((coeff, SurfaceWord::empty()))
    }
}

impl FromStr for SurfaceElement {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, LaurentError> {
        let mut cur = Cursor::new(s);
        let mut out = SurfaceElement::zero();
        let mut neg = cur.eat(b'-');
        loop {
            let (c, w) = parse_term(&mut cur)?;
            out.add_term(w, if neg { -c } else { c });
            match cur.peek() {
                Some(b'+') => {
                    cur.pos += 1;
                    neg = false;
                }
                Some(b'-') => {
                    cur.pos += 1;
                    neg = true;
                }
                None => return Ok(out),
                Some(_) => return Err(cur.error("expected `+`, `-` or end of input")),
            }
        }
    }
}

pub fn parse_element(src: &str) -> Result<SurfaceElement, LaurentError> {
    src.parse()
}

pub fn torus_relation() -> MultiPoly {
    crate::polyring::poly("x^2 + y^2 + z^2 + x*y*z - 4")
}

fn trace_cache() -> &'static RwLock<HashMap<TorusCurve, MultiPoly>> {
    static CACHE: OnceLock<RwLock<HashMap<TorusCurve, MultiPoly>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn sub(u: TorusCurve, v: TorusCurve) -> TorusCurve {
    TorusCurve::new(u.a - v.a, u.b - v.b)
}

/// `T(u+v) = -T(u) T(v) - T(u-v)`.
fn combine(u: TorusCurve, v: TorusCurve) -> MultiPoly {
    -(&(&trace_poly(u) * &trace_poly(v)) + &trace_poly(sub(u, v)))
}

fn compute_trace(c: TorusCurve) -> MultiPoly {
    let (a, b) = (c.a, c.b);
    match (a, b) {
        (0, 0) => return MultiPoly::from_int(-2),
        (0, 1) => return MultiPoly::x(),
        (1, 0) => return MultiPoly::y(),
        (1, 1) => return MultiPoly::z(),
        _ => {}
    }
    let n = a.gcd(&b);
    if n > 1 {
        // T(nv) = -T(v) T((n-1)v) - T((n-2)v)
        let v = TorusCurve::new(a / n, b / n);
        let prev = TorusCurve::new(v.a * (n - 1), v.b * (n - 1));
        let prev2 = TorusCurve::new(v.a * (n - 2), v.b * (n - 2));
        return -(&(&trace_poly(v) * &trace_poly(prev)) + &trace_poly(prev2));
    }
    if a == 1 {
        // (1,b) = (1,b∓1) + (0,±1)
        let step = TorusCurve { a: 0, b: b.signum() };
        let u = TorusCurve { a: 1, b: b - b.signum() };
        return combine(u, step);
    }
    // Farey parents: (a,b) = (c,d) + (a-c, b-d) with a·d - b·c = 1, 0 < c < a
    let inv = b.extended_gcd(&a).x;
    let c0 = (-inv).rem_euclid(a);
    let d0 = (1 + b * c0) / a;
    combine(TorusCurve { a: c0, b: d0 }, TorusCurve { a: a - c0, b: b - d0 })
}

/// `-tr` of the curve as a polynomial in `x = T(0,1)`, `y = T(1,0)`, `z = T(1,1)`.
pub fn trace_poly(c: TorusCurve) -> MultiPoly {
    let c = TorusCurve::new(c.a, c.b);
    if let Some(p) = trace_cache().read().unwrap().get(&c) {
        return p.clone();
    }
    let p = compute_trace(c);
    trace_cache().write().unwrap().insert(c, p.clone());
    p
}

pub fn word_trace(w: &SurfaceWord) -> MultiPoly {
    w.0.iter().fold(MultiPoly::one(), |acc, c| &acc * &trace_poly(*c))
}

/// Each word to the product of its traces, each coefficient evaluated at `t = -1`.
pub fn specialize(e: &SurfaceElement) -> MultiPoly {
    let mut out = MultiPoly::zero();
    for (w, c) in e.terms() {
        let v = c.eval_at_minus_one();
        if !v.is_zero() {
            out = &out + &word_trace(w).scale(&v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;
    use crate::polyring::{poly, Ideal};
    use proptest::prelude::*;

    fn el(s: &str) -> SurfaceElement {
        s.parse().unwrap()
    }

    #[test]
    fn concat_examples() {
        let l = SurfaceWord::single(TorusCurve::L);
        let lm = SurfaceWord::single(TorusCurve::LM);
        let m = SurfaceWord::single(TorusCurve::M);
        assert_eq!(concat(&l, &lm).to_string(), "L.LM");
        assert_eq!(concat(&SurfaceWord::empty(), &l), l);
        assert_eq!(concat(&concat(&l, &m), &lm), concat(&l, &concat(&m, &lm)));
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace_poly(TorusCurve::new(1, 1)), poly("z"));
        assert_eq!(trace_poly(TorusCurve::new(2, 1)), poly("-y*z - x"));
        assert_eq!(trace_poly(TorusCurve::new(1, -1)), poly("-x*y - z"));
        assert_eq!(trace_poly(TorusCurve::new(2, 0)), poly("-y^2 + 2"));
        assert_eq!(trace_poly(TorusCurve::new(-2, -1)), trace_poly(TorusCurve::new(2, 1)));
    }

    #[test]
    fn specialize_examples() {
        assert_eq!(specialize(&el("L - LM")), poly("y - z"));
        let beta = el("(-1/2*t^-3 - 1/2*t^-5)*L.L - 1/2*L.LM - 1/2*LM.L");
        assert_eq!(specialize(&beta), poly("y^2 - y*z"));
        assert!(specialize(&SurfaceElement::zero()).is_zero());
    }

    #[test]
    fn torus_relation_examples() {
        let m2 = rat(-2, 1);
        assert!(torus_relation().eval([&m2, &m2, &m2]).is_zero());
        let u = MultiPoly::y();
        let s = torus_relation().substitute([Some(&MultiPoly::from_int(-2)), Some(&u), Some(&u)]);
        assert!(s.is_zero());
    }

    #[test]
    fn parse_examples() {
        let e = el("L - LM");
        assert_eq!(e.terms().count(), 2);
        assert_eq!(e.to_string(), "L - LM");
        assert_eq!(el("y - t^3*z"), el("L - t^3*LM"));
        assert_eq!(el("x.(2,1)"), SurfaceElement::word(SurfaceWord(vec![TorusCurve::M, TorusCurve::new(2, 1)])));
        assert_eq!(el("(-1,-1)"), el("LM"));
        assert_eq!(el("3"), SurfaceElement::term(LaurentPoly::from_int(3), SurfaceWord::empty()));
        match "L +".parse::<SurfaceElement>() {
            Err(LaurentError::Parse { position, message }) => {
                assert_eq!(position, 3);
                assert!(message.contains("`L`"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    fn arb_curve() -> impl Strategy<Value = TorusCurve> {
        (-5i64..=5, -5i64..=5).prop_map(|(a, b)| TorusCurve::new(a, b))
    }

    fn arb_element() -> impl Strategy<Value = SurfaceElement> {
        let coeff = prop::collection::vec((-3i64..=3, -6i32..=6), 1..3)
            .prop_map(|ts| LaurentPoly::from_terms(ts.into_iter().map(|(c, e)| (e, rat(c, 2)))));
        let word = prop::collection::vec(arb_curve(), 0..3).prop_map(SurfaceWord);
        prop::collection::vec((coeff, word), 0..4).prop_map(SurfaceElement::from_terms)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_is_orientation_independent(a in -6i64..=6, b in -6i64..=6) {
            prop_assert_eq!(trace_poly(TorusCurve { a, b }), trace_poly(TorusCurve { a: -a, b: -b }));
        }

        #[test]
        fn trace_identity_holds_on_character_variety(u in arb_curve(), v in arb_curve()) {
            let rel = Ideal::new(vec![torus_relation()]);
            let lhs = &(&trace_poly(u) * &trace_poly(v))
                + &(&trace_poly(TorusCurve::new(u.a + v.a, u.b + v.b)) + &trace_poly(sub(u, v)));
            prop_assert!(rel.contains(&lhs));
        }

        #[test]
        fn specialize_is_multiplicative(u in prop::collection::vec(arb_curve(), 0..3),
                                        v in prop::collection::vec(arb_curve(), 0..3)) {
            let (u, v) = (SurfaceWord(u), SurfaceWord(v));
            let uv = SurfaceElement::word(concat(&u, &v));
            prop_assert_eq!(
                specialize(&uv),
                &specialize(&SurfaceElement::word(u)) * &specialize(&SurfaceElement::word(v))
            );
        }

        #[test]
        fn print_parse_round_trip(e in arb_element()) {
            let printed = e.to_string();
            prop_assert_eq!(el(&printed), e);
        }
    }
}
