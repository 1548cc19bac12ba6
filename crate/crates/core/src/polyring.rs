//! Exact multivariate polynomials over the rationals in `x, y, z`, Gröbner bases,
//! ideal arithmetic and the degree-bounded computation of `(J∩K)/(JK + (r))`.
//!
//! A fourth variable `w` exists only as the auxiliary variable eliminated when
//! intersecting ideals; user-facing polynomials never contain it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::laurent::{Cursor, LaurentError, Rational};

pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
const W: usize = 3;
const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];

/// Exponent vector `[x, y, z, w]`.
pub type Monomial = [u16; 4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("RELATION_NOT_CONTAINED: ambient relation {relation} is not in ideal {ideal}")]
    RelationNotContained { relation: String, ideal: String },
    #[error("NO_STABILIZATION: Tor1 dimension still grows at degree bound {bound} ({dims:?})")]
    NoStabilization { bound: u32, dims: Vec<usize>, generators: Vec<MultiPoly> },
    #[error(transparent)]
    Parse(#[from] LaurentError),
}

impl PolyError {
    pub fn code(&self) -> &'static str {
        match self {
            PolyError::RelationNotContained { .. } => "RELATION_NOT_CONTAINED",
            PolyError::NoStabilization { .. } => "NO_STABILIZATION",
            PolyError::Parse(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    /// Lexicographic with `w > x > z > y`.
    Lex,
    /// Graded reverse lexicographic with `x > z > y`.
    #[default]
    DegRevLex,
    /// `w` first, then degrevlex on `x, y, z`.
    Elimination,
}

type Key = [i32; 5];

impl MonomialOrder {
    fn key(self, m: &Monomial) -> Key {
        let [x, y, z, w] = m.map(i32::from);
        match self {
            MonomialOrder::Lex => [w, x, z, y, 0],
            MonomialOrder::DegRevLex => [x + y + z + w, -w, -y, -z, -x],
            MonomialOrder::Elimination => [w, x + y + z, -y, -z, -x],
        }
    }

    pub fn cmp(self, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

/// Printing order: degrevlex with x > y > z.
fn print_key(m: &Monomial) -> Key {
    let [x, y, z, w] = m.map(i32::from);
    [x + y + z + w, -w, -z, -y, -x]
}

fn divides(a: &Monomial, b: &Monomial) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn mono_div(a: &Monomial, b: &Monomial) -> Monomial {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn mono_lcm(a: &Monomial, b: &Monomial) -> Monomial {
    [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2]), a[3].max(b[3])]
}

fn degree(m: &Monomial) -> u32 {
    m.iter().map(|&e| u32::from(e)).sum()
}

/// Polynomial in `x, y, z` (and the internal `w`) with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, [0; 4])
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn var(i: usize) -> Self {
        let mut m = [0; 4];
        m[i] = 1;
        Self::term(Rational::one(), m)
    }

    pub fn x() -> Self {
        Self::var(X)
    }
    pub fn y() -> Self {
        Self::var(Y)
    }
    pub fn z() -> Self {
        Self::var(Z)
    }
    fn w() -> Self {
        Self::var(W)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(degree).max().unwrap_or(0)
    }

    fn has_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m[v] > 0)
    }

    pub fn leading(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul_monomial(&self, c: &Rational, m: &Monomial) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(k, x)| (mono_mul(k, m), x * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Scales so that the first printed term has coefficient 1.
    pub fn normalized(&self) -> Self {
        match self.terms.iter().max_by_key(|(m, _)| print_key(m)) {
            Some((_, c)) => self.scale(&c.recip()),
            None => Self::zero(),
        }
    }

    /// Divide by the leading coefficient under `order`.
    pub fn monic(&self, order: MonomialOrder) -> Self {
        match self.leading(order) {
            Some((_, c)) => self.scale(&c.recip()),
            None => Self::zero(),
        }
    }

    /// Evaluates at a rational point `(x, y, z)`.
    pub fn eval(&self, point: [&Rational; 3]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for i in 0..3 {
                for _ in 0..m[i] {
                    v *= point[i];
                }
            }
            acc += v;
        }
        acc
    }

    /// Replaces each variable that has `Some` image by that polynomial.
    pub fn substitute(&self, images: [Option<&MultiPoly>; 3]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = [0u16; 4];
            let mut factor = MultiPoly::one();
            for i in 0..3 {
                match images[i] {
                    Some(p) => factor = &factor * &p.pow(u32::from(m[i])),
                    None => kept[i] = m[i],
                }
            }
            kept[W] = m[W];
            out = &out + &factor.mul_monomial(c, &kept);
        }
        out
    }

    /// `-(...)` form used when the leading coefficient is negative, e.g. `-(y*z + x)`.
    pub fn display_sign_factored(&self) -> String {
        match self.terms.iter().max_by_key(|(m, _)| print_key(m)) {
            Some((_, c)) if c.is_negative() && self.num_terms() > 1 => format!("-({})", -self),
            _ => self.to_string(),
        }
    }

    fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_key(|(m, _)| std::cmp::Reverse(print_key(m)));
        v
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(VAR_NAMES[i].to_string()),
            _ => parts.push(format!("{}^{}", VAR_NAMES[i], e)),
        }
    }
    parts.join("*")
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Terms in descending degrevlex order (x > y > z), e.g. `x*y*z + x^2 + y^2 + z^2 - 4`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            let mono = fmt_monomial(m);
            if mono.is_empty() {
                f.write_str(&fmt_rational(&a))?;
            } else if a.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{}*{}", fmt_rational(&a), mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

fn parse_poly_term(cur: &mut Cursor) -> Result<MultiPoly, LaurentError> {
    let coeff = cur.unsigned_rational();
    let mut c = coeff.clone().unwrap_or_else(Rational::one);
    let mut m = [0u16; 4];
    let mut saw_factor = false;
    loop {
        let save = cur.pos;
        // `*` is optional between a coefficient and the monomial
        let star = cur.eat(b'*');
        if !star && saw_factor {
            break;
        }
        match cur.peek() {
            Some(ch @ (b'x' | b'y' | b'z')) => {
                cur.pos += 1;
                let idx = (ch - b'x') as usize;
                let mut e = 1i64;
                if cur.eat(b'^') {
                    e = cur.int().ok_or_else(|| cur.error("expected exponent"))?;
                    if !(0..=u16::MAX as i64).contains(&e) {
                        return Err(cur.error("exponent out of range"));
                    }
                }
                m[idx] += e as u16;
                saw_factor = true;
            }
            Some(b'0'..=b'9') if star => {
                let r = cur.unsigned_rational().ok_or_else(|| cur.error("expected number"))?;
                c *= r;
                saw_factor = true;
            }
            _ => {
                if star {
                    return Err(cur.error("expected variable x, y or z"));
                }
                cur.pos = save;
                break;
            }
        }
    }
    if coeff.is_none() && !saw_factor {
        return Err(cur.error("expected coefficient or variable"));
    }
    Ok(MultiPoly::term(c, m))
}

impl FromStr for MultiPoly {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, LaurentError> {
        let mut cur = Cursor::new(s);
        let mut acc = MultiPoly::zero();
        let mut neg = cur.eat(b'-');
        loop {
            let t = parse_poly_term(&mut cur)?;
            acc = &acc + &if neg { -t } else { t };
            match cur.peek() {
                Some(b'+') => {
                    cur.pos += 1;
                    neg = false;
                }
                Some(b'-') => {
                    cur.pos += 1;
                    neg = true;
                }
                None => return Ok(acc),
                Some(_) => return Err(cur.error("expected `+`, `-` or end of input")),
            }
        }
    }
}

pub fn poly(s: &str) -> MultiPoly {
    s.parse().expect("valid polynomial literal")
}

// ---------------------------------------------------------------------------
// Reduction and Buchberger

/// Working representation: terms keyed by order key, largest first when iterated in reverse.
struct Work {
    order: MonomialOrder,
    terms: BTreeMap<Key, (Monomial, Rational)>,
}

impl Work {
    fn new(p: &MultiPoly, order: MonomialOrder) -> Self {
        let terms = p.terms().map(|(m, c)| (order.key(m), (*m, c.clone()))).collect();
        Work { order, terms }
    }

    fn sub_scaled(&mut self, g: &MultiPoly, c: &Rational, shift: &Monomial) {
        for (m, gc) in g.terms() {
            let nm = mono_mul(m, shift);
            let k = self.order.key(&nm);
            let delta = gc * c;
            match self.terms.get_mut(&k) {
                Some(slot) => {
                    slot.1 -= delta;
                    if slot.1.is_zero() {
                        self.terms.remove(&k);
                    }
                }
                None => {
                    self.terms.insert(k, (nm, -delta));
                }
            }
        }
    }
}

/// Fully reduces `p` modulo the polynomials `basis` (assumed monic under `order`).
fn reduce_by(p: &MultiPoly, basis: &[MultiPoly], leads: &[Monomial], order: MonomialOrder) -> MultiPoly {
    let mut work = Work::new(p, order);
    let mut rem = MultiPoly::zero();
    while let Some((_, (m, c))) = work.terms.pop_last() {
        match leads.iter().position(|l| divides(l, &m)) {
            Some(i) => {
                let shift = mono_div(&m, &leads[i]);
                // the leading term cancels against (m, c), which was already popped
                let g = &basis[i];
                let mut tail = g.clone();
                tail.terms.remove(&leads[i]);
                work.sub_scaled(&tail, &c, &shift);
            }
            None => rem.add_term(m, c),
        }
    }
    rem
}

fn s_polynomial(f: &MultiPoly, lf: &Monomial, g: &MultiPoly, lg: &Monomial) -> MultiPoly {
    let l = mono_lcm(lf, lg);
    let a = f.mul_monomial(&Rational::one(), &mono_div(&l, lf));
    let b = g.mul_monomial(&Rational::one(), &mono_div(&l, lg));
    &a - &b
}

/// Reduced Gröbner basis, monic, sorted by increasing leading monomial.
pub fn groebner(generators: &[MultiPoly], order: MonomialOrder) -> Vec<MultiPoly> {
    let mut basis: Vec<MultiPoly> = Vec::new();
    let mut leads: Vec<Monomial> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    let push =
        |p: MultiPoly, basis: &mut Vec<MultiPoly>, leads: &mut Vec<Monomial>, pairs: &mut Vec<(usize, usize)>| {
            let p = p.monic(order);
            let lm = *p.leading(order).unwrap().0;
            let n = basis.len();
            for i in 0..n {
                pairs.push((i, n));
            }
            basis.push(p);
            leads.push(lm);
        };

    for g in generators {
        let r = reduce_by(g, &basis, &leads, order);
        if !r.is_zero() {
            push(r, &mut basis, &mut leads, &mut pairs);
        }
    }

    while !pairs.is_empty() {
        // normal selection strategy: smallest lcm first
        let (idx, _) = pairs
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let la = mono_lcm(&leads[a.1 .0], &leads[a.1 .1]);
                let lb = mono_lcm(&leads[b.1 .0], &leads[b.1 .1]);
                order.key(&la).cmp(&order.key(&lb))
            })
            .unwrap();
        let (i, j) = pairs.swap_remove(idx);
        let (li, lj) = (leads[i], leads[j]);
        let l = mono_lcm(&li, &lj);
        // product criterion
        if mono_mul(&li, &lj) == l {
            continue;
        }
        // chain criterion
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(&leads[k], &l)
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[i], &li, &basis[j], &lj);
        let r = reduce_by(&s, &basis, &leads, order);
        if !r.is_zero() {
            push(r, &mut basis, &mut leads, &mut pairs);
        }
    }

    interreduce(basis, order)
}

fn interreduce(basis: Vec<MultiPoly>, order: MonomialOrder) -> Vec<MultiPoly> {
    let mut minimal: Vec<MultiPoly> = Vec::new();
    let with_leads: Vec<(Monomial, MultiPoly)> = basis.into_iter().map(|p| (*p.leading(order).unwrap().0, p)).collect();
    for (idx, (lm, p)) in with_leads.iter().enumerate() {
        let redundant =
            with_leads.iter().enumerate().any(|(j, (lj, _))| j != idx && divides(lj, lm) && (lj != lm || j < idx));
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<MultiPoly> =
            minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        let leads: Vec<Monomial> = others.iter().map(|p| *p.leading(order).unwrap().0).collect();
        let lm = *minimal[i].leading(order).unwrap().0;
        let mut tail = minimal[i].clone();
        let lc = tail.terms.remove(&lm).unwrap();
        let tail = reduce_by(&tail, &others, &leads, order);
        let mut p = tail.scale(&lc.recip());
        p.add_term(lm, Rational::one());
        out.push(p);
    }
    out.sort_by(|a, b| order.cmp(a.leading(order).unwrap().0, b.leading(order).unwrap().0));
    out
}

// ---------------------------------------------------------------------------
// Ideals

/// Ideal given by generators; the degrevlex Gröbner basis is computed once on demand.
#[derive(Clone, Default)]
pub struct Ideal {
    generators: Vec<MultiPoly>,
    groebner: OnceLock<Vec<MultiPoly>>,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{self}")
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", gens.join(", "))
    }
}

impl Ideal {
    pub fn new(generators: Vec<MultiPoly>) -> Self {
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ideal { generators, groebner: OnceLock::new() }
    }

    pub fn from_strs(gens: &[&str]) -> Self {
        Self::new(gens.iter().map(|s| poly(s)).collect())
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    /// Reduced degrevlex Gröbner basis (cached).
    pub fn groebner_basis(&self) -> &[MultiPoly] {
        self.groebner.get_or_init(|| groebner(&self.generators, MonomialOrder::DegRevLex))
    }

    pub fn groebner_basis_with(&self, order: MonomialOrder) -> Vec<MultiPoly> {
        if order == MonomialOrder::DegRevLex {
            return self.groebner_basis().to_vec();
        }
        groebner(&self.generators, order)
    }

    pub fn normal_form(&self, p: &MultiPoly) -> MultiPoly {
        self.normal_form_with(p, MonomialOrder::DegRevLex)
    }

    pub fn normal_form_with(&self, p: &MultiPoly, order: MonomialOrder) -> MultiPoly {
        let gb = if order == MonomialOrder::DegRevLex {
            self.groebner_basis().to_vec()
        } else {
            groebner(&self.generators, order)
        };
        let leads: Vec<Monomial> = gb.iter().map(|g| *g.leading(order).unwrap().0).collect();
        reduce_by(p, &gb, &leads, order)
    }

    pub fn contains(&self, p: &MultiPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    pub fn same_ideal(&self, other: &Ideal) -> bool {
        self.contains_ideal(other) && other.contains_ideal(self)
    }

    pub fn is_unit(&self) -> bool {
        self.contains(&MultiPoly::one())
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        Ideal::new(self.generators.iter().chain(&other.generators).cloned().collect())
    }

    pub fn with(&self, extra: &MultiPoly) -> Ideal {
        let mut g = self.generators.clone();
        g.push(extra.clone());
        Ideal::new(g)
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        let mut g = Vec::new();
        for a in &self.generators {
            for b in &other.generators {
                g.push(a * b);
            }
        }
        Ideal::new(g)
    }

    /// `I ∩ J = (w I + (1-w) J) ∩ Q[x,y,z]`.
    pub fn intersection(&self, other: &Ideal) -> Ideal {
        if self.generators.is_empty() || other.generators.is_empty() {
            return Ideal::new(vec![]);
        }
        let w = MultiPoly::w();
        let one_minus_w = &MultiPoly::one() - &w;
        let mut gens: Vec<MultiPoly> = self.generators.iter().map(|g| &w * g).collect();
        gens.extend(other.generators.iter().map(|g| &one_minus_w * g));
        let gb = groebner(&gens, MonomialOrder::Elimination);
        Ideal::new(gb.into_iter().filter(|g| !g.has_var(W)).collect())
    }

    fn leading_monomials(&self) -> Vec<Monomial> {
        self.groebner_basis().iter().map(|g| *g.leading(MonomialOrder::DegRevLex).unwrap().0).collect()
    }

    /// Whether `Q[x,y,z]/I` is finite-dimensional (a pure power of each variable leads).
    pub fn is_zero_dimensional(&self) -> bool {
        let leads = self.leading_monomials();
        (0..3).all(|v| leads.iter().any(|m| m[v] > 0 && (0..3).all(|u| u == v || m[u] == 0)))
    }

    /// Number of standard monomials of total degree `<= bound`.
    pub fn standard_count(&self, bound: u32) -> usize {
        let leads = self.leading_monomials();
        monomials_up_to(bound).filter(|m| !leads.iter().any(|l| divides(l, m))).count()
    }

    pub fn quotient_basis(&self, degree_bound: u32) -> QuotientBasis {
        let leads = self.leading_monomials();
        let finite = self.is_zero_dimensional();
        let bound = if finite {
            // every standard monomial has each exponent below the pure-power leads
            leads.iter().map(degree).sum::<u32>().max(1) * 3
        } else {
            degree_bound
        };
        let mut monomials: Vec<Monomial> =
            monomials_up_to(bound).filter(|m| !leads.iter().any(|l| divides(l, m))).collect();
        monomials.sort_by(|a, b| MonomialOrder::DegRevLex.cmp(a, b));
        QuotientBasis { monomials, finite, degree_bound }
    }
}

fn monomials_up_to(bound: u32) -> impl Iterator<Item = Monomial> {
    let b = bound as u16;
    (0..=b).flat_map(move |d| (0..=d).flat_map(move |i| (0..=d - i).map(move |j| [i, j, d - i - j, 0])))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientBasis {
    pub monomials: Vec<Monomial>,
    pub finite: bool,
    pub degree_bound: u32,
}

impl QuotientBasis {
    pub fn dimension(&self) -> Option<usize> {
        self.finite.then_some(self.monomials.len())
    }

    pub fn as_polys(&self) -> Vec<MultiPoly> {
        self.monomials.iter().map(|m| MultiPoly::term(Rational::one(), *m)).collect()
    }
}

// ---------------------------------------------------------------------------
// Linear algebra on normal forms

/// Row-echelon accumulator for vectors represented as polynomials.
#[derive(Default)]
struct Echelon {
    /// (pivot monomial, row, combination of accepted inputs that produces the row)
    rows: Vec<(Monomial, MultiPoly, Vec<Rational>)>,
    accepted: usize,
}

impl Echelon {
    /// Reduces `v` against the rows; returns the residue and the combination used.
    fn reduce(&self, v: &MultiPoly) -> (MultiPoly, Vec<Rational>) {
        let mut v = v.clone();
        let mut combo = vec![Rational::zero(); self.accepted];
        for (piv, row, rc) in &self.rows {
            if let Some(c) = v.terms.get(piv).cloned() {
                v = &v - &row.scale(&c);
                for (k, x) in rc.iter().enumerate() {
                    combo[k] -= x * &c;
                }
            }
        }
        (v, combo)
    }

    /// Adds `v` if independent; returns whether it was added.
    fn insert(&mut self, v: &MultiPoly) -> bool {
        let (r, mut combo) = self.reduce(v);
        let Some((piv, c)) = r.leading(MonomialOrder::DegRevLex).map(|(m, c)| (*m, c.clone())) else {
            return false;
        };
        let inv = c.recip();
        for x in combo.iter_mut() {
            *x *= &inv;
        }
        for (_, _, rc) in self.rows.iter_mut() {
            rc.push(Rational::zero());
        }
        combo.push(inv.clone());
        let row = r.scale(&inv);
        // keep rows fully reduced on the new pivot
        for (_, other, oc) in self.rows.iter_mut() {
            if let Some(f) = other.terms.get(&piv).cloned() {
                *other = &*other - &row.scale(&f);
                for (k, x) in combo.iter().enumerate() {
                    oc[k] -= x * &f;
                }
            }
        }
        self.rows.push((piv, row, combo));
        self.accepted += 1;
        true
    }

    /// Coordinates of `v` in terms of accepted inputs, if it lies in their span.
    fn coordinates(&self, v: &MultiPoly) -> Option<Vec<Rational>> {
        let (r, combo) = self.reduce(v);
        r.is_zero().then(|| combo.into_iter().map(|c| -c).collect())
    }
}

/// Coefficients `c` with `target ≡ Σ c_i spanning_i` modulo `ideal`, if any.
pub fn span_coordinates(ideal: &Ideal, target: &MultiPoly, spanning: &[MultiPoly]) -> Option<Vec<Rational>> {
    let mut ech = Echelon::default();
    let mut accepted = Vec::new();
    for (i, s) in spanning.iter().enumerate() {
        if ech.insert(&ideal.normal_form(s)) {
            accepted.push(i);
        }
    }
    let coords = ech.coordinates(&ideal.normal_form(target))?;
    let mut out = vec![Rational::zero(); spanning.len()];
    for (c, i) in coords.into_iter().zip(accepted) {
        out[i] = c;
    }
    Some(out)
}

/// `(J∩K) / (JK + (relation))` as a vector space and as a module over `Q[x,y,z]/(J+K)`.
#[derive(Debug, Clone)]
pub struct Tor1Result {
    pub generators: Vec<MultiPoly>,
    pub vector_space_basis: Vec<MultiPoly>,
    pub relations: Vec<MultiPoly>,
    pub numerator: Ideal,
    pub denominator: Ideal,
    pub degree_bound: u32,
}

impl Tor1Result {
    pub fn dimension(&self) -> usize {
        self.vector_space_basis.len()
    }

    /// Coordinates of `p` in the vector-space basis modulo the denominator, if `p` is in the numerator.
    pub fn coordinates(&self, p: &MultiPoly) -> Option<Vec<Rational>> {
        if !self.numerator.contains(p) {
            return None;
        }
        let mut ech = Echelon::default();
        for b in &self.vector_space_basis {
            ech.insert(&self.denominator.normal_form(b));
        }
        ech.coordinates(&self.denominator.normal_form(p))
    }
}

/// The pieces of a Tor₁ computation that do not depend on a degree bound.
pub struct Tor1Setup {
    pub numerator: Ideal,
    pub denominator: Ideal,
    pub acting: Ideal,
}

pub fn tor1_setup(j: &Ideal, k: &Ideal, relation: &MultiPoly) -> Result<Tor1Setup, PolyError> {
    for ideal in [j, k] {
        if !ideal.contains(relation) {
            return Err(PolyError::RelationNotContained { relation: relation.to_string(), ideal: ideal.to_string() });
        }
    }
    let numerator = j.intersection(k);
    let denominator = j.product(k).with(relation);
    let acting = j.sum(k).with(relation);
    // warm the caches
    numerator.groebner_basis();
    denominator.groebner_basis();
    Ok(Tor1Setup { numerator, denominator, acting })
}

impl Tor1Setup {
    /// `dim (I ∩ R≤D) / (N ∩ R≤D)`.
    pub fn dimension_at(&self, bound: u32) -> usize {
        self.denominator.standard_count(bound) - self.numerator.standard_count(bound)
    }

    /// Minimal generators of the numerator modulo the denominator, as a module.
    pub fn module_generators(&self) -> Vec<MultiPoly> {
        let mut candidates: Vec<MultiPoly> =
            self.numerator.groebner_basis().iter().filter(|g| !self.denominator.contains(g)).cloned().collect();
        candidates.sort_by_key(|g| (g.total_degree(), g.num_terms()));
        let mut kept: Vec<MultiPoly> = Vec::new();
        for g in candidates {
            let span = Ideal::new(self.denominator.generators().iter().chain(&kept).cloned().collect());
            if !span.contains(&g) {
                kept.push(g.normalized());
            }
        }
        // drop any generator made redundant by later ones
        let mut i = 0;
        while i < kept.len() {
            let others: Vec<MultiPoly> = self
                .denominator
                .generators()
                .iter()
                .cloned()
                .chain(kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()))
                .collect();
            if Ideal::new(others).contains(&kept[i]) {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        kept
    }
}

/// Computes `(J∩K)/(JK + (relation))` by degree-bounded linear algebra.
pub fn tor1_module(j: &Ideal, k: &Ideal, relation: &MultiPoly, degree_bound: u32) -> Result<Tor1Result, PolyError> {
    let setup = tor1_setup(j, k, relation)?;
    tor1_from_setup(&setup, degree_bound)
}

pub fn tor1_from_setup(setup: &Tor1Setup, degree_bound: u32) -> Result<Tor1Result, PolyError> {
    let dims: Vec<usize> = (0..=degree_bound + 1).map(|d| setup.dimension_at(d)).collect();
    let dim = dims[degree_bound as usize];
    if dims[degree_bound as usize + 1] != dim {
        return Err(PolyError::NoStabilization { bound: degree_bound, dims, generators: setup.module_generators() });
    }
    let generators = setup.module_generators();

    // candidates b * g, b running over standard monomials of the acting ring
    let acting_basis = setup.acting.quotient_basis(degree_bound);
    let mut candidates: Vec<MultiPoly> = Vec::new();
    for g in &generators {
        for b in acting_basis.as_polys() {
            candidates.push(&b * g);
        }
    }
    for g in &generators {
        for m in monomials_up_to(degree_bound) {
            candidates.push(g.mul_monomial(&Rational::one(), &m));
        }
    }
    let mut ech = Echelon::default();
    let mut basis = Vec::new();
    for c in candidates {
        if basis.len() == dim {
            break;
        }
        if c.total_degree() > degree_bound + 1 {
            continue;
        }
        if ech.insert(&setup.denominator.normal_form(&c)) {
            basis.push(c);
        }
    }

    let mut relations = Vec::new();
    let mut seen = BTreeSet::new();
    for b in &basis {
        for v in [X, Y, Z] {
            let vb = &MultiPoly::var(v) * b;
            let Some(coords) = ech.coordinates(&setup.denominator.normal_form(&vb)) else {
                continue;
            };
            let mut rel = vb.clone();
            for (c, bb) in coords.iter().zip(&basis) {
                rel = &rel - &bb.scale(c);
            }
            if rel.is_zero() || !setup.denominator.contains(&rel) {
                continue;
            }
            let rel = rel.normalized();
            if seen.insert(rel.to_string()) {
                relations.push(rel);
            }
        }
    }

    Ok(Tor1Result {
        generators,
        vector_space_basis: basis,
        relations,
        numerator: setup.numerator.clone(),
        denominator: setup.denominator.clone(),
        degree_bound,
    })
}
