//! Hochschild chains `B₁ ⊗ A^{⊗n} ⊗ B₀` of a genus-one splitting, their
//! boundary, and the `(1+t)`-valuation test for torsion.

mod solver;
mod verdict;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::annulus::SolidTorusElement;
use crate::heegaard::{push_action, HeegaardError, Side, SplittingSpec};
use crate::laurent::{rat, LaurentPoly, Valuation};
use crate::polyring::{poly, span_coordinates, MultiPoly, PolyError, Tor1Setup};
use crate::surface::{concat, SurfaceElement, SurfaceWord, TorusCurve};

pub use solver::solver_lift;
pub use verdict::{
    specialized_hh0, torsion_verdict, CycleReport, LiftMode, Tor1Summary, TorsionReport, Verdict, VerdictOptions,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HochschildError {
    #[error("DEGREE_ZERO: the boundary of a degree-0 chain is undefined")]
    DegreeZero,
    #[error("NOT_IN_SPAN: {0} is not a combination of the library classes")]
    NotInSpan(String),
    #[error("NO_LIFT_FOUND: no lift of {0} with boundary valuation at least 1 in the search window")]
    NoLiftFound(String),
    #[error(transparent)]
    Heegaard(#[from] HeegaardError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl HochschildError {
    pub fn code(&self) -> &'static str {
        match self {
            HochschildError::DegreeZero => "DEGREE_ZERO",
            HochschildError::NotInSpan(_) => "NOT_IN_SPAN",
            HochschildError::NoLiftFound(_) => "NO_LIFT_FOUND",
            HochschildError::Heegaard(e) => e.code(),
            HochschildError::Poly(e) => e.code(),
        }
    }
}

/// Basis tensor `z^i ⊗ a₁ ⊗ … ⊗ a_n ⊗ z^j`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tensor {
    pub b1: u32,
    pub words: Vec<SurfaceWord>,
    pub b0: u32,
}

impl Tensor {
    pub fn new(b1: u32, words: Vec<SurfaceWord>, b0: u32) -> Self {
        Tensor { b1, words, b0 }
    }
}

fn fmt_core(k: u32) -> String {
    match k {
        0 => "φ".to_string(),
        1 => "z".to_string(),
        _ => format!("z^{k}"),
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_core(self.b1))?;
        for w in &self.words {
            write!(f, " ⊗ [{w}]")?;
        }
        write!(f, " ⊗ {}", fmt_core(self.b0))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct HochschildChain {
    degree: usize,
    terms: BTreeMap<Tensor, LaurentPoly>,
}

impl HochschildChain {
    pub fn zero(degree: usize) -> Self {
        HochschildChain { degree, terms: BTreeMap::new() }
    }

    /// `φ ⊗ e ⊗ φ`.
    pub fn degree_one(e: &SurfaceElement) -> Self {
        let mut c = Self::zero(1);
        for (w, k) in e.terms() {
            c.add_term(Tensor::new(0, vec![w.clone()], 0), k.clone());
        }
        c
    }

    /// Multilinear expansion of `b₁ ⊗ a₁ ⊗ … ⊗ a_n ⊗ b₀`.
    pub fn from_tensor(b1: &SolidTorusElement, middle: &[SurfaceElement], b0: &SolidTorusElement) -> Self {
        let mut partial: Vec<(Vec<SurfaceWord>, LaurentPoly)> = vec![(Vec::new(), LaurentPoly::one())];
        for a in middle {
            let mut next = Vec::new();
            for (ws, c) in &partial {
                for (w, k) in a.terms() {
                    let mut ws = ws.clone();
                    ws.push(w.clone());
                    next.push((ws, c * k));
                }
            }
            partial = next;
        }
        let mut out = Self::zero(middle.len());
        for (i, c1) in b1.terms() {
            for (j, c0) in b0.terms() {
                for (ws, c) in &partial {
                    out.add_term(Tensor::new(i, ws.clone(), j), &(c1 * c0) * c);
                }
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: Tensor, c: LaurentPoly) {
        assert_eq!(t.words.len(), self.degree, "tensor of the wrong degree");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(t.clone()).or_insert_with(LaurentPoly::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tensor, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &Tensor) -> LaurentPoly {
        self.terms.get(t).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.degree);
        for (t, k) in &self.terms {
            out.add_term(t.clone(), k * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding chains of different degree");
        let mut out = self.clone();
        for (t, k) in &other.terms {
            out.add_term(t.clone(), k.clone());
        }
        out
    }

    pub fn valuation(&self) -> Valuation {
        self.terms.values().map(|c| c.one_plus_t_valuation()).min().unwrap_or(Valuation::Infinity)
    }

    /// For a degree-1 chain with both ends `φ`, the middle factor.
    pub fn middle_factor(&self) -> Option<SurfaceElement> {
        if self.degree != 1 {
            return None;
        }
        let mut e = SurfaceElement::zero();
        for (t, c) in &self.terms {
            if t.b1 != 0 || t.b0 != 0 {
                return None;
            }
            e.add_term(t.words[0].clone(), c.clone());
        }
        Some(e)
    }
}

impl fmt::Display for HochschildChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let (neg, coeff) = c.signed_coefficient();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if coeff.is_empty() {
                write!(f, "{t}")?;
            } else {
                write!(f, "{coeff}*{t}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HochschildChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HochschildChain[{}]({self})", self.degree)
    }
}

/// The Hochschild boundary; `H₁` acts on the left factor, `H₀` on the right.
pub fn boundary(c: &HochschildChain, split: &SplittingSpec) -> Result<HochschildChain, HochschildError> {
    let n = c.degree;
    if n == 0 {
        return Err(HochschildError::DegreeZero);
    }
    let g = &split.gluing;
    let mut out = HochschildChain::zero(n - 1);
    for (t, coeff) in &c.terms {
        let first =
            push_action(g, Side::H1, &SurfaceElement::word(t.words[0].clone()), &SolidTorusElement::z_pow(t.b1))?;
        for (k, v) in first.terms() {
            out.add_term(Tensor::new(k, t.words[1..].to_vec(), t.b0), coeff * v);
        }
        for m in 1..n {
            let mut words = t.words[..m - 1].to_vec();
            words.push(concat(&t.words[m - 1], &t.words[m]));
            words.extend_from_slice(&t.words[m + 1..]);
            let sign = if m.is_multiple_of(2) { coeff.clone() } else { -coeff };
            out.add_term(Tensor::new(t.b1, words, t.b0), sign);
        }
        let last =
            push_action(g, Side::H0, &SurfaceElement::word(t.words[n - 1].clone()), &SolidTorusElement::z_pow(t.b0))?;
        let sign = if n.is_multiple_of(2) { coeff.clone() } else { -coeff };
        for (k, v) in last.terms() {
            out.add_term(Tensor::new(t.b1, t.words[..n - 1].to_vec(), k), &sign * v);
        }
    }
    Ok(out)
}

/// `(1+t)`-valuation of the boundary; `Infinity` iff it vanishes.
pub fn cycle_valuation(c: &HochschildChain, split: &SplittingSpec) -> Result<Valuation, HochschildError> {
    Ok(boundary(c, split)?.valuation())
}

/// A chain together with the power of `(1+t)` it has been multiplied by.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationLevel {
    pub chain: HochschildChain,
    pub shift: u32,
}

impl FiltrationLevel {
    pub fn new(chain: HochschildChain) -> Self {
        FiltrationLevel { chain, shift: 0 }
    }
}

pub fn filtration_shift(c: &FiltrationLevel, k: u32) -> FiltrationLevel {
    FiltrationLevel { chain: c.chain.scale(&LaurentPoly::one_plus_t_pow(k)), shift: c.shift + k }
}

/// `y − z` and `y(y − z)` with their known lifts.
pub fn library_classes() -> Vec<(MultiPoly, SurfaceElement)> {
    let l = SurfaceWord::single(TorusCurve::L);
    let lm = SurfaceWord::single(TorusCurve::LM);
    let ll = SurfaceWord(vec![TorusCurve::L, TorusCurve::L]);
    let l_lm = SurfaceWord(vec![TorusCurve::L, TorusCurve::LM]);
    let lm_l = SurfaceWord(vec![TorusCurve::LM, TorusCurve::L]);
    let half = LaurentPoly::constant(rat(-1, 2));
    let alpha = SurfaceElement::from_terms([(LaurentPoly::one(), l), (LaurentPoly::mono(1, 3), lm)]);
    let p = LaurentPoly::monomial(rat(-1, 2), -3) + LaurentPoly::monomial(rat(-1, 2), -5);
    let beta = SurfaceElement::from_terms([(p, ll), (half.clone(), l_lm), (half, lm_l)]);
    vec![(poly("y - z"), alpha), (poly("y^2 - y*z"), beta)]
}

/// Lifts a class of `(J∩K)/(JK + relation)` to a degree-1 chain `φ ⊗ α ⊗ φ`.
pub fn lift_class(
    p: &MultiPoly,
    mode: LiftMode,
    split: &SplittingSpec,
    setup: &Tor1Setup,
) -> Result<HochschildChain, HochschildError> {
    if p.is_zero() {
        return Ok(HochschildChain::zero(1));
    }
    match mode {
        LiftMode::Library => {
            let lib = library_classes();
            let classes: Vec<MultiPoly> = lib.iter().map(|(c, _)| c.clone()).collect();
            let coords = span_coordinates(&setup.denominator, p, &classes)
                .ok_or_else(|| HochschildError::NotInSpan(p.to_string()))?;
            let mut e = SurfaceElement::zero();
            for ((_, lift), c) in lib.iter().zip(coords) {
                if !c.is_zero() {
                    e = e.add(&lift.scale(&LaurentPoly::constant(c)));
                }
            }
            Ok(HochschildChain::degree_one(&e))
        }
        LiftMode::Solver => solver_lift(p, split).map(|(c, _)| c),
    }
}
