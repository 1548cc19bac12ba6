use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::laurent::{LaurentPoly, Valuation};
use crate::polyring::MultiPoly;

/// Value of a null-homotopic loop, `-(t² + t⁻²)`.
pub fn loop_value() -> LaurentPoly {
    LaurentPoly::mono(-1, 2) + LaurentPoly::mono(-1, -2)
}

/// Element of the solid-torus skein module: a polynomial in the core `z`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SolidTorusElement {
    coeffs: BTreeMap<u32, LaurentPoly>,
}

impl SolidTorusElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The empty skein.
    pub fn one() -> Self {
        Self::monomial(LaurentPoly::one(), 0)
    }

    pub fn z_pow(k: u32) -> Self {
        Self::monomial(LaurentPoly::one(), k)
    }

    pub fn constant(c: LaurentPoly) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: LaurentPoly, k: u32) -> Self {
        let mut e = Self::zero();
        e.add_term(k, c);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, LaurentPoly)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (k, c) in it {
            e.add_term(k, c);
        }
        e
    }

    pub fn add_term(&mut self, k: u32, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_insert_with(LaurentPoly::zero);
        *slot += &c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: u32) -> LaurentPoly {
        self.coeffs.get(&k).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &LaurentPoly)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(k, x)| (*k, x * c)))
    }

    pub fn mul_z_pow(&self, j: u32) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(k, x)| (k + j, x.clone())))
    }

    /// Smallest `(1+t)`-adic valuation over the coefficients.
    pub fn valuation(&self) -> Valuation {
        self.coeffs.values().map(|c| c.one_plus_t_valuation()).min().unwrap_or(Valuation::Infinity)
    }

    /// `z ↦ core`, coefficients evaluated at `t = -1`.
    pub fn specialize(&self, core: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (k, c) in &self.coeffs {
            let v = c.eval_at_minus_one();
            if !v.is_zero() {
                out = &out + &core.pow(*k).scale(&v);
            }
        }
        out
    }
}

impl Add<&SolidTorusElement> for &SolidTorusElement {
    type Output = SolidTorusElement;
    fn add(self, rhs: &SolidTorusElement) -> SolidTorusElement {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub<&SolidTorusElement> for &SolidTorusElement {
    type Output = SolidTorusElement;
    fn sub(self, rhs: &SolidTorusElement) -> SolidTorusElement {
        self + &-rhs
    }
}

impl Neg for &SolidTorusElement {
    type Output = SolidTorusElement;
    fn neg(self) -> SolidTorusElement {
        SolidTorusElement::from_terms(self.coeffs.iter().map(|(k, c)| (*k, -c)))
    }
}

impl Mul<&SolidTorusElement> for &SolidTorusElement {
    type Output = SolidTorusElement;
    fn mul(self, rhs: &SolidTorusElement) -> SolidTorusElement {
        let mut out = SolidTorusElement::zero();
        for (i, a) in &self.coeffs {
            for (j, b) in &rhs.coeffs {
                out.add_term(i + j, a * b);
            }
        }
        out
    }
}

/// Descending powers of `z`, e.g. `t^2*z^2 + (t^-6 - t^2)`.
impl fmt::Display for SolidTorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.coeffs.iter().rev().enumerate() {
            let (neg, coeff) = c.signed_coefficient();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let zpart = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            match (coeff.is_empty(), zpart.is_empty()) {
                (true, true) => f.write_str("1")?,
                (true, false) => f.write_str(&zpart)?,
                (false, true) => f.write_str(&coeff)?,
                (false, false) => write!(f, "{coeff}*{zpart}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SolidTorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SolidTorusElement({self})")
    }
}

impl Serialize for SolidTorusElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
