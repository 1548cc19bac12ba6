//! Genus-one Heegaard splittings `M = H₀ ∪ H₁`, described by the unimodular
//! matrix gluing `H₁` to the torus. `H₀` is glued by the identity.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::annulus::{resolve, stack_curves, AnnulusError, SolidTorusElement};
use crate::polyring::{Ideal, MultiPoly};
use crate::surface::{torus_relation, trace_poly, SurfaceElement, TorusCurve};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeegaardError {
    #[error("NOT_UNIMODULAR: determinant {0} is not ±1")]
    NotUnimodular(i64),
    #[error("BAD_PARAMETERS: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Annulus(#[from] AnnulusError),
}

impl HeegaardError {
    pub fn code(&self) -> &'static str {
        match self {
            HeegaardError::NotUnimodular(_) => "NOT_UNIMODULAR",
            HeegaardError::BadParameters(_) => "BAD_PARAMETERS",
            HeegaardError::Annulus(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    H0,
    H1,
}

/// `(p q; r s)` acting on `(ℓ-exponent, m-exponent)` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GluingMatrix {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl GluingMatrix {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self, HeegaardError> {
        let det = p * s - q * r;
        if det.abs() != 1 {
            return Err(HeegaardError::NotUnimodular(det));
        }
        Ok(GluingMatrix { p, q, r, s })
    }

    pub fn identity() -> Self {
        GluingMatrix { p: 1, q: 0, r: 0, s: 1 }
    }

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        GluingMatrix { p: self.s * d, q: -self.q * d, r: -self.r * d, s: self.p * d }
    }

    pub fn apply(&self, a: i64, b: i64) -> (i64, i64) {
        (self.p * a + self.q * b, self.r * a + self.s * b)
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.p, self.q], [self.r, self.s]]
    }
}

impl fmt::Display for GluingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.p, self.q, self.r, self.s)
    }
}

/// `"p,q;r,s"`.
impl FromStr for GluingMatrix {
    type Err = HeegaardError;
    fn from_str(src: &str) -> Result<Self, HeegaardError> {
        let bad = || HeegaardError::BadParameters(format!("expected \"p,q;r,s\", got {src:?}"));
        let nums: Vec<i64> = src
            .split(';')
            .flat_map(|row| row.split(','))
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        if nums.len() != 4 || src.split(';').count() != 2 {
            return Err(bad());
        }
        GluingMatrix::new(nums[0], nums[1], nums[2], nums[3])
    }
}

impl Serialize for GluingMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

pub fn image_curve(g: &GluingMatrix, c: TorusCurve, direction: Direction) -> TorusCurve {
    let m = match direction {
        Direction::Forward => *g,
        Direction::Inverse => g.inverse(),
    };
    let (a, b) = m.apply(c.a(), c.b());
    TorusCurve::new(a, b)
}

fn side_matrix(g: &GluingMatrix, side: Side) -> GluingMatrix {
    match side {
        Side::H0 => GluingMatrix::identity(),
        Side::H1 => *g,
    }
}

/// The torus curve bounding a disc in the handlebody.
pub fn killed_curve(g: &GluingMatrix, side: Side) -> TorusCurve {
    image_curve(&side_matrix(g, side), TorusCurve::M, Direction::Forward)
}

/// The torus curve isotopic to the handlebody core.
pub fn core_curve(g: &GluingMatrix, side: Side) -> TorusCurve {
    image_curve(&side_matrix(g, side), TorusCurve::L, Direction::Forward)
}

/// Ideal of the handlebody's character variety inside the torus character ring.
pub fn handlebody_ideal(g: &GluingMatrix, side: Side) -> Ideal {
    let k = killed_curve(g, side);
    let w = core_curve(g, side);
    let tw = trace_poly(w);
    let plus = TorusCurve::new(w.a() + k.a(), w.b() + k.b());
    let minus = TorusCurve::new(w.a() - k.a(), w.b() - k.b());
    Ideal::new(vec![
        &trace_poly(k) + &MultiPoly::from_int(2),
        &tw - &trace_poly(plus),
        &tw - &trace_poly(minus),
        torus_relation(),
    ])
}

fn push_cache() -> &'static RwLock<HashMap<Vec<TorusCurve>, SolidTorusElement>> {
    static CACHE: OnceLock<RwLock<HashMap<Vec<TorusCurve>, SolidTorusElement>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Resolves the curves stacked from the core outwards.
pub fn push_layers(layers: &[TorusCurve]) -> Result<SolidTorusElement, AnnulusError> {
    if let Some(v) = push_cache().read().unwrap().get(layers) {
        return Ok(v.clone());
    }
    let v = resolve(&stack_curves(layers)?)?;
    push_cache().write().unwrap().insert(layers.to_vec(), v.clone());
    Ok(v)
}

/// Acts on `existing` in the solid torus `side` by the surface skein `e`.
///
/// On `H₀` the word's last curve ends up next to `existing` (left action); on
/// `H₁` the first curve does (right action).
pub fn push_action(
    g: &GluingMatrix,
    side: Side,
    e: &SurfaceElement,
    existing: &SolidTorusElement,
) -> Result<SolidTorusElement, HeegaardError> {
    let m = side_matrix(g, side);
    let mut out = SolidTorusElement::zero();
    for (word, c) in e.terms() {
        let mut curves: Vec<TorusCurve> =
            word.curves().iter().map(|c| image_curve(&m, *c, Direction::Inverse)).collect();
        if side == Side::H0 {
            curves.reverse();
        }
        for (k, c2) in existing.terms() {
            let mut layers = vec![TorusCurve::L; k as usize];
            layers.extend(&curves);
            let v = push_layers(&layers)?;
            out = &out + &v.scale(&(c * c2));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingSpec {
    pub name: String,
    pub gluing: GluingMatrix,
}

impl SplittingSpec {
    pub fn new(name: impl Into<String>, gluing: GluingMatrix) -> Self {
        SplittingSpec { name: name.into(), gluing }
    }

    pub fn ideal(&self, side: Side) -> Ideal {
        handlebody_ideal(&self.gluing, side)
    }

    pub fn killed(&self, side: Side) -> TorusCurve {
        killed_curve(&self.gluing, side)
    }

    /// Whether the two-difference generator set has only been checked against
    /// the known cases; true when the killed curve of `H₁` has `|ℓ-exponent| > 2`.
    pub fn ideal_unverified(&self) -> bool {
        self.killed(Side::H1).a().abs() > 2
    }
}

/// `lens:p,q`, `s1xs2`, `s3` or `identity_double`.
pub fn preset(name: &str) -> Result<SplittingSpec, HeegaardError> {
    let bad = |m: String| HeegaardError::BadParameters(m);
    match name {
        "s1xs2" => Ok(SplittingSpec::new("s1xs2", GluingMatrix::new(-1, 0, 0, 1)?)),
        "s3" => Ok(SplittingSpec::new("s3", GluingMatrix::new(0, 1, 1, 0)?)),
        "identity_double" => Ok(SplittingSpec::new("identity_double", GluingMatrix::identity())),
        _ => {
            let args = name
                .strip_prefix("lens:")
                .or_else(|| name.strip_prefix("lens(").and_then(|s| s.strip_suffix(')')))
                .ok_or_else(|| bad(format!("unknown manifold {name:?}")))?;
            let parts: Vec<i64> = args
                .split(',')
                .map(|x| x.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(format!("bad lens parameters {args:?}")))?;
            let [p, q] = parts[..] else {
                return Err(bad(format!("lens needs two parameters, got {args:?}")));
            };
            Ok(SplittingSpec::new(format!("lens:{p},{q}"), lens_matrix(p, q)?))
        }
    }
}

/// Pinned choice: `H₁` kills `(p, q)`; the core column `(c, d)` has the least
/// `c ≥ 1` with `c·q − p·d = −1` (for `p = 0`, `(−1, 0)`).
pub fn lens_matrix(p: i64, q: i64) -> Result<GluingMatrix, HeegaardError> {
    if !((0 < q && q < p && p.gcd(&q) == 1) || (p, q) == (0, 1)) {
        return Err(HeegaardError::BadParameters(format!(
            "lens({p},{q}) needs gcd(p,q) = 1 and 0 < q < p, or (p,q) = (0,1)"
        )));
    }
    if p == 0 {
        return GluingMatrix::new(-1, 0, 0, 1);
    }
    let c = (1..=p).find(|c| (c * q + 1) % p == 0).unwrap();
    let d = (c * q + 1) / p;
    GluingMatrix::new(c, p, d, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;
    use crate::surface::parse_element;
    use proptest::prelude::*;

    fn lens21() -> GluingMatrix {
        GluingMatrix::new(1, 2, 1, 1).unwrap()
    }

    #[test]
    fn image_examples() {
        let g = lens21();
        assert_eq!(g.inverse(), GluingMatrix::new(-1, 2, 1, -1).unwrap());
        assert_eq!(image_curve(&g, TorusCurve::new(2, 1), Direction::Inverse), TorusCurve::M);
        assert_eq!(image_curve(&g, TorusCurve::LM, Direction::Inverse), TorusCurve::L);
        let c = TorusCurve::new(3, -2);
        assert_eq!(image_curve(&GluingMatrix::identity(), c, Direction::Forward), c);
        assert_eq!(GluingMatrix::new(2, 0, 0, 1).unwrap_err().code(), "NOT_UNIMODULAR");
    }

    #[test]
    fn killed_examples() {
        assert_eq!(killed_curve(&lens21(), Side::H1), TorusCurve::new(2, 1));
        assert_eq!(killed_curve(&GluingMatrix::new(-1, 0, 0, 1).unwrap(), Side::H1), TorusCurve::M);
        assert_eq!(killed_curve(&lens21(), Side::H0), TorusCurve::M);
    }

    #[test]
    fn ideals_match_known_presentations() {
        let j = handlebody_ideal(&lens21(), Side::H0);
        assert!(j.same_ideal(&Ideal::from_strs(&["x + 2", "y - z"])));
        let k = handlebody_ideal(&lens21(), Side::H1);
        assert!(k.same_ideal(&Ideal::from_strs(&["y*z + x - 2", "y - z"])));
        let swap = handlebody_ideal(&GluingMatrix::new(0, 1, 1, 0).unwrap(), Side::H1);
        assert!(swap.same_ideal(&Ideal::from_strs(&["y + 2", "x - z"])));
    }

    #[test]
    fn presets() {
        assert_eq!(preset("lens:2,1").unwrap().gluing, lens21());
        assert_eq!(preset("lens(2,1)").unwrap().gluing, lens21());
        assert_eq!(preset("s1xs2").unwrap().gluing, GluingMatrix::new(-1, 0, 0, 1).unwrap());
        assert_eq!(preset("s3").unwrap().gluing, GluingMatrix::new(0, 1, 1, 0).unwrap());
        assert_eq!(preset("lens:0,1").unwrap().gluing, preset("s1xs2").unwrap().gluing);
        let l52 = preset("lens:5,2").unwrap();
        assert_eq!(l52.killed(Side::H1), TorusCurve::new(5, 2));
        assert!(l52.ideal_unverified());
        assert!(!preset("lens:2,1").unwrap().ideal_unverified());
        assert_eq!(preset("lens:4,2").unwrap_err().code(), "BAD_PARAMETERS");
        assert_eq!(preset("torus").unwrap_err().code(), "BAD_PARAMETERS");
    }

    #[test]
    fn gluing_syntax() {
        assert_eq!("1,2;1,1".parse::<GluingMatrix>().unwrap(), lens21());
        assert_eq!(" -1, 0 ; 0, 1 ".parse::<GluingMatrix>().unwrap().p, -1);
        assert!("1,2,1,1".parse::<GluingMatrix>().is_err());
        assert!("1,2;2,4".parse::<GluingMatrix>().is_err());
    }

    #[test]
    fn push_examples() {
        let s1s2 = GluingMatrix::new(-1, 0, 0, 1).unwrap();
        let lm = parse_element("LM").unwrap();
        let phi = SolidTorusElement::one();
        assert_eq!(
            push_action(&s1s2, Side::H1, &lm, &phi).unwrap(),
            SolidTorusElement::monomial(LaurentPoly::mono(-1, 3), 1)
        );
        assert_eq!(
            push_action(&GluingMatrix::identity(), Side::H0, &lm, &phi).unwrap(),
            SolidTorusElement::monomial(LaurentPoly::mono(-1, -3), 1)
        );
        let h = SolidTorusElement::z_pow(2);
        assert_eq!(push_action(&lens21(), Side::H1, &parse_element("1").unwrap(), &h).unwrap(), h);
        let nonprim = parse_element("(2,0)").unwrap();
        assert_eq!(push_action(&lens21(), Side::H0, &nonprim, &phi).unwrap_err().code(), "NOT_PRIMITIVE");
    }

    #[test]
    fn push_specializes_to_trace() {
        for g in [GluingMatrix::identity(), lens21(), GluingMatrix::new(-1, 0, 0, 1).unwrap()] {
            for side in [Side::H0, Side::H1] {
                let ideal = handlebody_ideal(&g, side);
                let core = trace_poly(core_curve(&g, side));
                for (a, b) in [(0, 1), (1, 0), (1, 1), (2, 1), (1, -2), (3, 2)] {
                    let c = TorusCurve::new(a, b);
                    let e = SurfaceElement::word(crate::surface::SurfaceWord::single(c));
                    let v = push_action(&g, side, &e, &SolidTorusElement::one()).unwrap();
                    let diff = &v.specialize(&core) - &trace_poly(c);
                    assert!(ideal.contains(&diff), "{g} {side:?} {c}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn image_round_trip(p in -4i64..=4, q in -4i64..=4, r in -4i64..=4, a in -6i64..=6, b in -6i64..=6) {
            // complete (p, q) to a unimodular matrix when possible
            if let Ok(g) = GluingMatrix::new(p, q, r, if p != 0 { (1 + q * r) / p } else { 0 }) {
                let c = TorusCurve::new(a, b);
                let there = image_curve(&g, c, Direction::Forward);
                prop_assert_eq!(image_curve(&g, there, Direction::Inverse), c);
            }
        }

        #[test]
        fn relation_lies_in_every_handlebody_ideal(p in -3i64..=3, q in -3i64..=3, r in -3i64..=3) {
            if let Ok(g) = GluingMatrix::new(p, q, r, if p != 0 { (1 + q * r) / p } else { 0 }) {
                for side in [Side::H0, Side::H1] {
                    prop_assert!(handlebody_ideal(&g, side).contains(&torus_relation()));
                }
            }
        }
    }
}
