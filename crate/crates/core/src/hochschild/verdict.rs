use std::fmt;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use super::{boundary, lift_class, solver_lift, HochschildChain, HochschildError};
use crate::annulus::SolidTorusElement;
use crate::heegaard::{push_action, GluingMatrix, Side, SplittingSpec};
use crate::laurent::Valuation;
use crate::polyring::{tor1_from_setup, tor1_setup, MultiPoly, PolyError, QuotientBasis, Tor1Setup};
use crate::surface::{specialize, torus_relation, SurfaceElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftMode {
    Library,
    Solver,
}

#[derive(Debug, Clone, Copy)]
pub struct VerdictOptions {
    /// First degree bound tried; doubled until `max_degree_bound`.
    pub degree_bound: u32,
    pub max_degree_bound: u32,
    pub lift: LiftMode,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { degree_bound: 8, max_degree_bound: 32, lift: LiftMode::Library }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    TorsionWitness,
    NoTorsionCertified,
    InconclusiveAtLevel(Valuation),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::TorsionWitness => f.write_str("TORSION_WITNESS"),
            Verdict::NoTorsionCertified => f.write_str("NO_TORSION_CERTIFIED"),
            Verdict::InconclusiveAtLevel(v) => write!(f, "INCONCLUSIVE_AT_LEVEL({v})"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tor1Summary {
    /// `None` when the dimension did not stabilize and `basis` lists module generators.
    pub dimension: Option<usize>,
    pub basis: Vec<String>,
    pub basis_kind: &'static str,
    pub degree_bound: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    pub class: String,
    pub lift: Option<String>,
    pub boundary: Option<String>,
    pub valuation: Option<Valuation>,
    pub mode: Option<LiftMode>,
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionReport {
    pub manifold: String,
    pub gluing: GluingMatrix,
    pub tor1: Tor1Summary,
    pub cycles: Vec<CycleReport>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl TorsionReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "manifold: {}  gluing: {}", self.manifold, self.gluing);
        match self.tor1.dimension {
            Some(d) => {
                let _ = writeln!(s, "Tor1: dimension {d}, basis [{}]", self.tor1.basis.join(", "));
            }
            None => {
                let _ = writeln!(s, "Tor1: not stabilized, module generators [{}]", self.tor1.basis.join(", "));
            }
        }
        for c in &self.cycles {
            let _ = writeln!(s, "class {}", c.class);
            if let (Some(l), Some(b), Some(v), Some(m)) = (&c.lift, &c.boundary, c.valuation, c.mode) {
                let _ = writeln!(s, "  lift ({m:?}): {l}");
                let _ = writeln!(s, "  boundary: {b}");
                let _ = writeln!(s, "  valuation: {v}");
            } else {
                let _ = writeln!(s, "  no lift found");
            }
            for e in &c.evidence {
                let _ = writeln!(s, "    {e}");
            }
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Every push computed in the boundary of `φ ⊗ e ⊗ φ`.
fn evidence(e: &SurfaceElement, split: &SplittingSpec) -> Result<Vec<String>, HochschildError> {
    let mut out = Vec::new();
    for (w, _) in e.terms() {
        let single = SurfaceElement::word(w.clone());
        for (side, name) in [(Side::H1, "H1"), (Side::H0, "H0")] {
            let v = push_action(&split.gluing, side, &single, &SolidTorusElement::one())?;
            out.push(format!("{name}: [{w}]·φ = {v}"));
        }
    }
    Ok(out)
}

fn chain_text(c: &HochschildChain) -> String {
    match c.middle_factor() {
        Some(e) if !e.is_zero() => format!("φ ⊗ ({e}) ⊗ φ"),
        _ => c.to_string(),
    }
}

fn cycle_report(
    p: &MultiPoly,
    opts: &VerdictOptions,
    split: &SplittingSpec,
    setup: &Tor1Setup,
    notes: &mut Vec<String>,
) -> Result<CycleReport, HochschildError> {
    let lifted = match opts.lift {
        LiftMode::Library => match lift_class(p, LiftMode::Library, split, setup) {
            Ok(c) => Ok((c, LiftMode::Library)),
            Err(HochschildError::NotInSpan(_)) => {
                notes.push(format!("class {p} is outside the library span; solver lift used"));
                solver_lift(p, split).map(|(c, _)| (c, LiftMode::Solver))
            }
            Err(e) => Err(e),
        },
        LiftMode::Solver => solver_lift(p, split).map(|(c, _)| (c, LiftMode::Solver)),
    };
    let (chain, mode) = match lifted {
        Ok(x) => x,
        Err(HochschildError::NoLiftFound(_)) => {
            notes.push(format!("no lift of class {p} found in the search window; class is inconclusive"));
            return Ok(CycleReport {
                class: p.to_string(),
                lift: None,
                boundary: None,
                valuation: None,
                mode: None,
                evidence: Vec::new(),
            });
        }
        Err(e) => return Err(e),
    };
    let middle = chain.middle_factor().unwrap_or_else(SurfaceElement::zero);
    if !setup.denominator.contains(&(&specialize(&middle) - p)) {
        notes.push(format!("lift of {p} does not specialize to its class"));
    }
    let b = boundary(&chain, split)?;
    Ok(CycleReport {
        class: p.to_string(),
        lift: Some(chain_text(&chain)),
        boundary: Some(b.to_string()),
        valuation: Some(b.valuation()),
        mode: Some(mode),
        evidence: evidence(&middle, split)?,
    })
}

/// Runs the Tor₁, lift and valuation pipeline.
pub fn torsion_verdict(split: &SplittingSpec, opts: &VerdictOptions) -> Result<TorsionReport, HochschildError> {
    let mut notes = Vec::new();
    let setup = tor1_setup(&split.ideal(Side::H0), &split.ideal(Side::H1), &torus_relation())?;
    let mut bound = opts.degree_bound;
    let (classes, tor1, stabilized) = loop {
        match tor1_from_setup(&setup, bound) {
            Ok(r) => {
                let basis = r.vector_space_basis.clone();
                let summary = Tor1Summary {
                    dimension: Some(r.dimension()),
                    basis: basis.iter().map(|b| b.to_string()).collect(),
                    basis_kind: "vector_space",
                    degree_bound: bound,
                };
                break (basis, summary, true);
            }
            Err(PolyError::NoStabilization { .. }) if bound * 2 <= opts.max_degree_bound => bound *= 2,
            Err(PolyError::NoStabilization { dims, generators, .. }) => {
                notes.push(format!(
                    "Tor1 dimension did not stabilize up to degree {bound} (dims {dims:?}); module generators are lifted instead and no certificate is issued"
                ));
                let summary = Tor1Summary {
                    dimension: None,
                    basis: generators.iter().map(|b| b.to_string()).collect(),
                    basis_kind: "module_generators",
                    degree_bound: bound,
                };
                break (generators, summary, false);
            }
            Err(e) => return Err(e.into()),
        }
    };
    if split.ideal_unverified() {
        notes.push(format!(
            "handlebody ideal generators for killed curve {} are not verified to generate the full kernel",
            split.killed(Side::H1)
        ));
    }

    let mut cycles = Vec::new();
    for p in &classes {
        cycles.push(cycle_report(p, opts, split, &setup, &mut notes)?);
    }

    let vals: Vec<Valuation> = cycles.iter().map(|c| c.valuation.unwrap_or(Valuation::Finite(0))).collect();
    let verdict = if vals.contains(&Valuation::Finite(1)) && split.ideal_unverified() {
        notes.push("a boundary has valuation 1, but no witness is claimed while the H1 ideal is unverified".into());
        Verdict::InconclusiveAtLevel(Valuation::Finite(1))
    } else if vals.contains(&Valuation::Finite(1)) {
        Verdict::TorsionWitness
    } else if stabilized && vals.iter().all(|v| v.is_infinite()) {
        Verdict::NoTorsionCertified
    } else {
        Verdict::InconclusiveAtLevel(vals.iter().copied().min().unwrap_or(Valuation::Infinity))
    };
    match verdict {
        Verdict::NoTorsionCertified if classes.is_empty() => {
            notes.push("Tor1 vanishes; the certificate is vacuous".into())
        }
        Verdict::InconclusiveAtLevel(Valuation::Finite(k)) if k >= 2 => {
            notes.push("a boundary is divisible by (1+t)^2 but nonzero; higher pages would be needed".into())
        }
        _ => {}
    }
    notes.push("verdicts concern the (1+t)-adic completion of the skein module".into());
    Ok(TorsionReport { manifold: split.name.clone(), gluing: split.gluing, tor1, cycles, verdict, notes })
}

/// `Q[x,y,z] / (relation + J + K)`, the specialized skein module up to nilradical.
pub fn specialized_hh0(split: &SplittingSpec, degree_bound: u32) -> QuotientBasis {
    split.ideal(Side::H0).sum(&split.ideal(Side::H1)).with(&torus_relation()).quotient_basis(degree_bound)
}
