//! Kauffman-bracket evaluation of blackboard-framed diagrams in the annulus.
//!
//! A diagram is a list of crossings. Each crossing has four slots in
//! counterclockwise order; slot `j` is joined by an edge to some slot of some
//! crossing, and the edge carries its winding number around the annulus core.
//! Strands run `0–2` and `1–3`. Crossingless components are kept separately as
//! bare windings.

mod element;
mod geometry;

pub use element::{loop_value, SolidTorusElement};
pub use geometry::{curve_diagram, stack_curves};

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::LaurentPoly;

pub const MAX_STATE_SUM_CROSSINGS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnnulusError {
    #[error("INVALID_DIAGRAM: {0}")]
    InvalidDiagram(String),
    #[error("TOO_MANY_CROSSINGS: {0} crossings exceed the state-sum bound of {MAX_STATE_SUM_CROSSINGS}")]
    TooManyCrossings(usize),
    #[error("NOT_PRIMITIVE: curve ({0},{1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("ZERO_CURVE: (0,0) is not a curve")]
    ZeroCurve,
}

impl AnnulusError {
    pub fn code(&self) -> &'static str {
        match self {
            AnnulusError::InvalidDiagram(_) => "INVALID_DIAGRAM",
            AnnulusError::TooManyCrossings(_) => "TOO_MANY_CROSSINGS",
            AnnulusError::NotPrimitive(..) => "NOT_PRIMITIVE",
            AnnulusError::ZeroCurve => "ZERO_CURVE",
        }
    }
}

fn invalid(msg: impl Into<String>) -> AnnulusError {
    AnnulusError::InvalidDiagram(msg.into())
}

/// A slot reference: (crossing index, slot 0..4).
pub type Slot = (u32, u8);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Link {
    to: Slot,
    /// Winding accumulated walking from this slot to `to`.
    wind: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Crossing {
    links: [Link; 4],
    /// Whether the strand through slots 0 and 2 is the over strand.
    ac_over: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AnnulusDiagram {
    crossings: Vec<Crossing>,
    loops: Vec<i32>,
}

/// Incremental construction; `build` validates.
#[derive(Default)]
pub struct DiagramBuilder {
    crossings: Vec<(Option<[Option<Link>; 4]>, bool)>,
    loops: Vec<i32>,
}

impl DiagramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_crossing(&mut self, ac_over: bool) -> u32 {
        self.crossings.push((Some([None; 4]), ac_over));
        (self.crossings.len() - 1) as u32
    }

    /// Joins two slots; `wind` is measured walking from `a` to `b`.
    pub fn connect(&mut self, a: Slot, b: Slot, wind: i32) -> Result<(), AnnulusError> {
        for (s, other, w) in [(a, b, wind), (b, a, -wind)] {
            let c = self.crossings.get_mut(s.0 as usize).ok_or_else(|| invalid(format!("no crossing {}", s.0)))?;
            let slots = c.0.as_mut().unwrap();
            let cell = slots.get_mut(s.1 as usize).ok_or_else(|| invalid(format!("no slot {}", s.1)))?;
            if cell.is_some() {
                return Err(invalid(format!("slot {}:{} used twice", s.0, s.1)));
            }
            *cell = Some(Link { to: other, wind: w });
        }
        if a == b {
            return Err(invalid("slot joined to itself"));
        }
        Ok(())
    }

    pub fn add_loop(&mut self, winding: i32) {
        self.loops.push(winding);
    }

    pub fn build(self) -> Result<AnnulusDiagram, AnnulusError> {
        let mut crossings = Vec::with_capacity(self.crossings.len());
        for (i, (slots, ac_over)) in self.crossings.into_iter().enumerate() {
            let slots = slots.unwrap();
            let mut links = [Link { to: (0, 0), wind: 0 }; 4];
            for j in 0..4 {
                links[j] = slots[j].ok_or_else(|| invalid(format!("slot {i}:{j} is unmatched")))?;
            }
            crossings.push(Crossing { links, ac_over });
        }
        let d = AnnulusDiagram { crossings, loops: self.loops };
        d.validate()?;
        Ok(d)
    }
}

/// Diagram file layout.
///
/// `crossings`: `[e1, e2, e3, e4, "over_first" | "under_first"]` with edge labels
/// in counterclockwise order; `over_first` means the strand `e1–e3` is over.
/// Every label occurs exactly twice. `closures`: `[label, winding]`, the winding
/// of the edge walked from its first occurrence to its second (default 0).
/// `loops`: windings of crossingless components.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DiagramFile {
    pub crossings: Vec<(i64, i64, i64, i64, String)>,
    #[serde(default)]
    pub closures: Vec<(i64, i32)>,
    #[serde(default)]
    pub loops: Vec<i32>,
}

impl AnnulusDiagram {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn loops(&self) -> &[i32] {
        &self.loops
    }

    fn link(&self, s: Slot) -> Link {
        self.crossings[s.0 as usize].links[s.1 as usize]
    }

    fn validate(&self) -> Result<(), AnnulusError> {
        let n = self.crossings.len() as u32;
        for (i, c) in self.crossings.iter().enumerate() {
            for (j, l) in c.links.iter().enumerate() {
                if l.to.0 >= n || l.to.1 > 3 {
                    return Err(invalid(format!("slot {i}:{j} points outside the diagram")));
                }
                let back = self.link(l.to);
                if back.to != (i as u32, j as u8) || back.wind != -l.wind {
                    return Err(invalid(format!("slot {i}:{j} is not matched symmetrically")));
                }
            }
        }
        for w in &self.loops {
            if w.abs() > 1 {
                return Err(invalid(format!("a simple loop cannot wind {w} times")));
            }
        }
        self.check_planarity()
    }

    /// Every component must be a planar 4-valent graph (Euler characteristic 2)
    /// and its faces must be consistent with an embedding in the annulus.
    fn check_planarity(&self) -> Result<(), AnnulusError> {
        let n = self.crossings.len();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(comp: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while comp[r] != r {
                r = comp[r];
            }
            comp[i] = r;
            r
        }
        for i in 0..n {
            for l in &self.crossings[i].links {
                let (a, b) = (find(&mut comp, i), find(&mut comp, l.to.0 as usize));
                comp[a] = b;
            }
        }
        let mut vertices: HashMap<usize, usize> = HashMap::new();
        let mut faces: HashMap<usize, Vec<i32>> = HashMap::new();
        let mut seen = vec![[false; 4]; n];
        for i in 0..n {
            *vertices.entry(find(&mut comp, i)).or_default() += 1;
        }
        for i in 0..n {
            for j in 0..4 {
                if seen[i][j] {
                    continue;
                }
                let mut cur: Slot = (i as u32, j as u8);
                let mut wind = 0;
                loop {
                    seen[cur.0 as usize][cur.1 as usize] = true;
                    let l = self.link(cur);
                    wind += l.wind;
                    cur = (l.to.0, (l.to.1 + 1) % 4);
                    if seen[cur.0 as usize][cur.1 as usize] {
                        break;
                    }
                }
                faces.entry(find(&mut comp, i)).or_default().push(wind);
            }
        }
        for (root, v) in vertices {
            let f = &faces[&root];
            if f.len() != v + 2 {
                return Err(invalid(format!("component is not planar: {v} crossings but {} faces", f.len())));
            }
            let nonzero = f.iter().filter(|w| **w != 0).count();
            if f.iter().any(|w| w.abs() > 1) || !(nonzero == 0 || nonzero == 2) {
                return Err(invalid("edge windings do not fit in an annulus"));
            }
        }
        Ok(())
    }

    pub fn from_file(file: &DiagramFile) -> Result<Self, AnnulusError> {
        let mut occurrences: BTreeMap<i64, Vec<Slot>> = BTreeMap::new();
        let mut b = DiagramBuilder::new();
        for (i, (e1, e2, e3, e4, kind)) in file.crossings.iter().enumerate() {
            let ac_over = match kind.as_str() {
                "over_first" => true,
                "under_first" => false,
                other => return Err(invalid(format!("crossing {i}: unknown kind {other:?}"))),
            };
            let c = b.add_crossing(ac_over);
            for (j, e) in [e1, e2, e3, e4].into_iter().enumerate() {
                occurrences.entry(*e).or_default().push((c, j as u8));
            }
        }
        let mut windings: HashMap<i64, i32> = HashMap::new();
        for (e, w) in &file.closures {
            if !occurrences.contains_key(e) {
                return Err(invalid(format!("closure names unknown edge {e}")));
            }
            if windings.insert(*e, *w).is_some() {
                return Err(invalid(format!("edge {e} has two closures")));
            }
        }
        for (e, slots) in &occurrences {
            if slots.len() != 2 {
                return Err(invalid(format!("edge {e} occurs {} times, expected 2", slots.len())));
            }
            b.connect(slots[0], slots[1], windings.get(e).copied().unwrap_or(0))?;
        }
        for w in &file.loops {
            b.add_loop(*w);
        }
        b.build()
    }

    pub fn from_json(src: &str) -> Result<Self, AnnulusError> {
        let file: DiagramFile = serde_json::from_str(src).map_err(|e| invalid(format!("bad JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> DiagramFile {
        let mut label: HashMap<Slot, i64> = HashMap::new();
        let mut closures = Vec::new();
        let mut next = 1;
        let mut crossings = Vec::new();
        for (i, c) in self.crossings.iter().enumerate() {
            let mut e = [0i64; 4];
            for (j, slot) in e.iter_mut().enumerate() {
                let s = (i as u32, j as u8);
                *slot = match label.get(&s) {
                    Some(l) => *l,
                    None => {
                        let l = next;
                        next += 1;
                        label.insert(c.links[j].to, l);
                        if c.links[j].wind != 0 {
                            closures.push((l, c.links[j].wind));
                        }
                        l
                    }
                };
            }
            let kind = if c.ac_over { "over_first" } else { "under_first" };
            crossings.push((e[0], e[1], e[2], e[3], kind.to_string()));
        }
        DiagramFile { crossings, closures, loops: self.loops.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("diagram serializes")
    }

    /// Renumbers crossings so that new crossing `k` is old crossing `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let mut inverse = vec![0u32; order.len()];
        for (new, old) in order.iter().enumerate() {
            inverse[*old] = new as u32;
        }
        let crossings = order
            .iter()
            .map(|&old| {
                let mut c = self.crossings[old];
                for l in c.links.iter_mut() {
                    l.to.0 = inverse[l.to.0 as usize];
                }
                c
            })
            .collect();
        AnnulusDiagram { crossings, loops: self.loops.clone() }
    }

    /// Disjoint union, `other` placed in an outer band.
    pub fn union(&self, other: &AnnulusDiagram) -> Self {
        let shift = self.crossings.len() as u32;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|c| {
            let mut c = *c;
            for l in c.links.iter_mut() {
                l.to.0 += shift;
            }
            c
        }));
        let mut loops = self.loops.clone();
        loops.extend(&other.loops);
        AnnulusDiagram { crossings, loops }
    }

    pub fn with_loop(&self, winding: i32) -> Result<Self, AnnulusError> {
        let mut d = self.clone();
        d.loops.push(winding);
        d.validate()?;
        Ok(d)
    }

    /// Inserts a curl of the given writhe into the edge leaving `slot`.
    pub fn with_kink_on_edge(&self, slot: Slot, writhe: i32) -> Result<Self, AnnulusError> {
        if slot.0 as usize >= self.crossings.len() || slot.1 > 3 {
            return Err(invalid("no such slot"));
        }
        let Link { to, wind } = self.link(slot);
        let mut d = self.clone();
        let k = d.crossings.len() as u32;
        // slot → k.0, k.2 ↔ k.1 (the curl), k.3 → to
        let mut links = [Link { to: (0, 0), wind: 0 }; 4];
        links[0] = Link { to: slot, wind: -wind };
        links[2] = Link { to: (k, 1), wind: 0 };
        links[1] = Link { to: (k, 2), wind: 0 };
        links[3] = Link { to, wind: 0 };
        d.crossings.push(Crossing { links, ac_over: writhe > 0 });
        d.crossings[slot.0 as usize].links[slot.1 as usize] = Link { to: (k, 0), wind };
        d.crossings[to.0 as usize].links[to.1 as usize] = Link { to: (k, 3), wind: 0 };
        d.validate()?;
        Ok(d)
    }

    /// Turns crossingless loop `index` into a one-crossing curl of the given writhe.
    pub fn with_kink_on_loop(&self, index: usize, writhe: i32) -> Result<Self, AnnulusError> {
        let wind = *self.loops.get(index).ok_or_else(|| invalid("no such loop"))?;
        let mut d = self.clone();
        d.loops.remove(index);
        let k = d.crossings.len() as u32;
        let links = [
            Link { to: (k, 3), wind: -wind },
            Link { to: (k, 2), wind: 0 },
            Link { to: (k, 1), wind: 0 },
            Link { to: (k, 0), wind },
        ];
        d.crossings.push(Crossing { links, ac_over: writhe > 0 });
        d.validate()?;
        Ok(d)
    }

    /// Closure of a braid on `strands` strands around the annulus. Letter `±i`
    /// is the generator crossing strands `i-1` and `i` with writhe `±1`.
    pub fn braid_closure(strands: usize, word: &[i32]) -> Result<Self, AnnulusError> {
        let mut b = DiagramBuilder::new();
        let mut first: Vec<Option<Slot>> = vec![None; strands];
        let mut open: Vec<Option<Slot>> = vec![None; strands];
        let mut attach = |b: &mut DiagramBuilder, open: &mut Vec<Option<Slot>>, lvl: usize, s: Slot| match open[lvl] {
            None => {
                first[lvl] = Some(s);
                Ok(())
            }
            Some(prev) => b.connect(prev, s, 0),
        };
        for &g in word {
            let i = g.unsigned_abs() as usize;
            if g == 0 || i >= strands {
                return Err(invalid(format!("braid letter {g} out of range")));
            }
            // slots [SW, SE, NE, NW]; writhe +1 iff the SW–NE strand is over
            let c = b.add_crossing(g > 0);
            attach(&mut b, &mut open, i - 1, (c, 0))?;
            attach(&mut b, &mut open, i, (c, 1))?;
            open[i - 1] = Some((c, 3));
            open[i] = Some((c, 2));
        }
        for lvl in 0..strands {
            match (open[lvl], first[lvl]) {
                (Some(end), Some(start)) => b.connect(end, start, 1)?,
                _ => b.add_loop(1),
            }
        }
        b.build()
    }
}

/// Pairs of slots joined by the A- and B-smoothings.
fn smoothings(ac_over: bool) -> [([(u8, u8); 2], i32); 2] {
    if ac_over {
        [([(1, 2), (3, 0)], 1), ([(1, 0), (2, 3)], -1)]
    } else {
        [([(0, 1), (2, 3)], 1), ([(0, 3), (1, 2)], -1)]
    }
}

fn loop_factor(winding: i32) -> Result<SolidTorusElement, AnnulusError> {
    match winding.abs() {
        0 => Ok(SolidTorusElement::constant(loop_value())),
        1 => Ok(SolidTorusElement::z_pow(1)),
        w => Err(invalid(format!("state produced a loop winding {w} times"))),
    }
}

type Table = Vec<[Link; 4]>;

struct Resolver<'a> {
    d: &'a AnnulusDiagram,
    memo: HashMap<(usize, Table), SolidTorusElement>,
}

impl Resolver<'_> {
    /// Bracket of crossings `start..` whose current connectivity is `tab`.
    fn eval(&mut self, start: usize, tab: &Table) -> Result<SolidTorusElement, AnnulusError> {
        if tab.is_empty() {
            return Ok(SolidTorusElement::one());
        }
        let key = (start, tab.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let x = start as u32;
        let mut total = SolidTorusElement::zero();
        for (pairs, exp) in smoothings(self.d.crossings[start].ac_over) {
            let mut t = tab.clone();
            let mut factor = SolidTorusElement::monomial(LaurentPoly::mono(1, exp), 0);
            for (p, q) in pairs {
                let lp = t[0][p as usize];
                let lq = t[0][q as usize];
                if lp.to == (x, q) {
                    factor = &factor * &loop_factor(lp.wind)?;
                    continue;
                }
                // walk A → p → q → B
                let w = -lp.wind + lq.wind;
                let (a, b) = (lp.to, lq.to);
                t[(a.0 - x) as usize][a.1 as usize] = Link { to: b, wind: w };
                t[(b.0 - x) as usize][b.1 as usize] = Link { to: a, wind: -w };
            }
            let rest = t.split_off(1);
            let sub = self.eval(start + 1, &rest)?;
            total = &total + &(&factor * &sub);
        }
        self.memo.insert(key, total.clone());
        Ok(total)
    }
}

fn resolve_cache() -> &'static RwLock<HashMap<AnnulusDiagram, SolidTorusElement>> {
    static CACHE: OnceLock<RwLock<HashMap<AnnulusDiagram, SolidTorusElement>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn loops_value(loops: &[i32]) -> Result<SolidTorusElement, AnnulusError> {
    loops.iter().try_fold(SolidTorusElement::one(), |acc, w| Ok(&acc * &loop_factor(*w)?))
}

/// Kauffman-bracket normal form, resolving crossings in list order with memoized subproblems.
pub fn resolve(d: &AnnulusDiagram) -> Result<SolidTorusElement, AnnulusError> {
    if let Some(v) = resolve_cache().read().unwrap().get(d) {
        return Ok(v.clone());
    }
    let tab: Table = d.crossings.iter().map(|c| c.links).collect();
    let mut r = Resolver { d, memo: HashMap::new() };
    let value = &loops_value(&d.loops)? * &r.eval(0, &tab)?;
    resolve_cache().write().unwrap().insert(d.clone(), value.clone());
    Ok(value)
}

/// Sum over all `2^n` smoothings, evaluated without any sharing.
pub fn state_sum(d: &AnnulusDiagram) -> Result<SolidTorusElement, AnnulusError> {
    let n = d.crossings.len();
    if n > MAX_STATE_SUM_CROSSINGS {
        return Err(AnnulusError::TooManyCrossings(n));
    }
    let base = loops_value(&d.loops)?;
    let mut total = SolidTorusElement::zero();
    let mut partner = vec![[0u8; 4]; n];
    for state in 0u32..(1 << n) {
        let mut exp = 0;
        for (i, c) in d.crossings.iter().enumerate() {
            let (pairs, e) = smoothings(c.ac_over)[((state >> i) & 1) as usize];
            exp += e;
            for (p, q) in pairs {
                partner[i][p as usize] = q;
                partner[i][q as usize] = p;
            }
        }
        let mut value = SolidTorusElement::monomial(LaurentPoly::mono(1, exp), 0);
        let mut seen = vec![[false; 4]; n];
        for i in 0..n {
            for j in 0..4u8 {
                if seen[i][j as usize] {
                    continue;
                }
                let start: Slot = (i as u32, j);
                let mut cur = start;
                let mut wind = 0;
                loop {
                    seen[cur.0 as usize][cur.1 as usize] = true;
                    let l = d.link(cur);
                    wind += l.wind;
                    seen[l.to.0 as usize][l.to.1 as usize] = true;
                    cur = (l.to.0, partner[l.to.0 as usize][l.to.1 as usize]);
                    if cur == start {
                        break;
                    }
                }
                value = &value * &loop_factor(wind)?;
            }
        }
        total = &total + &value;
    }
    Ok(&base * &total)
}

/// Places the diagrams in nested bands, the last one outermost.
pub fn stack(diagrams: &[AnnulusDiagram]) -> AnnulusDiagram {
    diagrams.iter().fold(AnnulusDiagram::empty(), |acc, d| acc.union(d))
}
