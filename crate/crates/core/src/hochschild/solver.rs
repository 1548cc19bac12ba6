//! Lift search: each word of the symmetrized expansion gets a unit `(−t)^k`,
//! `k ∈ [−8, 8]`, and the boundary valuation is maximized.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{boundary, HochschildChain, HochschildError, Tensor};
use crate::heegaard::SplittingSpec;
use crate::laurent::{LaurentPoly, Rational, Valuation};
use crate::polyring::{MultiPoly, X, Y, Z};
use crate::surface::{SurfaceElement, SurfaceWord, TorusCurve};

pub const WINDOW: i32 = 8;
const EXHAUSTIVE_WORDS: usize = 5;

/// All distinct orderings of `counts[i]` copies of `curves[i]`.
fn orderings(curves: &[TorusCurve], counts: &mut [u16], prefix: &mut Vec<TorusCurve>, out: &mut Vec<SurfaceWord>) {
    if counts.iter().all(|&c| c == 0) {
        out.push(SurfaceWord(prefix.clone()));
        return;
    }
    for i in 0..curves.len() {
        if counts[i] > 0 {
            counts[i] -= 1;
            prefix.push(curves[i]);
            orderings(curves, counts, prefix, out);
            prefix.pop();
            counts[i] += 1;
        }
    }
}

/// `x ↦ m`, `y ↦ ℓ`, `z ↦ ℓm`, each monomial spread evenly over its orderings.
pub fn symmetrized_words(p: &MultiPoly) -> BTreeMap<SurfaceWord, Rational> {
    let mut out: BTreeMap<SurfaceWord, Rational> = BTreeMap::new();
    for (m, c) in p.terms() {
        let curves = [TorusCurve::M, TorusCurve::L, TorusCurve::LM];
        let mut counts = [m[X], m[Y], m[Z]];
        let mut words = Vec::new();
        orderings(&curves, &mut counts, &mut Vec::new(), &mut words);
        let share = c / Rational::from_integer(words.len().into());
        for w in words {
            let slot = out.entry(w).or_insert_with(Rational::zero);
            *slot += &share;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Boundaries as integer rows `key × exponent`, after clearing denominators.
struct Dense {
    width: usize,
    rows: usize,
    vectors: Vec<Vec<i128>>,
}

impl Dense {
    fn new(boundaries: &[HochschildChain]) -> Dense {
        let mut keys: Vec<Tensor> = boundaries.iter().flat_map(|b| b.terms().map(|(t, _)| t.clone())).collect();
        keys.sort();
        keys.dedup();
        let exps = || boundaries.iter().flat_map(|b| b.terms().flat_map(|(_, c)| c.terms().map(|(e, _)| e)));
        let lo = exps().min().unwrap_or(0) - WINDOW;
        let hi = exps().max().unwrap_or(0) + WINDOW;
        let width = (hi - lo + 1) as usize;
        let denom = boundaries
            .iter()
            .flat_map(|b| b.terms().flat_map(|(_, c)| c.terms().map(|(_, r)| r.denom().clone())))
            .fold(num_bigint::BigInt::one(), |acc, d| acc.lcm(&d));
        let vectors = boundaries
            .iter()
            .map(|b| {
                let mut v = vec![0i128; keys.len() * width];
                for (t, c) in b.terms() {
                    let row = keys.binary_search(t).unwrap();
                    for (e, r) in c.terms() {
                        let scaled = (r * Rational::from_integer(denom.clone())).to_integer();
                        v[row * width + (e - lo) as usize] = scaled.to_i128().expect("coefficient overflow");
                    }
                }
                v
            })
            .collect();
        Dense { width, rows: keys.len(), vectors }
    }

    /// `acc += (−t)^k · vectors[i]`; the window keeps shifts in range.
    fn add_shifted(&self, acc: &mut [i128], i: usize, k: i32) {
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        let v = &self.vectors[i];
        for r in 0..self.rows {
            let base = r * self.width;
            for e in 0..self.width {
                let x = v[base + e];
                if x != 0 {
                    let target = e as i32 + k;
                    acc[base + target as usize] += sign * x;
                }
            }
        }
    }

    fn valuation(&self, acc: &[i128]) -> Valuation {
        (0..self.rows)
            .map(|r| int_valuation(&acc[r * self.width..(r + 1) * self.width]))
            .min()
            .unwrap_or(Valuation::Infinity)
    }
}

/// `(1+t)`-adic valuation of `Σ a_e t^e`.
fn int_valuation(coeffs: &[i128]) -> Valuation {
    let mut a: Vec<i128> = coeffs.to_vec();
    let mut v = 0;
    loop {
        while a.last() == Some(&0) {
            a.pop();
        }
        if a.is_empty() {
            return Valuation::Infinity;
        }
        let at_minus_one: i128 = a.iter().enumerate().map(|(i, c)| if i % 2 == 0 { *c } else { -c }).sum();
        if at_minus_one != 0 {
            return Valuation::Finite(v);
        }
        // synthetic division by t + 1
        let n = a.len();
        let mut q = vec![0i128; n - 1];
        q[n - 2] = a[n - 1];
        for i in (1..n - 1).rev() {
            q[i - 1] = a[i] - q[i];
        }
        a = q;
        v += 1;
    }
}

fn shift_order() -> Vec<i32> {
    let mut ks = vec![0];
    for k in 1..=WINDOW {
        ks.push(k);
        ks.push(-k);
    }
    ks
}

struct Search<'a> {
    dense: &'a Dense,
    ks: Vec<i32>,
    best: (Valuation, Vec<i32>),
}

impl Search<'_> {
    fn exhaustive(&mut self, level: usize, acc: &[i128], chosen: &mut Vec<i32>) {
        if self.best.0 == Valuation::Infinity {
            return;
        }
        if level == self.dense.vectors.len() {
            let v = self.dense.valuation(acc);
            if v > self.best.0 {
                self.best = (v, chosen.clone());
            }
            return;
        }
        for idx in 0..self.ks.len() {
            let k = self.ks[idx];
            let mut next = acc.to_vec();
            self.dense.add_shifted(&mut next, level, k);
            chosen.push(k);
            self.exhaustive(level + 1, &next, chosen);
            chosen.pop();
        }
    }

    fn evaluate(&self, shifts: &[i32]) -> Valuation {
        let mut acc = vec![0i128; self.dense.rows * self.dense.width];
        for (i, k) in shifts.iter().enumerate() {
            self.dense.add_shifted(&mut acc, i, *k);
        }
        self.dense.valuation(&acc)
    }

    /// Coordinate ascent from all-zero shifts, for long expansions.
    fn greedy(&mut self) {
        let n = self.dense.vectors.len();
        let mut current = vec![0; n];
        let mut value = self.evaluate(&current);
        for _ in 0..4 {
            let mut improved = false;
            for i in 1..n {
                for &k in &self.ks {
                    let mut trial = current.clone();
                    trial[i] = k;
                    let v = self.evaluate(&trial);
                    if v > value {
                        value = v;
                        current = trial;
                        improved = true;
                    }
                }
            }
            if !improved || value == Valuation::Infinity {
                break;
            }
        }
        self.best = (value, current);
    }
}

/// Best lift of `p` in the window, with its boundary valuation.
pub fn solver_lift(p: &MultiPoly, split: &SplittingSpec) -> Result<(HochschildChain, Valuation), HochschildError> {
    let words: Vec<(SurfaceWord, Rational)> = symmetrized_words(p).into_iter().collect();
    if words.is_empty() {
        return Ok((HochschildChain::zero(1), Valuation::Infinity));
    }
    let mut boundaries = Vec::new();
    for (w, c) in &words {
        let chain = HochschildChain::degree_one(&SurfaceElement::term(LaurentPoly::constant(c.clone()), w.clone()));
        boundaries.push(boundary(&chain, split)?);
    }
    let dense = Dense::new(&boundaries);
    let mut search = Search { dense: &dense, ks: shift_order(), best: (Valuation::Finite(0), vec![0; words.len()]) };
    if words.len() <= EXHAUSTIVE_WORDS {
        let mut acc = vec![0i128; dense.rows * dense.width];
        dense.add_shifted(&mut acc, 0, 0);
        search.exhaustive(1, &acc, &mut vec![0]);
    } else {
        search.greedy();
    }
    let (value, shifts) = search.best;
    if value < Valuation::Finite(1) {
        return Err(HochschildError::NoLiftFound(p.to_string()));
    }
    let mut e = SurfaceElement::zero();
    for ((w, c), k) in words.iter().zip(shifts) {
        let sign = if k.rem_euclid(2) == 0 { c.clone() } else { -c };
        e.add_term(w.clone(), LaurentPoly::monomial(sign, k));
    }
    Ok((HochschildChain::degree_one(&e), value))
}
