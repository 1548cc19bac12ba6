//! Diagrams of torus curves pushed into the solid torus `D² × S¹`.
//!
//! Layer `i` is a torus of radius `i + 1` around the core. A `(a, b)` curve on it
//! is `a` points of the disc rotating by `b/a` of a turn as `θ` runs once around
//! the core; a meridian `(0, 1)` is a circle in the disc at one fixed `θ`. The
//! diagram is the projection to `(x, θ)` with `y` as height, so strands sorted by
//! `x` become radial levels and crossings happen where two points swap `x`-order.
//! In the local picture of a crossing (time going north, `x` east) the slots are
//! `[SW, SE, NE, NW]` and the crossing has writhe `+1` when `SW–NE` is over.

use std::f64::consts::TAU;

use num_integer::Integer;

use super::{AnnulusDiagram, AnnulusError, DiagramBuilder, Slot};
use crate::surface::TorusCurve;

const GRID: usize = 4096;
const MAX_DEPTH: u32 = 60;

#[derive(Clone, Copy)]
struct Layer {
    a: i64,
    b: i64,
    radius: f64,
    offset: f64,
}

#[derive(Clone, Copy)]
struct Point {
    layer: usize,
    j: i64,
}

impl Layer {
    fn angle(&self, j: i64, theta: f64) -> f64 {
        TAU * (j as f64 / self.a as f64 + self.offset + self.b as f64 / self.a as f64 * theta)
    }
}

enum Event {
    Kink {
        level: usize,
        writhe: i32,
    },
    /// Points at `level` and `level + 1` trade places; `east_over` tells whether
    /// the one moving east passes over.
    Swap {
        level: usize,
        east_over: bool,
    },
    /// A meridian circle; per level inside it, whether the strand is over the
    /// lower arc and over the upper arc.
    Oval {
        levels: Vec<(usize, bool, bool)>,
    },
}

struct Sim {
    layers: Vec<Layer>,
    points: Vec<Point>,
}

impl Sim {
    fn xy(&self, p: Point, theta: f64) -> (f64, f64) {
        let l = &self.layers[p.layer];
        let phi = l.angle(p.j, theta);
        let r = l.radius + wobble(phi);
        (r * phi.cos(), r * phi.sin())
    }

    fn order(&self, theta: f64) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        let xs: Vec<f64> = self.points.iter().map(|p| self.xy(*p, theta).0).collect();
        idx.sort_by(|a, b| xs[*a].total_cmp(&xs[*b]));
        idx
    }

    /// Appends the swaps between `t0` and `t1`, bisecting until each step is one
    /// adjacent transposition.
    fn refine(
        &self,
        (t0, o0): (f64, &[usize]),
        (t1, o1): (f64, &[usize]),
        depth: u32,
        out: &mut Vec<(f64, Event)>,
    ) -> Result<(), AnnulusError> {
        if o0 == o1 {
            return Ok(());
        }
        let diff: Vec<usize> = (0..o0.len()).filter(|&k| o0[k] != o1[k]).collect();
        if diff.len() == 2 && diff[1] == diff[0] + 1 && o0[diff[0]] == o1[diff[1]] {
            let k = diff[0];
            let (p, q) = (self.points[o0[k]], self.points[o0[k + 1]]);
            // locate the swap time
            let f = |t: f64| self.xy(p, t).0 - self.xy(q, t).0;
            let (mut lo, mut hi) = (t0, t1);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            let east_over = self.xy(p, t).1 > self.xy(q, t).1;
            out.push((t, Event::Swap { level: k, east_over }));
            return Ok(());
        }
        if depth >= MAX_DEPTH {
            return Err(AnnulusError::InvalidDiagram("degenerate curve layout".into()));
        }
        let tm = 0.5 * (t0 + t1);
        let om = self.order(tm);
        self.refine((t0, o0), (tm, &om), depth + 1, out)?;
        self.refine((tm, &om), (t1, o1), depth + 1, out)
    }
}

/// Radial deformation of each layer's torus. Without it a layer with four or
/// more strands is mirror symmetric at some instants and several pairs swap at
/// once.
fn wobble(phi: f64) -> f64 {
    0.08 * (phi + 0.4).sin() + 0.05 * (2.0 * phi + 1.1).cos() + 0.03 * (3.0 * phi + 0.2).sin()
}

/// Offsets chosen to keep every layout generic.
fn offset(i: usize) -> f64 {
    let x = 0.1372 + 0.6180339887 * i as f64 + 0.0731 * (i * i) as f64;
    x - x.floor()
}

/// Builds the diagram of curves stacked in layers, the first curve innermost.
/// Each layer's blackboard framing is corrected to the framing from the torus
/// it lies on with `|b|` kinks of writhe `-sign(b)`.
pub fn stack_curves(curves: &[TorusCurve]) -> Result<AnnulusDiagram, AnnulusError> {
    let mut layers = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let (a, b) = (c.a(), c.b());
        if a == 0 && b == 0 {
            return Err(AnnulusError::ZeroCurve);
        }
        if a.gcd(&b) != 1 {
            return Err(AnnulusError::NotPrimitive(a, b));
        }
        layers.push(Layer { a, b, radius: (i + 1) as f64, offset: offset(i) });
    }
    let points: Vec<Point> =
        layers.iter().enumerate().flat_map(|(i, l)| (0..l.a).map(move |j| Point { layer: i, j })).collect();
    let sim = Sim { layers, points };

    let mut events: Vec<(f64, Event)> = Vec::new();
    let mut prev = (0.0, sim.order(0.0));
    for s in 1..=GRID {
        let t = s as f64 / GRID as f64;
        let o = sim.order(t);
        sim.refine((prev.0, &prev.1), (t, &o), 0, &mut events)?;
        prev = (t, o);
    }

    let start = sim.order(0.0);
    for (i, l) in sim.layers.iter().enumerate() {
        if l.a > 0 {
            let level = start.iter().position(|&k| sim.points[k].layer == i && sim.points[k].j == 0).unwrap();
            for _ in 0..l.b.abs() {
                events.push((-1.0, Event::Kink { level, writhe: -(l.b.signum() as i32) }));
            }
        }
    }

    let swap_times: Vec<f64> = events.iter().map(|e| e.0).collect();
    for (i, l) in sim.layers.iter().enumerate() {
        if l.a != 0 {
            continue;
        }
        let mut t = offset(i + 7) * 0.9 + 0.05;
        while swap_times.iter().any(|s| (s - t).abs() < 1e-6) {
            t += 1.3e-5;
        }
        let order = sim.order(t);
        let mut levels = Vec::new();
        for (lvl, &k) in order.iter().enumerate() {
            let (x, y) = sim.xy(sim.points[k], t);
            if x.abs() < l.radius {
                let h = (l.radius * l.radius - x * x).sqrt();
                // lower arc at height -h, upper arc at +h
                levels.push((lvl, y > -h, y > h));
            }
        }
        events.push((t, Event::Oval { levels }));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    assemble(sim.points.len(), &events)
}

struct Strands {
    first: Vec<Option<Slot>>,
    open: Vec<Option<Slot>>,
}

impl Strands {
    fn attach(&mut self, b: &mut DiagramBuilder, level: usize, s: Slot) -> Result<(), AnnulusError> {
        match self.open[level] {
            None => {
                self.first[level] = Some(s);
                Ok(())
            }
            Some(prev) => b.connect(prev, s, 0),
        }
    }
}

fn assemble(levels: usize, events: &[(f64, Event)]) -> Result<AnnulusDiagram, AnnulusError> {
    let mut b = DiagramBuilder::new();
    let mut st = Strands { first: vec![None; levels], open: vec![None; levels] };
    for (_, e) in events {
        match e {
            Event::Kink { level, writhe } => {
                let c = b.add_crossing(*writhe > 0);
                st.attach(&mut b, *level, (c, 0))?;
                b.connect((c, 2), (c, 1), 0)?;
                st.open[*level] = Some((c, 3));
            }
            Event::Swap { level, east_over } => {
                let c = b.add_crossing(*east_over);
                st.attach(&mut b, *level, (c, 0))?;
                st.attach(&mut b, level + 1, (c, 1))?;
                st.open[*level] = Some((c, 3));
                st.open[level + 1] = Some((c, 2));
            }
            Event::Oval { levels } => {
                if levels.is_empty() {
                    b.add_loop(0);
                    continue;
                }
                // crossing slots [S, E, N, W]; the strand runs S–N
                let mut lower = Vec::new();
                let mut upper = Vec::new();
                for &(lvl, over_lower, over_upper) in levels {
                    let lo = b.add_crossing(over_lower);
                    let up = b.add_crossing(over_upper);
                    st.attach(&mut b, lvl, (lo, 0))?;
                    b.connect((lo, 2), (up, 0), 0)?;
                    st.open[lvl] = Some((up, 2));
                    lower.push(lo);
                    upper.push(up);
                }
                for arc in [&lower, &upper] {
                    for w in arc.windows(2) {
                        b.connect((w[0], 1), (w[1], 3), 0)?;
                    }
                }
                b.connect((lower[0], 3), (upper[0], 3), 0)?;
                b.connect((*lower.last().unwrap(), 1), (*upper.last().unwrap(), 1), 0)?;
            }
        }
    }
    for lvl in 0..levels {
        match (st.open[lvl], st.first[lvl]) {
            (Some(end), Some(start)) => b.connect(end, start, 1)?,
            _ => b.add_loop(1),
        }
    }
    b.build()
}

pub fn curve_diagram(a: i64, b: i64) -> Result<AnnulusDiagram, AnnulusError> {
    stack_curves(&[TorusCurve::new(a, b)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::{loop_value, resolve, state_sum, SolidTorusElement};
    use crate::laurent::LaurentPoly;

    fn value(curves: &[(i64, i64)]) -> SolidTorusElement {
        let cs: Vec<TorusCurve> = curves.iter().map(|(a, b)| TorusCurve::new(*a, *b)).collect();
        let d = stack_curves(&cs).unwrap();
        let v = resolve(&d).unwrap();
        if d.num_crossings() <= 12 {
            assert_eq!(state_sum(&d).unwrap(), v);
        }
        v
    }

    fn m(c: i64, e: i32, k: u32) -> SolidTorusElement {
        SolidTorusElement::monomial(LaurentPoly::mono(c, e), k)
    }

    #[test]
    fn single_curves() {
        assert_eq!(value(&[(1, 0)]), SolidTorusElement::z_pow(1));
        assert_eq!(value(&[(0, 1)]), SolidTorusElement::constant(loop_value()));
        assert_eq!(value(&[(1, 1)]), m(-1, -3, 1));
        assert_eq!(value(&[(1, -1)]), m(-1, 3, 1));
        assert_eq!(value(&[(1, 2)]), m(1, -6, 1));
    }

    #[test]
    fn rejects_bad_curves() {
        assert_eq!(curve_diagram(2, 2).unwrap_err().code(), "NOT_PRIMITIVE");
        assert_eq!(curve_diagram(0, 0).unwrap_err().code(), "ZERO_CURVE");
    }

    #[test]
    fn meridian_around_core() {
        // a meridian linking the core once: -(t^4 + t^-4) z after the Kauffman relation
        let v = value(&[(1, 0), (0, 1)]);
        assert_eq!(v, SolidTorusElement::monomial(LaurentPoly::mono(-1, 4) + LaurentPoly::mono(-1, -4), 1));
        // an inner meridian does not link an outer core
        assert_eq!(value(&[(0, 1), (1, 0)]), &SolidTorusElement::z_pow(1) * &SolidTorusElement::constant(loop_value()));
    }

    #[test]
    fn gamma_is_t6_delta() {
        let delta = resolve(&AnnulusDiagram::braid_closure(2, &[1, 1]).unwrap()).unwrap();
        let gamma = value(&[(1, -1), (1, -1)]);
        assert_eq!(gamma, delta.scale(&LaurentPoly::mono(1, 6)));
    }
}
