//! Evolved shepherd controller: a single-hidden-layer network with up to
//! twenty logistic hidden units, an evolvable unit mask and self-adaptive
//! crossover and mutation rates carried in the genome.
//!
//! Inputs are four relative position vectors scaled by the paddock side,
//! plus a bias: centre of mass, furthest sheep and goal as seen from the
//! shepherd, then the goal as seen from the centre of mass. The two outputs
//! map to a heading in `[0, 2π)` and a speed fraction in `[0, 1]`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{Vec2, WorldParams, WorldState};
use crate::scripted::Landmarks;
use crate::{Error, Result};

pub const INPUTS: usize = 9;
pub const HIDDEN: usize = 20;
pub const OUTPUTS: usize = 2;
/// Number of real-valued weight genes (input and hidden bias rows included).
pub const WEIGHT_GENES: usize = INPUTS * HIDDEN + (HIDDEN + 1) * OUTPUTS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    /// Heading in radians, `[0, 2π)`.
    pub direction: f64,
    /// Fraction of the shepherd's full step, `[0, 1]`.
    pub speed: f64,
}

impl ControlOutput {
    pub fn is_finite(&self) -> bool {
        self.direction.is_finite() && self.speed.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    /// Input-to-hidden weights; row 8 multiplies the constant bias input.
    pub w_ih: [[f64; HIDDEN]; INPUTS],
    /// Hidden-to-output weights; row 20 is the output bias.
    pub w_ho: [[f64; OUTPUTS]; HIDDEN + 1],
    pub mask: [bool; HIDDEN],
    pub cr: f64,
    pub mr: f64,
}

impl Genome {
    pub fn zeros() -> Self {
        Genome {
            w_ih: [[0.0; HIDDEN]; INPUTS],
            w_ho: [[0.0; OUTPUTS]; HIDDEN + 1],
            mask: [true; HIDDEN],
            cr: 0.0,
            mr: 0.0,
        }
    }

    /// Weight gene `g` in the flat ordering: `w_ih` row-major, then `w_ho` row-major.
    pub fn weight(&self, g: usize) -> f64 {
        if g < INPUTS * HIDDEN {
            self.w_ih[g / HIDDEN][g % HIDDEN]
        } else {
            let k = g - INPUTS * HIDDEN;
            self.w_ho[k / OUTPUTS][k % OUTPUTS]
        }
    }

    pub fn weight_mut(&mut self, g: usize) -> &mut f64 {
        if g < INPUTS * HIDDEN {
            &mut self.w_ih[g / HIDDEN][g % HIDDEN]
        } else {
            let k = g - INPUTS * HIDDEN;
            &mut self.w_ho[k / OUTPUTS][k % OUTPUTS]
        }
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        (0..WEIGHT_GENES).map(|g| self.weight(g))
    }

    pub fn is_finite(&self) -> bool {
        self.weights().all(f64::is_finite) && self.cr.is_finite() && self.mr.is_finite()
    }

    /// Five-line text form: `w_ih`, `w_ho`, mask bits, `cr`, `mr`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |out: &mut String, vals: &mut dyn Iterator<Item = f64>| {
            let mut first = true;
            for v in vals {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        };
        join(&mut out, &mut self.w_ih.iter().flatten().copied());
        join(&mut out, &mut self.w_ho.iter().flatten().copied());
        out.extend(self.mask.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
        writeln!(out, "{}", self.cr).unwrap();
        writeln!(out, "{}", self.mr).unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |name: &str| lines.next().ok_or_else(|| Error::parse("genome", format!("missing {name} line")));
        let floats = |line: &str, name: &str, expected: usize| -> Result<Vec<f64>> {
            let vals = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::parse("genome", format!("{name}: {t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != expected {
                return Err(Error::parse("genome", format!("{name}: expected {expected} values, got {}", vals.len())));
            }
            Ok(vals)
        };
        let mut g = Genome::zeros();
        let ih = floats(next("w_ih")?, "w_ih", INPUTS * HIDDEN)?;
        let ho = floats(next("w_ho")?, "w_ho", (HIDDEN + 1) * OUTPUTS)?;
        for (i, v) in ih.into_iter().chain(ho).enumerate() {
            *g.weight_mut(i) = v;
        }
        let mask = next("mask")?.trim();
        if mask.len() != HIDDEN {
            return Err(Error::parse("genome", format!("mask: expected {HIDDEN} bits")));
        }
        for (slot, c) in g.mask.iter_mut().zip(mask.chars()) {
            *slot = match c {
                '1' => true,
                '0' => false,
                _ => return Err(Error::parse("genome", format!("mask: bad bit {c:?}"))),
            };
        }
        g.cr = floats(next("cr")?, "cr", 1)?[0];
        g.mr = floats(next("mr")?, "mr", 1)?[0];
        Ok(g)
    }
}

pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn encode_inputs(world: &WorldState, params: &WorldParams) -> [f64; INPUTS] {
    let marks = Landmarks::compute(world, params);
    encode_with(world, &marks, params.l)
}

pub(crate) fn encode_with(world: &WorldState, marks: &Landmarks, side: f64) -> [f64; INPUTS] {
    let psi = world.shepherd.position;
    let rel: [Vec2; 4] = [marks.phi - psi, marks.sigma - psi, world.goal - psi, world.goal - marks.phi];
    let mut out = [1.0; INPUTS];
    for (k, v) in rel.iter().enumerate() {
        out[2 * k] = v.x / side;
        out[2 * k + 1] = v.y / side;
    }
    out
}

pub fn forward(genome: &Genome, inputs: &[f64; INPUTS]) -> ControlOutput {
    let mut hidden = [0.0; HIDDEN];
    for (j, h) in hidden.iter_mut().enumerate() {
        if genome.mask[j] {
            let z: f64 = inputs.iter().zip(&genome.w_ih).map(|(x, row)| x * row[j]).sum();
            *h = logistic(z);
        }
    }
    let mut out = [0.0; OUTPUTS];
    for (k, o) in out.iter_mut().enumerate() {
        let z: f64 = hidden.iter().zip(&genome.w_ho).map(|(h, row)| h * row[k]).sum::<f64>() + genome.w_ho[HIDDEN][k];
        *o = logistic(z);
    }
    let mut direction = TAU * out[0];
    if direction >= TAU {
        direction -= TAU;
    }
    ControlOutput { direction, speed: out[1] }
}

/// Random genome: clipped standard-normal weights, 90% of hidden units
/// enabled, uniform rates.
pub fn init_genome<R: Rng + ?Sized>(rng: &mut R) -> Genome {
    let mut g = Genome::zeros();
    for i in 0..WEIGHT_GENES {
        let w: f64 = rng.sample(StandardNormal);
        *g.weight_mut(i) = w.clamp(-1.0, 1.0);
    }
    for m in g.mask.iter_mut() {
        *m = rng.random::<f64>() < 0.9;
    }
    g.cr = rng.random();
    g.mr = rng.random();
    g
}
