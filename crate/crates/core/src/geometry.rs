//! Shared geometric types: positions, agent states and the world snapshot.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector pointing at `angle` radians.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2 { x: c, y: s }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Vec2) -> f64 {
        (self - other).norm_sq()
    }

    /// Angle of the vector in `(-π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    pub fn clamp_to(self, side: f64) -> Self {
        Vec2 { x: self.x.clamp(0.0, side), y: self.y.clamp(0.0, side) }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheepState {
    pub position: Vec2,
    /// Direction of the last movement; always unit length.
    pub heading: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShepherdState {
    pub position: Vec2,
    /// Displacement applied in the previous step (zero at `t = 0`).
    pub last_move: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub sheep: Vec<SheepState>,
    pub shepherd: ShepherdState,
    pub goal: Vec2,
    pub t: u64,
}

impl WorldState {
    pub fn sheep_positions(&self) -> impl ExactSizeIterator<Item = Vec2> + '_ {
        self.sheep.iter().map(|s| s.position)
    }

    pub fn positions_vec(&self) -> Vec<Vec2> {
        self.sheep_positions().collect()
    }
}

/// Physical constants of the paddock and the agents' interaction ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldParams {
    pub n: usize,
    /// Paddock side length; the paddock is `[0, l]²`.
    pub l: f64,
    /// Sheep-sheep interaction distance.
    pub r_a: f64,
    /// Shepherd detection distance.
    pub r_s: f64,
    pub goal_radius: f64,
    /// Collecting-point offset behind the separated sheep, in units of `r_a`.
    pub collect_offset: f64,
    /// Driving-point offset behind the centre of mass, in units of `r_a·√N`.
    pub drive_offset: f64,
}

impl Default for WorldParams {
    fn default() -> Self {
        WorldParams {
            n: 15,
            l: 150.0,
            r_a: 2.0,
            r_s: 65.0,
            goal_radius: 6.0,
            collect_offset: 1.0,
            drive_offset: 1.0,
        }
    }
}

impl WorldParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n >= 1
            && self.l > 0.0
            && self.r_a > 0.0
            && self.r_s > self.r_a
            && self.goal_radius > 0.0
            && self.collect_offset >= 0.0
            && self.drive_offset >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("world parameters out of range: {self:?}")))
        }
    }

    pub fn herd_threshold(&self) -> f64 {
        herd_threshold(self.n, self.r_a)
    }
}

/// Global centre of mass of the given positions.
pub fn gcm(positions: &[Vec2]) -> Result<Vec2> {
    if positions.is_empty() {
        return Err(Error::EmptyHerd);
    }
    let sum = positions.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
    Ok(sum / positions.len() as f64)
}

/// Index of, and distance to, the position furthest from `point`.
/// Ties resolve to the lowest index.
pub fn furthest_from(positions: &[Vec2], point: Vec2) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in positions.iter().enumerate() {
        let d = p.dist_sq(point);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| (i, positions[i].dist(point))).ok_or(Error::EmptyHerd)
}

/// Dispersal radius `r_a · N^(2/3)` above which the herd counts as scattered.
pub fn herd_threshold(n: usize, r_a: f64) -> f64 {
    let n = n as f64;
    r_a * (n * n).cbrt()
}

/// Smallest absolute separation between two angles, in `[0, π]`.
pub fn angular_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

pub fn unit(v: Vec2) -> Result<Vec2> {
    let n = v.norm();
    if n > 0.0 && n.is_finite() {
        Ok(v / n)
    } else {
        Err(Error::DegenerateDirection)
    }
}
