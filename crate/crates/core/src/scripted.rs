//! Collect/drive behaviour switch, the collecting and driving points, and
//! the scripted heuristic shepherd used as a reference controller.

use std::f64::consts::TAU;

use crate::controller::ControlOutput;
use crate::geometry::{furthest_from, gcm, unit, Vec2, WorldParams, WorldState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShepherdMode {
    Collect,
    Drive,
}

impl ShepherdMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ShepherdMode::Collect => "collect",
            ShepherdMode::Drive => "drive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "collect" => Ok(ShepherdMode::Collect),
            "drive" => Ok(ShepherdMode::Drive),
            other => Err(Error::parse("mode", format!("unknown mode {other:?}"))),
        }
    }
}

/// Collect when the furthest sheep lies strictly outside the herd
/// threshold; a distance equal to the threshold counts as gathered.
pub fn mode_for_distance(furthest: f64, params: &WorldParams) -> ShepherdMode {
    if furthest > params.herd_threshold() {
        ShepherdMode::Collect
    } else {
        ShepherdMode::Drive
    }
}

pub fn mode_select(world: &WorldState, params: &WorldParams) -> ShepherdMode {
    Landmarks::compute(world, params).mode
}

/// Point `r_a` beyond the separated sheep on the line from the centre of mass.
pub fn collecting_point(phi: Vec2, sigma: Vec2, r_a: f64) -> Result<Vec2> {
    let dir = unit(sigma - phi).map_err(|_| Error::SheepAtCentre)?;
    Ok(sigma + dir * r_a)
}

/// Point `r_a·√N` behind the centre of mass, on the far side from the goal.
/// Returns `phi` when the herd is exactly on the goal.
pub fn driving_point(phi: Vec2, goal: Vec2, r_a: f64, n: usize) -> Vec2 {
    match unit(phi - goal) {
        Ok(dir) => phi + dir * (r_a * (n as f64).sqrt()),
        Err(_) => phi,
    }
}

/// Per-state quantities shared by the controllers and the reward functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmarks {
    /// Global centre of mass.
    pub phi: Vec2,
    pub sigma_index: usize,
    /// Furthest sheep from `phi`.
    pub sigma: Vec2,
    pub furthest: f64,
    pub mode: ShepherdMode,
    pub collect_point: Vec2,
    pub drive_point: Vec2,
}

impl Landmarks {
    /// Panics on an empty herd; worlds always hold at least one sheep.
    pub fn compute(world: &WorldState, params: &WorldParams) -> Self {
        let positions = world.positions_vec();
        let phi = gcm(&positions).expect("world has at least one sheep");
        let (sigma_index, furthest) = furthest_from(&positions, phi).expect("world has at least one sheep");
        let sigma = positions[sigma_index];
        // A herd collapsed onto its centre has no collecting direction; the
        // sheep itself stands in.
        let collect_point = collecting_point(phi, sigma, params.r_a * params.collect_offset).unwrap_or(sigma);
        let drive_point = driving_point(phi, world.goal, params.r_a * params.drive_offset, params.n);
        Landmarks {
            phi,
            sigma_index,
            sigma,
            furthest,
            mode: mode_for_distance(furthest, params),
            collect_point,
            drive_point,
        }
    }

    /// Target of the scripted shepherd in this state.
    pub fn target(&self) -> Vec2 {
        match self.mode {
            ShepherdMode::Collect if self.sigma != self.phi => self.collect_point,
            _ => self.drive_point,
        }
    }
}

/// The heuristic collect/drive shepherd.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedShepherd {
    pub world: WorldParams,
    /// Shepherd step length at full speed.
    pub shepherd_speed: f64,
    /// Sheep closer than this slow the shepherd down while in transit.
    pub slow_radius: f64,
    pub slow_speed: f64,
    /// Distance to the target beyond which the shepherd is in transit.
    pub standoff: f64,
}

impl ScriptedShepherd {
    pub fn new(world: WorldParams, shepherd_speed: f64) -> Self {
        ScriptedShepherd {
            world,
            shepherd_speed,
            slow_radius: 3.0 * world.r_a,
            slow_speed: 0.3,
            standoff: 3.0 * world.r_a,
        }
    }

    pub fn action(&self, world: &WorldState) -> ControlOutput {
        let marks = Landmarks::compute(world, &self.world);
        let psi = world.shepherd.position;
        let to_target = marks.target() - psi;
        let dist = to_target.norm();
        if dist == 0.0 {
            return ControlOutput { direction: 0.0, speed: 0.0 };
        }
        let mut speed = if dist > self.shepherd_speed { 1.0 } else { dist / self.shepherd_speed };
        let crowded = world.sheep_positions().any(|p| p.dist(psi) < self.slow_radius);
        if crowded && dist > self.standoff {
            speed = speed.min(self.slow_speed);
        }
        ControlOutput { direction: to_target.angle().rem_euclid(TAU), speed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{SheepState, ShepherdState};
    use proptest::prelude::*;

    fn world(sheep: &[Vec2], shepherd: Vec2, goal: Vec2) -> WorldState {
        WorldState {
            sheep: sheep.iter().map(|&p| SheepState { position: p, heading: Vec2::new(1., 0.) }).collect(),
            shepherd: ShepherdState { position: shepherd, last_move: Vec2::ZERO },
            goal,
            t: 0,
        }
    }

    fn params(n: usize) -> WorldParams {
        WorldParams { n, ..WorldParams::default() }
    }

    #[test]
    fn mode_examples() {
        // N = 8, r_a = 2: threshold 8. Seven sheep at the origin and one
        // at distance d from the resulting centre.
        let at = |d: f64| {
            let mut s = vec![Vec2::ZERO; 7];
            s.push(Vec2::new(d * 8.0 / 7.0, 0.0));
            world(&s, Vec2::new(100., 100.), Vec2::new(140., 140.))
        };
        assert_eq!(mode_select(&at(8.5), &params(8)), ShepherdMode::Collect);
        assert_eq!(mode_for_distance(8.5, &params(8)), ShepherdMode::Collect);
        assert_eq!(mode_for_distance(8.0, &params(8)), ShepherdMode::Drive);
        let one = world(&[Vec2::new(30., 40.)], Vec2::ZERO, Vec2::new(140., 140.));
        assert_eq!(mode_select(&one, &params(1)), ShepherdMode::Drive);
    }

    #[test]
    fn collecting_point_examples() {
        assert_eq!(collecting_point(Vec2::ZERO, Vec2::new(10., 0.), 2.0).unwrap(), Vec2::new(12., 0.));
        assert_eq!(collecting_point(Vec2::ZERO, Vec2::new(0., -5.), 1.0).unwrap(), Vec2::new(0., -6.));
        let p = collecting_point(Vec2::new(1., 1.), Vec2::new(4., 5.), 2.0).unwrap();
        assert!((p - Vec2::new(5.2, 6.6)).norm() < 1e-12);
        assert!(matches!(collecting_point(Vec2::new(1., 1.), Vec2::new(1., 1.), 2.0), Err(Error::SheepAtCentre)));
    }

    #[test]
    fn driving_point_examples() {
        assert_eq!(driving_point(Vec2::ZERO, Vec2::new(10., 0.), 2.0, 4), Vec2::new(-4., 0.));
        assert_eq!(driving_point(Vec2::ZERO, Vec2::new(0., 3.), 1.0, 1), Vec2::new(0., -1.));
        let p = driving_point(Vec2::new(3., 4.), Vec2::ZERO, 2.0, 9);
        assert!((p - Vec2::new(6.6, 8.8)).norm() < 1e-12);
        assert_eq!(driving_point(Vec2::new(3., 4.), Vec2::new(3., 4.), 2.0, 9), Vec2::new(3., 4.));
    }

    #[test]
    fn scripted_action_examples() {
        // One clustered pair far from the shepherd; target is the driving point.
        let wp = params(2);
        let s = ScriptedShepherd::new(wp, 1.5);
        let herd = [Vec2::new(50., 10.), Vec2::new(51., 10.)];
        let w = world(&herd, Vec2::ZERO, Vec2::new(149., 10.));
        let marks = Landmarks::compute(&w, &wp);
        let mut w2 = w.clone();
        w2.shepherd.position = Vec2::new(marks.drive_point.x - 10.0, marks.drive_point.y);
        let a = s.action(&w2);
        assert!(a.direction.abs() < 1e-12 && a.speed == 1.0);

        w2.shepherd.position = marks.drive_point;
        assert_eq!(s.action(&w2).speed, 0.0);

        // Close to the target: partial step, no overshoot.
        w2.shepherd.position = Vec2::new(marks.drive_point.x - 0.75, marks.drive_point.y);
        assert!((s.action(&w2).speed - 0.5).abs() < 1e-12);

        // Near a sheep while far from the target: capped.
        let w3 = world(&herd, Vec2::new(55., 10.), Vec2::new(149., 10.));
        assert_eq!(s.action(&w3).speed, 0.3);
    }

    proptest! {
        #[test]
        fn collecting_point_one_step_beyond(px in -50.0..50.0f64, py in -50.0..50.0f64, sx in -50.0..50.0f64, sy in -50.0..50.0f64, r in 0.1..5.0f64) {
            let phi = Vec2::new(px, py);
            let sigma = Vec2::new(sx, sy);
            prop_assume!(phi.dist(sigma) > 1e-6);
            let pc = collecting_point(phi, sigma, r).unwrap();
            prop_assert!((pc.dist(phi) - (sigma.dist(phi) + r)).abs() < 1e-9);
        }

        #[test]
        fn driving_point_collinear_behind(px in -50.0..50.0f64, py in -50.0..50.0f64, gx in -50.0..50.0f64, gy in -50.0..50.0f64, n in 1usize..60) {
            let phi = Vec2::new(px, py);
            let goal = Vec2::new(gx, gy);
            prop_assume!(phi.dist(goal) > 1e-6);
            let pd = driving_point(phi, goal, 2.0, n);
            // Φ lies strictly between P_d and P_G.
            prop_assert!((pd.dist(phi) + phi.dist(goal) - pd.dist(goal)).abs() < 1e-9);
            prop_assert!(pd.dist(phi) > 0.0);
        }

        #[test]
        fn mode_scale_invariant(pts in prop::collection::vec((0.0..100.0f64, 0.0..100.0f64), 1..30), k in 0.1..10.0f64) {
            let n = pts.len();
            let sheep: Vec<Vec2> = pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
            let scaled: Vec<Vec2> = sheep.iter().map(|&p| p * k).collect();
            let a = mode_select(&world(&sheep, Vec2::ZERO, Vec2::ZERO), &params(n));
            let sp = WorldParams { r_a: 2.0 * k, r_s: 65.0 * k, ..params(n) };
            let b = mode_select(&world(&scaled, Vec2::ZERO, Vec2::ZERO), &sp);
            let (_, d) = furthest_from(&sheep, gcm(&sheep).unwrap()).unwrap();
            // Skip configurations within rounding distance of the boundary.
            prop_assume!((d - params(n).herd_threshold()).abs() > 1e-9);
            prop_assert_eq!(a, b);
        }
    }
}
