//! Flock dynamics: each sheep combines inertia, attraction to its local
//! centre of mass, short-range repulsion from other sheep, repulsion from
//! the shepherd and noise. Sheep out of the shepherd's range graze.

use std::f64::consts::TAU;

use rand::Rng;

use crate::geometry::{unit, SheepState, Vec2, WorldParams, WorldState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheepParams {
    /// Sheep-sheep repulsion weight.
    pub rho_a: f64,
    /// Attraction to the local centre of mass.
    pub c: f64,
    /// Shepherd repulsion weight.
    pub rho_s: f64,
    /// Inertia weight.
    pub h: f64,
    /// Noise weight.
    pub e: f64,
    /// Step length per tick.
    pub delta: f64,
    /// Neighbours used for the local centre of mass; `0` selects `⌈2N/3⌉`.
    pub n_neighbors: usize,
    pub p_graze: f64,
    /// When false, unthreatened sheep never move.
    pub graze: bool,
}

impl Default for SheepParams {
    fn default() -> Self {
        SheepParams {
            rho_a: 2.0,
            c: 1.05,
            rho_s: 1.0,
            h: 0.5,
            e: 0.3,
            delta: 1.0,
            n_neighbors: 0,
            p_graze: 0.05,
            graze: true,
        }
    }
}

impl SheepParams {
    pub fn validate(&self) -> Result<()> {
        let weights = [self.rho_a, self.c, self.rho_s, self.h, self.e, self.delta];
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || !(0.0..=1.0).contains(&self.p_graze) {
            return Err(Error::Config(format!("sheep parameters out of range: {self:?}")));
        }
        Ok(())
    }

    /// Neighbour count for a herd of `n` sheep, capped at `n - 1`.
    pub fn neighbours(&self, n: usize) -> usize {
        let k = if self.n_neighbors == 0 { (2 * n).div_ceil(3) } else { self.n_neighbors };
        k.min(n.saturating_sub(1))
    }
}

/// Mean position of the `n` sheep nearest to sheep `i` (excluding itself).
pub fn lcm_n_nearest(world: &WorldState, i: usize, n: usize) -> Result<Vec2> {
    let mut scratch = Vec::with_capacity(world.sheep.len());
    lcm_with(&mut scratch, world, i, n)
}

fn lcm_with(scratch: &mut Vec<(f64, usize)>, world: &WorldState, i: usize, n: usize) -> Result<Vec2> {
    let count = world.sheep.len();
    if count < 2 {
        return Err(Error::NoNeighbours);
    }
    let n = n.clamp(1, count - 1);
    let p = world.sheep[i].position;
    scratch.clear();
    scratch.extend(
        world
            .sheep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, s)| (s.position.dist_sq(p), j)),
    );
    if n < scratch.len() {
        scratch.select_nth_unstable_by(n - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    let sum = scratch[..n].iter().fold(Vec2::ZERO, |acc, &(_, j)| acc + world.sheep[j].position);
    Ok(sum / n as f64)
}

/// Heading sheep `i` takes this step when the shepherd is within range.
///
/// Attraction and shepherd repulsion only act while the shepherd is within
/// `r_s`. A zero combined vector leaves the heading unchanged.
pub fn sheep_heading(world: &WorldState, i: usize, params: &SheepParams, world_params: &WorldParams, noise: Vec2) -> Vec2 {
    let mut scratch = Vec::with_capacity(world.sheep.len());
    heading_with(&mut scratch, world, i, params, world_params, noise)
}

fn heading_with(
    scratch: &mut Vec<(f64, usize)>,
    world: &WorldState,
    i: usize,
    params: &SheepParams,
    world_params: &WorldParams,
    noise: Vec2,
) -> Vec2 {
    let me = world.sheep[i];
    let p = me.position;
    let psi = world.shepherd.position;
    let threatened = p.dist(psi) < world_params.r_s;

    let mut repulsion = Vec2::ZERO;
    let ra_sq = world_params.r_a * world_params.r_a;
    for (j, other) in world.sheep.iter().enumerate() {
        if j != i && other.position.dist_sq(p) < ra_sq {
            if let Ok(u) = unit(p - other.position) {
                repulsion += u;
            }
        }
    }

    let mut combined = me.heading * params.h + repulsion * params.rho_a + noise * params.e;
    if threatened {
        let k = params.neighbours(world.sheep.len());
        if let Ok(lcm) = lcm_with(scratch, world, i, k) {
            if let Ok(u) = unit(lcm - p) {
                combined += u * params.c;
            }
        }
        if let Ok(u) = unit(p - psi) {
            combined += u * params.rho_s;
        }
    }
    unit(combined).unwrap_or(me.heading)
}

/// Advances every sheep by one tick. Headings are computed from the
/// pre-step state; random draws are taken in sheep-index order, two per
/// sheep, whether or not they are used.
pub fn sheep_step<R: Rng + ?Sized>(world: &WorldState, params: &SheepParams, world_params: &WorldParams, rng: &mut R) -> WorldState {
    let mut scratch = Vec::with_capacity(world.sheep.len());
    let psi = world.shepherd.position;
    let sheep = world
        .sheep
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let angle = rng.random::<f64>() * TAU;
            let u = rng.random::<f64>();
            if s.position.dist(psi) < world_params.r_s {
                let heading = heading_with(&mut scratch, world, i, params, world_params, Vec2::from_angle(angle));
                SheepState { position: (s.position + heading * params.delta).clamp_to(world_params.l), heading }
            } else if params.graze && u < params.p_graze {
                let heading = Vec2::from_angle(angle);
                SheepState { position: (s.position + heading * params.delta).clamp_to(world_params.l), heading }
            } else {
                *s
            }
        })
        .collect();
    WorldState { sheep, shepherd: world.shepherd, goal: world.goal, t: world.t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gcm, ShepherdState};
    use crate::seeds;
    use proptest::prelude::*;
    use rand::Rng;

    fn world(sheep: &[(f64, f64)], shepherd: (f64, f64)) -> WorldState {
        WorldState {
            sheep: sheep
                .iter()
                .map(|&(x, y)| SheepState { position: Vec2::new(x, y), heading: Vec2::new(1.0, 0.0) })
                .collect(),
            shepherd: ShepherdState { position: Vec2::new(shepherd.0, shepherd.1), last_move: Vec2::ZERO },
            goal: Vec2::new(140.0, 140.0),
            t: 0,
        }
    }

    fn only(f: impl FnOnce(&mut SheepParams)) -> SheepParams {
        let mut p = SheepParams { rho_a: 0.0, c: 0.0, rho_s: 0.0, h: 0.0, e: 0.0, ..SheepParams::default() };
        f(&mut p);
        p
    }

    #[test]
    fn lcm_examples() {
        let w = world(&[(0., 0.), (1., 0.), (10., 0.)], (100., 100.));
        assert_eq!(lcm_n_nearest(&w, 0, 1).unwrap(), Vec2::new(1., 0.));
        assert_eq!(lcm_n_nearest(&w, 0, 2).unwrap(), Vec2::new(5.5, 0.));
        let w = world(&[(0., 0.), (2., 0.), (-2., 0.)], (100., 100.));
        assert_eq!(lcm_n_nearest(&w, 0, 2).unwrap(), Vec2::new(0., 0.));
        let w = world(&[(0., 0.)], (100., 100.));
        assert!(matches!(lcm_n_nearest(&w, 0, 1), Err(Error::NoNeighbours)));
    }

    #[test]
    fn lcm_ties_break_by_index() {
        let w = world(&[(0., 0.), (1., 0.), (-1., 0.), (0., 1.)], (100., 100.));
        assert_eq!(lcm_n_nearest(&w, 0, 1).unwrap(), Vec2::new(1., 0.));
        assert_eq!(lcm_n_nearest(&w, 0, 2).unwrap(), Vec2::new(0., 0.));
    }

    #[test]
    fn heading_examples() {
        let wp = WorldParams::default();
        let w = world(&[(0., 0.), (1., 0.)], (100., 100.));
        let p = only(|p| p.rho_a = 1.0);
        assert_eq!(sheep_heading(&w, 0, &p, &wp, Vec2::new(0., 1.)), Vec2::new(-1., 0.));

        let w = world(&[(0., 0.)], (1., 0.));
        let p = only(|p| p.rho_s = 1.0);
        assert_eq!(sheep_heading(&w, 0, &p, &wp, Vec2::new(0., 1.)), Vec2::new(-1., 0.));

        let mut w = world(&[(5., 5.), (6., 5.)], (7., 5.));
        w.sheep[0].heading = Vec2::new(0., -1.);
        let p = only(|_| {});
        assert_eq!(sheep_heading(&w, 0, &p, &wp, Vec2::new(0., 1.)), Vec2::new(0., -1.));
    }

    #[test]
    fn step_examples() {
        let wp = WorldParams::default();
        let mut rng = seeds::rng(1);
        let w = world(&[(10., 10.), (12., 14.), (20., 20.)], (149., 149.));
        let p = SheepParams { p_graze: 0.0, ..SheepParams::default() };
        let next = sheep_step(&w, &p, &wp, &mut rng);
        assert_eq!(next.sheep, w.sheep);

        let w = world(&[(10., 10.)], (11., 10.));
        let p = only(|p| p.rho_s = 1.0);
        let next = sheep_step(&w, &p, &wp, &mut rng);
        assert_eq!(next.sheep[0].position, Vec2::new(9., 10.));

        // At the paddock corner the move is clamped.
        let w = world(&[(0., 0.)], (1., 0.));
        let next = sheep_step(&w, &p, &wp, &mut rng);
        assert_eq!(next.sheep[0].position, Vec2::new(0., 0.));
    }

    fn mean_nn_distance(w: &WorldState) -> f64 {
        let ps = w.positions_vec();
        let total: f64 = ps
            .iter()
            .enumerate()
            .map(|(i, p)| {
                ps.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, q)| p.dist(*q))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        total / ps.len() as f64
    }

    #[test]
    fn repulsion_spreads_packed_cluster() {
        let wp = WorldParams::default();
        let p = SheepParams::default();
        for seed in 0..10 {
            let mut rng = seeds::rng(seed);
            let pts: Vec<(f64, f64)> = (0..10)
                .map(|_| (75.0 + rng.random::<f64>() * 0.8, 75.0 + rng.random::<f64>() * 0.8))
                .collect();
            let mut w = world(&pts, (75.4, 75.4));
            let before = mean_nn_distance(&w);
            for _ in 0..10 {
                w = sheep_step(&w, &p, &wp, &mut rng);
            }
            assert!(mean_nn_distance(&w) >= before, "seed {seed}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let wp = WorldParams::default();
        let p = SheepParams::default();
        let w = world(&[(50., 50.), (52., 51.), (49., 55.), (60., 40.)], (40., 40.));
        let run = |seed| {
            let mut rng = seeds::rng(seed);
            let mut w = w.clone();
            for _ in 0..50 {
                w = sheep_step(&w, &p, &wp, &mut rng);
            }
            w
        };
        assert_eq!(run(3), run(3));
    }

    proptest! {
        #[test]
        fn lone_sheep_flees_shepherd(x in 20.0..130.0f64, y in 20.0..130.0f64, dx in -10.0..10.0f64, dy in -10.0..10.0f64, seed in any::<u64>()) {
            prop_assume!(dx.abs() + dy.abs() > 0.5);
            let wp = WorldParams::default();
            let p = only(|p| p.rho_s = 1.0);
            let mut w = world(&[(x, y)], (x + dx, y + dy));
            let mut rng = seeds::rng(seed);
            for _ in 0..5 {
                let before = w.sheep[0].position.dist(w.shepherd.position);
                let next = sheep_step(&w, &p, &wp, &mut rng);
                let after = next.sheep[0].position.dist(w.shepherd.position);
                let clamped = next.sheep[0].position.x == 0.0 || next.sheep[0].position.y == 0.0
                    || next.sheep[0].position.x == wp.l || next.sheep[0].position.y == wp.l;
                prop_assert!(after > before || clamped);
                w = next;
            }
        }

        #[test]
        fn cohesion_never_moves_away_from_centre(
            pts in prop::collection::vec((40.0..110.0f64, 40.0..110.0f64), 2..20),
            seed in any::<u64>(),
        ) {
            let wp = WorldParams::default();
            let n = pts.len();
            let p = only(|p| { p.c = 1.0; p.n_neighbors = n - 1; });
            let w = world(&pts, (75.0, 75.0));
            let centre = gcm(&w.positions_vec()).unwrap();
            let mut rng = seeds::rng(seed);
            let next = sheep_step(&w, &p, &wp, &mut rng);
            for (a, b) in w.sheep.iter().zip(&next.sheep) {
                let old = a.position.dist(centre);
                let new = b.position.dist(centre);
                prop_assert!(new <= old.max(p.delta) + 1e-9);
            }
        }

        #[test]
        fn positions_stay_in_paddock(
            pts in prop::collection::vec((0.0..150.0f64, 0.0..150.0f64), 1..20),
            shepherd in (0.0..150.0f64, 0.0..150.0f64),
            seed in any::<u64>(),
        ) {
            let wp = WorldParams::default();
            let p = SheepParams { p_graze: 0.5, ..SheepParams::default() };
            let mut w = world(&pts, shepherd);
            let mut rng = seeds::rng(seed);
            for _ in 0..30 {
                w = sheep_step(&w, &p, &wp, &mut rng);
                for s in &w.sheep {
                    prop_assert!((0.0..=wp.l).contains(&s.position.x) && (0.0..=wp.l).contains(&s.position.y));
                    prop_assert!((s.heading.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
