//! Independent reference implementations used by the integration tests.
//! Written against raw coordinates; they share no geometry code with the
//! library under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarm_shepherd::episode::EpisodeTrace;
use swarm_shepherd::evolution::EvolutionConfig;
use swarm_shepherd::geometry::{ShepherdState, SheepState, Vec2, WorldParams, WorldState};
use swarm_shepherd::reward::{Objectives, RewardParams};

type P = (f64, f64);

fn sub(a: P, b: P) -> P {
    (a.0 - b.0, a.1 - b.1)
}

fn len(v: P) -> f64 {
    (v.0 * v.0 + v.1 * v.1).sqrt()
}

fn dist(a: P, b: P) -> f64 {
    len(sub(a, b))
}

fn pt(v: Vec2) -> P {
    (v.x, v.y)
}

/// Angle between two non-zero vectors, in `[0, π]`.
fn angle_between(a: P, b: P) -> f64 {
    let cross = a.0 * b.1 - a.1 * b.0;
    let dot = a.0 * b.0 + a.1 * b.1;
    cross.abs().atan2(dot)
}

/// Heading reward; zero when either direction is undefined.
fn heading_reward(moved: P, wanted: P, dtheta: f64) -> f64 {
    if len(moved) == 0.0 || len(wanted) == 0.0 {
        return 0.0;
    }
    let diff = angle_between(moved, wanted);
    if diff <= dtheta {
        dtheta - diff
    } else {
        -diff
    }
}

fn progress(before: f64, after: f64, gain: f64, loss: f64) -> f64 {
    if after < before {
        gain * (before - after)
    } else {
        -loss * (after - before)
    }
}

pub struct Marks {
    pub phi: P,
    pub sigma: usize,
    pub furthest: f64,
    pub pc: P,
    pub pd: P,
}

pub fn marks(s: &WorldState, w: &WorldParams) -> Marks {
    let pos: Vec<P> = s.sheep.iter().map(|x| pt(x.position)).collect();
    let n = pos.len() as f64;
    let phi = (pos.iter().map(|p| p.0).sum::<f64>() / n, pos.iter().map(|p| p.1).sum::<f64>() / n);
    let mut sigma = 0;
    for i in 1..pos.len() {
        if dist(pos[i], phi) > dist(pos[sigma], phi) {
            sigma = i;
        }
    }
    let furthest = dist(pos[sigma], phi);
    let away = sub(pos[sigma], phi);
    let pc = if len(away) == 0.0 {
        pos[sigma]
    } else {
        let k = w.r_a * w.collect_offset / len(away);
        (pos[sigma].0 + k * away.0, pos[sigma].1 + k * away.1)
    };
    let back = sub(phi, pt(s.goal));
    let pd = if len(back) == 0.0 {
        phi
    } else {
        let k = w.r_a * w.drive_offset * n.sqrt() / len(back);
        (phi.0 + k * back.0, phi.1 + k * back.1)
    };
    Marks { phi, sigma, furthest, pc, pd }
}

pub fn threshold(w: &WorldParams) -> f64 {
    w.r_a * (w.n as f64).powf(2.0 / 3.0)
}

fn shepherd_part(prev: &WorldState, curr: &WorldState, target: P, w: &WorldParams, r: &RewardParams) -> f64 {
    let psi0 = pt(prev.shepherd.position);
    let psi1 = pt(curr.shepherd.position);
    let mut total = heading_reward(pt(curr.shepherd.last_move), sub(target, psi1), r.dtheta);
    let d1 = dist(psi1, target);
    total += progress(dist(psi0, target), d1, 1.0, 2.0);
    let disturbs = (0..curr.sheep.len()).any(|i| {
        let x = pt(curr.sheep[i].position);
        dist(psi1, x) < w.r_s && x != pt(prev.sheep[i].position)
    });
    if d1 > r.delta_psi && disturbs {
        total -= r.u0;
    }
    if d1 <= r.delta {
        total += r.delta - d1;
    }
    total
}

pub fn collect_oracle(prev: &WorldState, curr: &WorldState, w: &WorldParams, r: &RewardParams) -> f64 {
    let (m0, m1) = (marks(prev, w), marks(curr, w));
    let outside = m1.furthest > threshold(w);
    let mut total = 0.0;
    if outside {
        total += r.c0;
    }
    total += shepherd_part(prev, curr, m1.pc, w, r);
    if outside {
        let i = m1.sigma;
        let x0 = pt(prev.sheep[i].position);
        let x1 = pt(curr.sheep[i].position);
        total += heading_reward(sub(x1, x0), sub(m1.phi, x1), r.dtheta);
        total += progress(dist(x0, m0.phi), dist(x1, m1.phi), 2.0, 4.0);
        if dist(pt(curr.shepherd.position), x1) < w.r_s && x1 != x0 {
            total += r.cf0;
        }
    }
    total
}

pub fn drive_oracle(prev: &WorldState, curr: &WorldState, w: &WorldParams, r: &RewardParams) -> f64 {
    let (m0, m1) = (marks(prev, w), marks(curr, w));
    let inside = m1.furthest <= threshold(w);
    let goal = pt(curr.goal);
    let mut total = 0.0;
    if inside {
        total += r.d0;
    }
    total += shepherd_part(prev, curr, m1.pd, w, r);
    if inside {
        total += heading_reward(sub(m1.phi, m0.phi), sub(goal, m1.phi), r.dtheta);
        total += progress(dist(m0.phi, pt(prev.goal)), dist(m1.phi, goal), 2.0, 4.0);
        let psi = pt(curr.shepherd.position);
        if m1.phi != m0.phi && curr.sheep.iter().any(|s| dist(psi, pt(s.position)) < w.r_s) {
            total += r.df0;
        }
    }
    total
}

fn mean_spread(s: &WorldState, phi: P) -> f64 {
    s.sheep.iter().map(|x| dist(pt(x.position), phi)).sum::<f64>() / s.sheep.len() as f64
}

/// Direct substitution: τ + Σ(±β per metric) − 4(‖Ψ−Φ‖ + ‖Ψ−P_G‖ + ‖σ−Φ‖).
pub fn eq1_oracle(trace: &EpisodeTrace, r: &RewardParams) -> f64 {
    let w = &trace.world;
    let mut sum = r.tau;
    for k in 1..trace.states.len() {
        let (a, b) = (&trace.states[k - 1], &trace.states[k]);
        let (ma, mb) = (marks(a, w), marks(b, w));
        let (pa, pb) = (pt(a.shepherd.position), pt(b.shepherd.position));
        let pairs = [
            (dist(pa, ma.pd), dist(pb, mb.pd)),
            (dist(pa, ma.phi), dist(pb, mb.phi)),
            (mean_spread(a, ma.phi), mean_spread(b, mb.phi)),
            (dist(ma.phi, pt(a.goal)), dist(mb.phi, pt(b.goal))),
        ];
        for (before, after) in pairs {
            if after < before - 1e-9 {
                sum += r.beta;
            } else if after > before + 1e-9 {
                sum -= r.beta;
            }
        }
    }
    let last = trace.states.last().unwrap();
    let m = marks(last, w);
    let psi = pt(last.shepherd.position);
    sum - 4.0 * (dist(psi, m.phi) + dist(psi, pt(last.goal)) + m.furthest)
}

/// Brute-force Pareto ranks: rank 0 is non-dominated, rank k is
/// non-dominated once ranks below k are removed.
pub fn brute_force_ranks(objs: &[Objectives]) -> Vec<usize> {
    let dom = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y);
    let mut rank = vec![usize::MAX; objs.len()];
    let mut level = 0;
    while rank.contains(&usize::MAX) {
        let open: Vec<usize> = (0..objs.len()).filter(|&i| rank[i] == usize::MAX).collect();
        let front: Vec<usize> = open
            .iter()
            .copied()
            .filter(|&i| !open.iter().any(|&j| j != i && dom(&objs[j].values, &objs[i].values)))
            .collect();
        for i in front {
            rank[i] = level;
        }
        level += 1;
    }
    rank
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sheep_at(p: P) -> SheepState {
    SheepState { position: Vec2::new(p.0, p.1), heading: Vec2::new(1.0, 0.0) }
}

/// A random but plausible consecutive pair of states. Herds are tight or
/// scattered, sheep and shepherd sometimes stand still, and the shepherd
/// often lands near one of its target points so the arrival and stand-off
/// branches are exercised. Two sheep are always equidistant from their
/// centre of mass, leaving the separated sheep to rounding, so herds have
/// at least three.
pub fn random_pair(rng: &mut ChaCha8Rng) -> (WorldParams, WorldState, WorldState) {
    let n = rng.random_range(3..=20);
    let w = WorldParams { n, ..WorldParams::default() };
    let centre = (rng.random_range(20.0..130.0), rng.random_range(20.0..130.0));
    let spread = if rng.random_bool(0.5) { rng.random_range(0.5..threshold(&w)) } else { rng.random_range(5.0..60.0) };
    let mut prev_pos = Vec::with_capacity(n);
    let mut curr_pos = Vec::with_capacity(n);
    for _ in 0..n {
        let a = rng.random_range(0.0..std::f64::consts::TAU);
        let r = spread * rng.random::<f64>().sqrt();
        let p = ((centre.0 + r * a.cos()).clamp(0.0, 150.0), (centre.1 + r * a.sin()).clamp(0.0, 150.0));
        let q = if rng.random_bool(0.3) {
            p
        } else {
            let b = rng.random_range(0.0..std::f64::consts::TAU);
            (p.0 + b.cos(), p.1 + b.sin())
        };
        prev_pos.push(p);
        curr_pos.push(q);
    }
    let goal = if rng.random_bool(0.2) { centre } else { (rng.random_range(0.0..150.0), rng.random_range(0.0..150.0)) };
    let mut curr = WorldState {
        sheep: curr_pos.iter().copied().map(sheep_at).collect(),
        shepherd: ShepherdState { position: Vec2::ZERO, last_move: Vec2::ZERO },
        goal: Vec2::new(goal.0, goal.1),
        t: 1,
    };
    let m = marks(&curr, &w);
    let anchor = match rng.random_range(0..3) {
        0 => m.pc,
        1 => m.pd,
        _ => (rng.random_range(0.0..150.0), rng.random_range(0.0..150.0)),
    };
    let reach = rng.random_range(0.0..15.0);
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let psi1 = (anchor.0 + reach * a.cos(), anchor.1 + reach * a.sin());
    let step = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1.5) };
    let b = rng.random_range(0.0..std::f64::consts::TAU);
    let mv = (step * b.cos(), step * b.sin());
    let psi0 = (psi1.0 - mv.0, psi1.1 - mv.1);
    curr.shepherd = ShepherdState { position: Vec2::new(psi1.0, psi1.1), last_move: Vec2::new(mv.0, mv.1) };
    let prev = WorldState {
        sheep: prev_pos.iter().copied().map(sheep_at).collect(),
        shepherd: ShepherdState { position: Vec2::new(psi0.0, psi0.1), last_move: Vec2::ZERO },
        goal: curr.goal,
        t: 0,
    };
    (w, prev, curr)
}

pub fn random_objectives(rng: &mut ChaCha8Rng, count: usize, dims: usize) -> Vec<Objectives> {
    // Small integer grid so ties and duplicates are common.
    (0..count)
        .map(|_| Objectives::new((0..dims).map(|_| rng.random_range(0..6) as f64).collect(), false))
        .collect()
}

pub fn small_evolution(generations: usize) -> EvolutionConfig {
    EvolutionConfig { pop_size: 12, generations, ..EvolutionConfig::default() }
}
