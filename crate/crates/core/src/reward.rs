//! Reward functions evaluated over consecutive state pairs.
//!
//! The collection and driving rewards are built from the same shepherd
//! terms (heading alignment, approach, stand-off punishment, arrival bonus)
//! aimed at different points, followed by herd terms: the separated sheep
//! returning to the centre of mass when collecting, the centre of mass
//! moving to the goal when driving. The baseline reward scores four
//! distance metrics in fixed ±β steps and adds a terminal penalty.
//!
//! Direction conventions: the shepherd heading is its last displacement;
//! the direction to a point is taken from the shepherd's current position;
//! a sheep's or the centre of mass's heading is its displacement over the
//! step. Any undefined direction skips its alignment term.

use crate::episode::EpisodeTrace;
use crate::geometry::{angular_diff, unit, Vec2, WorldParams, WorldState};
use crate::scripted::Landmarks;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardParams {
    /// Per-step award while the herd is dispersed (collection).
    pub c0: f64,
    /// Per-step award while the herd is gathered (driving).
    pub d0: f64,
    /// Punishment for disturbing sheep while away from the target point.
    pub u0: f64,
    /// Award for exerting force on the separated sheep.
    pub cf0: f64,
    /// Award for exerting force on the herd.
    pub df0: f64,
    /// Heading tolerance, radians.
    pub dtheta: f64,
    /// Arrival tolerance.
    pub delta: f64,
    /// Stand-off distance.
    pub delta_psi: f64,
    /// Baseline starting value.
    pub tau: f64,
    /// Baseline per-metric increment.
    pub beta: f64,
    /// Credit a successful episode's unused steps with the standing awards
    /// (`c0 + cf0` collect, `d0 + df0` drive) so finishing early never
    /// scores below stalling until the step budget runs out.
    pub completion: bool,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams::for_world(&WorldParams::default())
    }
}

impl RewardParams {
    pub fn for_world(world: &WorldParams) -> Self {
        RewardParams {
            c0: 1.0,
            d0: 1.0,
            u0: 5.0,
            cf0: 3.0,
            df0: 3.0,
            dtheta: std::f64::consts::FRAC_PI_4,
            delta: 2.0 * world.r_a,
            delta_psi: 3.0 * world.r_a,
            tau: 0.0,
            beta: 10.0,
            completion: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mags = [self.c0, self.d0, self.u0, self.cf0, self.df0, self.beta];
        let ok = self.dtheta > 0.0
            && self.dtheta <= std::f64::consts::PI
            && self.delta > 0.0
            && self.delta_psi > 0.0
            && self.tau.is_finite()
            && mags.iter().all(|m| m.is_finite() && *m >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("reward parameters out of range: {self:?}")))
        }
    }
}

/// Which reward a controller is trained against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewardMode {
    Collect,
    Drive,
    Combined,
    Baseline,
}

impl RewardMode {
    pub const ALL: [RewardMode; 4] = [RewardMode::Collect, RewardMode::Drive, RewardMode::Combined, RewardMode::Baseline];

    pub fn as_str(self) -> &'static str {
        match self {
            RewardMode::Collect => "collect",
            RewardMode::Drive => "drive",
            RewardMode::Combined => "combined",
            RewardMode::Baseline => "baseline",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        RewardMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown skill {s:?}")))
    }

    pub fn objective_count(self) -> usize {
        if self == RewardMode::Combined {
            2
        } else {
            1
        }
    }
}

/// Two consecutive states with their landmarks.
#[derive(Debug, Clone, Copy)]
pub struct StepPair<'a> {
    pub prev: &'a WorldState,
    pub curr: &'a WorldState,
    pub prev_marks: Landmarks,
    pub curr_marks: Landmarks,
    pub world: &'a WorldParams,
}

impl<'a> StepPair<'a> {
    pub fn new(prev: &'a WorldState, curr: &'a WorldState, world: &'a WorldParams) -> Self {
        StepPair {
            prev,
            curr,
            prev_marks: Landmarks::compute(prev, world),
            curr_marks: Landmarks::compute(curr, world),
            world,
        }
    }

    pub fn with_marks(prev: &'a WorldState, curr: &'a WorldState, prev_marks: Landmarks, curr_marks: Landmarks, world: &'a WorldParams) -> Self {
        StepPair { prev, curr, prev_marks, curr_marks, world }
    }

    fn within_range(&self, p: Vec2) -> bool {
        self.curr.shepherd.position.dist(p) < self.world.r_s
    }

    /// The shepherd exerts force on sheep `i`: in range, and the sheep moved.
    fn forces_sheep(&self, i: usize) -> bool {
        let now = self.curr.sheep[i].position;
        self.within_range(now) && now != self.prev.sheep[i].position
    }

    fn forces_any(&self) -> bool {
        (0..self.curr.sheep.len()).any(|i| self.forces_sheep(i))
    }

    /// The shepherd exerts force on the herd: a sheep is in range and the
    /// centre of mass moved.
    fn forces_herd(&self) -> bool {
        self.curr_marks.phi != self.prev_marks.phi && self.curr.sheep_positions().any(|p| self.within_range(p))
    }
}

/// Award `dθ − diff` inside the tolerance, punish `diff` outside it.
fn alignment(heading: Result<Vec2>, wanted: Result<Vec2>, dtheta: f64) -> f64 {
    match (heading, wanted) {
        (Ok(a), Ok(b)) => {
            let diff = angular_diff(a.angle(), b.angle());
            if diff <= dtheta {
                dtheta - diff
            } else {
                -diff
            }
        }
        _ => 0.0,
    }
}

/// `gain × decrease` if the distance shrank, else `−loss × increase`.
fn approach(before: f64, after: f64, gain: f64, loss: f64) -> f64 {
    if after < before {
        gain * (before - after)
    } else {
        -loss * (after - before)
    }
}

/// Shepherd heading, approach, disturbance and arrival terms toward the
/// current target point. Approach compares both shepherd positions against
/// the same point, so target drift is neither credited nor punished.
fn shepherd_terms(pair: &StepPair<'_>, target: Vec2, params: &RewardParams) -> f64 {
    let psi_prev = pair.prev.shepherd.position;
    let psi = pair.curr.shepherd.position;
    let mut r = alignment(unit(pair.curr.shepherd.last_move), unit(target - psi), params.dtheta);
    let dist = psi.dist(target);
    r += approach(psi_prev.dist(target), dist, 1.0, 2.0);
    if dist > params.delta_psi && pair.forces_any() {
        r -= params.u0;
    }
    if dist <= params.delta {
        r += params.delta - dist;
    }
    r
}

pub fn collect_reward_step(pair: &StepPair<'_>, params: &RewardParams) -> f64 {
    let (prev, curr) = (&pair.prev_marks, &pair.curr_marks);
    let dispersed = curr.furthest > pair.world.herd_threshold();
    let mut r = 0.0;
    if dispersed {
        r += params.c0;
    }
    r += shepherd_terms(pair, curr.collect_point, params);
    if dispersed {
        let i = curr.sigma_index;
        let before = pair.prev.sheep[i].position;
        let after = pair.curr.sheep[i].position;
        r += alignment(unit(after - before), unit(curr.phi - after), params.dtheta);
        r += approach(before.dist(prev.phi), after.dist(curr.phi), 2.0, 4.0);
        if pair.forces_sheep(i) {
            r += params.cf0;
        }
    }
    r
}

pub fn drive_reward_step(pair: &StepPair<'_>, params: &RewardParams) -> f64 {
    let (prev, curr) = (&pair.prev_marks, &pair.curr_marks);
    let gathered = curr.furthest <= pair.world.herd_threshold();
    let mut r = 0.0;
    if gathered {
        r += params.d0;
    }
    r += shepherd_terms(pair, curr.drive_point, params);
    if gathered {
        let goal_prev = pair.prev.goal;
        let goal = pair.curr.goal;
        r += alignment(unit(curr.phi - prev.phi), unit(goal - curr.phi), params.dtheta);
        r += approach(prev.phi.dist(goal_prev), curr.phi.dist(goal), 2.0, 4.0);
        if pair.forces_herd() {
            r += params.df0;
        }
    }
    r
}

fn mean_spread(world: &WorldState, phi: Vec2) -> f64 {
    world.sheep_positions().map(|p| p.dist(phi)).sum::<f64>() / world.sheep.len() as f64
}

pub fn baseline_step(pair: &StepPair<'_>, params: &RewardParams) -> f64 {
    const TOL: f64 = 1e-9;
    let (prev, curr) = (&pair.prev_marks, &pair.curr_marks);
    let psi_prev = pair.prev.shepherd.position;
    let psi = pair.curr.shepherd.position;
    let metrics = [
        (psi_prev.dist(prev.drive_point), psi.dist(curr.drive_point)),
        (psi_prev.dist(prev.phi), psi.dist(curr.phi)),
        (mean_spread(pair.prev, prev.phi), mean_spread(pair.curr, curr.phi)),
        (prev.phi.dist(pair.prev.goal), curr.phi.dist(pair.curr.goal)),
    ];
    metrics
        .iter()
        .map(|&(before, after)| {
            if after < before - TOL {
                params.beta
            } else if after > before + TOL {
                -params.beta
            } else {
                0.0
            }
        })
        .sum()
}

/// Terminal component `−4 (‖Ψ−Φ‖ + ‖Ψ−P_G‖ + ‖σ−Φ‖)` of the baseline fitness.
pub fn baseline_terminal(world: &WorldState, marks: &Landmarks) -> f64 {
    let psi = world.shepherd.position;
    -4.0 * (psi.dist(marks.phi) + psi.dist(world.goal) + marks.furthest)
}

pub fn baseline_fitness(trace: &EpisodeTrace, params: &RewardParams) -> Result<f64> {
    let last = trace.states.last().ok_or(Error::EmptyTrace)?;
    let steps: f64 = trace.pairs().map(|pair| baseline_step(&pair, params)).sum();
    Ok(params.tau + steps + baseline_terminal(last, &Landmarks::compute(last, &trace.world)))
}

/// Scalar and vector fitness of one controller evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Objectives {
    pub values: Vec<f64>,
    pub success: bool,
}

impl Objectives {
    pub fn new(values: Vec<f64>, success: bool) -> Self {
        Objectives { values, success }
    }

    /// Worst possible objectives, assigned to aborted evaluations.
    pub fn worst(len: usize) -> Self {
        Objectives { values: vec![f64::MIN; len], success: false }
    }

    /// Sum of the components, saturating at `f64::MIN`.
    pub fn scalar(&self) -> f64 {
        let s: f64 = self.values.iter().sum();
        if s.is_finite() {
            s
        } else {
            f64::MIN
        }
    }
}

/// Running per-step accumulator for one reward mode.
#[derive(Debug, Clone)]
pub struct RewardAccumulator {
    mode: RewardMode,
    params: RewardParams,
    sums: [f64; 2],
}

impl RewardAccumulator {
    pub fn new(mode: RewardMode, params: RewardParams) -> Self {
        RewardAccumulator { mode, params, sums: [0.0; 2] }
    }

    /// Adds one step and returns its scalar reward.
    pub fn push(&mut self, pair: &StepPair<'_>) -> f64 {
        match self.mode {
            RewardMode::Collect => {
                let r = collect_reward_step(pair, &self.params);
                self.sums[0] += r;
                r
            }
            RewardMode::Drive => {
                let r = drive_reward_step(pair, &self.params);
                self.sums[0] += r;
                r
            }
            RewardMode::Combined => {
                let c = collect_reward_step(pair, &self.params);
                let d = drive_reward_step(pair, &self.params);
                self.sums[0] += c;
                self.sums[1] += d;
                c + d
            }
            RewardMode::Baseline => {
                let r = baseline_step(pair, &self.params);
                self.sums[0] += r;
                r
            }
        }
    }

    /// Episode objectives given the final state and the number of steps
    /// left in the budget.
    pub fn finish(&self, last: &WorldState, last_marks: &Landmarks, success: bool, remaining: u64) -> Objectives {
        let p = &self.params;
        let credit = if p.completion && success { remaining as f64 } else { 0.0 };
        let (collect, drive) = (credit * (p.c0 + p.cf0), credit * (p.d0 + p.df0));
        let values = match self.mode {
            RewardMode::Collect => vec![self.sums[0] + collect],
            RewardMode::Drive => vec![self.sums[0] + drive],
            RewardMode::Combined => vec![self.sums[0] + collect, self.sums[1] + drive],
            RewardMode::Baseline => vec![p.tau + self.sums[0] + baseline_terminal(last, last_marks)],
        };
        Objectives { values, success }
    }
}

/// Recomputes an episode's objectives from its trace.
pub fn episode_objectives(trace: &EpisodeTrace, mode: RewardMode, params: &RewardParams, max_steps: u64) -> Result<Objectives> {
    let last = trace.states.last().ok_or(Error::EmptyTrace)?;
    let mut acc = RewardAccumulator::new(mode, *params);
    for pair in trace.pairs() {
        acc.push(&pair);
    }
    let marks = Landmarks::compute(last, &trace.world);
    let success = crate::episode::is_success(mode, &marks, last, &trace.world);
    Ok(acc.finish(last, &marks, success, max_steps.saturating_sub(last.t)))
}
