//! One episode: environment setup, the control loop and trace capture.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng;

use crate::controller::{encode_with, forward, ControlOutput, Genome};
use crate::geometry::{SheepState, ShepherdState, Vec2, WorldParams, WorldState};
use crate::reward::{Objectives, RewardAccumulator, RewardMode, RewardParams, StepPair};
use crate::scripted::{Landmarks, ScriptedShepherd, ShepherdMode};
use crate::seeds;
use crate::sheep::{sheep_step, SheepParams};
use crate::{Error, Result};

/// Starting layout of an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    /// Sheep scattered over the central square.
    Collect,
    /// Sheep pre-gathered far from the goal.
    Drive,
    /// Scattered start; the herd must be gathered and delivered.
    Full,
}

impl EnvKind {
    pub fn for_mode(mode: RewardMode) -> Self {
        match mode {
            RewardMode::Collect => EnvKind::Collect,
            RewardMode::Drive => EnvKind::Drive,
            RewardMode::Combined | RewardMode::Baseline => EnvKind::Full,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnvKind::Collect => "collect",
            EnvKind::Drive => "drive",
            EnvKind::Full => "full",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "collect" => Ok(EnvKind::Collect),
            "drive" => Ok(EnvKind::Drive),
            "full" => Ok(EnvKind::Full),
            other => Err(Error::Config(format!("unknown environment {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeConfig {
    pub env: EnvKind,
    pub max_steps: u64,
    /// Shepherd step length at full speed.
    pub shepherd_speed: f64,
    pub world: WorldParams,
    pub sheep: SheepParams,
    /// Episodes averaged per genome evaluation.
    pub eval_episodes: usize,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            env: EnvKind::Full,
            max_steps: 2000,
            shepherd_speed: 1.5,
            world: WorldParams::default(),
            sheep: SheepParams::default(),
            eval_episodes: 3,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        self.sheep.validate()?;
        if self.max_steps < 1 {
            return Err(Error::Config("episode.max_steps must be at least 1".into()));
        }
        if self.shepherd_speed <= self.sheep.delta {
            return Err(Error::Config("episode.shepherd_speed must exceed sheep.delta".into()));
        }
        if self.eval_episodes < 1 {
            return Err(Error::Config("episode.eval_episodes must be at least 1".into()));
        }
        Ok(())
    }
}

/// Anything that maps a world state to a shepherd action.
pub trait Controller {
    fn act(&mut self, world: &WorldState, marks: &Landmarks) -> ControlOutput;
}

impl<F: FnMut(&WorldState) -> ControlOutput> Controller for F {
    fn act(&mut self, world: &WorldState, _marks: &Landmarks) -> ControlOutput {
        self(world)
    }
}

impl Controller for ScriptedShepherd {
    fn act(&mut self, world: &WorldState, _marks: &Landmarks) -> ControlOutput {
        self.action(world)
    }
}

/// An evolved network driving the shepherd.
#[derive(Debug, Clone, Copy)]
pub struct NetworkController<'g> {
    pub genome: &'g Genome,
    pub side: f64,
}

impl Controller for NetworkController<'_> {
    fn act(&mut self, world: &WorldState, marks: &Landmarks) -> ControlOutput {
        forward(self.genome, &encode_with(world, marks, self.side))
    }
}

/// Recorded states of one episode. `rewards[k]` is the scalar reward of
/// the step that produced `states[k]` (zero for the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub world: WorldParams,
    pub states: Vec<WorldState>,
    pub rewards: Vec<f64>,
}

/// One line of a trace file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub psi: Vec2,
    pub phi: Vec2,
    pub sigma: Vec2,
    pub furthest: f64,
    pub mode: ShepherdMode,
    pub reward: f64,
}

pub const TRACE_HEADER: &str = "t,psi_x,psi_y,phi_x,phi_y,sigma_x,sigma_y,furthest_dist,mode,reward";

impl EpisodeTrace {
    pub fn pairs(&self) -> impl Iterator<Item = StepPair<'_>> + '_ {
        self.states.windows(2).map(|w| StepPair::new(&w[0], &w[1], &self.world))
    }

    pub fn rows(&self) -> Vec<TraceRow> {
        self.states
            .iter()
            .zip(&self.rewards)
            .map(|(s, &reward)| {
                let m = Landmarks::compute(s, &self.world);
                TraceRow {
                    t: s.t,
                    psi: s.shepherd.position,
                    phi: m.phi,
                    sigma: m.sigma,
                    furthest: m.furthest,
                    mode: m.mode,
                    reward,
                }
            })
            .collect()
    }

    /// CSV rendering; floats use shortest round-trip formatting. Two
    /// trailing `#initial` / `#final` lines list every sheep position.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for r in self.rows() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.psi.x,
                r.psi.y,
                r.phi.x,
                r.phi.y,
                r.sigma.x,
                r.sigma.y,
                r.furthest,
                r.mode.as_str(),
                r.reward
            )
            .unwrap();
        }
        for (tag, state) in [("#initial", self.states.first()), ("#final", self.states.last())] {
            out.push_str(tag);
            for p in state.into_iter().flat_map(|s| s.sheep_positions()) {
                write!(out, ",{},{}", p.x, p.y).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// A trace file read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub rows: Vec<TraceRow>,
    pub initial: Vec<Vec2>,
    pub last: Vec<Vec2>,
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.trim().parse().map_err(|e| Error::parse("trace", format!("{tok:?}: {e}")))
}

fn parse_points(fields: &[&str]) -> Result<Vec<Vec2>> {
    if fields.len() % 2 != 0 {
        return Err(Error::parse("trace", "odd number of coordinates"));
    }
    fields.chunks(2).map(|c| Ok(Vec2::new(parse_f64(c[0])?, parse_f64(c[1])?))).collect()
}

impl TraceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == TRACE_HEADER => {}
            _ => return Err(Error::parse("trace", "missing header")),
        }
        let mut file = TraceFile { rows: Vec::new(), initial: Vec::new(), last: Vec::new() };
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            match fields[0] {
                "#initial" => file.initial = parse_points(&fields[1..])?,
                "#final" => file.last = parse_points(&fields[1..])?,
                _ => {
                    if fields.len() != 10 {
                        return Err(Error::parse("trace", format!("expected 10 fields, got {}", fields.len())));
                    }
                    file.rows.push(TraceRow {
                        t: fields[0].parse().map_err(|e| Error::parse("trace", format!("t: {e}")))?,
                        psi: Vec2::new(parse_f64(fields[1])?, parse_f64(fields[2])?),
                        phi: Vec2::new(parse_f64(fields[3])?, parse_f64(fields[4])?),
                        sigma: Vec2::new(parse_f64(fields[5])?, parse_f64(fields[6])?),
                        furthest: parse_f64(fields[7])?,
                        mode: ShepherdMode::parse(fields[8])?,
                        reward: parse_f64(fields[9])?,
                    });
                }
            }
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub objectives: Objectives,
    pub success: bool,
    pub steps_used: u64,
    pub trace: Option<EpisodeTrace>,
    /// Diagnostic for an episode cut short by a non-finite action.
    pub aborted: Option<String>,
}

/// Episode termination predicate for a reward mode.
pub fn is_success(mode: RewardMode, marks: &Landmarks, world: &WorldState, params: &WorldParams) -> bool {
    let gathered = marks.furthest <= params.herd_threshold();
    match mode {
        RewardMode::Collect => gathered,
        _ => gathered && marks.phi.dist(world.goal) <= params.goal_radius,
    }
}

fn random_heading<R: Rng + ?Sized>(rng: &mut R) -> Vec2 {
    Vec2::from_angle(rng.random::<f64>() * TAU)
}

pub fn init_world(config: &EpisodeConfig, seed: u64) -> WorldState {
    let mut rng = seeds::rng(seeds::derive(seed, &[0]));
    let l = config.world.l;
    let n = config.world.n;
    let (sheep, shepherd) = match config.env {
        EnvKind::Collect | EnvKind::Full => {
            let sheep = (0..n)
                .map(|_| {
                    let x = l * (0.25 + 0.5 * rng.random::<f64>());
                    let y = l * (0.25 + 0.5 * rng.random::<f64>());
                    SheepState { position: Vec2::new(x, y), heading: random_heading(&mut rng) }
                })
                .collect();
            (sheep, Vec2::new(0.05 * l, 0.05 * l))
        }
        EnvKind::Drive => {
            let centre = Vec2::new(0.3 * l, 0.3 * l);
            let radius = config.world.herd_threshold() / 2.0;
            let sheep = (0..n)
                .map(|_| {
                    let r = radius * rng.random::<f64>().sqrt();
                    let p = centre + Vec2::from_angle(rng.random::<f64>() * TAU) * r;
                    SheepState { position: p.clamp_to(l), heading: random_heading(&mut rng) }
                })
                .collect();
            (sheep, Vec2::new(0.1 * l, 0.1 * l))
        }
    };
    WorldState {
        sheep,
        shepherd: ShepherdState { position: shepherd, last_move: Vec2::ZERO },
        goal: Vec2::new(0.9 * l, 0.9 * l),
        t: 0,
    }
}

/// Moves the shepherd by `speed · δ_s` along `direction`, clamped to the paddock.
pub fn apply_action(world: &WorldState, action: ControlOutput, shepherd_speed: f64, side: f64) -> WorldState {
    let from = world.shepherd.position;
    let step = Vec2::from_angle(action.direction) * (action.speed.clamp(0.0, 1.0) * shepherd_speed);
    let to = (from + step).clamp_to(side);
    WorldState {
        sheep: world.sheep.clone(),
        shepherd: ShepherdState { position: to, last_move: to - from },
        goal: world.goal,
        t: world.t,
    }
}

pub fn run_episode<C: Controller + ?Sized>(
    controller: &mut C,
    config: &EpisodeConfig,
    mode: RewardMode,
    params: &RewardParams,
    seed: u64,
    capture: bool,
) -> EpisodeResult {
    let wp = &config.world;
    let mut rng = seeds::rng(seeds::derive(seed, &[1]));
    let mut world = init_world(config, seed);
    let mut marks = Landmarks::compute(&world, wp);
    let mut acc = RewardAccumulator::new(mode, *params);
    let mut trace = capture.then(|| EpisodeTrace { world: *wp, states: vec![world.clone()], rewards: vec![0.0] });
    let mut success = is_success(mode, &marks, &world, wp);

    while !success && world.t < config.max_steps {
        let action = controller.act(&world, &marks);
        if !action.is_finite() {
            return EpisodeResult {
                objectives: Objectives::worst(mode.objective_count()),
                success: false,
                steps_used: world.t,
                trace,
                aborted: Some(format!("non-finite controller output {action:?} at t={}", world.t)),
            };
        }
        let moved = apply_action(&world, action, config.shepherd_speed, wp.l);
        let mut next = sheep_step(&moved, &config.sheep, wp, &mut rng);
        next.t += 1;
        let next_marks = Landmarks::compute(&next, wp);
        let reward = acc.push(&StepPair::with_marks(&world, &next, marks, next_marks, wp));
        if let Some(tr) = trace.as_mut() {
            tr.states.push(next.clone());
            tr.rewards.push(reward);
        }
        world = next;
        marks = next_marks;
        success = is_success(mode, &marks, &world, wp);
    }

    EpisodeResult {
        objectives: acc.finish(&world, &marks, success, config.max_steps - world.t),
        success,
        steps_used: world.t,
        trace,
        aborted: None,
    }
}

/// Mean objectives over the given episode seeds; success means a strict
/// majority of episodes succeeded. Any aborted episode makes the whole
/// evaluation worst-case.
pub fn evaluate_genome(genome: &Genome, config: &EpisodeConfig, mode: RewardMode, params: &RewardParams, seeds: &[u64]) -> Objectives {
    let k = mode.objective_count();
    if seeds.is_empty() {
        return Objectives::worst(k);
    }
    let mut sums = vec![0.0; k];
    let mut wins = 0;
    for &seed in seeds {
        let mut net = NetworkController { genome, side: config.world.l };
        let res = run_episode(&mut net, config, mode, params, seed, false);
        if res.aborted.is_some() {
            return Objectives::worst(k);
        }
        for (s, v) in sums.iter_mut().zip(&res.objectives.values) {
            *s += v;
        }
        wins += usize::from(res.success);
    }
    let n = seeds.len() as f64;
    Objectives::new(sums.into_iter().map(|s| s / n).collect(), 2 * wins > seeds.len())
}
