//! Experiment configuration: a flat `key = value` text format with dotted
//! section prefixes, e.g.
//!
//! ```text
//! skill = combined
//! sheep.rho_a = 2.0
//! evolution.pop_size = 30
//! ```
//!
//! `#` starts a comment. Keys not given take the preset's defaults; lengths
//! tied to `world.r_a` (reward tolerances, goal radius, scripted shepherd
//! distances) follow `world.r_a` unless set explicitly. [`ExperimentConfig::to_text`]
//! writes every key, so an echoed config reproduces the run exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::episode::{EnvKind, EpisodeConfig};
use crate::evolution::EvolutionConfig;
use crate::geometry::WorldParams;
use crate::reward::{RewardMode, RewardParams};
use crate::scripted::ScriptedShepherd;
use crate::sheep::SheepParams;
use crate::{Error, Result};

/// Tunables of the scripted shepherd.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedParams {
    pub slow_radius: f64,
    pub slow_speed: f64,
    pub standoff: f64,
}

impl ScriptedParams {
    pub fn for_world(world: &WorldParams) -> Self {
        ScriptedParams { slow_radius: 3.0 * world.r_a, slow_speed: 0.3, standoff: 3.0 * world.r_a }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Small enough for a full four-skill comparison on one workstation.
    Desk,
    /// Population and generation counts of the original study.
    Large,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Desk => "desk",
            Preset::Large => "large",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub skill: RewardMode,
    pub runs: usize,
    pub master_seed: u64,
    pub evolution: EvolutionConfig,
    pub episode: EpisodeConfig,
    pub rewards: RewardParams,
    pub scripted: ScriptedParams,
    /// Fresh episodes used to judge whether a run's best genome succeeds.
    pub holdout_episodes: usize,
    /// Draw new training episodes for every generation and member instead
    /// of reusing one fixed set for the whole run.
    pub fresh_episodes: bool,
    pub heatmap_bins: usize,
    /// Best-genome checkpoint interval in generations; `0` disables.
    pub checkpoint_every: usize,
    /// Generations at which the best-so-far genome's trace is written.
    pub trace_generations: Vec<usize>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset, skill: RewardMode) -> Self {
        let world = WorldParams::default();
        let (evolution, max_steps) = match preset {
            Preset::Desk => (EvolutionConfig { pop_size: 30, generations: 100, ..EvolutionConfig::default() }, 1500),
            Preset::Large => (EvolutionConfig::default(), 2000),
        };
        ExperimentConfig {
            preset,
            skill,
            runs: 10,
            master_seed: 0,
            evolution,
            episode: EpisodeConfig {
                env: EnvKind::for_mode(skill),
                max_steps,
                shepherd_speed: 1.5,
                world,
                sheep: SheepParams::default(),
                eval_episodes: 3,
            },
            rewards: RewardParams::for_world(&world),
            scripted: ScriptedParams::for_world(&world),
            holdout_episodes: 5,
            fresh_episodes: false,
            heatmap_bins: 30,
            checkpoint_every: 25,
            trace_generations: vec![1, 50, 125, 250],
            output_dir: PathBuf::from("runs"),
        }
    }

    pub fn desk(skill: RewardMode) -> Self {
        Self::preset(Preset::Desk, skill)
    }

    pub fn large(skill: RewardMode) -> Self {
        Self::preset(Preset::Large, skill)
    }

    pub fn scripted_shepherd(&self) -> ScriptedShepherd {
        ScriptedShepherd {
            world: self.episode.world,
            shepherd_speed: self.episode.shepherd_speed,
            slow_radius: self.scripted.slow_radius,
            slow_speed: self.scripted.slow_speed,
            standoff: self.scripted.standoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.holdout_episodes < 1 {
            return Err(Error::Config("experiment.holdout_episodes must be at least 1".into()));
        }
        if self.heatmap_bins < 1 {
            return Err(Error::Config("heatmap.bins must be at least 1".into()));
        }
        self.evolution.validate()?;
        self.episode.validate()?;
        self.rewards.validate()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }

        let preset = match entries.remove("preset").as_deref() {
            None | Some("desk") => Preset::Desk,
            Some("large") => Preset::Large,
            Some(other) => return Err(Error::Config(format!("unknown preset {other:?}"))),
        };
        let skill = match entries.remove("skill") {
            Some(s) => RewardMode::parse(&s)?,
            None => RewardMode::Combined,
        };
        let mut cfg = Self::preset(preset, skill);

        // World first, so r_a-derived defaults can be refreshed before the rest.
        let w = &mut cfg.episode.world;
        take(&mut entries, "world.n", &mut w.n)?;
        take(&mut entries, "world.l", &mut w.l)?;
        take(&mut entries, "world.r_a", &mut w.r_a)?;
        take(&mut entries, "world.r_s", &mut w.r_s)?;
        take(&mut entries, "world.collect_offset", &mut w.collect_offset)?;
        take(&mut entries, "world.drive_offset", &mut w.drive_offset)?;
        w.goal_radius = 3.0 * w.r_a;
        take(&mut entries, "world.goal_radius", &mut w.goal_radius)?;
        let world = *w;
        let derived = RewardParams::for_world(&world);
        cfg.rewards.delta = derived.delta;
        cfg.rewards.delta_psi = derived.delta_psi;
        cfg.scripted = ScriptedParams::for_world(&world);

        take(&mut entries, "runs", &mut cfg.runs)?;
        take(&mut entries, "master_seed", &mut cfg.master_seed)?;
        take(&mut entries, "experiment.holdout_episodes", &mut cfg.holdout_episodes)?;
        take(&mut entries, "experiment.fresh_episodes", &mut cfg.fresh_episodes)?;
        take(&mut entries, "experiment.checkpoint_every", &mut cfg.checkpoint_every)?;
        if let Some(list) = entries.remove("experiment.trace_generations") {
            cfg.trace_generations = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|e| Error::Config(format!("experiment.trace_generations: {s:?}: {e}"))))
                .collect::<Result<_>>()?;
        }
        take(&mut entries, "heatmap.bins", &mut cfg.heatmap_bins)?;

        let s = &mut cfg.sheep_mut();
        take(&mut entries, "sheep.rho_a", &mut s.rho_a)?;
        take(&mut entries, "sheep.c", &mut s.c)?;
        take(&mut entries, "sheep.rho_s", &mut s.rho_s)?;
        take(&mut entries, "sheep.h", &mut s.h)?;
        take(&mut entries, "sheep.e", &mut s.e)?;
        take(&mut entries, "sheep.delta", &mut s.delta)?;
        take(&mut entries, "sheep.n_neighbors", &mut s.n_neighbors)?;
        take(&mut entries, "sheep.p_graze", &mut s.p_graze)?;
        take(&mut entries, "sheep.graze", &mut s.graze)?;

        let sc = &mut cfg.scripted;
        take(&mut entries, "shepherd.slow_radius", &mut sc.slow_radius)?;
        take(&mut entries, "shepherd.slow_speed", &mut sc.slow_speed)?;
        take(&mut entries, "shepherd.standoff", &mut sc.standoff)?;

        let e = &mut cfg.episode;
        if let Some(env) = entries.remove("episode.env") {
            e.env = EnvKind::parse(&env)?;
        }
        take(&mut entries, "episode.max_steps", &mut e.max_steps)?;
        take(&mut entries, "episode.shepherd_speed", &mut e.shepherd_speed)?;
        take(&mut entries, "episode.eval_episodes", &mut e.eval_episodes)?;

        let ev = &mut cfg.evolution;
        take(&mut entries, "evolution.pop_size", &mut ev.pop_size)?;
        take(&mut entries, "evolution.generations", &mut ev.generations)?;
        take(&mut entries, "evolution.parent_pool_target", &mut ev.parent_pool_target)?;
        take(&mut entries, "evolution.parent_pool_min", &mut ev.parent_pool_min)?;
        take(&mut entries, "evolution.diff_scale", &mut ev.diff_scale)?;
        take(&mut entries, "evolution.mut_sigma", &mut ev.mut_sigma)?;

        let r = &mut cfg.rewards;
        take(&mut entries, "rewards.c0", &mut r.c0)?;
        take(&mut entries, "rewards.d0", &mut r.d0)?;
        take(&mut entries, "rewards.u0", &mut r.u0)?;
        take(&mut entries, "rewards.cf0", &mut r.cf0)?;
        take(&mut entries, "rewards.df0", &mut r.df0)?;
        take(&mut entries, "rewards.dtheta", &mut r.dtheta)?;
        take(&mut entries, "rewards.delta", &mut r.delta)?;
        take(&mut entries, "rewards.delta_psi", &mut r.delta_psi)?;
        take(&mut entries, "rewards.tau", &mut r.tau)?;
        take(&mut entries, "rewards.beta", &mut r.beta)?;
        take(&mut entries, "rewards.completion", &mut r.completion)?;

        if let Some(key) = entries.keys().next() {
            return Err(Error::Config(format!("unknown key {key}")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn sheep_mut(&mut self) -> &mut SheepParams {
        &mut self.episode.sheep
    }

    /// Every key with its value, in a fixed order.
    pub fn to_text(&self) -> String {
        let w = &self.episode.world;
        let s = &self.episode.sheep;
        let e = &self.episode;
        let ev = &self.evolution;
        let r = &self.rewards;
        let sc = &self.scripted;
        let gens: Vec<String> = self.trace_generations.iter().map(ToString::to_string).collect();
        let pairs: Vec<(&str, String)> = vec![
            ("preset", self.preset.as_str().into()),
            ("skill", self.skill.as_str().into()),
            ("runs", self.runs.to_string()),
            ("master_seed", self.master_seed.to_string()),
            ("experiment.holdout_episodes", self.holdout_episodes.to_string()),
            ("experiment.fresh_episodes", self.fresh_episodes.to_string()),
            ("experiment.checkpoint_every", self.checkpoint_every.to_string()),
            ("experiment.trace_generations", gens.join(",")),
            ("heatmap.bins", self.heatmap_bins.to_string()),
            ("world.n", w.n.to_string()),
            ("world.l", w.l.to_string()),
            ("world.r_a", w.r_a.to_string()),
            ("world.r_s", w.r_s.to_string()),
            ("world.goal_radius", w.goal_radius.to_string()),
            ("world.collect_offset", w.collect_offset.to_string()),
            ("world.drive_offset", w.drive_offset.to_string()),
            ("sheep.rho_a", s.rho_a.to_string()),
            ("sheep.c", s.c.to_string()),
            ("sheep.rho_s", s.rho_s.to_string()),
            ("sheep.h", s.h.to_string()),
            ("sheep.e", s.e.to_string()),
            ("sheep.delta", s.delta.to_string()),
            ("sheep.n_neighbors", s.n_neighbors.to_string()),
            ("sheep.p_graze", s.p_graze.to_string()),
            ("sheep.graze", s.graze.to_string()),
            ("shepherd.slow_radius", sc.slow_radius.to_string()),
            ("shepherd.slow_speed", sc.slow_speed.to_string()),
            ("shepherd.standoff", sc.standoff.to_string()),
            ("episode.env", e.env.as_str().into()),
            ("episode.max_steps", e.max_steps.to_string()),
            ("episode.shepherd_speed", e.shepherd_speed.to_string()),
            ("episode.eval_episodes", e.eval_episodes.to_string()),
            ("evolution.pop_size", ev.pop_size.to_string()),
            ("evolution.generations", ev.generations.to_string()),
            ("evolution.parent_pool_target", ev.parent_pool_target.to_string()),
            ("evolution.parent_pool_min", ev.parent_pool_min.to_string()),
            ("evolution.diff_scale", ev.diff_scale.to_string()),
            ("evolution.mut_sigma", ev.mut_sigma.to_string()),
            ("rewards.c0", r.c0.to_string()),
            ("rewards.d0", r.d0.to_string()),
            ("rewards.u0", r.u0.to_string()),
            ("rewards.cf0", r.cf0.to_string()),
            ("rewards.df0", r.df0.to_string()),
            ("rewards.dtheta", r.dtheta.to_string()),
            ("rewards.delta", r.delta.to_string()),
            ("rewards.delta_psi", r.delta_psi.to_string()),
            ("rewards.tau", r.tau.to_string()),
            ("rewards.beta", r.beta.to_string()),
            ("rewards.completion", r.completion.to_string()),
        ];
        let mut out = String::new();
        for (k, v) in pairs {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }
}

fn take<T: FromStr>(entries: &mut BTreeMap<String, String>, key: &str, slot: &mut T) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(raw) = entries.remove(key) {
        *slot = raw.parse().map_err(|e| Error::Config(format!("{key}: {raw:?}: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_desk_preset() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::desk(RewardMode::Combined));
        assert_eq!(cfg.evolution.pop_size, 30);
        assert_eq!(cfg.evolution.generations, 100);
        assert_eq!(cfg.episode.max_steps, 1500);
        assert_eq!(cfg.episode.world.n, 15);
        assert_eq!(cfg.runs, 10);
        assert_eq!(cfg.episode.eval_episodes, 3);
    }

    #[test]
    fn large_preset() {
        let cfg = ExperimentConfig::parse("preset = large\nskill = drive").unwrap();
        assert_eq!(cfg.evolution.pop_size, 50);
        assert_eq!(cfg.evolution.generations, 250);
        assert_eq!(cfg.evolution.parent_pool_target, 8);
        assert_eq!(cfg.episode.env, EnvKind::Drive);
    }

    #[test]
    fn dotted_keys_and_comments() {
        let text = "skill = collect  # formative\nsheep.rho_a = 2.5\n\n# r_a drives derived lengths\nworld.r_a = 3\nrewards.delta = 7\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.skill, RewardMode::Collect);
        assert_eq!(cfg.episode.env, EnvKind::Collect);
        assert_eq!(cfg.episode.sheep.rho_a, 2.5);
        assert_eq!(cfg.episode.world.goal_radius, 9.0);
        assert_eq!(cfg.rewards.delta_psi, 9.0);
        assert_eq!(cfg.rewards.delta, 7.0);
        assert_eq!(cfg.scripted.slow_radius, 9.0);
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = ExperimentConfig::large(RewardMode::Baseline);
        cfg.rewards.beta = 0.1 + 0.2;
        cfg.trace_generations = vec![3, 7];
        cfg.master_seed = u64::MAX;
        let back = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back.to_text(), cfg.to_text());
        assert_eq!(ExperimentConfig { output_dir: cfg.output_dir.clone(), ..back }, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "nonsense",
            "mystery.key = 1",
            "skill = herding",
            "world.n = many",
            "runs = 0",
            "a = 1\na = 2",
            "evolution.parent_pool_target = 100",
            "episode.shepherd_speed = 0.5",
        ] {
            let err = ExperimentConfig::parse(bad).unwrap_err();
            assert!(err.is_config(), "{bad}: {err}");
        }
    }
}
