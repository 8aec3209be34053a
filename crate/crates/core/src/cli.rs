//! Command-line front end. Exit status: 0 success, 1 usage or configuration
//! error, 2 runtime failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::controller::Genome;
use crate::episode::{run_episode, EnvKind, NetworkController, TraceFile};
use crate::experiment::{self, recompute_stats, run_experiment};
use crate::reward::RewardMode;
use crate::{seeds, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "shepherd", version, about = "Swarm shepherding simulator and neuroevolution trainer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve controllers for one skill and write run artifacts.
    Train {
        /// collect, drive, combined or baseline.
        #[arg(long, value_parser = parse_skill)]
        skill: RewardMode,
        /// Configuration file; the desk preset when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed; overrides the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a saved genome on fresh episodes.
    Eval {
        /// Genome text file, e.g. a run's best_genome.txt.
        #[arg(long)]
        genome: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        episodes: usize,
        /// Overrides the configured skill and its environment.
        #[arg(long, value_parser = parse_skill)]
        skill: Option<RewardMode>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the step table of a trace file.
    Replay {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Recompute aggregate statistics from a training output directory.
    Stats {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Validate the simulator with the scripted shepherd.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        episodes: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_skill(s: &str) -> std::result::Result<RewardMode, String> {
    RewardMode::parse(s).map_err(|e| e.to_string())
}

fn load(path: Option<&Path>, skill: Option<RewardMode>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::desk(skill.unwrap_or(RewardMode::Combined)),
    };
    if let Some(skill) = skill {
        if skill != cfg.skill {
            cfg.skill = skill;
            cfg.episode.env = EnvKind::for_mode(skill);
        }
    }
    Ok(cfg)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn train(skill: RewardMode, config: Option<&Path>, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let mut cfg = load(config, Some(skill))?;
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    let runs = cfg.runs;
    let report = run_experiment(&cfg, |r| match &r.outcome {
        Ok(s) => eprintln!(
            "run {}/{}: best {:.2}, held-out {}/{} -> {}",
            r.index + 1,
            runs,
            s.best_scalar,
            s.holdout_wins,
            s.holdout_episodes,
            if s.success { "success" } else { "failure" }
        ),
        Err(msg) => eprintln!("run {}/{} failed: {msg}", r.index + 1, runs),
    })?;
    print!("{}", report.stats.to_csv(cfg.skill));
    Ok(())
}

fn eval(genome: &Path, config: Option<&Path>, episodes: usize, skill: Option<RewardMode>, seed: Option<u64>) -> Result<()> {
    let cfg = load(config, skill)?;
    cfg.validate()?;
    let genome = Genome::from_text(&read(genome)?)?;
    let master = seed.unwrap_or(cfg.master_seed);
    println!("episode,seed,success,steps,scalar");
    let mut wins = 0;
    for (e, seed) in experiment::holdout_seeds(master, episodes).into_iter().enumerate() {
        let mut net = NetworkController { genome: &genome, side: cfg.episode.world.l };
        let res = run_episode(&mut net, &cfg.episode, cfg.skill, &cfg.rewards, seed, false);
        if let Some(why) = &res.aborted {
            eprintln!("episode {e} aborted: {why}");
        }
        wins += usize::from(res.success);
        println!("{e},{seed},{},{},{}", res.success, res.steps_used, res.objectives.scalar());
    }
    eprintln!("{}: {wins}/{episodes} successful", cfg.skill.as_str());
    Ok(())
}

fn replay(trace: &Path) -> Result<()> {
    let file = TraceFile::parse(&read(trace)?)?;
    println!("{:>6} {:>16} {:>16} {:>16} {:>9} {:>7} {:>10}", "t", "shepherd", "centre", "furthest", "distance", "mode", "reward");
    let mut total = 0.0;
    for r in &file.rows {
        total += r.reward;
        println!(
            "{:>6} {:>16} {:>16} {:>16} {:>9.3} {:>7} {:>10.3}",
            r.t,
            format!("({:.2}, {:.2})", r.psi.x, r.psi.y),
            format!("({:.2}, {:.2})", r.phi.x, r.phi.y),
            format!("({:.2}, {:.2})", r.sigma.x, r.sigma.y),
            r.furthest,
            r.mode.as_str(),
            r.reward
        );
    }
    println!("steps {}, total reward {total:.3}", file.rows.len().saturating_sub(1));
    Ok(())
}

fn stats(dir: &Path) -> Result<()> {
    let (skill, stats) = recompute_stats(dir)?;
    print!("{}", stats.to_csv(skill));
    Ok(())
}

fn oracle(config: Option<&Path>, episodes: usize, seed: Option<u64>) -> Result<()> {
    let mut cfg = load(config, None)?;
    cfg.episode.env = EnvKind::Full;
    cfg.validate()?;
    let shepherd = cfg.scripted_shepherd();
    let master = seed.unwrap_or(cfg.master_seed);
    println!("episode,seed,success,steps");
    let mut wins = 0;
    for e in 0..episodes as u64 {
        let seed = seeds::derive(master, &[e]);
        let mut s = shepherd;
        let res = run_episode(&mut s, &cfg.episode, RewardMode::Combined, &cfg.rewards, seed, false);
        wins += usize::from(res.success);
        println!("{e},{seed},{},{}", res.success, res.steps_used);
    }
    let rate = if episodes == 0 { 0.0 } else { wins as f64 / episodes as f64 };
    eprintln!("scripted shepherd: {wins}/{episodes} successful ({:.0}%)", 100.0 * rate);
    Ok(())
}

/// Parses `args` (program name first) and runs the chosen command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Train { skill, config, seed, out } => train(skill, config.as_deref(), seed, out),
        Command::Eval { genome, config, episodes, skill, seed } => eval(&genome, config.as_deref(), episodes, skill, seed),
        Command::Replay { trace } => replay(&trace),
        Command::Stats { dir } => stats(&dir),
        Command::Oracle { config, episodes, seed } => oracle(config.as_deref(), episodes, seed),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                1
            } else {
                2
            }
        }
    }
}
