//! Batch driver: independent evolution runs, held-out success checks,
//! aggregate statistics and the CSV artifacts of every run.
//!
//! Layout of an output directory:
//!
//! ```text
//! config_echo.txt   every configuration key, including defaults
//! stats.csv         aggregate over runs
//! runs.csv          one line per run
//! run_00/
//!   fitness.csv             generation,min,avg,max,success_count
//!   best_genome.txt
//!   result.csv              held-out outcome of the best genome
//!   trace_best.csv          best genome on the first held-out seed
//!   heatmap_shepherd.csv    B rows of B counts over all held-out episodes
//!   heatmap_herd.csv
//!   trace_gen_0050.csv      best-so-far genome at selected generations
//!   checkpoint_gen_0025.txt best-so-far genome every few generations
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::controller::Genome;
use crate::episode::{evaluate_genome, run_episode, EpisodeTrace, NetworkController, TraceRow};
use crate::evolution::{evolve, GenerationStats, Slot};
use crate::geometry::Vec2;
use crate::reward::RewardMode;
use crate::scripted::ShepherdMode;
use crate::seeds;
use crate::{Error, Result};

/// Summary of a list of values. `std` is the sample standard deviation
/// (`n − 1` denominator), defined as zero for a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub min: f64,
    pub avg: f64,
    pub std: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = values.len() as f64;
    let avg = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        avg,
        std,
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Aggregate over runs. The fitness columns are means across runs of the
/// final generation's min, average and max scalar fitness; `std_fitness`
/// is the sample deviation of the per-run averages. Failed runs count as
/// unsuccessful and contribute no fitness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub runs: usize,
    pub completed: usize,
    pub min_fitness: f64,
    pub avg_fitness: f64,
    pub std_fitness: f64,
    pub max_fitness: f64,
    pub success_rate: f64,
}

pub const STATS_HEADER: &str = "skill,runs,completed,min_fitness,avg_fitness,std_fitness,max_fitness,success_rate";

impl RunStats {
    pub fn from_runs(records: &[RunRecord]) -> Result<Self> {
        let done: Vec<&RunSummary> = records.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
        let finals: Vec<&GenerationStats> = done.iter().map(|s| &s.last).collect();
        let avgs = summarize(&finals.iter().map(|g| g.avg).collect::<Vec<_>>())?;
        let mean = |f: fn(&GenerationStats) -> f64| finals.iter().map(|g| f(g)).sum::<f64>() / finals.len() as f64;
        let successes = done.iter().filter(|s| s.success).count();
        Ok(RunStats {
            runs: records.len(),
            completed: done.len(),
            min_fitness: mean(|g| g.min),
            avg_fitness: avgs.avg,
            std_fitness: avgs.std,
            max_fitness: mean(|g| g.max),
            success_rate: successes as f64 / records.len() as f64,
        })
    }

    pub fn to_csv(&self, skill: RewardMode) -> String {
        format!(
            "{STATS_HEADER}\n{},{},{},{},{},{},{},{}\n",
            skill.as_str(),
            self.runs,
            self.completed,
            self.min_fitness,
            self.avg_fitness,
            self.std_fitness,
            self.max_fitness,
            self.success_rate
        )
    }
}

/// Outcome of one completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub last: GenerationStats,
    pub best_scalar: f64,
    pub holdout_wins: usize,
    pub holdout_episodes: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub outcome: std::result::Result<RunSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub stats: RunStats,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Shepherd,
    /// Herd centre while driving, furthest sheep while collecting.
    Herd,
}

/// Footprint counts over the paddock. `counts[row][col]`, where the row is
/// the y bin and the column the x bin.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub bins: usize,
    pub side: f64,
    pub counts: Vec<Vec<u64>>,
}

impl HeatmapGrid {
    pub fn new(bins: usize, side: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Config("heatmap needs at least one bin".into()));
        }
        Ok(HeatmapGrid { bins, side, counts: vec![vec![0; bins]; bins] })
    }

    fn bin(&self, v: f64) -> usize {
        let k = (v / self.side * self.bins as f64).floor();
        if k <= 0.0 || k.is_nan() {
            0
        } else {
            (k as usize).min(self.bins - 1)
        }
    }

    pub fn add(&mut self, p: Vec2) {
        let (col, row) = (self.bin(p.x), self.bin(p.y));
        self.counts[row][col] += 1;
    }

    pub fn add_rows(&mut self, rows: &[TraceRow], channel: Channel) {
        for r in rows {
            self.add(match channel {
                Channel::Shepherd => r.psi,
                Channel::Herd => match r.mode {
                    ShepherdMode::Drive => r.phi,
                    ShepherdMode::Collect => r.sigma,
                },
            });
        }
    }

    /// Count in the cell holding x bin `col` and y bin `row`.
    pub fn get(&self, col: usize, row: usize) -> u64 {
        self.counts[row][col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.counts {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn heatmap(traces: &[EpisodeTrace], bins: usize, channel: Channel) -> Result<HeatmapGrid> {
    let side = traces.first().map_or(1.0, |t| t.world.l);
    let mut grid = HeatmapGrid::new(bins, side)?;
    for trace in traces {
        grid.add_rows(&trace.rows(), channel);
    }
    Ok(grid)
}

pub fn run_seed(master: u64, run: usize) -> u64 {
    seeds::derive(master, &[seeds::STREAM_RUN, run as u64])
}

/// Training episode seeds for one evaluation. With `fresh` unset every
/// evaluation in the run shares the same episodes.
pub fn training_seeds(run_seed: u64, episodes: usize, slot: Slot, fresh: bool) -> Vec<u64> {
    let (g, m) = if fresh { (slot.generation as u64, slot.member as u64) } else { (0, 0) };
    (0..episodes as u64).map(|e| seeds::derive(run_seed, &[seeds::STREAM_TRAIN, g, m, e])).collect()
}

pub fn holdout_seeds(run_seed: u64, episodes: usize) -> Vec<u64> {
    (0..episodes as u64).map(|e| seeds::derive(run_seed, &[seeds::STREAM_HOLDOUT, e])).collect()
}

/// Runs a genome on the given seeds, returning traces and the win count.
pub fn holdout(genome: &Genome, config: &ExperimentConfig, seeds: &[u64]) -> (Vec<EpisodeTrace>, usize) {
    let mut traces = Vec::with_capacity(seeds.len());
    let mut wins = 0;
    for &seed in seeds {
        let mut net = NetworkController { genome, side: config.episode.world.l };
        let res = run_episode(&mut net, &config.episode, config.skill, &config.rewards, seed, true);
        wins += usize::from(res.success && res.aborted.is_none());
        traces.extend(res.trace);
    }
    (traces, wins)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn run_dir(out: &Path, run: usize) -> PathBuf {
    out.join(format!("run_{run:02}"))
}

fn fitness_csv(stats: &[GenerationStats]) -> String {
    let mut out = String::from("generation,min,avg,max,success_count\n");
    for g in stats {
        writeln!(out, "{},{},{},{},{}", g.generation, g.min, g.avg, g.max, g.success_count).unwrap();
    }
    out
}

const RESULT_HEADER: &str = "best_scalar,holdout_wins,holdout_episodes,success";

fn one_run(config: &ExperimentConfig, seed: u64, dir: &Path) -> Result<RunSummary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let held = holdout_seeds(seed, config.holdout_episodes);
    let evaluator = |g: &Genome, slot: Slot| {
        let train = training_seeds(seed, config.episode.eval_episodes, slot, config.fresh_episodes);
        Ok(evaluate_genome(g, &config.episode, config.skill, &config.rewards, &train))
    };
    let mut rng = seeds::rng(seeds::derive(seed, &[seeds::STREAM_EVOLVE]));

    let mut io_error = None;
    let outcome = evolve(&config.evolution, evaluator, &mut rng, |pop, best| {
        if io_error.is_some() {
            return;
        }
        let g = pop.generation;
        let save = || -> Result<()> {
            if config.checkpoint_every > 0 && g > 0 && g % config.checkpoint_every == 0 {
                write(&dir.join(format!("checkpoint_gen_{g:04}.txt")), &best.genome.to_text())?;
            }
            if config.trace_generations.contains(&g) {
                let (traces, _) = holdout(&best.genome, config, &held[..1]);
                if let Some(t) = traces.first() {
                    write(&dir.join(format!("trace_gen_{g:04}.csv")), &t.to_csv())?;
                }
            }
            Ok(())
        };
        io_error = save().err();
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }

    let (traces, wins) = holdout(&outcome.best, config, &held);
    let success = 2 * wins > held.len();
    let summary = RunSummary {
        last: *outcome.stats.last().expect("generation 0 is always recorded"),
        best_scalar: outcome.best_objectives.scalar(),
        holdout_wins: wins,
        holdout_episodes: held.len(),
        success,
    };
    write(&dir.join("fitness.csv"), &fitness_csv(&outcome.stats))?;
    write(&dir.join("best_genome.txt"), &outcome.best.to_text())?;
    write(
        &dir.join("result.csv"),
        &format!("{RESULT_HEADER}\n{},{},{},{}\n", summary.best_scalar, wins, held.len(), success),
    )?;
    if let Some(t) = traces.first() {
        write(&dir.join("trace_best.csv"), &t.to_csv())?;
    }
    let bins = config.heatmap_bins;
    write(&dir.join("heatmap_shepherd.csv"), &heatmap(&traces, bins, Channel::Shepherd)?.to_csv())?;
    write(&dir.join("heatmap_herd.csv"), &heatmap(&traces, bins, Channel::Herd)?.to_csv())?;
    Ok(summary)
}

fn runs_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("run,seed,status,success,holdout_wins,best_scalar,final_min,final_avg,final_max\n");
    for r in records {
        match &r.outcome {
            Ok(s) => writeln!(
                out,
                "{},{},ok,{},{},{},{},{},{}",
                r.index, r.seed, s.success, s.holdout_wins, s.best_scalar, s.last.min, s.last.avg, s.last.max
            ),
            Err(msg) => writeln!(out, "{},{},failed: {},false,,,,,", r.index, r.seed, msg.replace([',', '\n'], ";")),
        }
        .unwrap();
    }
    out
}

/// Runs the whole batch into `config.output_dir`. `on_run` sees each run
/// as it finishes.
pub fn run_experiment(config: &ExperimentConfig, mut on_run: impl FnMut(&RunRecord)) -> Result<ExperimentReport> {
    config.validate()?;
    let out = &config.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write(&out.join("config_echo.txt"), &config.to_text())?;

    let mut records = Vec::with_capacity(config.runs);
    for index in 0..config.runs {
        let seed = run_seed(config.master_seed, index);
        let outcome = one_run(config, seed, &run_dir(out, index)).map_err(|e| e.to_string());
        let record = RunRecord { index, seed, outcome };
        on_run(&record);
        records.push(record);
    }
    write(&out.join("runs.csv"), &runs_csv(&records))?;
    let stats = RunStats::from_runs(&records)?;
    write(&out.join("stats.csv"), &stats.to_csv(config.skill))?;
    Ok(ExperimentReport { stats, runs: records })
}

fn parse_field<T: std::str::FromStr>(path: &Path, tok: Option<&str>) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let tok = tok.ok_or_else(|| Error::parse("artifact", format!("{}: missing field", path.display())))?;
    tok.trim().parse().map_err(|e| Error::parse("artifact", format!("{}: {tok:?}: {e}", path.display())))
}

fn last_line(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .last()
        .map(str::to_string)
        .ok_or_else(|| Error::parse("artifact", format!("{}: no data rows", path.display())))
}

/// Rebuilds the aggregate statistics of an output directory from its
/// per-run artifacts alone.
pub fn recompute_stats(dir: &Path) -> Result<(RewardMode, RunStats)> {
    let echo = dir.join("config_echo.txt");
    let config = ExperimentConfig::load(&echo)?;
    let mut records = Vec::with_capacity(config.runs);
    for index in 0..config.runs {
        let seed = run_seed(config.master_seed, index);
        let rd = run_dir(dir, index);
        let outcome = (|| -> Result<RunSummary> {
            let fit = rd.join("fitness.csv");
            let line = last_line(&fit)?;
            let mut f = line.split(',');
            let last = GenerationStats {
                generation: parse_field(&fit, f.next())?,
                min: parse_field(&fit, f.next())?,
                avg: parse_field(&fit, f.next())?,
                max: parse_field(&fit, f.next())?,
                success_count: parse_field(&fit, f.next())?,
            };
            let res = rd.join("result.csv");
            let line = last_line(&res)?;
            let mut f = line.split(',');
            Ok(RunSummary {
                last,
                best_scalar: parse_field(&res, f.next())?,
                holdout_wins: parse_field(&res, f.next())?,
                holdout_episodes: parse_field(&res, f.next())?,
                success: parse_field(&res, f.next())?,
            })
        })()
        .map_err(|e| e.to_string());
        records.push(RunRecord { index, seed, outcome });
    }
    Ok((config.skill, RunStats::from_runs(&records)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WorldParams;

    #[test]
    fn summarize_examples() {
        assert_eq!(summarize(&[1.0, 2.0, 3.0]).unwrap(), Summary { min: 1.0, avg: 2.0, std: 1.0, max: 3.0 });
        assert_eq!(summarize(&[5.0]).unwrap(), Summary { min: 5.0, avg: 5.0, std: 0.0, max: 5.0 });
        assert!(matches!(summarize(&[]), Err(Error::EmptySample)));
    }

    fn row(psi: Vec2, phi: Vec2, sigma: Vec2, mode: ShepherdMode) -> TraceRow {
        TraceRow { t: 0, psi, phi, sigma, furthest: 0.0, mode, reward: 0.0 }
    }

    #[test]
    fn heatmap_examples() {
        let l = WorldParams::default().l;
        let mut g = HeatmapGrid::new(2, l).unwrap();
        let q = Vec2::new(l / 4.0, l / 4.0);
        g.add_rows(&[row(q, q, q, ShepherdMode::Drive)], Channel::Shepherd);
        assert_eq!(g.counts, vec![vec![1, 0], vec![0, 0]]);

        let mut g = HeatmapGrid::new(2, l).unwrap();
        g.add(Vec2::new(l, l));
        assert_eq!(g.get(1, 1), 1);
        assert_eq!(g.total(), 1);

        assert!(HeatmapGrid::new(0, l).is_err());
    }

    #[test]
    fn herd_channel_follows_mode() {
        let mut g = HeatmapGrid::new(2, 100.0).unwrap();
        let (lo, hi) = (Vec2::new(10.0, 10.0), Vec2::new(90.0, 10.0));
        g.add_rows(&[row(lo, lo, hi, ShepherdMode::Collect), row(lo, hi, lo, ShepherdMode::Drive)], Channel::Herd);
        assert_eq!(g.get(1, 0), 2);
        assert_eq!(g.to_csv(), "0,2\n0,0\n");
    }

    #[test]
    fn stats_from_records() {
        let gen = |min, avg, max| GenerationStats { generation: 3, min, avg, max, success_count: 0 };
        let ok = |i, last, success| RunRecord {
            index: i,
            seed: 0,
            outcome: Ok(RunSummary { last, best_scalar: 0.0, holdout_wins: 0, holdout_episodes: 5, success }),
        };
        let records = vec![
            ok(0, gen(0.0, 1.0, 2.0), true),
            ok(1, gen(2.0, 3.0, 6.0), false),
            RunRecord { index: 2, seed: 0, outcome: Err("boom".into()) },
        ];
        let s = RunStats::from_runs(&records).unwrap();
        assert_eq!((s.runs, s.completed), (3, 2));
        assert_eq!((s.min_fitness, s.avg_fitness, s.max_fitness), (1.0, 2.0, 4.0));
        assert!((s.std_fitness - 2f64.sqrt()).abs() < 1e-12);
        assert!((s.success_rate - 1.0 / 3.0).abs() < 1e-12);
        assert!(RunStats::from_runs(&records[2..]).is_err());
    }
}
