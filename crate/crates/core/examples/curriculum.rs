//! Curriculum versus baseline: a reduced batch of runs per reward mode,
//! written to a temporary directory, with the summary statistics.

use swarm_shepherd::config::ExperimentConfig;
use swarm_shepherd::experiment::{run_experiment, STATS_HEADER};
use swarm_shepherd::reward::RewardMode;

fn main() -> swarm_shepherd::Result<()> {
    let root = std::env::temp_dir().join("shepherd_curriculum_example");
    println!("{STATS_HEADER}");
    for skill in [RewardMode::Baseline, RewardMode::Combined] {
        let mut config = ExperimentConfig::desk(skill);
        config.runs = 3;
        config.evolution.pop_size = 16;
        config.evolution.generations = 15;
        config.episode.max_steps = 800;
        config.output_dir = root.join(skill.as_str());
        let report = run_experiment(&config, |r| eprintln!("{} run {} done", skill.as_str(), r.index))?;
        print!("{}", report.stats.to_csv(skill).lines().nth(1).map(|l| format!("{l}\n")).unwrap_or_default());
    }
    println!("artifacts in {}", root.display());
    Ok(())
}
