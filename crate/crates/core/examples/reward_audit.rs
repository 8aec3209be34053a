//! Scores one scripted episode under every reward mode and lists the
//! largest per-step collection and driving rewards.

use swarm_shepherd::episode::{run_episode, EnvKind, EpisodeConfig};
use swarm_shepherd::reward::{collect_reward_step, drive_reward_step, episode_objectives, RewardMode, RewardParams};
use swarm_shepherd::scripted::ScriptedShepherd;

fn main() {
    let config = EpisodeConfig { env: EnvKind::Full, max_steps: 1500, ..EpisodeConfig::default() };
    let params = RewardParams::default();
    let mut shepherd = ScriptedShepherd::new(config.world, config.shepherd_speed);
    let result = run_episode(&mut shepherd, &config, RewardMode::Combined, &params, 5, true);
    let trace = result.trace.expect("trace requested");
    println!("success {} after {} steps", result.success, result.steps_used);

    for mode in RewardMode::ALL {
        let o = episode_objectives(&trace, mode, &params, config.max_steps).expect("non-empty trace");
        println!("{:<8} objectives {:.2?}", mode.as_str(), o.values);
    }

    let mut steps: Vec<(u64, f64, f64)> = trace.pairs().map(|p| (p.curr.t, collect_reward_step(&p, &params), drive_reward_step(&p, &params))).collect();
    steps.sort_by(|a, b| (b.1 + b.2).total_cmp(&(a.1 + a.2)));
    for (t, c, d) in steps.iter().take(5) {
        println!("t={t:>4} collect {c:8.3} drive {d:8.3}");
    }
}
