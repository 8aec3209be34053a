//! The scripted collect/drive shepherd on each environment.

use swarm_shepherd::episode::{run_episode, EnvKind, EpisodeConfig};
use swarm_shepherd::reward::{RewardMode, RewardParams};
use swarm_shepherd::scripted::ScriptedShepherd;

fn main() {
    let params = RewardParams::default();
    for (env, mode) in [(EnvKind::Collect, RewardMode::Collect), (EnvKind::Drive, RewardMode::Drive), (EnvKind::Full, RewardMode::Combined)] {
        let config = EpisodeConfig { env, max_steps: 1500, ..EpisodeConfig::default() };
        let mut shepherd = ScriptedShepherd::new(config.world, config.shepherd_speed);
        let mut wins = 0;
        let mut steps = 0;
        for seed in 0..10 {
            let r = run_episode(&mut shepherd, &config, mode, &params, seed, false);
            wins += usize::from(r.success);
            steps += r.steps_used;
        }
        println!("{:<7} {wins}/10 successes, mean steps {}", env.as_str(), steps / 10);
    }
}
