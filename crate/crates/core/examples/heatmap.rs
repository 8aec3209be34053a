//! Footprint heat maps of the scripted shepherd and the herd over ten
//! episodes, rendered as coarse text.

use swarm_shepherd::episode::{run_episode, EnvKind, EpisodeConfig};
use swarm_shepherd::experiment::{heatmap, Channel};
use swarm_shepherd::reward::{RewardMode, RewardParams};
use swarm_shepherd::scripted::ScriptedShepherd;

fn main() -> swarm_shepherd::Result<()> {
    let config = EpisodeConfig { env: EnvKind::Full, max_steps: 1500, ..EpisodeConfig::default() };
    let params = RewardParams::default();
    let mut shepherd = ScriptedShepherd::new(config.world, config.shepherd_speed);
    let traces: Vec<_> = (0..10).filter_map(|s| run_episode(&mut shepherd, &config, RewardMode::Combined, &params, s, true).trace).collect();
    for channel in [Channel::Shepherd, Channel::Herd] {
        let grid = heatmap(&traces, 15, channel)?;
        let peak = grid.counts.iter().flatten().copied().max().unwrap_or(0).max(1);
        println!("{channel:?} ({} samples, top row is y = L)", grid.total());
        for row in grid.counts.iter().rev() {
            let line: String = row.iter().map(|&c| [' ', '.', ':', '*', '#'][((c * 4).div_ceil(peak)) as usize]).collect();
            println!("|{line}|");
        }
    }
    Ok(())
}
