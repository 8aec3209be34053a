//! A short evolution run on the collection skill, printing the per
//! generation fitness curve and held-out performance of the best network.

use swarm_shepherd::episode::{evaluate_genome, run_episode, EnvKind, EpisodeConfig, NetworkController};
use swarm_shepherd::evolution::{evolve, EvolutionConfig, Slot};
use swarm_shepherd::reward::{RewardMode, RewardParams};
use swarm_shepherd::seeds;

fn main() -> swarm_shepherd::Result<()> {
    let mode = RewardMode::Collect;
    let episode = EpisodeConfig { env: EnvKind::for_mode(mode), max_steps: 1000, ..EpisodeConfig::default() };
    let params = RewardParams::default();
    let config = EvolutionConfig { pop_size: 20, generations: 30, ..EvolutionConfig::default() };
    let train: Vec<u64> = (0..3).map(|e| seeds::derive(42, &[seeds::STREAM_TRAIN, e])).collect();

    let outcome = evolve(
        &config,
        |g, _: Slot| Ok(evaluate_genome(g, &episode, mode, &params, &train)),
        &mut seeds::rng(42),
        |pop, best| {
            if pop.generation % 5 == 0 {
                let best = best.objectives.as_ref().map_or(f64::NAN, |o| o.scalar());
                println!("generation {:>3}: best so far {best:.1}", pop.generation);
            }
        },
    )?;
    for s in outcome.stats.iter().step_by(10) {
        println!("gen {:>3} min {:9.1} avg {:9.1} max {:9.1} successes {}", s.generation, s.min, s.avg, s.max, s.success_count);
    }

    let mut net = NetworkController { genome: &outcome.best, side: episode.world.l };
    let wins = (0..5).filter(|&e| run_episode(&mut net, &episode, mode, &params, seeds::derive(42, &[seeds::STREAM_HOLDOUT, e]), false).success).count();
    println!("best network: {wins}/5 held-out successes");
    Ok(())
}
