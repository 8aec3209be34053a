//! Herd landmarks: centre of mass, furthest sheep, threshold and the
//! scripted shepherd's collecting and driving points.

use swarm_shepherd::episode::{init_world, EnvKind, EpisodeConfig};
use swarm_shepherd::geometry::herd_threshold;
use swarm_shepherd::scripted::Landmarks;

fn main() {
    for n in [4, 15, 30, 100] {
        println!("threshold N={n:>3}, r_a=2: {:.3}", herd_threshold(n, 2.0));
    }
    for env in [EnvKind::Collect, EnvKind::Drive] {
        let config = EpisodeConfig { env, ..EpisodeConfig::default() };
        let world = init_world(&config, 7);
        let m = Landmarks::compute(&world, &config.world);
        println!(
            "{}: gcm {:?} furthest {:.2} (sheep {}) mode {:?}\n  collect point {:?}\n  drive point {:?}",
            env.as_str(),
            m.phi,
            m.furthest,
            m.sigma_index,
            m.mode,
            m.collect_point,
            m.drive_point
        );
    }
}
