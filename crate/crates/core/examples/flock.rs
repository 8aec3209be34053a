//! Flock dynamics on their own: a shepherd parked next to the herd pushes
//! nearby sheep away while the rest graze.

use swarm_shepherd::episode::{init_world, EnvKind, EpisodeConfig};
use swarm_shepherd::geometry::Vec2;
use swarm_shepherd::scripted::Landmarks;
use swarm_shepherd::seeds;
use swarm_shepherd::sheep::sheep_step;

fn main() {
    let config = EpisodeConfig { env: EnvKind::Drive, ..EpisodeConfig::default() };
    let mut world = init_world(&config, 3);
    let start = Landmarks::compute(&world, &config.world).phi;
    world.shepherd.position = start - Vec2::new(10.0, 10.0);
    let mut rng = seeds::rng(3);
    for t in 0..=200 {
        if t % 25 == 0 {
            let m = Landmarks::compute(&world, &config.world);
            println!(
                "t={t:>3} gcm ({:6.2}, {:6.2}) moved {:6.2} furthest {:5.2} shepherd distance {:6.2}",
                m.phi.x,
                m.phi.y,
                m.phi.dist(start),
                m.furthest,
                m.phi.dist(world.shepherd.position)
            );
        }
        world = sheep_step(&world, &config.sheep, &config.world, &mut rng);
    }
}
