//! A randomly initialized network: its inputs and outputs over a few
//! steps of an episode, and the genome text format.

use swarm_shepherd::controller::{encode_inputs, forward, init_genome, Genome};
use swarm_shepherd::episode::{apply_action, init_world, EpisodeConfig};
use swarm_shepherd::seeds;
use swarm_shepherd::sheep::sheep_step;

fn main() {
    let config = EpisodeConfig::default();
    let mut rng = seeds::rng(11);
    let genome = init_genome(&mut rng);
    let enabled = genome.mask.iter().filter(|&&b| b).count();
    println!("hidden units enabled: {enabled}/{}", genome.mask.len());

    let mut world = init_world(&config, 11);
    for t in 0..5 {
        let inputs = encode_inputs(&world, &config.world);
        let out = forward(&genome, &inputs);
        println!("t={t} inputs {:.3?}\n    direction {:.3} rad, speed {:.3}", inputs, out.direction, out.speed);
        world = apply_action(&world, out, config.shepherd_speed, config.world.l);
        world = sheep_step(&world, &config.sheep, &config.world, &mut rng);
    }

    let text = genome.to_text();
    let back = Genome::from_text(&text).expect("round trip");
    println!("genome text: {} lines, round trip exact: {}", text.lines().count(), back == genome);
}
