fn main() {
    std::process::exit(swarm_shepherd::cli::run(std::env::args_os()));
}
