fn main() {
    std::process::exit(agsynth::cli::run_cli(std::env::args_os()));
}
