fn main() {
    std::process::exit(randrank::harness::cli::run_cli(std::env::args_os()));
}
