fn main() {
    std::process::exit(oscsurf::cli::run_cli(std::env::args_os()));
}
