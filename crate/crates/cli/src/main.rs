fn main() {
    std::process::exit(nonlocal_waves_cli::run(std::env::args_os()));
}
