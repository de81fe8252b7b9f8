fn main() {
    std::process::exit(vancycle_cli::run(std::env::args_os()));
}
