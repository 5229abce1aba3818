fn main() {
    std::process::exit(rubriq_cli::run(std::env::args_os()));
}
