fn main() {
    std::process::exit(determinacy_cli::run(std::env::args_os()));
}
