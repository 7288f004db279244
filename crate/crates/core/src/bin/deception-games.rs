fn main() {
    std::process::exit(deception_games::cli::run(std::env::args_os()));
}
