fn main() {
    std::process::exit(qtwick_cli::run(std::env::args().collect()));
}
