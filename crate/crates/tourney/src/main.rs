fn main() {
    std::process::exit(tourney::cli::main());
}
