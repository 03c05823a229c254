fn main() {
    std::process::exit(pipedreams::cli::run());
}
