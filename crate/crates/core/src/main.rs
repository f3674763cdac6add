fn main() {
    std::process::exit(csgbvi::cli::run());
}
