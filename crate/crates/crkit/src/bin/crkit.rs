fn main() {
    std::process::exit(crkit::cli::run());
}
