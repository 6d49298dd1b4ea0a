fn main() {
    std::process::exit(glueforge::cli::run());
}
