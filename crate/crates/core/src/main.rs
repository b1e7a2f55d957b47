fn main() {
    std::process::exit(minmax_bounds::cli::run());
}
