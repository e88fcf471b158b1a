fn main() {
    std::process::exit(scalewave::cli::cli_main());
}
