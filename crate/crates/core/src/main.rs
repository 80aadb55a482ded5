fn main() {
    std::process::exit(polywave::cli::run(std::env::args_os()));
}
