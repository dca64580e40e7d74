fn main() {
    std::process::exit(fraxim::cli::run(std::env::args_os()));
}
