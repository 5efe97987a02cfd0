fn main() {
    std::process::exit(winfree::cli::run_from(std::env::args_os()));
}
