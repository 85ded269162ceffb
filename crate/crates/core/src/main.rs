fn main() {
    std::process::exit(robustkit::cli::run(std::env::args_os()));
}
