fn main() {
    std::process::exit(present::cli::run(std::env::args_os()));
}
