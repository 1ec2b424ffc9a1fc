fn main() {
    std::process::exit(quadclass::cli::run(std::env::args_os()));
}
