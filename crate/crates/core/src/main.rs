fn main() {
    std::process::exit(solspace::cli::run(std::env::args_os()));
}
