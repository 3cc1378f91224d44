fn main() {
    std::process::exit(normform::cli::run(std::env::args_os()));
}
