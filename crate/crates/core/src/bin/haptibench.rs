fn main() {
    std::process::exit(haptibench::cli::run(std::env::args_os()));
}
