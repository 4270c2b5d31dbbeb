fn main() {
    std::process::exit(lindfrag::cli::run(std::env::args_os()));
}
