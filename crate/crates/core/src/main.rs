fn main() {
    std::process::exit(coulombx::cli::run(std::env::args_os()));
}
