fn main() {
    std::process::exit(vitalcut::cli::run(std::env::args_os()));
}
