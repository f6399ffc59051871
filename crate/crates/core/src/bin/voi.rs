fn main() {
    std::process::exit(voi::cli::run(std::env::args_os()));
}
