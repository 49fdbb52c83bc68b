fn main() {
    std::process::exit(freeknot::cli::run(std::env::args_os()));
}
