fn main() {
    std::process::exit(tripod_core::cli::run(std::env::args_os()));
}
