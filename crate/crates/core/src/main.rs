fn main() {
    std::process::exit(cricket_hazard::cli::main_with_args(std::env::args_os()));
}
