fn main() {
    std::process::exit(betahalton::cli::main_with_args(std::env::args_os()));
}
