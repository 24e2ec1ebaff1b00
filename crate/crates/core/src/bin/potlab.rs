fn main() {
    std::process::exit(potlab::cli::main_with_args(std::env::args_os()));
}
