fn main() {
    std::process::exit(spinvqe::cli::main_with_args(std::env::args_os()));
}
