fn main() {
    std::process::exit(parker::cli::main_with_args(std::env::args_os()));
}
