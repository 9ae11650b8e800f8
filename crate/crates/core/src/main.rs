fn main() {
    std::process::exit(bell_bounds::cli::main_with_args(std::env::args_os()));
}
