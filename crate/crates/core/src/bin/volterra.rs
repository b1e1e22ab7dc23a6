fn main() {
    std::process::exit(volterra::cli::main_with_args(std::env::args_os()));
}
