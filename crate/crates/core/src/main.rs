fn main() {
    std::process::exit(symforge::cli::main_with_args(std::env::args_os()));
}
