fn main() {
    std::process::exit(qstream::cli::main_with_args(std::env::args_os()));
}
