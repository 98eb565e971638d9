fn main() {
    std::process::exit(dgs::cli::main_with_args(std::env::args_os()));
}
