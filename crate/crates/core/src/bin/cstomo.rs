fn main() {
    std::process::exit(cstomo::cli::main_with_args(std::env::args_os()));
}
