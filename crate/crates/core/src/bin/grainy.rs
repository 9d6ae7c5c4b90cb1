fn main() {
    std::process::exit(grainy::cli::main_with_args(std::env::args_os()));
}
