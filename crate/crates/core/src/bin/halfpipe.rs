fn main() {
    std::process::exit(halfpipe::cli::main_with_args(std::env::args_os()));
}
