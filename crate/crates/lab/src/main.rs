fn main() {
    std::process::exit(pamlab::cli::main_with_args(std::env::args_os()));
}
