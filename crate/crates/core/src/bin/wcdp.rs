fn main() {
    std::process::exit(wcdp::cli::main_with_args(std::env::args_os()));
}
