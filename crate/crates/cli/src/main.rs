fn main() {
    std::process::exit(m3_cli::main_with_args(std::env::args_os()));
}
