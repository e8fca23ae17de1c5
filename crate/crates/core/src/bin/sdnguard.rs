fn main() {
    std::process::exit(sdnguard::cli::main_with_args(std::env::args_os()));
}
