fn main() {
    std::process::exit(mapridge_tools::cli::main_with_args(std::env::args_os()));
}
