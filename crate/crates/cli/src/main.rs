fn main() {
    std::process::exit(zokit_cli::app::main_with_args(std::env::args_os()));
}
