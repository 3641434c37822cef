fn main() {
    std::process::exit(areaflow_cli::main_with_args(std::env::args_os()));
}
