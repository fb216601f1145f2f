fn main() {
    std::process::exit(ratbound::cli::main_with_args(std::env::args_os()));
}
