fn main() {
    std::process::exit(tds_forms::cli::main_with_args(std::env::args_os()));
}
