fn main() {
    std::process::exit(empirical_o::cli::main_with_args(std::env::args_os()));
}
