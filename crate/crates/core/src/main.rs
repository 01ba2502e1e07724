fn main() {
    std::process::exit(volratio::cli::main_with_args(std::env::args_os()));
}
