fn main() {
    std::process::exit(fraccurv::cli::main_with_args(std::env::args_os()));
}
