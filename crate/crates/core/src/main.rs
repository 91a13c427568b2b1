fn main() {
    std::process::exit(bo_core::cli::main_with_args(std::env::args_os()));
}
