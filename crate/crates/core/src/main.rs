fn main() {
    std::process::exit(neyman_bai::cli::main_with_args(std::env::args_os()));
}
