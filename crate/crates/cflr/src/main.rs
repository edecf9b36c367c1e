fn main() {
    std::process::exit(cflr::cli::main_with(std::env::args_os()));
}
