fn main() {
    std::process::exit(apstruct::cli::main_with_args(std::env::args_os()));
}
