fn main() {
    std::process::exit(maslov_stab::cli::main_with_args(std::env::args_os()));
}
