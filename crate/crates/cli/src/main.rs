fn main() {
    std::process::exit(specmel_cli::main_with(std::env::args_os()));
}
