fn main() {
    std::process::exit(umbral::cli::main_exit_code());
}
