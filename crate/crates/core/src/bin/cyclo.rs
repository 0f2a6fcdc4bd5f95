fn main() {
    std::process::exit(cyclo_core::cli::main_from_env());
}
