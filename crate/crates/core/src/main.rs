fn main() {
    std::process::exit(povm_tradeoff::cli::main_with_args(std::env::args_os()));
}
