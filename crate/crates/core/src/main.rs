fn main() {
    std::process::exit(mse_core::cli::run(std::env::args_os()));
}
