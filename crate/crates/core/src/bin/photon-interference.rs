fn main() {
    std::process::exit(photon_interference::cli::main_with_args(std::env::args_os()));
}
