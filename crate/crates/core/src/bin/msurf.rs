fn main() {
    std::process::exit(minksurf::cli::main_with(std::env::args_os()));
}
