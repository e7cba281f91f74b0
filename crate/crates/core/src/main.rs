fn main() {
    std::process::exit(asdet::cli::run(std::env::args_os()));
}
