fn main() {
    std::process::exit(hexweb::cli::run(std::env::args_os()));
}
