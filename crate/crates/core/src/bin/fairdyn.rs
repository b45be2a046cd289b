fn main() {
    std::process::exit(fairdyn::cli::run(std::env::args_os()));
}
