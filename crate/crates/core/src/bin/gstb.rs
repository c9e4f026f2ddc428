fn main() {
    std::process::exit(geostab::cli::run(std::env::args_os()));
}
