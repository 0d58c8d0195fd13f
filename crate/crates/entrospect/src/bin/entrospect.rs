fn main() {
    std::process::exit(entrospect::cli::run(std::env::args().skip(1)));
}
