fn main() {
    std::process::exit(unruh_tangle::cli::run(std::env::args_os()));
}
