fn main() {
    std::process::exit(afrelay::cli::run(std::env::args_os()));
}
