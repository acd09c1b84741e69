fn main() {
    std::process::exit(tev::cli::parse_and_dispatch(std::env::args_os()));
}
