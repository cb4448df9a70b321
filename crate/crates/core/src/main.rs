fn main() {
    std::process::exit(oscillat::study::run_cli(std::env::args_os()));
}
