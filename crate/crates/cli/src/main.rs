fn main() {
    std::process::exit(bsll_cli::run(std::env::args_os()));
}
