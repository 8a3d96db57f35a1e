fn main() {
    std::process::exit(rootspan_cli::run(std::env::args_os()));
}
