fn main() {
    std::process::exit(kgonal_cli::run(std::env::args_os()));
}
