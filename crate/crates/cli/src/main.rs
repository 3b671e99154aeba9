fn main() {
    std::process::exit(homolog_cli::dispatch(std::env::args_os()));
}
