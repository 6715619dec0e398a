fn main() {
    std::process::exit(hellylab::cli::dispatch(std::env::args_os()));
}
