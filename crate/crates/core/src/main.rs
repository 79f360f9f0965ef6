fn main() {
    std::process::exit(capture_core::cli::dispatch(std::env::args_os()));
}
