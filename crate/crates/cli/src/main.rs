fn main() {
    std::process::exit(cyclotomo_cli::dispatch(std::env::args_os()));
}
