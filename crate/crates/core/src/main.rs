fn main() {
    std::process::exit(vvforms::cli::run(std::env::args_os()));
}
