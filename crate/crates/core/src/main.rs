fn main() {
    std::process::exit(berezin_lab::cli::run(std::env::args_os()));
}
