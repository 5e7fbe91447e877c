fn main() {
    std::process::exit(bgwlf::cli::run(std::env::args_os()));
}
