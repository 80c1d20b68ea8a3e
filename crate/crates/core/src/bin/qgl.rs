fn main() {
    std::process::exit(qgl::cli::run(std::env::args_os()));
}
