fn main() {
    std::process::exit(u3gauss::cli::run(std::env::args_os()));
}
