fn main() {
    std::process::exit(ratiolab_cli::run(std::env::args_os()));
}
