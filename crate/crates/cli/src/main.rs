fn main() {
    std::process::exit(exseq_cli::run(std::env::args_os()));
}
