fn main() {
    std::process::exit(qforms_cli::run_command(std::env::args_os()));
}
