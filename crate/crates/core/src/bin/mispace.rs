fn main() -> std::process::ExitCode {
    mispace::cli::run(std::env::args_os())
}
