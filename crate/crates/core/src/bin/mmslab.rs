fn main() -> std::process::ExitCode {
    mmslab::cli::run(std::env::args_os())
}
