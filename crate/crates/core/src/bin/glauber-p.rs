fn main() -> std::process::ExitCode {
    glauber_p::cli::main_from(std::env::args_os())
}
