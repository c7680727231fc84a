fn main() -> std::process::ExitCode {
    percolab::cli::main()
}
