fn main() -> std::process::ExitCode {
    cynical::cli::main()
}
