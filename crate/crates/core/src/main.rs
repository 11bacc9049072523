fn main() -> std::process::ExitCode {
    ssd::cli::main()
}
