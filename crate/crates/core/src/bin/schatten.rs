fn main() -> std::process::ExitCode {
    schatten_core::cli::main()
}
