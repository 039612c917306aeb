fn main() -> std::process::ExitCode {
    ecm_tools::cli::main()
}
