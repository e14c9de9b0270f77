fn main() -> std::process::ExitCode {
    zrp_core::cli::main()
}
