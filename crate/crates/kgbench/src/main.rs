fn main() -> std::process::ExitCode {
    kgbench::cli::main()
}
