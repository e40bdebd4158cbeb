fn main() -> std::process::ExitCode {
    tridax::cli::main()
}
