fn main() -> std::process::ExitCode {
    dsetdist::cli::main()
}
