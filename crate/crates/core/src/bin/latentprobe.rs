fn main() -> std::process::ExitCode {
    latentprobe::cli::main()
}
