fn main() -> std::process::ExitCode {
    lomaxmix::cli::main()
}
