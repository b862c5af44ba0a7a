fn main() -> std::process::ExitCode {
    cs_ustat::cli::run()
}
