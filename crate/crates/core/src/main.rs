fn main() -> std::process::ExitCode {
    electroelastic::cli::main_entry()
}
