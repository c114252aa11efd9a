use std::process::ExitCode;

fn main() -> ExitCode {
    rabispec::cli::main()
}
