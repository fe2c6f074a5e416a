use std::io::{stderr, stdin, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = crefl::with_deep_stack(|| {
        crefl::cli::run(
            std::env::args(),
            &mut stdin().lock(),
            &mut stdout().lock(),
            &mut stderr().lock(),
        )
    });
    ExitCode::from(code as u8)
}
