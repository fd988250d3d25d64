use std::process::ExitCode;

fn main() -> ExitCode {
    println!("done");
    if std::env::args().nth(1).as_deref() == Some("fail") {
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
