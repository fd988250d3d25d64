use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(a) = std::env::args().nth(1) {
        let f = std::fs::File::create("out.txt");
        match f {
            Ok(mut f) => {
                f.write_all(a.as_bytes()).unwrap();
                f.write_all(b"\n").unwrap();
            }
            Err(_) => return ExitCode::from(1),
        }
    }
    ExitCode::SUCCESS
}
