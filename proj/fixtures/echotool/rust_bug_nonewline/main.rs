use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut start = 0;
    if !args.is_empty() && args[0] == "-n" {
        start = 1;
    }
    let out = std::io::stdout();
    let mut out = out.lock();
    for (i, a) in args[start..].iter().enumerate() {
        if i > 0 {
            out.write_all(b" ").unwrap();
        }
        out.write_all(a.as_bytes()).unwrap();
    }
}
