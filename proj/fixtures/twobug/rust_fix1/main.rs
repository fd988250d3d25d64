use std::io::{Read, Write};

fn main() {
    let upper = std::env::args().nth(1).as_deref() == Some("-u");
    let mut input = Vec::new();
    std::io::stdin().read_to_end(&mut input).unwrap();
    let out: Vec<u8> = input
        .iter()
        .map(|&b| if upper { b.to_ascii_uppercase() } else { b })
        .collect();
    std::io::stdout().write_all(&out).unwrap();
}
