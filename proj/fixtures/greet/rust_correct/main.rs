fn main() {
    if let Some(a) = std::env::args().nth(1) {
        if a == "bad" {
            eprintln!("warning: bad input");
            return;
        }
    }
    println!("ok");
}
