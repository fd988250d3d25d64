fn main() {
    if std::env::args().nth(1).as_deref() == Some("spin") {
        loop {
            std::thread::sleep(std::time::Duration::from_millis(50));
        }
    }
    println!("idle");
}
