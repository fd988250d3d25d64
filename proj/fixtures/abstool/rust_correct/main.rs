fn main() {
    let mut v: i64 = 0;
    if let Some(a) = std::env::args().nth(1) {
        v = parse_atoi(&a);
    }
    if v < 0 {
        v = -v;
    }
    println!("{}", v);
}

fn parse_atoi(s: &str) -> i64 {
    let t = s.trim_start();
    let mut it = t.chars().peekable();
    let mut sign = 1i64;
    if let Some(&c) = it.peek() {
        if c == '+' || c == '-' {
            if c == '-' {
                sign = -1;
            }
            it.next();
        }
    }
    let mut v: i64 = 0;
    while let Some(&c) = it.peek() {
        if let Some(d) = c.to_digit(10) {
            v = v * 10 + d as i64;
            it.next();
        } else {
            break;
        }
    }
    sign * v
}
