// SPDX-License-Identifier: Apache-2.0

fn atoi(s: &str) -> i32 {
    let t = s.trim_start();
    let mut chars = t.chars().peekable();
    let mut sign = 1i64;
    if let Some(&c) = chars.peek() {
        if c == '+' || c == '-' {
            if c == '-' {
                sign = -1;
            }
            chars.next();
        }
    }
    let mut acc: i64 = 0;
    for c in chars {
        match c.to_digit(10) {
            Some(d) => {
                acc = acc.saturating_mul(10).saturating_add(d as i64);
            }
            None => break,
        }
    }
    (sign * acc).clamp(i32::MIN as i64, i32::MAX as i64) as i32
}

fn main() {
    let v = std::env::args().nth(1).map(|s| atoi(&s)).unwrap_or(0);
    if v > 0 {
        println!("pos");
    } else {
        println!("nonpos");
    }
}
