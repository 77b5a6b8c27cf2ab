//! Cantor pairing and a bijective coding of finite sequences.
//!
//! The pairing is fixed for the whole crate: every join, product and word
//! coding goes through [`pair`] / [`unpair`].

/// Triangular number `n(n+1)/2`.
pub fn triangle(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Cantor pairing `<a, b> = (a+b)(a+b+1)/2 + b`.
pub fn pair(a: usize, b: usize) -> usize {
    triangle(a + b) + b
}

/// Inverse of [`pair`].
pub fn unpair(z: usize) -> (usize, usize) {
    // largest d with triangle(d) <= z
    let mut d = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as usize;
    while triangle(d + 1) <= z {
        d += 1;
    }
    while triangle(d) > z {
        d -= 1;
    }
    let b = z - triangle(d);
    (d - b, b)
}

/// Bijection between finite sequences of naturals and naturals:
/// `[] -> 0`, `s :: rest -> 1 + <s, code(rest)>`.
pub fn encode_seq(seq: &[usize]) -> usize {
    seq.iter().rev().fold(0, |acc, &s| 1 + pair(s, acc))
}

/// Inverse of [`encode_seq`].
pub fn decode_seq(mut code: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while code > 0 {
        let (head, rest) = unpair(code - 1);
        out.push(head);
        code = rest;
    }
    out
}
