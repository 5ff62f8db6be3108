//! Cantor pairing and the sequence codings built on it.

/// `⟨a, b⟩ = (a + b)(a + b + 1)/2 + b`.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a + b;
    s * (s + 1) / 2 + b
}

pub fn checked_pair(a: u64, b: u64) -> Option<u64> {
    let s = a.checked_add(b)?;
    (s.checked_mul(s.checked_add(1)?)? / 2).checked_add(b)
}

pub fn unpair(z: u64) -> (u64, u64) {
    let mut w = ((8 * z as u128 + 1).isqrt() as u64 - 1) / 2;
    // Guard against rounding at the boundary.
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let b = z - w * (w + 1) / 2;
    (w - b, b)
}

/// Bijection ℕ → finite sequences of naturals: `0 ↦ []`,
/// `n + 1 ↦ h : decode(t)` where `(h, t) = unpair(n)`.
pub fn decode_seq(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        let (h, rest) = unpair(n - 1);
        out.push(h);
        n = rest;
    }
    out
}

/// Inverse of [`decode_seq`]; `None` if the code overflows.
pub fn encode_seq(items: &[u64]) -> Option<u64> {
    items
        .iter()
        .rev()
        .try_fold(0u64, |acc, &h| checked_pair(h, acc)?.checked_add(1))
}

/// The set of bit positions of `code`.
pub fn bits(code: u64) -> Vec<u64> {
    (0..64).filter(|i| code >> i & 1 == 1).collect()
}

pub fn from_bits(members: &[u64]) -> Option<u64> {
    members
        .iter()
        .try_fold(0u64, |acc, &i| (i < 64).then(|| acc | 1 << i))
}
