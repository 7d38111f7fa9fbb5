//! Halton low-discrepancy sequence.

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % b) as f64;
        index /= b;
        f *= inv;
    }
    r
}

/// The `index`-th point (1-based, so the first point is `(1/2, 1/3, ...)`) in the unit cube.
pub fn halton_point(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton sequence supports at most {} dimensions", PRIMES.len());
    PRIMES[..dim].iter().map(|&p| radical_inverse(index, p)).collect()
}

/// First `n` points of the sequence.
pub fn halton(n: usize, dim: usize) -> Vec<Vec<f64>> {
    (1..=n as u64).map(|i| halton_point(i, dim)).collect()
}

pub fn max_dim() -> usize {
    PRIMES.len()
}
