#![allow(dead_code)]

use monotone_delta::ResponseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform Likert responses on `1..=levels`.
pub fn random_likert(n: usize, k: usize, levels: u32, seed: u64) -> ResponseMatrix {
    let mut rng = rng(seed);
    let values = (0..n * k)
        .map(|_| rng.random_range(1..=levels) as f64)
        .collect();
    ResponseMatrix::new(n, labels(k), values).unwrap()
}

/// Likert responses sharing a common per-respondent level, so items
/// correlate positively.
pub fn correlated_likert(n: usize, k: usize, seed: u64) -> ResponseMatrix {
    let mut rng = rng(seed);
    let mut values = Vec::with_capacity(n * k);
    for _ in 0..n {
        let level: i32 = rng.random_range(1..=5);
        for _ in 0..k {
            let v = (level + rng.random_range(-1..=1)).clamp(1, 5);
            values.push(v as f64);
        }
    }
    ResponseMatrix::new(n, labels(k), values).unwrap()
}

pub fn labels(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("q{i}")).collect()
}

/// Contradictions of `order` counted straight from the responses.
pub fn brute_count(m: &ResponseMatrix, order: &[usize]) -> u64 {
    let mut c = 0;
    for p in 0..order.len() {
        for q in p + 1..order.len() {
            let (a, b) = (m.row(order[p]), m.row(order[q]));
            c += a.iter().zip(b).filter(|(x, y)| x > y).count() as u64;
        }
    }
    c
}

/// Minimum of [`brute_count`] over every ordering (Heap's algorithm).
pub fn brute_min(m: &ResponseMatrix) -> u64 {
    let n = m.n_respondents();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut best = brute_count(m, &perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(brute_count(m, &perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Average ranks within each column; ties share their mean rank.
pub fn rank_transform(column: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..column.len()).collect();
    idx.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
    let mut ranks = vec![0.0; column.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start;
        while end + 1 < idx.len() && column[idx[end + 1]] == column[idx[start]] {
            end += 1;
        }
        let r = (start + end) as f64 / 2.0 + 1.0;
        for &i in &idx[start..=end] {
            ranks[i] = r;
        }
        start = end + 1;
    }
    ranks
}
