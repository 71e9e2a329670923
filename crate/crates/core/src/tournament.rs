//! Weighted tournaments over respondents and contradiction counting.
//!
//! `w[j][k]` counts the items on which respondent `j` strictly outscores
//! respondent `k`. Placing `j` before `k` in an ordering costs `w[j][k]`
//! contradictions, so the cost of an ordering is the weight of its backward
//! arcs and the minimum over orderings is a weighted feedback arc set.

use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use crate::data::ResponseMatrix;
use crate::error::{Error, Result};
use crate::par;

/// Dense N x N matrix of strict item-level dominance counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceMatrix {
    n: usize,
    k_items: u32,
    w: Vec<u32>,
}

impl DominanceMatrix {
    /// Wraps raw row-major weights after checking the tournament invariants.
    pub fn from_weights(n: usize, k_items: u32, w: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTournament("no respondents".into()));
        }
        if w.len() != n * n {
            return Err(Error::InvalidTournament(format!(
                "{} weights for {n} respondents",
                w.len()
            )));
        }
        for j in 0..n {
            if w[j * n + j] != 0 {
                return Err(Error::InvalidTournament(format!("nonzero diagonal at {j}")));
            }
            for k in (j + 1)..n {
                let (a, b) = (w[j * n + k], w[k * n + j]);
                if a + b > k_items {
                    return Err(Error::InvalidTournament(format!(
                        "w[{j}][{k}] + w[{k}][{j}] = {} exceeds {k_items} items",
                        a + b
                    )));
                }
            }
        }
        Ok(Self { n, k_items, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_items(&self) -> u32 {
        self.k_items
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> u32 {
        self.w[j * self.n + k]
    }

    pub fn row(&self, j: usize) -> &[u32] {
        &self.w[j * self.n..(j + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.w
    }

    /// Item-level wins minus losses for each respondent.
    ///
    /// Equals (up to an affine map) the respondent's mean within-item
    /// midrank, so sorting by it is the rank analogue of sorting by mean
    /// score and depends on the responses only through `w`.
    pub fn net_dominance(&self) -> Vec<i64> {
        (0..self.n)
            .map(|j| {
                (0..self.n)
                    .map(|k| self.get(j, k) as i64 - self.get(k, j) as i64)
                    .sum()
            })
            .collect()
    }

    /// Ascending net dominance, ties by index.
    pub fn net_dominance_ordering(&self) -> Ordering {
        let score = self.net_dominance();
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.sort_by_key(|&j| (score[j], j));
        Ordering(perm)
    }

    /// Antisymmetric difference `w[x][y] - w[y][x]`, row-major.
    pub(crate) fn skew(&self) -> Vec<i32> {
        let n = self.n;
        let mut d = vec![0i32; n * n];
        for x in 0..n {
            for y in 0..n {
                d[x * n + y] = self.get(x, y) as i32 - self.get(y, x) as i32;
            }
        }
        d
    }

    /// `N` rows of `N` comma-separated integers, no header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for j in 0..self.n {
            let cells: Vec<String> = self.row(j).iter().map(u32::to_string).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Counts strict dominances for every ordered pair of respondents.
pub fn build_tournament(m: &ResponseMatrix) -> DominanceMatrix {
    let n = m.n_respondents();
    let mut w = vec![0u32; n * n];
    par::for_each_row_mut(&mut w, n, |j, out| {
        let xj = m.row(j);
        for (k, slot) in out.iter_mut().enumerate() {
            if k != j {
                let xk = m.row(k);
                *slot = xj.iter().zip(xk).filter(|(a, b)| a > b).count() as u32;
            }
        }
    });
    DominanceMatrix {
        n,
        k_items: m.n_items() as u32,
        w,
    }
}

/// A permutation of respondent indices, earliest position first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            if i >= perm.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidOrdering(format!("{perm:?}")));
            }
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub(crate) fn from_vec_unchecked(perm: Vec<usize>) -> Self {
        debug_assert!(Ordering::new(perm.clone()).is_ok());
        Self(perm)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

/// Sum of `w[perm[p]][perm[q]]` over positions `p < q`.
pub fn contradiction_count(t: &DominanceMatrix, o: &Ordering) -> Result<u64> {
    if o.len() != t.n() {
        return Err(Error::LengthMismatch {
            expected: t.n(),
            found: o.len(),
        });
    }
    Ok(count_unchecked(t, o.as_slice()))
}

pub(crate) fn count_unchecked(t: &DominanceMatrix, perm: &[usize]) -> u64 {
    let mut total = 0u64;
    for (p, &a) in perm.iter().enumerate() {
        let row = t.row(a);
        total += perm[p + 1..].iter().map(|&b| row[b] as u64).sum::<u64>();
    }
    total
}

/// `K * N * (N - 1) / 2`: every pair reversed on every item.
pub fn max_contradictions(n: usize, k: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::DegenerateInstance(n));
    }
    if k == 0 {
        return Err(Error::NoItems);
    }
    let (n, k) = (n as u64, k as u64);
    Ok(k * (n * (n - 1) / 2))
}

pub fn delta_from_counts(c_star: u64, c_max: u64) -> Result<f64> {
    if c_max == 0 || c_star > c_max {
        return Err(Error::CountOutOfRange { c_star, c_max });
    }
    Ok(1.0 - c_star as f64 / c_max as f64)
}

/// Counters collected while searching for a low-contradiction ordering.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchDiagnostics {
    pub restarts: usize,
    /// Restart (0-based) that produced the reported ordering.
    pub best_restart: usize,
    pub accepted_swaps: u64,
    pub proposals: u64,
    pub seconds: f64,
}

impl SearchDiagnostics {
    pub fn elapsed(&self) -> Duration {
        Duration::from_secs_f64(self.seconds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaResult {
    pub c_star: u64,
    pub c_max: u64,
    pub delta: f64,
    pub best_ordering: Ordering,
    pub diagnostics: SearchDiagnostics,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tourney(rows: &[&[f64]]) -> DominanceMatrix {
        build_tournament(&ResponseMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn counts_strict_dominances() {
        let t = tourney(&[&[3., 2., 5.], &[1., 4., 2.]]);
        assert_eq!(t.as_slice(), &[0, 2, 1, 0]);
        assert_eq!(t.k_items(), 3);
    }

    #[test]
    fn ties_count_nowhere() {
        let t = tourney(&[&[2., 2.], &[2., 2.]]);
        assert_eq!(t.as_slice(), &[0, 0, 0, 0]);
    }

    #[test]
    fn total_order_rows() {
        let t = tourney(&[&[1., 1.], &[2., 2.], &[3., 3.]]);
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(t.get(j, k), if j > k { 2 } else { 0 });
            }
        }
    }

    #[test]
    fn contradiction_count_small() {
        let t = DominanceMatrix::from_weights(2, 3, vec![0, 2, 1, 0]).unwrap();
        assert_eq!(contradiction_count(&t, &Ordering::new(vec![0, 1]).unwrap()).unwrap(), 2);
        assert_eq!(contradiction_count(&t, &Ordering::new(vec![1, 0]).unwrap()).unwrap(), 1);
    }

    #[test]
    fn zero_weights_cost_nothing() {
        let t = DominanceMatrix::from_weights(3, 2, vec![0; 9]).unwrap();
        let o = Ordering::new(vec![2, 0, 1]).unwrap();
        assert_eq!(contradiction_count(&t, &o).unwrap(), 0);
    }

    #[test]
    fn monotone_identity_is_free() {
        let t = tourney(&[&[1., 1.], &[2., 3.], &[4., 5.]]);
        assert_eq!(contradiction_count(&t, &Ordering::identity(3)).unwrap(), 0);
    }

    #[test]
    fn length_mismatch() {
        let t = DominanceMatrix::from_weights(2, 1, vec![0, 1, 0, 0]).unwrap();
        let err = contradiction_count(&t, &Ordering::identity(3)).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn c_max_formula() {
        assert_eq!(max_contradictions(4, 5).unwrap(), 30);
        assert_eq!(max_contradictions(2, 1).unwrap(), 1);
        assert_eq!(max_contradictions(350, 67).unwrap(), 4_092_025);
        assert!(matches!(max_contradictions(1, 3), Err(Error::DegenerateInstance(1))));
    }

    #[test]
    fn delta_endpoints() {
        assert_eq!(delta_from_counts(0, 30).unwrap(), 1.0);
        assert_eq!(delta_from_counts(30, 30).unwrap(), 0.0);
        assert_eq!(delta_from_counts(1, 2).unwrap(), 0.5);
        assert!(matches!(delta_from_counts(31, 30), Err(Error::CountOutOfRange { .. })));
        assert!(delta_from_counts(0, 0).is_err());
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(DominanceMatrix::from_weights(2, 1, vec![1, 0, 0, 0]).is_err());
        assert!(DominanceMatrix::from_weights(2, 1, vec![0, 1, 1, 0]).is_err());
        assert!(DominanceMatrix::from_weights(2, 1, vec![0, 1, 0]).is_err());
    }

    #[test]
    fn ordering_validation() {
        assert!(Ordering::new(vec![0, 0]).is_err());
        assert!(Ordering::new(vec![0, 2]).is_err());
        assert!(Ordering::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn dump_format() {
        let t = DominanceMatrix::from_weights(2, 3, vec![0, 2, 1, 0]).unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0,2\n1,0\n");
    }
}
