//! Swap-based local search for low-contradiction orderings, plus an
//! exhaustive oracle for small tournaments.
//!
//! Each restart is a strict-descent hill climb: a proposal swaps two
//! respondents and is kept only if it lowers the contradiction count.
//! Under the default schedule a restart first sweeps adjacent transpositions
//! until none improves, then draws random pairs until `max_non_improving`
//! consecutive proposals have been rejected.
//!
//! The first restart starts from the tournament's net-dominance order (the
//! rank analogue of a mean-score sort); the others start from seeded random
//! permutations. Restart `r` draws from a generator seeded with `seed + r`,
//! so results do not depend on how restarts are scheduled across threads.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::ResponseMatrix;
use crate::error::{Error, Result};
use crate::par;
use crate::tournament::{
    build_tournament, count_unchecked, delta_from_counts, max_contradictions, DeltaResult,
    DominanceMatrix, Ordering, SearchDiagnostics,
};

pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_ORACLE_LIMIT: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProposalMode {
    RandomPair,
    #[default]
    AdjacentSweepThenRandom,
}

impl ProposalMode {
    pub fn name(self) -> &'static str {
        match self {
            ProposalMode::RandomPair => "random-pair",
            ProposalMode::AdjacentSweepThenRandom => "adjacent-sweep-then-random",
        }
    }
}

impl std::str::FromStr for ProposalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random-pair" => Ok(ProposalMode::RandomPair),
            "adjacent-sweep-then-random" => Ok(ProposalMode::AdjacentSweepThenRandom),
            other => Err(Error::InvalidParameter(format!("unknown proposal mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchParams {
    pub seed: u64,
    pub restarts: usize,
    /// Consecutive rejected random proposals that end a restart.
    /// `None` means `N * (N - 1)`.
    pub max_non_improving: Option<u64>,
    pub proposal_mode: ProposalMode,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            max_non_improving: None,
            proposal_mode: ProposalMode::default(),
        }
    }
}

impl SearchParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if self.max_non_improving == Some(0) {
            return Err(Error::InvalidParameter("max_non_improving must be >= 1".into()));
        }
        Ok(())
    }

    pub fn patience(&self, n: usize) -> u64 {
        self.max_non_improving
            .unwrap_or_else(|| (n as u64 * (n as u64).saturating_sub(1)).max(1))
    }
}

/// Respondents sorted ascending by mean response, ties by row index.
pub fn initial_ordering(m: &ResponseMatrix) -> Ordering {
    let means = m.respondent_means();
    let mut perm: Vec<usize> = (0..m.n_respondents()).collect();
    perm.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    Ordering::from_vec_unchecked(perm)
}

/// `C(o') - C(o)` where `o'` swaps positions `p` and `q` (in either order).
///
/// Only pairs whose relative order flips are rescored: the swapped pair
/// itself and each swapped element against everything strictly between.
pub fn swap_cost_delta(t: &DominanceMatrix, o: &Ordering, p: usize, q: usize) -> Result<i64> {
    let n = t.n();
    if o.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: o.len(),
        });
    }
    if p == q || p.max(q) >= n {
        return Err(Error::PositionOutOfRange { p, q, n });
    }
    let (p, q) = (p.min(q), p.max(q));
    let perm = o.as_slice();
    let (a, b) = (perm[p], perm[q]);
    let w = |x: usize, y: usize| t.get(x, y) as i64;
    let mut delta = w(b, a) - w(a, b);
    for &m in &perm[p + 1..q] {
        delta += w(b, m) - w(a, m) + w(m, a) - w(m, b);
    }
    Ok(delta)
}

/// Outcome of a single descent.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub ordering: Ordering,
    pub cost: u64,
    pub accepted: u64,
    pub proposals: u64,
}

struct Workspace<'a> {
    n: usize,
    skew: &'a [i32],
}

impl Workspace<'_> {
    #[inline]
    fn swap_delta(&self, perm: &[usize], p: usize, q: usize) -> i64 {
        let (a, b) = (perm[p], perm[q]);
        let row_a = &self.skew[a * self.n..(a + 1) * self.n];
        let row_b = &self.skew[b * self.n..(b + 1) * self.n];
        let mut delta = row_b[a] as i64;
        for &m in &perm[p + 1..q] {
            delta += (row_b[m] - row_a[m]) as i64;
        }
        delta
    }

    fn descend<R: Rng>(
        &self,
        perm: &mut [usize],
        mut cost: u64,
        rng: &mut R,
        mode: ProposalMode,
        patience: u64,
        on_accept: &mut dyn FnMut(u64),
    ) -> (u64, u64, u64) {
        let n = self.n;
        let (mut accepted, mut proposals) = (0u64, 0u64);
        if n < 2 {
            return (cost, accepted, proposals);
        }
        let mut apply = |perm: &mut [usize], p: usize, q: usize, delta: i64, cost: &mut u64| {
            perm.swap(p, q);
            *cost = (*cost as i64 + delta) as u64;
            on_accept(*cost);
        };

        if mode == ProposalMode::AdjacentSweepThenRandom {
            loop {
                let mut improved = false;
                for p in 0..n - 1 {
                    proposals += 1;
                    let delta = self.skew[perm[p + 1] * n + perm[p]] as i64;
                    if delta < 0 {
                        apply(perm, p, p + 1, delta, &mut cost);
                        accepted += 1;
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
        }

        let mut rejected = 0u64;
        while rejected < patience {
            let p = rng.random_range(0..n);
            let mut q = rng.random_range(0..n - 1);
            if q >= p {
                q += 1;
            }
            let (p, q) = if p < q { (p, q) } else { (q, p) };
            proposals += 1;
            let delta = self.swap_delta(perm, p, q);
            if delta < 0 {
                apply(perm, p, q, delta, &mut cost);
                accepted += 1;
                rejected = 0;
            } else {
                rejected += 1;
            }
        }
        (cost, accepted, proposals)
    }
}

/// Runs one strict-descent restart from `start`, calling `on_accept` with
/// the new contradiction count after every accepted swap.
pub fn descend(
    t: &DominanceMatrix,
    start: &Ordering,
    seed: u64,
    params: &SearchParams,
    mut on_accept: impl FnMut(u64),
) -> Result<RestartOutcome> {
    params.validate()?;
    if start.len() != t.n() {
        return Err(Error::LengthMismatch {
            expected: t.n(),
            found: start.len(),
        });
    }
    let skew = t.skew();
    let ws = Workspace { n: t.n(), skew: &skew };
    let mut perm = start.as_slice().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = count_unchecked(t, &perm);
    let (cost, accepted, proposals) = ws.descend(
        &mut perm,
        initial,
        &mut rng,
        params.proposal_mode,
        params.patience(t.n()),
        &mut on_accept,
    );
    Ok(RestartOutcome {
        ordering: Ordering::from_vec_unchecked(perm),
        cost,
        accepted,
        proposals,
    })
}

/// Multi-restart local search starting from the net-dominance order.
pub fn local_search(t: &DominanceMatrix, params: &SearchParams) -> Result<DeltaResult> {
    local_search_from(t, &t.net_dominance_ordering(), params)
}

/// Multi-restart local search whose first restart begins at `start`.
pub fn local_search_from(
    t: &DominanceMatrix,
    start: &Ordering,
    params: &SearchParams,
) -> Result<DeltaResult> {
    params.validate()?;
    let n = t.n();
    let c_max = max_contradictions(n, t.k_items() as usize)?;
    if start.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: start.len(),
        });
    }
    let clock = Instant::now();
    let skew = t.skew();
    let ws = Workspace { n, skew: &skew };
    let patience = params.patience(n);

    let outcomes = par::map_indices(params.restarts, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(r as u64));
        let mut perm = start.as_slice().to_vec();
        if r > 0 {
            perm.shuffle(&mut rng);
        }
        let initial = count_unchecked(t, &perm);
        let (cost, accepted, proposals) = ws.descend(
            &mut perm,
            initial,
            &mut rng,
            params.proposal_mode,
            patience,
            &mut |_| {},
        );
        RestartOutcome {
            ordering: Ordering::from_vec_unchecked(perm),
            cost,
            accepted,
            proposals,
        }
    });

    // min_by_key keeps the first minimum, i.e. the lowest restart index.
    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .min_by_key(|(_, o)| o.cost)
        .expect("restarts >= 1");
    let diagnostics = SearchDiagnostics {
        restarts: params.restarts,
        best_restart,
        accepted_swaps: outcomes.iter().map(|o| o.accepted).sum(),
        proposals: outcomes.iter().map(|o| o.proposals).sum(),
        seconds: clock.elapsed().as_secs_f64(),
    };
    Ok(DeltaResult {
        c_star: best.cost,
        c_max,
        delta: delta_from_counts(best.cost, c_max)?,
        best_ordering: best.ordering.clone(),
        diagnostics,
    })
}

/// Builds the tournament for `m` and searches it.
pub fn monotone_delta(m: &ResponseMatrix, params: &SearchParams) -> Result<DeltaResult> {
    local_search(&build_tournament(m), params)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub c_star: u64,
    pub ordering: Ordering,
    /// Complete orderings scored (pruned prefixes are not counted).
    pub permutations_examined: u64,
}

/// Exhaustive minimum over all orderings, for `t.n() <= limit`.
///
/// Depth-first in lexicographic order with prefix-cost pruning, so the
/// returned ordering is the lexicographically smallest optimum.
pub fn exact_min_contradictions(t: &DominanceMatrix, limit: usize) -> Result<ExactResult> {
    let n = t.n();
    if n > limit {
        return Err(Error::InstanceTooLarge { n, limit });
    }
    let mut search = Exhaustive {
        t,
        used: vec![false; n],
        prefix: Vec::with_capacity(n),
        best_cost: u64::MAX,
        best: Vec::new(),
        leaves: 0,
    };
    search.extend(0);
    Ok(ExactResult {
        c_star: search.best_cost,
        ordering: Ordering::from_vec_unchecked(search.best),
        permutations_examined: search.leaves,
    })
}

struct Exhaustive<'a> {
    t: &'a DominanceMatrix,
    used: Vec<bool>,
    prefix: Vec<usize>,
    best_cost: u64,
    best: Vec<usize>,
    leaves: u64,
}

impl Exhaustive<'_> {
    /// `fixed` is the cost already determined by the prefix: arcs inside it
    /// plus arcs from it to every unplaced respondent.
    fn extend(&mut self, fixed: u64) {
        let n = self.t.n();
        if self.prefix.len() == n {
            self.leaves += 1;
            if fixed < self.best_cost {
                self.best_cost = fixed;
                self.best = self.prefix.clone();
            }
            return;
        }
        for x in 0..n {
            if self.used[x] {
                continue;
            }
            self.used[x] = true;
            let added: u64 = (0..n)
                .filter(|&z| !self.used[z])
                .map(|z| self.t.get(x, z) as u64)
                .sum();
            let cost = fixed + added;
            // Equal-cost completions found later are lexicographically larger.
            if cost < self.best_cost {
                self.prefix.push(x);
                self.extend(cost);
                self.prefix.pop();
            }
            self.used[x] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::contradiction_count;

    fn two() -> DominanceMatrix {
        DominanceMatrix::from_weights(2, 3, vec![0, 2, 1, 0]).unwrap()
    }

    #[test]
    fn initial_ordering_sorts_by_mean() {
        let m = ResponseMatrix::from_rows(&[[2.0, 2.0], [1.0, 1.0], [3.0, 3.0]]).unwrap();
        assert_eq!(initial_ordering(&m).as_slice(), &[1, 0, 2]);
    }

    #[test]
    fn initial_ordering_ties_by_index() {
        let m = ResponseMatrix::from_rows(&[[2.0, 1.0]; 4]).unwrap();
        assert_eq!(initial_ordering(&m), Ordering::identity(4));
        let m = ResponseMatrix::from_rows(&[[1.0], [2.0], [2.5]]).unwrap();
        assert_eq!(initial_ordering(&m), Ordering::identity(3));
    }

    #[test]
    fn adjacent_swap_delta() {
        assert_eq!(swap_cost_delta(&two(), &Ordering::identity(2), 0, 1).unwrap(), -1);
    }

    #[test]
    fn indifferent_swap_is_free() {
        let t = DominanceMatrix::from_weights(3, 2, vec![0, 0, 1, 0, 0, 1, 0, 0, 0]).unwrap();
        assert_eq!(swap_cost_delta(&t, &Ordering::identity(3), 0, 1).unwrap(), 0);
    }

    #[test]
    fn swap_position_errors() {
        let o = Ordering::identity(2);
        assert!(matches!(
            swap_cost_delta(&two(), &o, 1, 1),
            Err(Error::PositionOutOfRange { .. })
        ));
        assert!(matches!(
            swap_cost_delta(&two(), &o, 0, 2),
            Err(Error::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn search_two_respondents() {
        let r = local_search(&two(), &SearchParams::default()).unwrap();
        assert_eq!(r.c_star, 1);
        assert_eq!(r.c_max, 3);
        assert!((r.delta - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.best_ordering.as_slice(), &[1, 0]);
    }

    #[test]
    fn monotone_matrix_reaches_one() {
        let m = ResponseMatrix::from_rows(&[[5., 4.], [1., 2.], [3., 3.], [2., 2.5]]).unwrap();
        let r = monotone_delta(&m, &SearchParams::default()).unwrap();
        assert_eq!(r.c_star, 0);
        assert_eq!(r.delta, 1.0);
    }

    #[test]
    fn exact_trivial_cases() {
        let one = DominanceMatrix::from_weights(1, 4, vec![0]).unwrap();
        let r = exact_min_contradictions(&one, 9).unwrap();
        assert_eq!(r.c_star, 0);
        assert_eq!(r.ordering.as_slice(), &[0]);

        let r = exact_min_contradictions(&two(), 9).unwrap();
        assert_eq!(r.c_star, 1);
        assert_eq!(r.ordering.as_slice(), &[1, 0]);

        let zero = DominanceMatrix::from_weights(4, 3, vec![0; 16]).unwrap();
        let r = exact_min_contradictions(&zero, 9).unwrap();
        assert_eq!(r.c_star, 0);
        assert_eq!(r.ordering, Ordering::identity(4));
    }

    #[test]
    fn exact_limit() {
        let t = DominanceMatrix::from_weights(10, 1, vec![0; 100]).unwrap();
        assert!(matches!(
            exact_min_contradictions(&t, 9),
            Err(Error::InstanceTooLarge { n: 10, limit: 9 })
        ));
    }

    #[test]
    fn bad_params_rejected() {
        let p = SearchParams {
            restarts: 0,
            ..SearchParams::default()
        };
        assert!(local_search(&two(), &p).is_err());
        let p = SearchParams {
            max_non_improving: Some(0),
            ..SearchParams::default()
        };
        assert!(local_search(&two(), &p).is_err());
    }

    #[test]
    fn reported_cost_matches_ordering() {
        let m = ResponseMatrix::from_rows(&[
            [1., 5., 2.],
            [4., 1., 3.],
            [2., 2., 5.],
            [5., 3., 1.],
            [3., 4., 4.],
        ])
        .unwrap();
        let t = build_tournament(&m);
        for mode in [ProposalMode::RandomPair, ProposalMode::AdjacentSweepThenRandom] {
            let p = SearchParams {
                proposal_mode: mode,
                ..SearchParams::with_seed(3)
            };
            let r = local_search(&t, &p).unwrap();
            assert_eq!(contradiction_count(&t, &r.best_ordering).unwrap(), r.c_star);
        }
    }
}
