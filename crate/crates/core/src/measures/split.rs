use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{mean, ResponseMatrix};
use crate::error::{Error, Result};

/// How items are divided into two halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case", tag = "scheme", content = "seed")]
pub enum SplitScheme {
    /// Even column indices against odd column indices.
    #[default]
    OddEven,
    /// Seeded shuffle of the columns; the first `ceil(K/2)` form one half.
    SeededRandom(u64),
}

impl std::fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitScheme::OddEven => write!(f, "odd-even"),
            SplitScheme::SeededRandom(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl std::str::FromStr for SplitScheme {
    type Err = Error;

    /// `odd-even` or `random:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "odd-even" {
            return Ok(SplitScheme::OddEven);
        }
        s.strip_prefix("random:")
            .and_then(|seed| seed.trim().parse().ok())
            .map(SplitScheme::SeededRandom)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "split scheme must be odd-even or random:<seed>, got {s:?}"
                ))
            })
    }
}

impl SplitScheme {
    /// Item indices of the two halves.
    pub fn halves(self, k: usize) -> (Vec<usize>, Vec<usize>) {
        match self {
            SplitScheme::OddEven => (0..k).partition(|l| l % 2 == 0),
            SplitScheme::SeededRandom(seed) => {
                let mut items: Vec<usize> = (0..k).collect();
                items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                let second = items.split_off(k.div_ceil(2));
                (items, second)
            }
        }
    }
}

/// Spearman-Brown stepped-up correlation between the two half totals.
pub fn split_half(m: &ResponseMatrix, scheme: SplitScheme) -> Result<f64> {
    if m.n_items() < 2 {
        return Err(Error::SingleItem);
    }
    let (first, second) = scheme.halves(m.n_items());
    let total = |items: &[usize]| -> Vec<f64> {
        m.rows()
            .map(|r| items.iter().map(|&l| r[l]).sum())
            .collect()
    };
    let r = pearson(&total(&first), &total(&second))?;
    if r <= -1.0 + 1e-12 {
        return Err(Error::AntiCorrelatedHalves);
    }
    Ok(2.0 * r / (1.0 + r))
}

pub(crate) fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantHalf);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("q{i}")).collect()
    }

    #[test]
    fn duplicated_halves_are_perfect() {
        let a = [1.0, 4.0, 2.0, 5.0, 3.0];
        let b = [2.0, 2.0, 5.0, 1.0, 4.0];
        let m = ResponseMatrix::from_columns(&[a, a, b, b], labels(4)).unwrap();
        assert!((split_half(&m, SplitScheme::OddEven).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_correlation_one_half() {
        // centered (1,0,-1) and (1,-1,0): dot 1, squared norms 2 and 2
        let m = ResponseMatrix::from_columns(&[[1.0, 0.0, -1.0], [1.0, -1.0, 0.0]], labels(2))
            .unwrap();
        let v = split_half(&m, SplitScheme::OddEven).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_half_rejected() {
        let m = ResponseMatrix::from_columns(&[[3.0, 3.0, 3.0], [1.0, 2.0, 3.0]], labels(2))
            .unwrap();
        assert!(matches!(
            split_half(&m, SplitScheme::OddEven),
            Err(Error::ConstantHalf)
        ));
    }

    #[test]
    fn anti_correlated_rejected() {
        let m = ResponseMatrix::from_columns(&[[1.0, 2.0, 3.0], [3.0, 2.0, 1.0]], labels(2))
            .unwrap();
        assert!(matches!(
            split_half(&m, SplitScheme::OddEven),
            Err(Error::AntiCorrelatedHalves)
        ));
    }

    #[test]
    fn random_scheme_is_seeded() {
        assert_eq!(
            SplitScheme::SeededRandom(9).halves(11),
            SplitScheme::SeededRandom(9).halves(11)
        );
        let (a, b) = SplitScheme::SeededRandom(9).halves(11);
        assert_eq!((a.len(), b.len()), (6, 5));
        assert_eq!(SplitScheme::OddEven.halves(5), (vec![0, 2, 4], vec![1, 3]));
    }

    #[test]
    fn parse_schemes() {
        assert_eq!("odd-even".parse::<SplitScheme>().unwrap(), SplitScheme::OddEven);
        assert_eq!(
            "random:17".parse::<SplitScheme>().unwrap(),
            SplitScheme::SeededRandom(17)
        );
        assert!("random:x".parse::<SplitScheme>().is_err());
        assert_eq!(SplitScheme::SeededRandom(4).to_string(), "random:4");
    }
}
