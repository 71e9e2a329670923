//! Seeded synthetic response generators.
//!
//! Every generator draws from ChaCha streams keyed by the same seed: latent
//! traits from stream 0, item noise from stream 1 (row-major), the second
//! trait's independent part from stream 2 and redundancy noise from stream 3.
//! Keeping the streams apart is what makes the degenerate settings of the
//! multidimensional and non-normal generators reproduce
//! [`generate_unidimensional`] bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::data::{variance, ResponseMatrix, VarianceMode};
use crate::error::{Error, Result};

const LATENT_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;
const SECOND_TRAIT_STREAM: u64 = 2;
const REDUNDANCY_STREAM: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn normals(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    StandardNormal.sample_iter(rng).take(count).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub n_respondents: usize,
    pub n_items: usize,
    pub loadings: Vec<f64>,
    pub noise_sd: f64,
    /// Round onto `1..=L` after rescaling; `None` keeps continuous values.
    pub likert_levels: Option<u32>,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn equal_loadings(
        n_respondents: usize,
        n_items: usize,
        loading: f64,
        noise_sd: f64,
        likert_levels: Option<u32>,
        seed: u64,
    ) -> Self {
        Self {
            n_respondents,
            n_items,
            loadings: vec![loading; n_items],
            noise_sd,
            likert_levels,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_respondents < 2 {
            return Err(Error::TooFewRespondents(self.n_respondents));
        }
        if self.n_items == 0 {
            return Err(Error::NoItems);
        }
        if self.loadings.len() != self.n_items {
            return Err(Error::InvalidParameter(format!(
                "{} loadings for {} items",
                self.loadings.len(),
                self.n_items
            )));
        }
        if self.loadings.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter("loadings must be finite".into()));
        }
        check_noise(self.noise_sd)?;
        check_levels(self.likert_levels)
    }
}

fn check_noise(noise_sd: f64) -> Result<()> {
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise_sd must be >= 0, got {noise_sd}")));
    }
    Ok(())
}

fn check_levels(levels: Option<u32>) -> Result<()> {
    match levels {
        Some(l) if l < 2 => Err(Error::InvalidParameter(format!(
            "likert_levels must be >= 2, got {l}"
        ))),
        _ => Ok(()),
    }
}

fn item_labels(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("item{i}")).collect()
}

/// Row-major `loadings[l] * trait[j] + noise_sd * noise[j, l]`.
fn one_factor_values(
    traits: &[&[f64]],
    trait_of_item: impl Fn(usize) -> usize,
    loadings: &[f64],
    noise_sd: f64,
    noise: &[f64],
) -> Vec<f64> {
    let k = loadings.len();
    noise
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (j, l) = (i / k, i % k);
            loadings[l] * traits[trait_of_item(l)][j] + noise_sd * e
        })
        .collect()
}

fn finish(n: usize, k: usize, mut values: Vec<f64>, levels: Option<u32>) -> Result<ResponseMatrix> {
    if let Some(levels) = levels {
        discretize(&mut values, n, k, levels);
    }
    ResponseMatrix::new(n, item_labels(k), values)
}

/// Per item, maps the observed range affinely onto `[1, levels]` and rounds.
pub fn discretize(values: &mut [f64], n: usize, k: usize, levels: u32) {
    let top = levels as f64;
    for l in 0..k {
        let (lo, hi) = (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| {
            let v = values[j * k + l];
            (lo.min(v), hi.max(v))
        });
        for j in 0..n {
            let v = &mut values[j * k + l];
            *v = if hi > lo {
                (1.0 + (*v - lo) / (hi - lo) * (top - 1.0)).round().clamp(1.0, top)
            } else {
                ((1.0 + top) / 2.0).round()
            };
        }
    }
}

/// One latent trait: `x = loading * F + noise_sd * e`, all standard normal.
pub fn generate_unidimensional(spec: &SyntheticSpec) -> Result<ResponseMatrix> {
    spec.validate()?;
    let (n, k) = (spec.n_respondents, spec.n_items);
    let traits = normals(&mut stream(spec.seed, LATENT_STREAM), n);
    let noise = normals(&mut stream(spec.seed, NOISE_STREAM), n * k);
    let values = one_factor_values(&[&traits], |_| 0, &spec.loadings, spec.noise_sd, &noise);
    finish(n, k, values, spec.likert_levels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultidimensionalSpec {
    pub n_respondents: usize,
    /// Items loading on the first trait come first.
    pub loadings_first: Vec<f64>,
    pub loadings_second: Vec<f64>,
    pub trait_correlation: f64,
    pub noise_sd: f64,
    pub likert_levels: Option<u32>,
    pub seed: u64,
}

/// Two correlated traits, each driving its own block of items.
///
/// With `trait_correlation = 1` the second trait equals the first and the
/// output equals [`generate_unidimensional`] with the concatenated loadings.
pub fn generate_multidimensional(spec: &MultidimensionalSpec) -> Result<ResponseMatrix> {
    let (k1, k2) = (spec.loadings_first.len(), spec.loadings_second.len());
    if k1 < 2 || k2 < 2 {
        return Err(Error::InvalidParameter(format!(
            "each trait needs at least 2 items, got {k1} and {k2}"
        )));
    }
    if !(0.0..=1.0).contains(&spec.trait_correlation) {
        return Err(Error::InvalidParameter(format!(
            "trait_correlation must lie in [0, 1], got {}",
            spec.trait_correlation
        )));
    }
    if spec.n_respondents < 2 {
        return Err(Error::TooFewRespondents(spec.n_respondents));
    }
    check_noise(spec.noise_sd)?;
    check_levels(spec.likert_levels)?;

    let n = spec.n_respondents;
    let k = k1 + k2;
    let rho = spec.trait_correlation;
    let first = normals(&mut stream(spec.seed, LATENT_STREAM), n);
    let independent = normals(&mut stream(spec.seed, SECOND_TRAIT_STREAM), n);
    let resid = (1.0 - rho * rho).sqrt();
    let second: Vec<f64> = first
        .iter()
        .zip(&independent)
        .map(|(f, g)| rho * f + resid * g)
        .collect();
    let noise = normals(&mut stream(spec.seed, NOISE_STREAM), n * k);
    let loadings: Vec<f64> = spec
        .loadings_first
        .iter()
        .chain(&spec.loadings_second)
        .copied()
        .collect();
    let values = one_factor_values(
        &[&first, &second],
        |l| usize::from(l >= k1),
        &loadings,
        spec.noise_sd,
        &noise,
    );
    finish(n, k, values, spec.likert_levels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonNormalSpec {
    pub base: SyntheticSpec,
    pub skew_strength: f64,
    /// Correlation between errors of adjacent items (AR(1) across item index).
    pub error_rho: f64,
}

/// Strictly increasing for `skew >= 0`: an odd power plus an exponential tilt.
pub fn skew_transform(x: f64, skew: f64) -> f64 {
    x.signum() * x.abs().powf(1.0 + skew) + ((skew * x).exp() - 1.0)
}

/// One-factor data with autocorrelated errors, pushed through
/// [`skew_transform`] before optional discretization.
///
/// With `skew_strength = 0` and `error_rho = 0` this is exactly
/// [`generate_unidimensional`].
pub fn apply_nonnormal_correlated(spec: &NonNormalSpec) -> Result<ResponseMatrix> {
    let base = &spec.base;
    base.validate()?;
    if !(spec.skew_strength >= 0.0 && spec.skew_strength.is_finite()) {
        return Err(Error::InvalidParameter("skew_strength must be >= 0".into()));
    }
    if !(0.0..1.0).contains(&spec.error_rho) {
        return Err(Error::InvalidParameter("error_rho must lie in [0, 1)".into()));
    }
    let (n, k) = (base.n_respondents, base.n_items);
    let traits = normals(&mut stream(base.seed, LATENT_STREAM), n);
    let mut errors = normals(&mut stream(base.seed, NOISE_STREAM), n * k);
    let rho = spec.error_rho;
    let innovation = (1.0 - rho * rho).sqrt();
    for row in errors.chunks_exact_mut(k) {
        for l in 1..k {
            row[l] = rho * row[l - 1] + innovation * row[l];
        }
    }
    let mut values = one_factor_values(&[&traits], |_| 0, &base.loadings, base.noise_sd, &errors);
    for v in &mut values {
        *v = skew_transform(*v, spec.skew_strength);
    }
    finish(n, k, values, base.likert_levels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancySpec {
    pub count: usize,
    pub factor: f64,
    /// Absolute noise sd; `None` uses 5% of each source column's sd.
    pub noise_sd: Option<f64>,
    /// Round and clamp duplicates onto `1..=L` to match discretized sources.
    pub likert_levels: Option<u32>,
    pub seed: u64,
}

impl RedundancySpec {
    pub const DEFAULT_FACTOR: f64 = 0.95;
    pub const RELATIVE_NOISE: f64 = 0.05;
}

/// Appends `count` near-copies of existing items, sources taken round-robin.
pub fn inject_redundancy(m: &ResponseMatrix, spec: &RedundancySpec) -> Result<ResponseMatrix> {
    if spec.count == 0 {
        return Err(Error::InvalidParameter("redundancy count must be >= 1".into()));
    }
    if !spec.factor.is_finite() {
        return Err(Error::InvalidParameter("redundancy factor must be finite".into()));
    }
    if let Some(sd) = spec.noise_sd {
        check_noise(sd)?;
    }
    check_levels(spec.likert_levels)?;

    let n = m.n_respondents();
    let k = m.n_items();
    let mut rng = stream(spec.seed, REDUNDANCY_STREAM);
    let mut columns = Vec::with_capacity(spec.count);
    let mut labels = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let src = i % k;
        let source = m.column(src);
        let sd = spec
            .noise_sd
            .unwrap_or_else(|| RedundancySpec::RELATIVE_NOISE * variance(&source, VarianceMode::Sample).sqrt());
        let eps = normals(&mut rng, n);
        let column: Vec<f64> = source
            .iter()
            .zip(&eps)
            .map(|(x, e)| {
                let v = spec.factor * x + sd * e;
                match spec.likert_levels {
                    Some(levels) => v.round().clamp(1.0, levels as f64),
                    None => v,
                }
            })
            .collect();
        columns.push(column);
        labels.push(format!("{}_dup{}", m.labels()[src], i + 1));
    }
    m.append_columns(&columns, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(levels: Option<u32>) -> SyntheticSpec {
        SyntheticSpec::equal_loadings(40, 6, 0.8, 0.6, levels, 11)
    }

    #[test]
    fn shapes_and_levels() {
        let m = generate_unidimensional(&spec(Some(5))).unwrap();
        assert_eq!((m.n_respondents(), m.n_items()), (40, 6));
        assert!(m.values().iter().all(|&v| v.fract() == 0.0 && (1.0..=5.0).contains(&v)));
    }

    #[test]
    fn same_seed_same_matrix() {
        assert_eq!(
            generate_unidimensional(&spec(None)).unwrap(),
            generate_unidimensional(&spec(None)).unwrap()
        );
        let mut other = spec(None);
        other.seed = 12;
        assert_ne!(
            generate_unidimensional(&spec(None)).unwrap(),
            generate_unidimensional(&other).unwrap()
        );
    }

    #[test]
    fn perfectly_correlated_traits_collapse() {
        let s = spec(Some(5));
        let multi = generate_multidimensional(&MultidimensionalSpec {
            n_respondents: s.n_respondents,
            loadings_first: vec![0.8; 3],
            loadings_second: vec![0.8; 3],
            trait_correlation: 1.0,
            noise_sd: s.noise_sd,
            likert_levels: s.likert_levels,
            seed: s.seed,
        })
        .unwrap();
        assert_eq!(multi, generate_unidimensional(&s).unwrap());
    }

    #[test]
    fn null_perturbation_is_unidimensional() {
        let s = spec(Some(5));
        let nn = apply_nonnormal_correlated(&NonNormalSpec {
            base: s.clone(),
            skew_strength: 0.0,
            error_rho: 0.0,
        })
        .unwrap();
        assert_eq!(nn, generate_unidimensional(&s).unwrap());
    }

    #[test]
    fn skew_transform_is_increasing() {
        for skew in [0.0, 0.5, 1.5, 3.0] {
            let xs: Vec<f64> = (-400..=400).map(|i| i as f64 / 50.0).collect();
            for w in xs.windows(2) {
                assert!(skew_transform(w[0], skew) < skew_transform(w[1], skew));
            }
        }
    }

    #[test]
    fn redundancy_keeps_originals() {
        let m = generate_unidimensional(&spec(Some(5))).unwrap();
        let r = inject_redundancy(
            &m,
            &RedundancySpec {
                count: 8,
                factor: 0.95,
                noise_sd: None,
                likert_levels: Some(5),
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(r.n_items(), 14);
        for j in 0..m.n_respondents() {
            assert_eq!(&r.row(j)[..6], m.row(j));
        }
        assert_eq!(r.labels()[6], "item1_dup1");
        assert_eq!(r.labels()[12], "item1_dup7");
        assert!(r.values().iter().all(|&v| (1.0..=5.0).contains(&v) && v.fract() == 0.0));
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(None);
        s.loadings.pop();
        assert!(generate_unidimensional(&s).is_err());
        let mut s = spec(Some(1));
        s.likert_levels = Some(1);
        assert!(generate_unidimensional(&s).is_err());
        let multi = MultidimensionalSpec {
            n_respondents: 10,
            loadings_first: vec![0.5],
            loadings_second: vec![0.5, 0.5],
            trait_correlation: 0.0,
            noise_sd: 1.0,
            likert_levels: None,
            seed: 0,
        };
        assert!(generate_multidimensional(&multi).is_err());
    }
}
