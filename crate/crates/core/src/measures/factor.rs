//! One-factor model fitting and McDonald's omega.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::data::{summarize, ResponseMatrix, VarianceMode};
use crate::error::{Error, Result};

pub const DEFAULT_FACTOR_TOL: f64 = 1e-8;
pub const DEFAULT_FACTOR_MAX_ITER: usize = 1000;

/// Loadings and uniquenesses of a single-factor model with unit factor variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneFactorFit {
    pub loadings: Vec<f64>,
    pub uniquenesses: Vec<f64>,
    pub factor_variance: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Largest absolute off-diagonal residual of `cov - loadings * loadings^T`.
    pub max_offdiag_residual: f64,
    pub notes: Vec<String>,
}

/// Least-squares one-factor fit by iterated principal axes.
///
/// Starting from the observed variances as communalities, each pass puts the
/// current communalities on the diagonal, takes the leading eigenpair, and
/// sets the new communalities to the squared loadings. The fixed point
/// minimizes the squared off-diagonal residuals. Communalities are kept in
/// `[0, var]`; any that hit the upper bound are reported as Heywood cases.
pub fn fit_one_factor(cov: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<OneFactorFit> {
    let k = cov.nrows();
    if cov.ncols() != k {
        return Err(Error::Shape(format!("covariance is {}x{}", k, cov.ncols())));
    }
    if k < 2 {
        return Err(Error::SingleItem);
    }
    let scale = cov.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let asym = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .fold(0.0f64, |a, (i, j)| a.max((cov[(i, j)] - cov[(j, i)]).abs()));
    if asym > 1e-12 * scale.max(1.0) {
        return Err(Error::Shape("covariance is not symmetric".into()));
    }
    let variances: Vec<f64> = cov.diagonal().iter().copied().collect();

    let max_off = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |a, (i, j)| a.max(cov[(i, j)].abs()));
    if max_off <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Ok(OneFactorFit {
            loadings: vec![0.0; k],
            uniquenesses: variances.iter().map(|v| v.max(0.0)).collect(),
            factor_variance: 1.0,
            converged: true,
            iterations: 0,
            max_offdiag_residual: max_off,
            notes: vec!["degenerate covariance: no off-diagonal structure".into()],
        });
    }

    let mut communality: Vec<f64> = variances.iter().map(|v| v.max(0.0)).collect();
    let mut loadings = vec![0.0; k];
    let mut converged = false;
    let mut iterations = 0;
    let mut reduced = cov.clone();
    while iterations < max_iter {
        iterations += 1;
        for i in 0..k {
            reduced[(i, i)] = communality[i];
        }
        loadings = leading_loadings(&reduced);
        let mut change = 0.0f64;
        for i in 0..k {
            let h = (loadings[i] * loadings[i]).min(variances[i].max(0.0));
            change = change.max((h - communality[i]).abs());
            communality[i] = h;
        }
        if change < tol * scale.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    if loadings.iter().sum::<f64>() < 0.0 {
        loadings.iter_mut().for_each(|l| *l = -*l);
    }
    let mut notes = Vec::new();
    let uniquenesses: Vec<f64> = variances
        .iter()
        .zip(&loadings)
        .enumerate()
        .map(|(i, (v, l))| {
            let psi = v - l * l;
            if psi < 0.0 {
                if psi < -tol * scale {
                    notes.push(format!("Heywood case at item {i}: uniqueness clamped to 0"));
                }
                0.0
            } else {
                psi
            }
        })
        .collect();
    if !converged {
        notes.push(format!("no convergence after {max_iter} iterations"));
    }
    let max_offdiag_residual = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |a, (i, j)| {
            a.max((cov[(i, j)] - loadings[i] * loadings[j]).abs())
        });

    Ok(OneFactorFit {
        loadings,
        uniquenesses,
        factor_variance: 1.0,
        converged,
        iterations,
        max_offdiag_residual,
        notes,
    })
}

fn leading_loadings(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    let v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    let s = value.max(0.0).sqrt();
    v.iter().map(|x| x * s).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaVariant {
    /// Sum of squared loadings over the model-implied total variance.
    #[default]
    SumSq,
    /// Squared sum of loadings over itself plus the summed uniquenesses.
    Conventional,
}

impl OmegaVariant {
    pub fn name(self) -> &'static str {
        match self {
            OmegaVariant::SumSq => "sumsq",
            OmegaVariant::Conventional => "conventional",
        }
    }
}

impl std::str::FromStr for OmegaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sumsq" => Ok(OmegaVariant::SumSq),
            "conventional" => Ok(OmegaVariant::Conventional),
            other => Err(Error::InvalidParameter(format!(
                "omega variant must be sumsq or conventional, got {other:?}"
            ))),
        }
    }
}

/// Both omega variants with the fit they came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaEstimate {
    pub sumsq: f64,
    pub conventional: f64,
    pub fit: OneFactorFit,
}

impl OmegaEstimate {
    pub fn value(&self, variant: OmegaVariant) -> f64 {
        match variant {
            OmegaVariant::SumSq => self.sumsq,
            OmegaVariant::Conventional => self.conventional,
        }
    }
}

pub fn omega_from_covariance(cov: &DMatrix<f64>) -> Result<OmegaEstimate> {
    if cov.nrows() < 2 {
        return Err(Error::SingleItem);
    }
    if cov.sum() <= f64::EPSILON * cov.diagonal().sum().abs().max(1.0) {
        return Err(Error::ZeroTotalVariance);
    }
    let fit = fit_one_factor(cov, DEFAULT_FACTOR_TOL, DEFAULT_FACTOR_MAX_ITER)?;
    let sum_sq: f64 = fit.loadings.iter().map(|l| l * l).sum();
    let sum: f64 = fit.loadings.iter().sum();
    let psi: f64 = fit.uniquenesses.iter().sum();
    let ratio = |common: f64| {
        if common + psi > 0.0 {
            common / (common + psi)
        } else {
            0.0
        }
    };
    Ok(OmegaEstimate {
        sumsq: ratio(sum_sq * fit.factor_variance),
        conventional: ratio(sum * sum),
        fit,
    })
}

pub fn omega_estimate(m: &ResponseMatrix, mode: VarianceMode) -> Result<OmegaEstimate> {
    if m.n_items() < 2 {
        return Err(Error::SingleItem);
    }
    omega_from_covariance(&summarize(m, mode).covariance)
}

pub fn mcdonald_omega(m: &ResponseMatrix, variant: OmegaVariant) -> Result<f64> {
    omega_estimate(m, VarianceMode::Sample).map(|e| e.value(variant))
}

/// `loadings * loadings^T + diag(uniquenesses)`.
pub fn one_factor_covariance(loadings: &[f64], uniquenesses: &[f64]) -> DMatrix<f64> {
    let k = loadings.len();
    DMatrix::from_fn(k, k, |i, j| {
        loadings[i] * loadings[j] + if i == j { uniquenesses[i] } else { 0.0 }
    })
}
