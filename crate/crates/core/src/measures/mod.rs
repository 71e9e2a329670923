//! Reliability measures and a uniform way to evaluate them.

pub mod alpha;
pub mod factor;
pub mod glb;
pub mod split;

use serde::Serialize;

use crate::data::{ResponseMatrix, VarianceMode};
use crate::error::{Error, Result};
use crate::optimizer::{monotone_delta, SearchParams};

pub use alpha::{alpha_from_covariance, cronbach_alpha};
pub use factor::{
    fit_one_factor, mcdonald_omega, omega_estimate, omega_from_covariance, one_factor_covariance,
    OmegaEstimate, OmegaVariant, OneFactorFit,
};
pub use glb::{glb, glb_estimate, glb_from_covariance, GlbEstimate, DEFAULT_GLB_MAX_ITER, DEFAULT_GLB_TOL};
pub use split::{split_half, SplitScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Alpha,
    OmegaSumSq,
    OmegaConventional,
    Glb,
    SplitHalf,
    MonotoneDelta,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Alpha,
        Measure::OmegaSumSq,
        Measure::OmegaConventional,
        Measure::Glb,
        Measure::SplitHalf,
        Measure::MonotoneDelta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Alpha => "alpha",
            Measure::OmegaSumSq => "omega_sumsq",
            Measure::OmegaConventional => "omega_conventional",
            Measure::Glb => "glb",
            Measure::SplitHalf => "split_half",
            Measure::MonotoneDelta => "monotone_delta",
        }
    }

    /// Parses a comma-separated list. `all` expands to every measure,
    /// `delta` means `monotone_delta` and `omega` picks `omega_variant`.
    pub fn parse_list(list: &str, omega_variant: OmegaVariant) -> Result<Vec<Measure>> {
        let mut out = Vec::new();
        for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let picked: &[Measure] = match token {
                "all" => &Measure::ALL,
                "alpha" => &[Measure::Alpha],
                "omega" => match omega_variant {
                    OmegaVariant::SumSq => &[Measure::OmegaSumSq],
                    OmegaVariant::Conventional => &[Measure::OmegaConventional],
                },
                "omega_sumsq" => &[Measure::OmegaSumSq],
                "omega_conventional" => &[Measure::OmegaConventional],
                "glb" => &[Measure::Glb],
                "split_half" | "split-half" => &[Measure::SplitHalf],
                "delta" | "monotone_delta" => &[Measure::MonotoneDelta],
                other => {
                    return Err(Error::InvalidParameter(format!("unknown measure {other:?}")))
                }
            };
            for &m in picked {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter("no measures selected".into()));
        }
        Ok(out)
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue {
    pub measure: Measure,
    pub value: f64,
    pub notes: Option<String>,
}

/// Knobs shared by every measure evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureParams {
    pub variance_mode: VarianceMode,
    pub split_scheme: SplitScheme,
    pub search: SearchParams,
    pub glb_tol: f64,
    pub glb_max_iter: usize,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self {
            variance_mode: VarianceMode::Sample,
            split_scheme: SplitScheme::OddEven,
            search: SearchParams::default(),
            glb_tol: glb::DEFAULT_GLB_TOL,
            glb_max_iter: glb::DEFAULT_GLB_MAX_ITER,
        }
    }
}

pub fn evaluate(m: &ResponseMatrix, measure: Measure, params: &MeasureParams) -> Result<MeasureValue> {
    let (value, notes) = match measure {
        Measure::Alpha => (cronbach_alpha(m, params.variance_mode)?, None),
        Measure::OmegaSumSq | Measure::OmegaConventional => {
            let est = omega_estimate(m, params.variance_mode)?;
            let (value, other) = if measure == Measure::OmegaSumSq {
                (est.sumsq, format!("conventional={:.6}", est.conventional))
            } else {
                (est.conventional, format!("sumsq={:.6}", est.sumsq))
            };
            let mut notes = vec![other];
            if !est.fit.converged {
                notes.push(format!("factor fit not converged after {} iterations", est.fit.iterations));
            }
            notes.extend(est.fit.notes.iter().cloned());
            (value, Some(notes.join("; ")))
        }
        Measure::Glb => {
            let g = glb_estimate(m, params.glb_tol, params.glb_max_iter)?;
            let notes = (!g.converged)
                .then(|| format!("not converged after {} Newton steps", g.iterations));
            (g.value, notes)
        }
        Measure::SplitHalf => (split_half(m, params.split_scheme)?, None),
        Measure::MonotoneDelta => {
            let r = monotone_delta(m, &params.search)?;
            let d = &r.diagnostics;
            let notes = format!(
                "c_star={} c_max={} restarts={} accepted={} proposals={}",
                r.c_star, r.c_max, d.restarts, d.accepted_swaps, d.proposals
            );
            (r.delta, Some(notes))
        }
    };
    Ok(MeasureValue {
        measure,
        value,
        notes,
    })
}
