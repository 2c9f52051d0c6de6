//! Scaling scans over the bit count K with least-squares fits.

use serde::{Deserialize, Serialize};

use super::canonical;
use super::scheme;
use super::simulate::{simulate, trial_seed, SandwichCheck, SimulationConfig};
use super::stats::Estimate;
use crate::bounds::PriorDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    /// `ln ε` against `ln n`.
    Power,
    /// `ln ε` against `n`.
    Exp,
    /// `ln ε` against `√n`.
    ExpSqrt,
}

impl std::str::FromStr for FitKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(FitKind::Power),
            "exp" => Ok(FitKind::Exp),
            "exp-sqrt" => Ok(FitKind::ExpSqrt),
            other => Err(Error::BadParameters(format!("unknown fit '{other}'"))),
        }
    }
}

impl FitKind {
    pub fn abscissa(self, n: f64) -> f64 {
        match self {
            FitKind::Power => n.ln(),
            FitKind::Exp => n,
            FitKind::ExpSqrt => n.sqrt(),
        }
    }

    /// The fit each preset's bound predicts.
    pub fn for_preset(name: &str) -> FitKind {
        match name {
            "quadratic_iterative" | "power_q_iterative" => FitKind::Power,
            "roy_iterative" => FitKind::ExpSqrt,
            _ => FitKind::Exp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return Err(Error::BadParameters(format!(
            "fit needs at least two paired points, got {n}"
        )));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::BadParameters("fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    Ok(LinearFit {
        slope,
        intercept,
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub bits: u32,
    pub qubits: u64,
    /// Resource count used as the fit abscissa.
    pub resource: f64,
    pub passes: u64,
    pub epsilon: Estimate,
    pub holevo_variance: Estimate,
    pub error_lower: f64,
    /// The preset's closed-form bound, when it has one.
    pub closed_form: Option<f64>,
    pub respects_bound: bool,
    pub sandwich: SandwichCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub preset: String,
    pub copies: u32,
    pub power: Option<u32>,
    pub fit_kind: FitKind,
    pub points: Vec<ScanPoint>,
    pub fit: LinearFit,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub preset: String,
    pub power: Option<u32>,
    pub bits: Vec<u32>,
    pub copies: u32,
    pub fit: FitKind,
    pub sim: SimulationConfig,
}

pub const MIN_SCAN_POINTS: usize = 4;

/// Simulates each K in turn (child seed per K) and fits `ln ε`.
pub fn scaling_scan(cfg: &ScanConfig, prior: &PriorDistribution) -> Result<ScanReport> {
    if cfg.bits.len() < MIN_SCAN_POINTS {
        return Err(Error::BadParameters(format!(
            "a scan needs at least {MIN_SCAN_POINTS} values of K"
        )));
    }
    if cfg.preset == "canonical" {
        return canonical_scan(cfg, prior);
    }
    let mut points = Vec::with_capacity(cfg.bits.len());
    let mut notes = Vec::new();
    for &k in &cfg.bits {
        let spec = scheme::preset(&cfg.preset, k, cfg.copies, cfg.power)?;
        let sim = SimulationConfig {
            seed: trial_seed(cfg.sim.seed, k as u64),
            mi_bins: None,
            detailed_records: false,
            ..cfg.sim.clone()
        };
        let (report, _) = simulate(&spec, prior, &sim)?;
        let closed = report
            .bounds
            .closed_forms
            .iter()
            .find(|b| b.name == cfg.preset)
            .map(|b| b.value);
        let bound = closed.unwrap_or(report.bounds.error_lower);
        let se = if report.epsilon.se.is_finite() {
            report.epsilon.se
        } else {
            0.0
        };
        points.push(ScanPoint {
            bits: k,
            qubits: report.resources.qubits,
            resource: report.resources.qubits as f64,
            passes: report.resources.passes,
            epsilon: report.epsilon,
            holevo_variance: report.holevo_variance,
            error_lower: report.bounds.error_lower,
            closed_form: closed,
            respects_bound: report.epsilon.value + 3.0 * se >= bound.max(report.bounds.error_lower),
            sandwich: report.sandwich,
        });
        if k == cfg.bits[0] {
            notes.extend(spec.notes.iter().cloned());
        }
    }
    let x: Vec<f64> = points.iter().map(|p| cfg.fit.abscissa(p.resource)).collect();
    let y: Vec<f64> = points.iter().map(|p| p.epsilon.value.ln()).collect();
    Ok(ScanReport {
        preset: cfg.preset.clone(),
        copies: cfg.copies,
        power: cfg.power,
        fit_kind: cfg.fit,
        fit: least_squares(&x, &y)?,
        points,
        notes,
    })
}

/// Canonical measurement with `n = K` qubits: exact quadrature error per K.
fn canonical_scan(cfg: &ScanConfig, prior: &PriorDistribution) -> Result<ScanReport> {
    let mut points = Vec::new();
    for &k in &cfg.bits {
        let r = canonical::canonical_sample(k, prior, cfg.sim.trials, trial_seed(cfg.sim.seed, k as u64), None)?;
        let bound = crate::bounds::error_lower_bound(k as f64 * std::f64::consts::LN_2, prior);
        points.push(ScanPoint {
            bits: k,
            qubits: k as u64,
            resource: k as f64,
            passes: (1u64 << k) - 1,
            epsilon: Estimate {
                value: r.epsilon_quadrature,
                se: 0.0,
            },
            holevo_variance: r.holevo_variance,
            error_lower: bound,
            closed_form: Some(bound),
            respects_bound: r.epsilon_quadrature >= bound,
            sandwich: SandwichCheck::evaluate(r.epsilon_quadrature, r.holevo_variance.value),
        });
    }
    let x: Vec<f64> = points.iter().map(|p| cfg.fit.abscissa(p.resource)).collect();
    let y: Vec<f64> = points.iter().map(|p| p.epsilon.value.ln()).collect();
    Ok(ScanReport {
        preset: "canonical".into(),
        copies: 1,
        power: None,
        fit_kind: cfg.fit,
        fit: least_squares(&x, &y)?,
        points,
        notes: vec!["epsilon from quadrature of the Fejér kernel; Monte Carlo only for the Holevo variance".into()],
    })
}
