//! Closed-form error and information bounds, priors, and resource counts.

use std::f64::consts::{E, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::scheme::SchemeSpec;

/// `(2πe)^(-1/2)`.
pub fn inv_sqrt_2pi_e() -> f64 {
    (TAU * E).sqrt().recip()
}

/// Gaussian wrapping is ignored below this width; the mass beyond `±π` is
/// under `1e-8`.
const UNWRAPPED_SIGMA: f64 = 0.5;
const ENTROPY_GRID: usize = 1 << 14;
pub const PRIOR_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorDistribution {
    #[default]
    #[serde(rename = "uniform")]
    Uniform2Pi,
    WrappedGaussian {
        mean: f64,
        sigma: f64,
    },
    /// Piecewise-linear density through equally spaced nodes on
    /// `[start, end]`, endpoints included; zero outside.
    Gridded {
        start: f64,
        end: f64,
        density: Vec<f64>,
    },
}

fn wrap_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl PriorDistribution {
    pub fn wrapped_gaussian(mean: f64, sigma: f64) -> Result<Self> {
        let p = PriorDistribution::WrappedGaussian { mean, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn gridded(start: f64, end: f64, density: Vec<f64>) -> Result<Self> {
        let p = PriorDistribution::Gridded { start, end, density };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PriorDistribution::Uniform2Pi => Ok(()),
            PriorDistribution::WrappedGaussian { mean, sigma } => {
                if !(mean.is_finite() && *sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::BadParameters(format!(
                        "wrapped Gaussian mean {mean}, sigma {sigma}"
                    )));
                }
                Ok(())
            }
            PriorDistribution::Gridded { start, end, density } => {
                let width = end - start;
                if !(start.is_finite() && width > 0.0 && width <= TAU + 1e-12) {
                    return Err(Error::BadParameters(format!("gridded prior support [{start}, {end}]")));
                }
                if density.len() < 2 || density.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
                    return Err(Error::BadParameters(
                        "gridded prior needs at least two finite non-negative nodes".into(),
                    ));
                }
                let total = self.gridded_mass();
                if (total - 1.0).abs() > PRIOR_NORM_TOL {
                    return Err(Error::NotNormalized {
                        what: "prior density",
                        total,
                    });
                }
                Ok(())
            }
        }
    }

    fn gridded_mass(&self) -> f64 {
        match self {
            PriorDistribution::Gridded { start, end, density } => {
                let h = (end - start) / (density.len() - 1) as f64;
                density.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum()
            }
            _ => 1.0,
        }
    }

    /// Density at `phi`, treating the circle as `[0, 2π)`.
    pub fn density(&self, phi: f64) -> f64 {
        match self {
            PriorDistribution::Uniform2Pi => 1.0 / TAU,
            PriorDistribution::WrappedGaussian { mean, sigma } => {
                let d = wrap_2pi(phi - mean);
                let d = if d > PI { d - TAU } else { d };
                let norm = 1.0 / (sigma * TAU.sqrt());
                // enough images for any sigma; past ~6σ/2π the sum is flat
                let images = ((6.0 * sigma / TAU).ceil() as i64).max(1);
                (-images..=images)
                    .map(|k| {
                        let x = d + TAU * k as f64;
                        norm * (-0.5 * (x / sigma).powi(2)).exp()
                    })
                    .sum()
            }
            PriorDistribution::Gridded { start, end, density } => {
                let offset = wrap_2pi(phi - start);
                let width = end - start;
                if offset > width {
                    return 0.0;
                }
                let h = width / (density.len() - 1) as f64;
                let x = offset / h;
                let i = (x.floor() as usize).min(density.len() - 2);
                let t = x - i as f64;
                density[i] * (1.0 - t) + density[i + 1] * t
            }
        }
    }

    /// Differential entropy `H(Φ)` in nats.
    pub fn entropy(&self) -> f64 {
        match self {
            PriorDistribution::Uniform2Pi => TAU.ln(),
            PriorDistribution::WrappedGaussian { sigma, .. } if *sigma <= UNWRAPPED_SIGMA => {
                0.5 * (TAU * E * sigma * sigma).ln()
            }
            PriorDistribution::WrappedGaussian { .. } => {
                // periodic integrand: the trapezoid rule converges spectrally
                let h = TAU / ENTROPY_GRID as f64;
                -(0..ENTROPY_GRID)
                    .map(|j| crate::numerics::xlogx(self.density(j as f64 * h)))
                    .sum::<f64>()
                    * h
            }
            PriorDistribution::Gridded { start, end, density } => {
                let h = (end - start) / (density.len() - 1) as f64;
                -density
                    .windows(2)
                    .map(|w| 0.5 * h * (crate::numerics::xlogx(w[0]) + crate::numerics::xlogx(w[1])))
                    .sum::<f64>()
            }
        }
    }

    /// Trapezoid step used for a gridded entropy estimate, if any.
    pub fn entropy_step(&self) -> Option<f64> {
        match self {
            PriorDistribution::Gridded { start, end, density } => Some((end - start) / (density.len() - 1) as f64),
            PriorDistribution::WrappedGaussian { sigma, .. } if *sigma > UNWRAPPED_SIGMA => {
                Some(TAU / ENTROPY_GRID as f64)
            }
            _ => None,
        }
    }

    /// Prior weights at `φ_j = 2πj/n`, normalised to sum to one.
    pub fn grid_weights(&self, n: usize) -> Vec<f64> {
        let h = TAU / n as f64;
        let mut w: Vec<f64> = (0..n).map(|j| self.density(j as f64 * h)).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|x| *x /= total);
        }
        w
    }

    /// One draw in `[0, 2π)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            PriorDistribution::Uniform2Pi => rng.random::<f64>() * TAU,
            PriorDistribution::WrappedGaussian { mean, sigma } => {
                let n = Normal::new(*mean, *sigma).expect("validated sigma");
                wrap_2pi(n.sample(rng))
            }
            PriorDistribution::Gridded { start, end, density } => {
                let h = (end - start) / (density.len() - 1) as f64;
                let masses: Vec<f64> = density.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).collect();
                let total: f64 = masses.iter().sum();
                let mut u = rng.random::<f64>() * total;
                let mut i = 0;
                while i + 1 < masses.len() && u >= masses[i] {
                    u -= masses[i];
                    i += 1;
                }
                // invert the linear density inside cell i
                let (a, b) = (density[i], density[i + 1]);
                let slope = (b - a) / h;
                let x = if slope.abs() < 1e-14 * a.max(b).max(1e-300) {
                    if a > 0.0 {
                        u / a
                    } else {
                        0.5 * h
                    }
                } else {
                    ((a * a + 2.0 * slope * u).max(0.0).sqrt() - a) / slope
                };
                wrap_2pi(start + i as f64 * h + x.clamp(0.0, h))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            PriorDistribution::Uniform2Pi => "uniform".into(),
            PriorDistribution::WrappedGaussian { mean, sigma } => {
                format!("wrapped_gaussian(mean={mean}, sigma={sigma})")
            }
            PriorDistribution::Gridded { start, end, density } => {
                format!("gridded([{start}, {end}], {} nodes)", density.len())
            }
        }
    }
}

pub fn prior_entropy(prior: &PriorDistribution) -> Result<f64> {
    prior.validate()?;
    Ok(prior.entropy())
}

/// `ε ≥ (2πe)^(-1/2) e^{H(Φ)} e^{-A}`.
pub fn error_lower_bound(asymmetry: f64, prior: &PriorDistribution) -> f64 {
    error_lower_bound_from_entropy(asymmetry, prior.entropy())
}

pub fn error_lower_bound_from_entropy(asymmetry: f64, prior_entropy: f64) -> f64 {
    inv_sqrt_2pi_e() * (prior_entropy - asymmetry).exp()
}

/// `H(Φ) - ½ ln(2πe ε²)`: the least mutual information compatible with an
/// rms error `ε`.
pub fn rate_distortion_floor(prior: &PriorDistribution, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::BadParameters(format!("error {eps} must be positive")));
    }
    Ok(prior.entropy() - 0.5 * (TAU * E * eps * eps).ln())
}

/// `1 / (2ΔG)`.
pub fn local_precision_lower(delta_g: f64) -> Result<f64> {
    if delta_g.is_nan() || delta_g <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(0.5 / delta_g)
}

/// `(2πe)^(-1/2) [(ΔG)² + 1/12]^(-1/2)`, a floor on `e^{-H(G|ρ)}` for
/// integer spectra.
pub fn variance_entropy_floor(delta_g: f64) -> f64 {
    inv_sqrt_2pi_e() / (delta_g * delta_g + 1.0 / 12.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultimodeCap {
    pub tight: f64,
    pub cap: f64,
}

/// `m ln(1 + N/m) + N ln(1 + m/N)` and its cap `m + N`.
pub fn multimode_entropy_cap(modes: u32, mean_photons: f64) -> Result<MultimodeCap> {
    if modes == 0 || !(mean_photons >= 0.0 && mean_photons.is_finite()) {
        return Err(Error::BadParameters(format!(
            "modes {modes}, mean photons {mean_photons}"
        )));
    }
    let m = modes as f64;
    let n = mean_photons;
    let second = if n == 0.0 { 0.0 } else { n * (m / n).ln_1p() };
    Ok(MultimodeCap {
        tight: m * (n / m).ln_1p() + second,
        cap: m + n,
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceAccount {
    pub qubits: u64,
    pub qubits_stated: Option<u64>,
    pub passes: u64,
    pub passes_stated: Option<u64>,
    pub photons: f64,
    pub modes: u32,
    pub copies: u32,
    pub bits: u32,
    pub notes: Vec<String>,
}

impl ResourceAccount {
    pub fn for_scheme(spec: &SchemeSpec) -> Self {
        Self {
            qubits: spec.qubits(),
            qubits_stated: spec.paper_qubits,
            passes: spec.passes(),
            passes_stated: spec.paper_passes,
            photons: 0.0,
            modes: 0,
            copies: spec.copies,
            bits: spec.bits,
            notes: spec.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedBound {
    pub name: String,
    pub formula: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub preset: String,
    pub prior: PriorDistribution,
    pub prior_entropy: f64,
    /// `A_G` of the composite probe, when it could be computed exactly.
    pub mi_upper_asymmetry: Option<f64>,
    /// Entropy-type upper bound on the information: `H(G|ρ)` or a count cap.
    pub mi_upper_entropy: f64,
    /// Error bound obtained from the tightest information bound available.
    pub error_lower: f64,
    pub local_precision_lower: Option<f64>,
    pub generator_rms: Option<f64>,
    pub distinct_eigenvalues: Option<u64>,
    pub closed_forms: Vec<NamedBound>,
    pub resources: ResourceAccount,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundPreset {
    Scheme(SchemeSpec),
    QubitUniversal { qubits: u64 },
    OpticalUniversal { modes: u32, mean_photons: f64 },
}

/// Distribution of the total eigenvalue of a scheme's composite probe, in
/// units of 1 starting from 0. Each copy of component k contributes 0 or
/// `Δ_k` with probability ½. `None` if the support exceeds `max_support`.
pub fn scheme_eigenvalue_distribution(spec: &SchemeSpec, max_support: usize) -> Option<Vec<f64>> {
    let span: u128 = spec.components.iter().map(|c| c.copies as u128 * c.gap as u128).sum();
    if span + 1 > max_support as u128 {
        return None;
    }
    let mut p = vec![0.0; span as usize + 1];
    p[0] = 1.0;
    let mut reach = 0usize;
    for c in &spec.components {
        let m = c.copies as usize;
        let gap = c.gap as usize;
        let binom = binomial_half(m);
        let new_reach = reach + m * gap;
        let mut next = vec![0.0; new_reach + 1];
        for (i, &pi) in p[..=reach].iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, &bj) in binom.iter().enumerate() {
                next[i + j * gap] += pi * bj;
            }
        }
        next.resize(p.len(), 0.0);
        p = next;
        reach = new_reach;
    }
    Some(p)
}

fn binomial_half(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..m {
        let mut next = vec![0.0; row.len() + 1];
        for (i, &r) in row.iter().enumerate() {
            next[i] += 0.5 * r;
            next[i + 1] += 0.5 * r;
        }
        row = next;
    }
    row
}

pub const MAX_CONVOLUTION_SUPPORT: usize = 1 << 24;

fn qubit_scheme_report(spec: &SchemeSpec, prior: &PriorDistribution) -> Result<BoundReport> {
    let h_prior = prior.entropy();
    let resources = ResourceAccount::for_scheme(spec);
    let pre = inv_sqrt_2pi_e() * h_prior.exp();
    let mut notes = Vec::new();

    let total_copies: u64 = spec.components.iter().map(|c| c.copies as u64).sum();
    let count_cap = if spec.components.is_empty() {
        0.0
    } else {
        // all eigenvalues lie in 0..=M(2^K - 1) for the presets
        let span: f64 = spec.components.iter().map(|c| c.copies as f64 * c.gap as f64).sum();
        (span + 1.0).ln().min(total_copies as f64 * std::f64::consts::LN_2)
    };
    let paper_cap = if spec.bits > 0 && spec.copies > 0 {
        (spec.copies as f64).ln() + spec.bits as f64 * std::f64::consts::LN_2
    } else {
        0.0
    };

    let variance: f64 = spec
        .components
        .iter()
        .map(|c| c.copies as f64 * (c.gap as f64).powi(2) / 4.0)
        .sum();
    let rms = variance.sqrt();

    let dist = scheme_eigenvalue_distribution(spec, MAX_CONVOLUTION_SUPPORT);
    let (asym, distinct) = match &dist {
        Some(p) => {
            let h = -p.iter().map(|&x| crate::numerics::xlogx(x)).sum::<f64>();
            (Some(h.max(0.0)), Some(p.iter().filter(|&&x| x > 0.0).count() as u64))
        }
        None => {
            notes.push("eigenvalue support too large for exact convolution; using count caps".into());
            (None, None)
        }
    };
    let mi_entropy = asym.unwrap_or(count_cap);
    let best_info = asym.unwrap_or(count_cap);

    let mut closed = Vec::new();
    let m = spec.copies as f64;
    let n = resources.qubits as f64;
    if spec.bits > 0 {
        closed.push(NamedBound {
            name: "count_cap".into(),
            formula: "(2 pi e)^(-1/2) e^H(prior) / (M 2^K)".into(),
            value: error_lower_bound_from_entropy(paper_cap, h_prior),
        });
        closed.push(NamedBound {
            name: "qubit_universal".into(),
            formula: "(2 pi e)^(-1/2) e^H(prior) 2^(-n)".into(),
            value: pre * 2f64.powf(-n),
        });
    }
    match spec.preset.as_str() {
        "quadratic_iterative" => closed.push(NamedBound {
            name: "quadratic_iterative".into(),
            formula: "(2 pi e)^(-1/2) e^H(prior) / (M [1 + (sqrt2 - 1) n / M]^2)".into(),
            value: pre / (m * (1.0 + (2f64.sqrt() - 1.0) * n / m).powi(2)),
        }),
        "roy_iterative" => {
            let n_stated = resources.qubits_stated.unwrap_or(resources.qubits) as f64;
            closed.push(NamedBound {
                name: "roy_iterative".into(),
                formula: "(2 pi e)^(-1/2) e^H(prior) M^(-1) 2^(-sqrt(2 n / M)), n = MK(K-1)/2".into(),
                value: pre / m * 2f64.powf(-(2.0 * n_stated / m).sqrt()),
            })
        }
        "linear_multipass" => closed.push(NamedBound {
            name: "linear_multipass".into(),
            formula: "(2 pi e)^(-1/2) e^H(prior) M^(-1) 2^(-n/M)".into(),
            value: pre / m * 2f64.powf(-n / m),
        }),
        "power_q_iterative" => notes
            .push("no closed form: the constant c_q is not available; bound from the composite spectrum only".into()),
        _ => {}
    }

    Ok(BoundReport {
        preset: spec.preset.clone(),
        prior: prior.clone(),
        prior_entropy: h_prior,
        mi_upper_asymmetry: asym,
        mi_upper_entropy: mi_entropy,
        error_lower: error_lower_bound_from_entropy(best_info, h_prior),
        local_precision_lower: local_precision_lower(rms).ok(),
        generator_rms: Some(rms),
        distinct_eigenvalues: distinct,
        closed_forms: closed,
        resources,
        notes,
    })
}

pub fn scheme_bound(preset: &BoundPreset, prior: &PriorDistribution) -> Result<BoundReport> {
    prior.validate()?;
    let h_prior = prior.entropy();
    let pre = inv_sqrt_2pi_e() * h_prior.exp();
    match preset {
        BoundPreset::Scheme(spec) => qubit_scheme_report(spec, prior),
        BoundPreset::QubitUniversal { qubits } => {
            let cap = *qubits as f64 * std::f64::consts::LN_2;
            Ok(BoundReport {
                preset: "qubit_universal".into(),
                prior: prior.clone(),
                prior_entropy: h_prior,
                mi_upper_asymmetry: None,
                mi_upper_entropy: cap,
                error_lower: error_lower_bound_from_entropy(cap, h_prior),
                local_precision_lower: None,
                generator_rms: None,
                distinct_eigenvalues: None,
                closed_forms: vec![NamedBound {
                    name: "qubit_universal".into(),
                    formula: "(2 pi e)^(-1/2) e^H(prior) 2^(-n)".into(),
                    value: pre * 2f64.powf(-(*qubits as f64)),
                }],
                resources: ResourceAccount {
                    qubits: *qubits,
                    ..Default::default()
                },
                notes: vec!["any generator on n qubits has at most 2^n distinct eigenvalues".into()],
            })
        }
        BoundPreset::OpticalUniversal { modes, mean_photons } => {
            let caps = multimode_entropy_cap(*modes, *mean_photons)?;
            Ok(BoundReport {
                preset: "optical_universal".into(),
                prior: prior.clone(),
                prior_entropy: h_prior,
                mi_upper_asymmetry: Some(caps.tight),
                mi_upper_entropy: caps.cap,
                error_lower: error_lower_bound_from_entropy(caps.tight, h_prior),
                local_precision_lower: None,
                generator_rms: None,
                distinct_eigenvalues: None,
                closed_forms: vec![NamedBound {
                    name: "optical_universal".into(),
                    formula: "(2 pi e)^(-1/2) e^H(prior) e^(-m) e^(-<N>)".into(),
                    value: pre * (-(*modes as f64) - mean_photons).exp(),
                }],
                resources: ResourceAccount {
                    photons: *mean_photons,
                    modes: *modes,
                    ..Default::default()
                },
                notes: vec![
                    "mi_upper_asymmetry holds the joint photon-number entropy cap m ln(1+N/m) + N ln(1+m/N)".into(),
                ],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::scheme;
    use rand::SeedableRng;

    #[test]
    fn error_bound_values() {
        let u = PriorDistribution::Uniform2Pi;
        let v = error_lower_bound(std::f64::consts::LN_2, &u);
        assert!((v - (PI / (2.0 * E)).sqrt()).abs() < 1e-15);
        assert!((v - 0.7602).abs() < 1e-4);
        assert!((error_lower_bound(0.0, &u) - 1.5203).abs() < 1e-4);
    }

    #[test]
    fn rate_distortion_round_trip() {
        let u = PriorDistribution::Uniform2Pi;
        let f = rate_distortion_floor(&u, 1.0).unwrap();
        assert!((f - (TAU.ln() - 0.5 * (TAU * E).ln())).abs() < 1e-15);
        for a in [0.0, 0.3, 2.0, 7.5] {
            let eps = error_lower_bound(a, &u);
            assert!((rate_distortion_floor(&u, eps).unwrap() - a).abs() < 1e-12);
        }
    }

    #[test]
    fn local_precision() {
        assert_eq!(local_precision_lower(0.5).unwrap(), 1.0);
        assert_eq!(local_precision_lower(4.0).unwrap(), 0.125);
        assert_eq!(local_precision_lower(0.0), Err(Error::ZeroVariance));
    }

    #[test]
    fn multimode() {
        let c = multimode_entropy_cap(2, 2.0).unwrap();
        assert!((c.tight - 4.0 * std::f64::consts::LN_2).abs() < 1e-14);
        assert_eq!(c.cap, 4.0);
        assert_eq!(multimode_entropy_cap(1, 0.0).unwrap().tight, 0.0);
    }

    #[test]
    fn prior_entropies() {
        assert_eq!(PriorDistribution::Uniform2Pi.entropy(), TAU.ln());
        let g = PriorDistribution::wrapped_gaussian(1.0, 0.01).unwrap();
        assert!((g.entropy() - 0.5 * (TAU * E * 1e-4).ln()).abs() < 1e-6);
        let flat = PriorDistribution::gridded(0.0, PI, vec![1.0 / PI; 33]).unwrap();
        assert!((flat.entropy() - PI.ln()).abs() < 1e-12);
        // a wide wrapped Gaussian approaches the uniform entropy
        let wide = PriorDistribution::wrapped_gaussian(0.0, 5.0).unwrap();
        assert!((wide.entropy() - TAU.ln()).abs() < 1e-6);
        // numerical and closed form agree where both apply
        let mid = PriorDistribution::WrappedGaussian { mean: 0.0, sigma: 0.5 };
        let h = TAU / ENTROPY_GRID as f64;
        let numeric = -(0..ENTROPY_GRID)
            .map(|j| crate::numerics::xlogx(mid.density(j as f64 * h)))
            .sum::<f64>()
            * h;
        assert!((numeric - mid.entropy()).abs() < 1e-7);
    }

    #[test]
    fn gridded_rejects_bad_mass() {
        assert!(matches!(
            PriorDistribution::gridded(0.0, PI, vec![1.0; 5]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn gridded_samples_follow_density() {
        // triangular density on [0, 2]: mean 4/3
        let p = PriorDistribution::gridded(0.0, 2.0, vec![0.0, 1.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mean = (0..n).map(|_| p.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 4.0 / 3.0).abs() < 5e-3, "{mean}");
    }

    #[test]
    fn scheme_closed_forms() {
        let u = PriorDistribution::Uniform2Pi;
        let pre = (TAU / E).sqrt();
        let quad = pre / (1.0 + (2f64.sqrt() - 1.0) * 100.0).powi(2);
        assert!((quad - 8.448e-4).abs() < 1e-6);
        let r = scheme_bound(&BoundPreset::QubitUniversal { qubits: 10 }, &u).unwrap();
        assert!((r.closed_forms[0].value - 1.4847e-3).abs() < 1e-7);
        assert!((r.closed_forms[0].value - error_lower_bound(10.0 * std::f64::consts::LN_2, &u)).abs() < 1e-18);
        let r = scheme_bound(
            &BoundPreset::OpticalUniversal {
                modes: 2,
                mean_photons: 2.0,
            },
            &u,
        )
        .unwrap();
        assert_eq!(r.mi_upper_entropy, 4.0);
        assert!((r.mi_upper_asymmetry.unwrap() - 2.7726).abs() < 1e-4);
    }

    #[test]
    fn linear_k1_exact_asymmetry() {
        let s = scheme::linear_multipass(3, 1).unwrap();
        let r = scheme_bound(&BoundPreset::Scheme(s), &PriorDistribution::Uniform2Pi).unwrap();
        assert!((r.mi_upper_asymmetry.unwrap() - 3.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(r.distinct_eigenvalues, Some(8));
    }

    #[test]
    fn convolution_matches_brute_force() {
        let s = scheme::quadratic_iterative(4, 2).unwrap();
        let p = scheme_eigenvalue_distribution(&s, 1 << 20).unwrap();
        // enumerate all 2^(K·M) bit patterns
        let gaps: Vec<u64> = s
            .components
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.gap, c.copies as usize))
            .collect();
        let mut q = vec![0.0; p.len()];
        for mask in 0u32..(1 << gaps.len()) {
            let total: u64 = gaps
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, g)| g)
                .sum();
            q[total as usize] += 1.0 / (1u64 << gaps.len()) as f64;
        }
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn asymmetry_below_count_cap() {
        for (k, m) in [(3, 1), (4, 4), (6, 2)] {
            let s = scheme::linear_multipass(k, m).unwrap();
            let r = scheme_bound(&BoundPreset::Scheme(s), &PriorDistribution::Uniform2Pi).unwrap();
            let cap = (m as f64).ln() + k as f64 * std::f64::consts::LN_2;
            assert!(r.mi_upper_asymmetry.unwrap() <= cap + 1e-12);
        }
    }
}
