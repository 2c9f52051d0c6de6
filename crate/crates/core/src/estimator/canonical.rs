//! Canonical phase measurement on a uniform superposition of `D = 2^K`
//! consecutive eigenvalues: the estimate error follows the Fejér kernel
//! `p(θ) = sin²(Dθ/2) / (2πD sin²(θ/2))`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simulate::{trial_seed, SandwichCheck};
use super::stats::{self, Estimate, MutualInformation};
use crate::bounds::PriorDistribution;
use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;

pub const MAX_BITS: u32 = 24;
/// Quoted asymptotic constant in `ε ≈ c 2^(-K/2)`.
pub const QUOTED_CONSTANT: f64 = 1.18;
const NODES_PER_LOBE: usize = 16;

/// `ε·2^(K/2) → 2√(ln 2)` as `K → ∞`.
pub fn asymptotic_constant() -> f64 {
    2.0 * std::f64::consts::LN_2.sqrt()
}

fn check_bits(k: u32) -> Result<u64> {
    if k > MAX_BITS {
        return Err(Error::SizeExceeded {
            what: "canonical measurement dimension",
            requested: 1u128 << k.min(127),
            limit: 1u128 << MAX_BITS,
        });
    }
    Ok(1u64 << k)
}

pub fn fejer_density(theta: f64, d: u64) -> f64 {
    let df = d as f64;
    let s = (0.5 * theta).sin();
    if s.abs() < 1e-300 {
        return df / TAU;
    }
    let num = (0.5 * df * theta).sin();
    num * num / (s * s * TAU * df)
}

/// `√(∫ θ² p(θ) dθ)` over `(-π, π]`, Gauss–Legendre on each lobe between
/// consecutive zeros `2πj/D`.
pub fn quadrature_epsilon(d: u64) -> f64 {
    if d == 1 {
        return PI / 3f64.sqrt();
    }
    let (x, w) = gauss_legendre(NODES_PER_LOBE);
    let lobe = TAU / d as f64;
    let mut lobes = d / 2;
    if d % 2 == 1 {
        lobes += 1;
    }
    let panel = |j: u64| {
        let a = j as f64 * lobe;
        let b = ((j + 1) as f64 * lobe).min(PI);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        x.iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let t = mid + half * xi;
                wi * t * t * fejer_density(t, d)
            })
            .sum::<f64>()
            * half
    };
    let total: f64 = if lobes > 1 << 14 {
        (0..lobes).into_par_iter().map(panel).sum()
    } else {
        (0..lobes).map(panel).sum()
    };
    (2.0 * total).sqrt()
}

/// One draw from the Fejér kernel by rejection under
/// `min(D², π²/θ²)`, which dominates the unnormalised kernel.
pub fn sample_error<R: Rng + ?Sized>(d: u64, rng: &mut R) -> f64 {
    let df = d as f64;
    let central = df / (2.0 * df - 1.0);
    loop {
        let u: f64 = rng.random();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let (theta, envelope) = if u < central {
            let t = (rng.random::<f64>() * 2.0 - 1.0) * PI / df;
            (t, df * df)
        } else {
            let v: f64 = rng.random();
            let t = PI / (df - v * (df - 1.0));
            (sign * t, (PI / t).powi(2))
        };
        let s = (0.5 * theta).sin();
        let f = if s == 0.0 {
            df * df
        } else {
            let n = (0.5 * df * theta).sin();
            n * n / (s * s)
        };
        if rng.random::<f64>() * envelope <= f {
            return theta;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub bits: u32,
    pub dimension: u64,
    pub trials: usize,
    pub seed: u64,
    pub prior: PriorDistribution,
    pub epsilon_quadrature: f64,
    pub epsilon: Estimate,
    pub sharpness: Estimate,
    pub holevo_variance: Estimate,
    pub mutual_information: Option<MutualInformation>,
    /// `ε_quadrature · 2^(K/2)`.
    pub scaled_constant: f64,
    pub asymptotic_constant: f64,
    pub quoted_constant: f64,
    pub constant_ratio: f64,
    /// Monte Carlo and quadrature agree within three standard errors.
    pub monte_carlo_agrees: bool,
    pub sandwich: SandwichCheck,
}

pub struct CanonicalSamples {
    pub phi: Vec<f64>,
    pub phi_hat: Vec<f64>,
    pub errors: Vec<f64>,
}

pub fn canonical_trials(k: u32, prior: &PriorDistribution, trials: usize, seed: u64) -> Result<CanonicalSamples> {
    let d = check_bits(k)?;
    prior.validate()?;
    let draws: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, t as u64));
            let phi = prior.sample(&mut rng);
            let theta = sample_error(d, &mut rng);
            (phi, stats::wrap_2pi(phi + theta))
        })
        .collect();
    let phi: Vec<f64> = draws.iter().map(|p| p.0).collect();
    let phi_hat: Vec<f64> = draws.iter().map(|p| p.1).collect();
    let errors = phi.iter().zip(&phi_hat).map(|(a, b)| stats::wrap_pi(b - a)).collect();
    Ok(CanonicalSamples { phi, phi_hat, errors })
}

pub fn canonical_sample(
    k: u32,
    prior: &PriorDistribution,
    trials: usize,
    seed: u64,
    mi_bins: Option<usize>,
) -> Result<CanonicalReport> {
    if trials == 0 {
        return Err(Error::BadParameters("at least one trial is required".into()));
    }
    let d = check_bits(k)?;
    let s = canonical_trials(k, prior, trials, seed)?;
    let eps_q = quadrature_epsilon(d);
    let epsilon = stats::rms(&s.errors);
    let circ = stats::circular(&s.errors);
    let mi = match mi_bins {
        Some(b) => Some(stats::mutual_information(&s.phi, &s.phi_hat, b)?),
        None => None,
    };
    let scaled = eps_q * 2f64.powf(k as f64 / 2.0);
    Ok(CanonicalReport {
        bits: k,
        dimension: d,
        trials,
        seed,
        prior: prior.clone(),
        epsilon_quadrature: eps_q,
        monte_carlo_agrees: (epsilon.value - eps_q).abs() <= 3.0 * epsilon.se,
        epsilon,
        sharpness: circ.sharpness,
        holevo_variance: circ.holevo_variance,
        mutual_information: mi,
        scaled_constant: scaled,
        asymptotic_constant: asymptotic_constant(),
        quoted_constant: QUOTED_CONSTANT,
        constant_ratio: scaled / QUOTED_CONSTANT,
        sandwich: SandwichCheck::evaluate(epsilon.value, circ.holevo_variance.value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `ε² = π²/3 + 4 Σ_{j=1}^{D-1} (1 - j/D)(-1)^j / j²`, from the Fourier
    /// series of the kernel.
    fn fourier_epsilon(d: u64) -> f64 {
        let df = d as f64;
        let tail: f64 = (1..d)
            .map(|j| {
                let jf = j as f64;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                (1.0 - jf / df) * sign / (jf * jf)
            })
            .sum();
        (PI * PI / 3.0 + 4.0 * tail).sqrt()
    }

    #[test]
    fn small_dimensions() {
        assert!((quadrature_epsilon(1) - PI / 3f64.sqrt()).abs() < 1e-15);
        let e2 = quadrature_epsilon(2);
        assert!((e2 - (PI * PI / 3.0 - 2.0).sqrt()).abs() < 1e-12);
        assert!((e2 - 1.1358).abs() < 1e-4);
    }

    #[test]
    fn quadrature_matches_fourier_series() {
        for k in 0..=14 {
            let d = 1u64 << k;
            let (a, b) = (quadrature_epsilon(d), fourier_epsilon(d));
            assert!((a - b).abs() < 1e-9 * b, "K={k}: {a} vs {b}");
        }
        for d in [3u64, 5, 7, 100] {
            assert!((quadrature_epsilon(d) - fourier_epsilon(d)).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_is_normalised() {
        for d in [1u64, 2, 8, 33] {
            let n = 20_000;
            let h = TAU / n as f64;
            let total: f64 = (0..n)
                .map(|j| fejer_density(-PI + (j as f64 + 0.5) * h, d))
                .sum::<f64>()
                * h;
            assert!((total - 1.0).abs() < 1e-9, "D={d}: {total}");
        }
    }

    #[test]
    fn sampler_matches_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [1u64, 2, 16, 1024] {
            let n = 60_000;
            let e: Vec<f64> = (0..n).map(|_| sample_error(d, &mut rng)).collect();
            let est = stats::rms(&e);
            let exact = quadrature_epsilon(d);
            assert!((est.value - exact).abs() < 4.0 * est.se, "D={d}: {:?} vs {exact}", est);
            assert!(e.iter().all(|t| t.abs() <= PI));
        }
    }

    #[test]
    fn approaches_asymptotic_constant() {
        let k = 20;
        let c = quadrature_epsilon(1 << k) * 2f64.powf(k as f64 / 2.0);
        assert!((c - asymptotic_constant()).abs() < 1e-2, "{c}");
    }

    #[test]
    fn refuses_large_k() {
        assert!(matches!(
            canonical_sample(25, &PriorDistribution::Uniform2Pi, 10, 0, None),
            Err(Error::SizeExceeded { .. })
        ));
    }
}
