//! Monte Carlo simulation of adaptive estimation with a gridded posterior.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scheme::{Component, SchemeSpec};
use super::stats::{self, Estimate, MutualInformation};
use crate::bounds::{self, BoundPreset, NamedBound, PriorDistribution, ResourceAccount};
use crate::error::{Error, Result};

pub const DEFAULT_GRID: usize = 1 << 14;
pub const MIN_GRID: usize = 1 << 10;
pub const MAX_GRID: usize = 1 << 26;
/// Grid points required per period of the largest gap.
pub const POINTS_PER_PERIOD: u64 = 16;
/// Below this resultant length the circular mean is undefined; the
/// estimate falls back to 0.
pub const MIN_RESULTANT: f64 = 1e-9;
/// Small-error regime in which the Holevo-variance sandwich is checked.
pub const BWB_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Feedback maximising the expected posterior sharpness at the current gap.
    #[default]
    Adaptive,
    /// `δ = arg E[e^{iΔφ}] + π/2`, the steepest point of the fringe.
    Slope,
    Nonadaptive,
    Bitwise,
}

impl std::str::FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Policy::Adaptive),
            "slope" => Ok(Policy::Slope),
            "nonadaptive" => Ok(Policy::Nonadaptive),
            "bitwise" => Ok(Policy::Bitwise),
            other => Err(Error::BadParameters(format!("unknown policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointEstimate {
    #[default]
    CircularMean,
    Map,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trials: usize,
    pub seed: u64,
    pub policy: Policy,
    pub estimate: PointEstimate,
    /// Posterior grid size; chosen from the largest gap when absent.
    pub grid: Option<usize>,
    pub mi_bins: Option<usize>,
    /// Keep per-trial outcome and feedback sequences.
    pub detailed_records: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            policy: Policy::Adaptive,
            estimate: PointEstimate::CircularMean,
            grid: None,
            mi_bins: None,
            detailed_records: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub phi: f64,
    pub phi_hat: f64,
    pub wrapped_error: f64,
    pub n_outcomes: usize,
    pub outcomes: Vec<u8>,
    pub feedback: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    /// `A_G` of the composite probe, or the count cap if not computable.
    pub asymmetry: f64,
    pub error_lower: f64,
    pub closed_forms: Vec<NamedBound>,
    /// `ε + 3σ ≥ error_lower`.
    pub error_respects_bound: bool,
    /// `Î - 3σ ≤ A_G`, when an information estimate exists.
    pub information_respects_bound: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    /// `ε ≤ 0.3`.
    pub applicable: bool,
    /// `V_H ≤ ε²`.
    pub lower: bool,
    /// `ε² ≤ (π/2)² V_H`.
    pub upper: bool,
}

impl SandwichCheck {
    pub fn evaluate(eps: f64, holevo: f64) -> Self {
        Self {
            applicable: eps <= BWB_THRESHOLD,
            lower: holevo <= eps * eps,
            upper: eps * eps <= (PI / 2.0).powi(2) * holevo,
        }
    }

    pub fn holds(&self) -> bool {
        !self.applicable || (self.lower && self.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub preset: String,
    pub trials: usize,
    pub seed: u64,
    pub policy: Policy,
    pub estimate: PointEstimate,
    pub grid: usize,
    pub prior: PriorDistribution,
    pub epsilon: Estimate,
    pub epsilon_raw: Estimate,
    pub sharpness: Estimate,
    pub holevo_variance: Estimate,
    pub mutual_information: Option<MutualInformation>,
    pub bounds: BoundComparison,
    pub sandwich: SandwichCheck,
    pub resources: ResourceAccount,
}

/// Child seed for trial `index`, a splitmix64 step from the master seed.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Smallest admissible grid for `max_gap`, at least the default.
pub fn auto_grid(max_gap: u64) -> usize {
    let need = (POINTS_PER_PERIOD * max_gap.max(1)).next_power_of_two() as usize;
    need.max(DEFAULT_GRID)
}

pub fn check_grid(grid: usize, max_gap: u64) -> Result<()> {
    if !grid.is_power_of_two() || !(MIN_GRID..=MAX_GRID).contains(&grid) {
        return Err(Error::BadParameters(format!(
            "grid size {grid} must be a power of two in [{MIN_GRID}, {MAX_GRID}]"
        )));
    }
    if (grid as u64) < POINTS_PER_PERIOD * max_gap {
        return Err(Error::GridTooCoarse { grid, max_gap });
    }
    Ok(())
}

/// Per-measurement plan shared by all trials.
struct Step {
    gap: u64,
    copy: u32,
}

fn expand_schedule(schedule: &[Component]) -> Vec<Step> {
    schedule
        .iter()
        .flat_map(|c| (0..c.copies).map(move |copy| Step { gap: c.gap, copy }))
        .collect()
}

/// Bitwise decoding needs gaps `2^(K-1), …, 2, 1`, largest first.
fn check_dyadic(schedule: &[Component]) -> Result<()> {
    let bad = || Error::BadParameters("bitwise policy needs one component per gap 2^(K-1), ..., 2, 1".into());
    let Some(last) = schedule.last() else {
        return Ok(());
    };
    if last.gap != 1 {
        return Err(bad());
    }
    for w in schedule.windows(2) {
        if w[0].gap != 2 * w[1].gap {
            return Err(bad());
        }
    }
    Ok(())
}

/// `cos(gΔφ_j)` and `sin(gΔφ_j)` over the grid for one integer multiple `g`.
#[derive(Default)]
struct Fringe {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

/// Upper limit on memory spent on precomputed fringes; beyond it fringes are
/// rebuilt per measurement.
const FRINGE_CACHE_BYTES: usize = 1 << 29;

struct Tables {
    cos: Vec<f64>,
    sin: Vec<f64>,
    prior: Vec<f64>,
    mask: u64,
    fringes: std::collections::HashMap<u64, Fringe>,
    /// `(δ, cos δ, sin δ)` for the adaptive search.
    candidates: Vec<(f64, f64, f64)>,
}

impl Tables {
    fn new(grid: usize, prior: &PriorDistribution, gaps: &[u64]) -> Self {
        let h = TAU / grid as f64;
        let mut t = Self {
            cos: (0..grid).map(|j| (j as f64 * h).cos()).collect(),
            sin: (0..grid).map(|j| (j as f64 * h).sin()).collect(),
            prior: prior.grid_weights(grid),
            mask: grid as u64 - 1,
            fringes: Default::default(),
            candidates: (0..FEEDBACK_CANDIDATES)
                .map(|c| {
                    let d = TAU * c as f64 / FEEDBACK_CANDIDATES as f64;
                    (d, d.cos(), d.sin())
                })
                .collect(),
        };
        let mut wanted: Vec<u64> = gaps.iter().flat_map(|&g| [g, 2 * g]).chain([1, 2]).collect();
        wanted.sort_unstable();
        wanted.dedup();
        if wanted.len() * grid * 16 <= FRINGE_CACHE_BYTES {
            for g in wanted {
                let mut f = Fringe::default();
                t.fill(g, &mut f);
                t.fringes.insert(g, f);
            }
        }
        t
    }

    fn fill(&self, gap: u64, out: &mut Fringe) {
        let n = self.cos.len();
        out.cos.resize(n, 0.0);
        out.sin.resize(n, 0.0);
        let step = gap & self.mask;
        let mut idx = 0u64;
        for j in 0..n {
            out.cos[j] = self.cos[idx as usize];
            out.sin[j] = self.sin[idx as usize];
            idx = (idx + step) & self.mask;
        }
    }

    fn fringe<'a>(&'a self, gap: u64, scratch: &'a mut Fringe) -> &'a Fringe {
        match self.fringes.get(&gap) {
            Some(f) => f,
            None => {
                self.fill(gap, scratch);
                scratch
            }
        }
    }

    /// `Σ w_j e^{iΔφ_j}` and `Σ w_j e^{2iΔφ_j}`.
    #[allow(clippy::needless_range_loop)]
    fn moments(&self, w: &[f64], gap: u64) -> Moments {
        let (mut a, mut b) = (Fringe::default(), Fringe::default());
        let f1 = self.fringe(gap, &mut a);
        let f2 = self.fringe(2 * gap, &mut b);
        let mut m = Moments::default();
        for j in 0..w.len() {
            m.first.0 += w[j] * f1.cos[j];
            m.first.1 += w[j] * f1.sin[j];
            m.second.0 += w[j] * f2.cos[j];
            m.second.1 += w[j] * f2.sin[j];
        }
        m
    }
}

/// First and second circular moments of the posterior at one gap.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    first: (f64, f64),
    second: (f64, f64),
}

const FEEDBACK_CANDIDATES: usize = 256;

/// `δ` maximising `Σ_b |E[P(b|φ) e^{iΔφ}]|`, the expected sharpness of
/// `Δφ` after one more outcome.
fn sharpness_feedback(m: &Moments, candidates: &[(f64, f64, f64)]) -> f64 {
    let (a_re, a_im) = m.first;
    let (b_re, b_im) = (0.5 * m.second.0, 0.5 * m.second.1);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &(delta, cd, sd) in candidates {
        // ½ e^{-iδ} Z₂ + ½ e^{iδ} Z₀ with Z₀ = 1
        let t_re = b_re * cd + b_im * sd + 0.5 * cd;
        let t_im = b_im * cd - b_re * sd + 0.5 * sd;
        let score = (a_re + t_re).hypot(a_im + t_im) + (a_re - t_re).hypot(a_im - t_im);
        if score > best.0 + 1e-15 {
            best = (score, delta);
        }
    }
    best.1
}

/// Multiplies `w` by the outcome likelihood, returning the new total and
/// the moments for the next gap. Four independent accumulator lanes keep
/// the loop vectorisable.
#[allow(clippy::needless_range_loop)]
fn update(w: &mut [f64], now: &Fringe, f1: &Fringe, f2: &Fringe, cd: f64, sd: f64, scale: f64) -> (f64, Moments) {
    const L: usize = 4;
    let n = w.len();
    let (nc, ns) = (&now.cos[..n], &now.sin[..n]);
    let (c1, s1) = (&f1.cos[..n], &f1.sin[..n]);
    let (c2, s2) = (&f2.cos[..n], &f2.sin[..n]);
    let mut acc = [[0.0f64; L]; 5];
    let half = 0.5 * scale;
    let mut j = 0;
    while j + L <= n {
        for l in 0..L {
            let k = j + l;
            let v = w[k] * half * (1.0 + cd * nc[k] + sd * ns[k]);
            w[k] = v;
            acc[0][l] += v;
            acc[1][l] += v * c1[k];
            acc[2][l] += v * s1[k];
            acc[3][l] += v * c2[k];
            acc[4][l] += v * s2[k];
        }
        j += L;
    }
    while j < n {
        let v = w[j] * half * (1.0 + cd * nc[j] + sd * ns[j]);
        w[j] = v;
        acc[0][0] += v;
        acc[1][0] += v * c1[j];
        acc[2][0] += v * s1[j];
        acc[3][0] += v * c2[j];
        acc[4][0] += v * s2[j];
        j += 1;
    }
    let sum = |a: &[f64; L]| a.iter().sum::<f64>();
    (
        sum(&acc[0]),
        Moments {
            first: (sum(&acc[1]), sum(&acc[2])),
            second: (sum(&acc[3]), sum(&acc[4])),
        },
    )
}

struct TrialOutcome {
    phi: f64,
    phi_hat: f64,
    outcomes: Vec<u8>,
    feedback: Vec<f64>,
}

fn run_posterior_trial(
    steps: &[Step],
    tables: &Tables,
    prior: &PriorDistribution,
    policy: Policy,
    estimate: PointEstimate,
    rng: &mut ChaCha8Rng,
) -> TrialOutcome {
    let phi = prior.sample(rng);
    let mut w = tables.prior.clone();
    let mut outcomes = Vec::with_capacity(steps.len());
    let mut feedback = Vec::with_capacity(steps.len());
    // normalised moments of the posterior for the upcoming gap
    let mut moments = steps.first().map(|s| tables.moments(&w, s.gap)).unwrap_or_default();
    let [mut s0, mut s1, mut s2] = [Fringe::default(), Fringe::default(), Fringe::default()];
    for (i, step) in steps.iter().enumerate() {
        let moment = moments.first;
        let delta = match policy {
            Policy::Adaptive => sharpness_feedback(&moments, &tables.candidates),
            Policy::Slope => moment.1.atan2(moment.0) + FRAC_PI_2,
            _ => {
                if step.copy % 2 == 0 {
                    0.0
                } else {
                    FRAC_PI_2
                }
            }
        };
        let p0 = 0.5 * (1.0 + (step.gap as f64 * phi - delta).cos());
        let b: u8 = if rng.random::<f64>() < p0 { 0 } else { 1 };
        outcomes.push(b);
        feedback.push(stats::wrap_2pi(delta));

        let sign = if b == 0 { 1.0 } else { -1.0 };
        let (cd, sd) = (sign * delta.cos(), sign * delta.sin());
        // outcome probability under the current posterior
        let predicted = 0.5 * (1.0 + cd * moment.0 + sd * moment.1);
        let scale = if predicted > 1e-300 { 1.0 / predicted } else { 1.0 };
        let next_gap = steps.get(i + 1).map(|s| s.gap).unwrap_or(1);
        let now = tables.fringe(step.gap, &mut s0);
        let f1 = tables.fringe(next_gap, &mut s1);
        let f2 = tables.fringe(2 * next_gap, &mut s2);
        let (total, mut next) = update(&mut w, now, f1, f2, cd, sd, scale);
        // absorb round-off in the predicted normalisation
        if total > 0.0 && (total - 1.0).abs() > 1e-12 {
            let inv = 1.0 / total;
            w.iter_mut().for_each(|x| *x *= inv);
            next.first.0 *= inv;
            next.first.1 *= inv;
            next.second.0 *= inv;
            next.second.1 *= inv;
        }
        moments = next;
    }
    if steps.is_empty() {
        moments = tables.moments(&w, 1);
    }
    let moment = moments.first;
    let phi_hat = match estimate {
        PointEstimate::CircularMean => {
            if moment.0.hypot(moment.1) < MIN_RESULTANT {
                0.0
            } else {
                stats::wrap_2pi(moment.1.atan2(moment.0))
            }
        }
        PointEstimate::Map => {
            let (mut best, mut at) = (f64::NEG_INFINITY, 0);
            for (j, &x) in w.iter().enumerate() {
                if x > best {
                    best = x;
                    at = j;
                }
            }
            at as f64 * TAU / w.len() as f64
        }
    };
    TrialOutcome {
        phi,
        phi_hat,
        outcomes,
        feedback,
    }
}

fn run_bitwise_trial(schedule: &[Component], prior: &PriorDistribution, rng: &mut ChaCha8Rng) -> TrialOutcome {
    let phi = prior.sample(rng);
    let mut psi = 0.0;
    let mut outcomes = Vec::new();
    let mut feedback = Vec::new();
    for c in schedule {
        let gap = c.gap as f64;
        let delta = gap * psi;
        let p0 = 0.5 * (1.0 + (gap * phi - delta).cos());
        let mut ones = 0u32;
        for _ in 0..c.copies {
            let b: u8 = if rng.random::<f64>() < p0 { 0 } else { 1 };
            ones += b as u32;
            outcomes.push(b);
            feedback.push(stats::wrap_2pi(delta));
        }
        // strict majority; ties read as 0
        if 2 * ones > c.copies {
            psi += PI / gap;
        }
    }
    TrialOutcome {
        phi,
        phi_hat: stats::wrap_2pi(psi),
        outcomes,
        feedback,
    }
}

/// Per-trial results in trial order.
pub fn simulate_trials(
    spec: &SchemeSpec,
    prior: &PriorDistribution,
    cfg: &SimulationConfig,
) -> Result<(usize, Vec<TrialRecord>)> {
    prior.validate()?;
    if cfg.trials == 0 {
        return Err(Error::BadParameters("at least one trial is required".into()));
    }
    let grid = cfg.grid.unwrap_or_else(|| auto_grid(spec.max_gap()));
    check_grid(grid, spec.max_gap())?;
    let schedule = spec.schedule();
    if cfg.policy == Policy::Bitwise {
        check_dyadic(&schedule)?;
    }
    let steps = expand_schedule(&schedule);
    let gaps: Vec<u64> = schedule.iter().map(|c| c.gap).collect();
    let tables = (cfg.policy != Policy::Bitwise).then(|| Tables::new(grid, prior, &gaps));

    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, t as u64));
            let out = match &tables {
                Some(tab) => run_posterior_trial(&steps, tab, prior, cfg.policy, cfg.estimate, &mut rng),
                None => run_bitwise_trial(&schedule, prior, &mut rng),
            };
            let n_outcomes = out.outcomes.len();
            TrialRecord {
                trial: t,
                phi: out.phi,
                phi_hat: out.phi_hat,
                wrapped_error: stats::wrap_pi(out.phi_hat - out.phi),
                n_outcomes,
                outcomes: if cfg.detailed_records { out.outcomes } else { Vec::new() },
                feedback: if cfg.detailed_records { out.feedback } else { Vec::new() },
            }
        })
        .collect();
    Ok((grid, records))
}

pub fn summarize(
    spec: &SchemeSpec,
    prior: &PriorDistribution,
    cfg: &SimulationConfig,
    grid: usize,
    records: &[TrialRecord],
) -> Result<EstimationReport> {
    let wrapped: Vec<f64> = records.iter().map(|r| r.wrapped_error).collect();
    let raw: Vec<f64> = records.iter().map(|r| r.phi_hat - r.phi).collect();
    let epsilon = stats::rms(&wrapped);
    let circ = stats::circular(&wrapped);
    let mi = match cfg.mi_bins {
        Some(b) => {
            let phi: Vec<f64> = records.iter().map(|r| r.phi).collect();
            let hat: Vec<f64> = records.iter().map(|r| r.phi_hat).collect();
            Some(stats::mutual_information(&phi, &hat, b)?)
        }
        None => None,
    };
    let bound = bounds::scheme_bound(&BoundPreset::Scheme(spec.clone()), prior)?;
    let asymmetry = bound.mi_upper_asymmetry.unwrap_or(bound.mi_upper_entropy);
    let se = if epsilon.se.is_finite() { epsilon.se } else { 0.0 };
    Ok(EstimationReport {
        preset: spec.preset.clone(),
        trials: records.len(),
        seed: cfg.seed,
        policy: cfg.policy,
        estimate: cfg.estimate,
        grid,
        prior: prior.clone(),
        epsilon,
        epsilon_raw: stats::rms(&raw),
        sharpness: circ.sharpness,
        holevo_variance: circ.holevo_variance,
        bounds: BoundComparison {
            asymmetry,
            error_lower: bound.error_lower,
            closed_forms: bound.closed_forms,
            error_respects_bound: epsilon.value + 3.0 * se >= bound.error_lower,
            information_respects_bound: mi.map(|m| m.value - 3.0 * m.se <= asymmetry),
        },
        mutual_information: mi,
        sandwich: SandwichCheck::evaluate(epsilon.value, circ.holevo_variance.value),
        resources: bound.resources,
    })
}

pub fn simulate(
    spec: &SchemeSpec,
    prior: &PriorDistribution,
    cfg: &SimulationConfig,
) -> Result<(EstimationReport, Vec<TrialRecord>)> {
    let (grid, records) = simulate_trials(spec, prior, cfg)?;
    let report = summarize(spec, prior, cfg, grid, &records)?;
    Ok((report, records))
}
