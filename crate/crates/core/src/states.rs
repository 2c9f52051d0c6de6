//! Probe states: pure amplitude vectors and density operators.

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64, ONE, ZERO};
use crate::spectra::{BasisKind, SpectralGenerator, MAX_DIM, MAX_QUBITS};

pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const WEIGHT_TOL: f64 = 1e-9;
/// Density operators are dense; beyond this they are refused.
pub const MAX_DENSITY_DIM: usize = 1 << 12;
pub const DEFAULT_COHERENT_MASS: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    basis: BasisKind,
}

impl PureState {
    /// Normalised state; errors if `Σ|a|²` is off by more than `1e-10`.
    pub fn new(amplitudes: Vec<C64>, basis: BasisKind) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: basis.dim(),
            });
        }
        if amplitudes.len() > MAX_DIM {
            return Err(Error::SizeExceeded {
                what: "pure state",
                requested: amplitudes.len() as u128,
                limit: MAX_DIM as u128,
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "state amplitudes",
                total: norm,
            });
        }
        Ok(Self { amplitudes, basis })
    }

    /// Rescales `amplitudes` to unit norm first.
    pub fn normalized(mut amplitudes: Vec<C64>, basis: BasisKind) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                what: "state amplitudes",
                total: norm,
            });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes, basis)
    }

    pub fn basis_state(index: usize, basis: BasisKind) -> Result<Self> {
        let mut a = vec![ZERO; basis.dim()];
        *a.get_mut(index)
            .ok_or_else(|| Error::BadParameters(format!("basis index {index} out of range")))? = ONE;
        Self::new(a, basis)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn projector(&self) -> Result<DensityOperator> {
        check_density_dim(self.dim())?;
        DensityOperator::new(ComplexMatrix::outer(&self.amplitudes), self.basis)
    }
}

fn check_density_dim(dim: usize) -> Result<()> {
    if dim > MAX_DENSITY_DIM {
        return Err(Error::SizeExceeded {
            what: "density operator",
            requested: dim as u128,
            limit: MAX_DENSITY_DIM as u128,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    basis: BasisKind,
}

impl DensityOperator {
    /// Checks Hermiticity and unit trace. Positivity is checked lazily by
    /// the entropy routines, which need the spectrum anyway.
    pub fn new(matrix: ComplexMatrix, basis: BasisKind) -> Result<Self> {
        if matrix.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                left: matrix.dim(),
                right: basis.dim(),
            });
        }
        check_density_dim(matrix.dim())?;
        let dev = matrix.hermitian_deviation();
        let allowed = crate::numerics::HERMITIAN_TOL * matrix.max_abs().max(1e-300) + 1e-15;
        if dev > allowed {
            return Err(Error::NotHermitian {
                asymmetry: dev,
                allowed,
            });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotNormalized {
                what: "density operator trace",
                total: tr.re,
            });
        }
        Ok(Self { matrix, basis })
    }

    pub fn maximally_mixed(basis: BasisKind) -> Result<Self> {
        let d = basis.dim();
        check_density_dim(d)?;
        Self::new(ComplexMatrix::identity(d).scale(1.0 / d as f64), basis)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    /// `λ ρ + (1-λ) σ`.
    pub fn convex(&self, other: &DensityOperator, lambda: f64) -> Result<Self> {
        self.basis.check_compatible(&other.basis)?;
        Self::new(
            self.matrix.scale(lambda).add(&other.matrix.scale(1.0 - lambda)),
            self.basis,
        )
    }
}

/// A probe state in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl Probe {
    pub fn dim(&self) -> usize {
        match self {
            Probe::Pure(s) => s.dim(),
            Probe::Mixed(r) => r.dim(),
        }
    }

    pub fn basis(&self) -> BasisKind {
        match self {
            Probe::Pure(s) => s.basis(),
            Probe::Mixed(r) => r.basis(),
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        match self {
            Probe::Pure(s) => s.projector(),
            Probe::Mixed(r) => Ok(r.clone()),
        }
    }
}

impl From<PureState> for Probe {
    fn from(s: PureState) -> Self {
        Probe::Pure(s)
    }
}

impl From<DensityOperator> for Probe {
    fn from(r: DensityOperator) -> Self {
        Probe::Mixed(r)
    }
}

fn check_qubits(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::BadParameters("qubit count must be at least 1".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::SizeExceeded {
            what: "qubit register",
            requested: 1u128 << n.min(127),
            limit: MAX_DIM as u128,
        });
    }
    Ok(())
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: u32) -> Result<PureState> {
    check_qubits(n)?;
    let dim = 1usize << n;
    let mut a = vec![ZERO; dim];
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    a[0] = r;
    a[dim - 1] = r;
    PureState::new(a, BasisKind::Qubits { n })
}

/// Equal superposition of eigenvectors for the smallest and largest
/// eigenvalue of `g`, taking the lowest label in each eigenspace.
pub fn minmax_superposition(g: &SpectralGenerator) -> Result<PureState> {
    let spaces = g.eigenspaces();
    if spaces.count() < 2 {
        return Err(Error::DegenerateSpectrum);
    }
    let top = spaces.count() - 1;
    let lo = spaces
        .labels
        .iter()
        .position(|&l| l == 0)
        .expect("eigenspace 0 is occupied");
    let hi = spaces
        .labels
        .iter()
        .position(|&l| l == top)
        .expect("top eigenspace is occupied");
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a: Vec<C64> = g
        .eigenvector(lo)
        .iter()
        .zip(g.eigenvector(hi))
        .map(|(x, y)| (x + y) * r)
        .collect();
    PureState::new(a, g.basis())
}

/// Coherent state `|α⟩` with `|α|² = mean`, real amplitudes, truncated at the
/// smallest cutoff whose Poisson mass reaches `mass`, then renormalised.
pub fn coherent_number_state(mean: f64, mass: f64) -> Result<PureState> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::BadParameters(format!("mean photon number {mean}")));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::BadParameters(format!("mass {mass} must lie in (0, 1)")));
    }
    let mut probs = Vec::new();
    let mut cumulative = 0.0;
    let mut log_fact = 0.0;
    let ln_mean = mean.ln();
    for k in 0u64.. {
        if k > 0 {
            log_fact += (k as f64).ln();
        }
        let p = if mean == 0.0 {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (-mean + k as f64 * ln_mean - log_fact).exp()
        };
        probs.push(p);
        cumulative += p;
        if cumulative >= mass || (k as f64 > mean && p == 0.0) {
            break;
        }
        if probs.len() >= MAX_DIM {
            return Err(Error::SizeExceeded {
                what: "coherent state truncation",
                requested: probs.len() as u128 + 1,
                limit: MAX_DIM as u128,
            });
        }
    }
    let cutoff = probs.len() - 1;
    let amplitudes = probs
        .into_iter()
        .map(|p| C64::new((p / cumulative).sqrt(), 0.0))
        .collect();
    if cutoff == 0 {
        // a one-dimensional Fock space is not a useful basis; keep |1⟩ with zero weight
        return PureState::new(vec![ONE, ZERO], BasisKind::Fock { cutoff: 1 });
    }
    PureState::new(amplitudes, BasisKind::Fock { cutoff })
}

/// Coherent state truncated at a fixed `cutoff` and renormalised.
pub fn coherent_with_cutoff(mean: f64, cutoff: usize) -> Result<PureState> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::BadParameters(format!("mean photon number {mean}")));
    }
    if cutoff == 0 || cutoff >= MAX_DIM {
        return Err(Error::BadParameters(format!(
            "cutoff {cutoff} must lie in [1, {})",
            MAX_DIM
        )));
    }
    let mut log_fact = 0.0;
    let mut amps = Vec::with_capacity(cutoff + 1);
    for k in 0..=cutoff {
        if k > 0 {
            log_fact += (k as f64).ln();
        }
        let p = if mean == 0.0 {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (-mean + k as f64 * mean.ln() - log_fact).exp()
        };
        amps.push(C64::new(p.sqrt(), 0.0));
    }
    PureState::normalized(amps, BasisKind::Fock { cutoff })
}

/// `|+⟩^{⊗K}`.
pub fn plus_product(k: u32) -> Result<PureState> {
    check_qubits(k)?;
    let dim = 1usize << k;
    let amp = C64::new((dim as f64).sqrt().recip(), 0.0);
    PureState::new(vec![amp; dim], BasisKind::Qubits { n: k })
}

/// Tensor product with little-endian factor order: factor 0 is the least
/// significant digit of the combined index.
pub fn tensor(states: &[PureState]) -> Result<PureState> {
    if states.is_empty() {
        return Err(Error::BadParameters("tensor of no states".into()));
    }
    let dim: u128 = states.iter().map(|s| s.dim() as u128).product();
    if dim > MAX_DIM as u128 {
        return Err(Error::SizeExceeded {
            what: "tensor product",
            requested: dim,
            limit: MAX_DIM as u128,
        });
    }
    let mut amps = vec![ONE];
    for s in states {
        // new index = old + stride * i_s with stride = old length
        let mut next = Vec::with_capacity(amps.len() * s.dim());
        for &a in s.amplitudes() {
            next.extend(amps.iter().map(|&b| a * b));
        }
        amps = next;
    }
    let basis = if states.iter().all(|s| matches!(s.basis(), BasisKind::Qubits { .. })) {
        BasisKind::Qubits {
            n: states
                .iter()
                .map(|s| match s.basis() {
                    BasisKind::Qubits { n } => n,
                    _ => 0,
                })
                .sum(),
        }
    } else {
        BasisKind::Generic { dim: amps.len() }
    };
    PureState::normalized(amps, basis)
}

/// `Σ w_i |ψ_i⟩⟨ψ_i|`; weights must be non-negative and sum to one.
pub fn mix(ensemble: &[(f64, PureState)]) -> Result<DensityOperator> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::BadParameters("empty ensemble".into()))?;
    let basis = first.1.basis();
    check_density_dim(basis.dim())?;
    let total: f64 = ensemble.iter().map(|(w, _)| w).sum();
    if ensemble.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::NotNormalized {
            what: "ensemble weights",
            total,
        });
    }
    let mut m = ComplexMatrix::zeros(basis.dim());
    for (w, s) in ensemble {
        basis.check_compatible(&s.basis())?;
        let a = s.amplitudes();
        for i in 0..a.len() {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..a.len() {
                m[(i, j)] += a[i] * a[j].conj() * *w;
            }
        }
    }
    DensityOperator::new(m, basis)
}
