//! Shift generators described by their spectral data.
//!
//! A generator is stored as one eigenvalue per eigenbasis label together with
//! the eigenbasis itself. Most generators here are diagonal in the
//! computational basis; the exceptions (the `H`/`A` pair built from
//! `σ+` products, or user-supplied bases) carry a block-unitary change of
//! basis so that very large but sparse cases never need a dense matrix.
//!
//! Index convention: multi-qubit and composite indices are little-endian,
//! factor (qubit) 0 is the least significant digit. For qubits a set bit
//! means `|1⟩`, on which `σ_z = -1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64, ONE, ZERO};

pub const MAX_QUBITS: u32 = 20;
pub const MAX_DIM: usize = 1 << 20;
/// Largest dimension for which composite generators with non-computational
/// parts are expanded into a dense eigenbasis.
pub const MAX_DENSE_DIM: usize = 1 << 12;
pub const UNITARY_TOL: f64 = 1e-10;
/// Absolute tolerance (scaled by the largest |eigenvalue|, floor 1) used to
/// merge eigenvalues that are not all integers.
pub const EIGENVALUE_MERGE_TOL: f64 = 1e-9;

/// Which basis the labels of a generator or a state refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BasisKind {
    /// `n` qubits, dimension `2^n`.
    Qubits {
        n: u32,
    },
    /// Photon-number basis `|0⟩ … |cutoff⟩`.
    Fock {
        cutoff: usize,
    },
    Generic {
        dim: usize,
    },
}

impl BasisKind {
    pub fn dim(&self) -> usize {
        match *self {
            BasisKind::Qubits { n } => 1usize << n,
            BasisKind::Fock { cutoff } => cutoff + 1,
            BasisKind::Generic { dim } => dim,
        }
    }

    /// Joint operations need equal dimensions and, unless one side is
    /// generic, the same labelling.
    pub fn check_compatible(&self, other: &BasisKind) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        match (self, other) {
            (BasisKind::Generic { .. }, _) | (_, BasisKind::Generic { .. }) => Ok(()),
            (a, b) if a == b => Ok(()),
            (a, b) => Err(Error::BasisMismatch {
                left: format!("{a:?}"),
                right: format!("{b:?}"),
            }),
        }
    }

    fn tensor(parts: &[BasisKind]) -> BasisKind {
        if parts.iter().all(|p| matches!(p, BasisKind::Qubits { .. })) {
            let n = parts
                .iter()
                .map(|p| match p {
                    BasisKind::Qubits { n } => *n,
                    _ => unreachable!(),
                })
                .sum();
            BasisKind::Qubits { n }
        } else {
            BasisKind::Generic {
                dim: parts.iter().map(BasisKind::dim).product(),
            }
        }
    }
}

/// A unitary acting non-trivially only on a few small index blocks.
///
/// For each block, column `c` of `matrix` is the eigenvector with label
/// `indices[c]`, written in the computational coordinates `indices[..]`.
/// Labels outside every block are computational basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockUnitary {
    dim: usize,
    blocks: Vec<UnitaryBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryBlock {
    pub indices: Vec<usize>,
    pub matrix: ComplexMatrix,
}

impl BlockUnitary {
    pub fn new(dim: usize, blocks: Vec<UnitaryBlock>) -> Result<Self> {
        let mut seen = vec![false; dim];
        for b in &blocks {
            if b.indices.len() != b.matrix.dim() {
                return Err(Error::DimensionMismatch {
                    left: b.indices.len(),
                    right: b.matrix.dim(),
                });
            }
            for &i in &b.indices {
                if i >= dim || seen[i] {
                    return Err(Error::BadParameters(format!("block index {i} invalid or repeated")));
                }
                seen[i] = true;
            }
            let deviation = b.matrix.unitarity_deviation();
            if deviation > UNITARY_TOL {
                return Err(Error::NotUnitary { deviation });
            }
        }
        Ok(Self { dim, blocks })
    }

    pub fn dense(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        Self::new(
            dim,
            vec![UnitaryBlock {
                indices: (0..dim).collect(),
                matrix,
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[UnitaryBlock] {
        &self.blocks
    }

    fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.dim);
        for b in &self.blocks {
            for &i in &b.indices {
                m[(i, i)] = ZERO;
            }
            for (r, &i) in b.indices.iter().enumerate() {
                for (c, &j) in b.indices.iter().enumerate() {
                    m[(i, j)] = b.matrix[(r, c)];
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Eigenbasis {
    Computational,
    Explicit(BlockUnitary),
}

impl Eigenbasis {
    pub fn is_computational(&self) -> bool {
        matches!(self, Eigenbasis::Computational)
    }

    /// Eigenvector with basis label `label`, in computational coordinates.
    pub fn vector(&self, dim: usize, label: usize) -> Vec<C64> {
        let mut v = vec![ZERO; dim];
        if let Eigenbasis::Explicit(u) = self {
            for b in &u.blocks {
                if let Some(c) = b.indices.iter().position(|&i| i == label) {
                    for (r, &i) in b.indices.iter().enumerate() {
                        v[i] = b.matrix[(r, c)];
                    }
                    return v;
                }
            }
        }
        v[label] = ONE;
        v
    }

    /// `V† a`: amplitudes of `a` in eigenbasis coordinates.
    pub fn to_eigen_coords(&self, a: &[C64]) -> Vec<C64> {
        let mut out = a.to_vec();
        if let Eigenbasis::Explicit(u) = self {
            for b in &u.blocks {
                for (c, &ic) in b.indices.iter().enumerate() {
                    out[ic] = b
                        .indices
                        .iter()
                        .enumerate()
                        .map(|(r, &ir)| b.matrix[(r, c)].conj() * a[ir])
                        .sum();
                }
            }
        }
        out
    }

    /// `V a`: inverse of [`Self::to_eigen_coords`].
    pub fn from_eigen_coords(&self, a: &[C64]) -> Vec<C64> {
        let mut out = a.to_vec();
        if let Eigenbasis::Explicit(u) = self {
            for b in &u.blocks {
                for (r, &ir) in b.indices.iter().enumerate() {
                    out[ir] = b
                        .indices
                        .iter()
                        .enumerate()
                        .map(|(c, &ic)| b.matrix[(r, c)] * a[ic])
                        .sum();
                }
            }
        }
        out
    }

    /// `V† ρ V`.
    pub fn to_eigen_coords_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Eigenbasis::Computational => rho.clone(),
            Eigenbasis::Explicit(_) => {
                let n = rho.dim();
                // columns: V† applied to each column, then rows: (·)V
                let mut tmp = ComplexMatrix::zeros(n);
                for j in 0..n {
                    let col = self.to_eigen_coords(&rho.column(j));
                    for i in 0..n {
                        tmp[(i, j)] = col[i];
                    }
                }
                let mut out = ComplexMatrix::zeros(n);
                for i in 0..n {
                    // (M V)_{i,·} = (V^T M_{i,·}^T); use conj trick: (M V)row = conj(V† conj(row))
                    let row: Vec<C64> = tmp.row(i).iter().map(|z| z.conj()).collect();
                    let t = self.to_eigen_coords(&row);
                    for j in 0..n {
                        out[(i, j)] = t[j].conj();
                    }
                }
                out
            }
        }
    }

    /// `V ρ' V†`.
    pub fn from_eigen_coords_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Eigenbasis::Computational => rho.clone(),
            Eigenbasis::Explicit(_) => {
                let n = rho.dim();
                let mut tmp = ComplexMatrix::zeros(n);
                for j in 0..n {
                    let col = self.from_eigen_coords(&rho.column(j));
                    for i in 0..n {
                        tmp[(i, j)] = col[i];
                    }
                }
                let mut out = ComplexMatrix::zeros(n);
                for i in 0..n {
                    let row: Vec<C64> = tmp.row(i).iter().map(|z| z.conj()).collect();
                    let t = self.from_eigen_coords(&row);
                    for j in 0..n {
                        out[(i, j)] = t[j].conj();
                    }
                }
                out
            }
        }
    }

    fn dense_matrix(&self, dim: usize) -> ComplexMatrix {
        match self {
            Eigenbasis::Computational => ComplexMatrix::identity(dim),
            Eigenbasis::Explicit(u) => u.to_matrix(),
        }
    }
}

/// Hermitian shift generator `G = Σ_label g_label |v_label⟩⟨v_label|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGenerator {
    eigenvalues: Vec<f64>,
    eigenbasis: Eigenbasis,
    basis: BasisKind,
    description: String,
}

/// Grouping of eigenbasis labels into eigenspaces of equal eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspaces {
    /// `labels[i]` is the eigenspace index of eigenbasis label `i`.
    pub labels: Vec<usize>,
    /// Eigenvalue of each eigenspace, ascending.
    pub values: Vec<f64>,
}

impl Eigenspaces {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSummary {
    pub distinct_count: usize,
    pub min: f64,
    pub max: f64,
    pub gap: f64,
    pub multiplicities: Vec<Multiplicity>,
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

fn jz_eigenvalue(n: u32, index: usize) -> i64 {
    n as i64 - 2 * index.count_ones() as i64
}

impl SpectralGenerator {
    /// Generator diagonal in the computational basis.
    pub fn diagonal(eigenvalues: Vec<f64>, basis: BasisKind, description: impl Into<String>) -> Result<Self> {
        Self::new(eigenvalues, Eigenbasis::Computational, basis, description)
    }

    pub fn new(
        eigenvalues: Vec<f64>,
        eigenbasis: Eigenbasis,
        basis: BasisKind,
        description: impl Into<String>,
    ) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::BadParameters("generator needs at least one eigenvalue".into()));
        }
        if eigenvalues.len() > MAX_DIM {
            return Err(Error::SizeExceeded {
                what: "generator",
                requested: eigenvalues.len() as u128,
                limit: MAX_DIM as u128,
            });
        }
        if basis.dim() != eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                left: basis.dim(),
                right: eigenvalues.len(),
            });
        }
        if let Some(v) = eigenvalues.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("eigenvalue {v}")));
        }
        if let Eigenbasis::Explicit(u) = &eigenbasis {
            if u.dim() != eigenvalues.len() {
                return Err(Error::DimensionMismatch {
                    left: u.dim(),
                    right: eigenvalues.len(),
                });
            }
        }
        Ok(Self {
            eigenvalues,
            eigenbasis,
            basis,
            description: description.into(),
        })
    }

    /// Generator with a dense, user-supplied eigenbasis (columns of `vectors`).
    pub fn with_eigenvectors(
        eigenvalues: Vec<f64>,
        vectors: ComplexMatrix,
        description: impl Into<String>,
    ) -> Result<Self> {
        let dim = vectors.dim();
        Self::new(
            eigenvalues,
            Eigenbasis::Explicit(BlockUnitary::dense(vectors)?),
            BasisKind::Generic { dim },
            description,
        )
    }

    /// `J_z = σ_z^(1) + … + σ_z^(n)`.
    pub fn jz(n: u32) -> Result<Self> {
        check_qubits(n)?;
        let values = (0..1usize << n).map(|b| jz_eigenvalue(n, b) as f64).collect();
        Self::diagonal(values, BasisKind::Qubits { n }, format!("J_z on {n} qubits"))
    }

    /// `(J_z)^q`.
    pub fn jz_pow(n: u32, q: u32) -> Result<Self> {
        check_qubits(n)?;
        if q == 0 {
            return Err(Error::BadParameters("power q must be at least 1".into()));
        }
        let values = (0..1usize << n)
            .map(|b| (jz_eigenvalue(n, b) as f64).powi(q as i32))
            .collect();
        Self::diagonal(values, BasisKind::Qubits { n }, format!("(J_z)^{q} on {n} qubits"))
    }

    /// `n · J_z`.
    pub fn n_jz(n: u32) -> Result<Self> {
        check_qubits(n)?;
        let values = (0..1usize << n)
            .map(|b| (n as i64 * jz_eigenvalue(n, b)) as f64)
            .collect();
        Self::diagonal(values, BasisKind::Qubits { n }, format!("n J_z on {n} qubits"))
    }

    /// Real part `H` of `⊗(σ_x + iσ_y)`: eigenvalues `±2^(n-1)` on
    /// `(|0…0⟩ ± |1…1⟩)/√2`, zero elsewhere.
    pub fn roy_h(n: u32) -> Result<Self> {
        Self::roy(n, ONE, "H")
    }

    /// Imaginary part `A` of `⊗(σ_x + iσ_y)`: eigenvalues `±2^(n-1)` on
    /// `(|0…0⟩ ± i|1…1⟩)/√2`, zero elsewhere.
    pub fn roy_a(n: u32) -> Result<Self> {
        Self::roy(n, C64::new(0.0, 1.0), "A")
    }

    fn roy(n: u32, phase: C64, name: &str) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let top = dim - 1;
        let half = (2.0f64).powi(n as i32 - 1);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // label 0 -> (|0…0⟩ + phase|1…1⟩)/√2, label top -> (|0…0⟩ - phase|1…1⟩)/√2
        let block = ComplexMatrix::from_row_major(2, vec![C64::new(r, 0.0), C64::new(r, 0.0), phase * r, -phase * r])?;
        let mut values = vec![0.0; dim];
        values[0] = half;
        values[top] = -half;
        Self::new(
            values,
            Eigenbasis::Explicit(BlockUnitary::new(
                dim,
                vec![UnitaryBlock {
                    indices: vec![0, top],
                    matrix: block,
                }],
            )?),
            BasisKind::Qubits { n },
            format!("{name} on {n} qubits"),
        )
    }

    /// `f(N)` on the number states `|0⟩ … |cutoff⟩`.
    pub fn number_function(cutoff: usize, f: impl Fn(u64) -> f64, description: impl Into<String>) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::BadParameters("cutoff must be at least 1".into()));
        }
        if cutoff >= MAX_DIM {
            return Err(Error::SizeExceeded {
                what: "number basis",
                requested: cutoff as u128 + 1,
                limit: MAX_DIM as u128,
            });
        }
        let values = (0..=cutoff as u64).map(f).collect();
        Self::diagonal(values, BasisKind::Fock { cutoff }, description)
    }

    /// A single qubit with eigenvalue `gap` on `|0⟩` and `0` on `|1⟩`,
    /// i.e. `gap · (1 + σ_z)/2`.
    pub fn two_level(gap: f64) -> Result<Self> {
        Self::diagonal(vec![gap, 0.0], BasisKind::Qubits { n: 1 }, format!("{gap} (1+σ_z)/2"))
    }

    /// `Σ_k 2^(k-1) (1 + σ_z^(k))/2` on `bits` qubits.
    pub fn multipass(bits: u32) -> Result<Self> {
        check_qubits(bits)?;
        let parts = (0..bits)
            .map(|k| Self::two_level((1u64 << k) as f64))
            .collect::<Result<Vec<_>>>()?;
        let mut g = composite_sum(&parts)?;
        g.description = format!("multipass generator on {bits} qubits");
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenbasis(&self) -> &Eigenbasis {
        &self.eigenbasis
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn eigenvector(&self, label: usize) -> Vec<C64> {
        self.eigenbasis.vector(self.dim(), label)
    }

    /// `f(G)`: same eigenbasis, eigenvalues mapped through `f`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64, description: impl Into<String>) -> Result<Self> {
        Self::new(
            self.eigenvalues.iter().map(|&g| f(g)).collect(),
            self.eigenbasis.clone(),
            self.basis,
            description,
        )
    }

    pub fn is_integer_valued(&self) -> bool {
        self.eigenvalues.iter().all(|g| g.fract() == 0.0)
    }

    /// Errors unless every eigenvalue is an integer (phase-shift generators).
    pub fn require_integer_spectrum(&self) -> Result<()> {
        match self.eigenvalues.iter().find(|g| g.fract() != 0.0) {
            Some(&value) => Err(Error::NonIntegerSpectrum { value }),
            None => Ok(()),
        }
    }

    /// Groups eigenbasis labels by eigenvalue. Integer spectra are compared
    /// exactly; otherwise values closer than the merge tolerance coincide.
    pub fn eigenspaces(&self) -> Eigenspaces {
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| self.eigenvalues[i].total_cmp(&self.eigenvalues[j]));
        let exact = self.is_integer_valued();
        let scale = self.eigenvalues.iter().fold(1.0f64, |m, g| m.max(g.abs()));
        let tol = EIGENVALUE_MERGE_TOL * scale;

        let mut labels = vec![0usize; n];
        let mut values: Vec<f64> = Vec::new();
        let mut anchor = f64::NAN;
        for &i in &order {
            let g = self.eigenvalues[i];
            let same = !values.is_empty() && if exact { g == anchor } else { g - anchor <= tol };
            if !same {
                values.push(g);
                anchor = g;
            }
            labels[i] = values.len() - 1;
        }
        Eigenspaces { labels, values }
    }

    pub fn summarize(&self) -> EigenvalueSummary {
        let spaces = self.eigenspaces();
        let mut counts = vec![0usize; spaces.count()];
        for &l in &spaces.labels {
            counts[l] += 1;
        }
        let min = spaces.values[0];
        let max = *spaces.values.last().unwrap();
        EigenvalueSummary {
            distinct_count: spaces.count(),
            min,
            max,
            gap: max - min,
            multiplicities: spaces
                .values
                .iter()
                .zip(counts)
                .map(|(&value, count)| Multiplicity { value, count })
                .collect(),
        }
    }

    /// Dense matrix `Σ g |v⟩⟨v|`; intended for small dimensions and tests.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.dim() > MAX_DENSE_DIM {
            return Err(Error::SizeExceeded {
                what: "dense generator matrix",
                requested: self.dim() as u128,
                limit: MAX_DENSE_DIM as u128,
            });
        }
        let v = self.eigenbasis.dense_matrix(self.dim());
        let n = self.dim();
        Ok(ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum()
        }))
    }
}

/// A sum of generators acting on separate tensor factors, kept factored.
#[derive(Debug, Clone)]
pub struct CompositeGenerator {
    parts: Vec<SpectralGenerator>,
}

impl CompositeGenerator {
    pub fn new(parts: Vec<SpectralGenerator>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::BadParameters("composite needs at least one part".into()));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[SpectralGenerator] {
        &self.parts
    }

    pub fn dim(&self) -> u128 {
        self.parts.iter().map(|p| p.dim() as u128).product()
    }

    /// `(min, max)` of the total eigenvalue.
    pub fn extremes(&self) -> (f64, f64) {
        self.parts.iter().fold((0.0, 0.0), |(lo, hi), p| {
            let s = p.summarize();
            (lo + s.min, hi + s.max)
        })
    }

    /// Expands into a single generator with little-endian factor order.
    pub fn expand(&self) -> Result<SpectralGenerator> {
        let dim = self.dim();
        if dim > MAX_DIM as u128 {
            return Err(Error::SizeExceeded {
                what: "composite generator",
                requested: dim,
                limit: MAX_DIM as u128,
            });
        }
        let dim = dim as usize;
        let mut values = vec![0.0; dim];
        let mut stride = 1usize;
        for p in &self.parts {
            let d = p.dim();
            for (idx, v) in values.iter_mut().enumerate() {
                *v += p.eigenvalues[(idx / stride) % d];
            }
            stride *= d;
        }
        let basis = BasisKind::tensor(&self.parts.iter().map(|p| p.basis).collect::<Vec<_>>());
        let eigenbasis = if self.parts.iter().all(|p| p.eigenbasis.is_computational()) {
            Eigenbasis::Computational
        } else {
            if dim > MAX_DENSE_DIM {
                return Err(Error::SizeExceeded {
                    what: "composite with explicit eigenbasis",
                    requested: dim as u128,
                    limit: MAX_DENSE_DIM as u128,
                });
            }
            // little-endian: later factors are more significant
            let mut v = ComplexMatrix::identity(1);
            for p in &self.parts {
                v = p.eigenbasis.dense_matrix(p.dim()).kron(&v);
            }
            Eigenbasis::Explicit(BlockUnitary::dense(v)?)
        };
        let description = self
            .parts
            .iter()
            .map(|p| p.description.as_str())
            .collect::<Vec<_>>()
            .join(" + ");
        SpectralGenerator::new(values, eigenbasis, basis, description)
    }
}

/// Sum of generators on separate tensor factors, expanded.
pub fn composite_sum(parts: &[SpectralGenerator]) -> Result<SpectralGenerator> {
    CompositeGenerator::new(parts.to_vec())?.expand()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn jz_two_qubits() {
        let g = SpectralGenerator::jz(2).unwrap();
        assert_eq!(g.eigenvalues(), &[2.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn jz_distinct_and_gap() {
        assert_eq!(SpectralGenerator::jz(5).unwrap().summarize().distinct_count, 6);
        assert_eq!(SpectralGenerator::jz(3).unwrap().summarize().gap, 6.0);
    }

    #[test]
    fn jz_size_limits() {
        assert!(matches!(SpectralGenerator::jz(21), Err(Error::SizeExceeded { .. })));
        assert!(SpectralGenerator::jz(0).is_err());
    }

    #[test]
    fn jz_pow_examples() {
        let g = SpectralGenerator::jz_pow(2, 2).unwrap();
        assert_eq!(g.eigenvalues(), &[4.0, 0.0, 0.0, 4.0]);
        let distinct: Vec<f64> = g.summarize().multiplicities.iter().map(|m| m.value).collect();
        assert_eq!(distinct, vec![0.0, 4.0]);

        let g = SpectralGenerator::jz_pow(3, 2).unwrap();
        let min_pos = g.summarize().multiplicities.iter().map(|m| m.value).find(|&v| v > 0.0);
        assert_eq!(min_pos, Some(1.0));

        let g = SpectralGenerator::jz_pow(2, 3).unwrap();
        assert_eq!(g.eigenvalues(), &[8.0, 0.0, 0.0, -8.0]);
    }

    #[test]
    fn n_jz_examples() {
        assert_eq!(
            SpectralGenerator::n_jz(2).unwrap().eigenvalues(),
            &[4.0, 0.0, 0.0, -4.0]
        );
        assert_eq!(SpectralGenerator::n_jz(3).unwrap().summarize().gap, 18.0);
        // oracle: distinct 1-bit counts over 4 qubits
        let counts: BTreeSet<u32> = (0u32..16).map(|b| b.count_ones()).collect();
        assert_eq!(
            SpectralGenerator::n_jz(4).unwrap().summarize().distinct_count,
            counts.len()
        );
    }

    #[test]
    fn roy_spectra() {
        let s = SpectralGenerator::roy_h(3).unwrap().summarize();
        assert_eq!(s.distinct_count, 3);
        assert_eq!(
            s.multiplicities,
            vec![
                Multiplicity { value: -4.0, count: 1 },
                Multiplicity { value: 0.0, count: 6 },
                Multiplicity { value: 4.0, count: 1 },
            ]
        );
        let h1 = SpectralGenerator::roy_h(1).unwrap().to_matrix().unwrap();
        let x = ComplexMatrix::from_row_major(2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        assert!(h1.sub(&x).max_abs() < 1e-15);
    }

    #[test]
    fn roy_h_two_qubits_matrix() {
        // 2(|00⟩⟨11| + |11⟩⟨00|)
        let mut expected = ComplexMatrix::zeros(4);
        expected[(0, 3)] = C64::new(2.0, 0.0);
        expected[(3, 0)] = C64::new(2.0, 0.0);
        let h = SpectralGenerator::roy_h(2).unwrap().to_matrix().unwrap();
        assert!(h.sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn roy_a_matches_sigma_plus_product() {
        // H + iA = ⊗ (σx + iσy) = 2^n |0…0⟩⟨1…1|
        for n in 1..=3u32 {
            let h = SpectralGenerator::roy_h(n).unwrap().to_matrix().unwrap();
            let a = SpectralGenerator::roy_a(n).unwrap().to_matrix().unwrap();
            let combo = ComplexMatrix::from_fn(h.dim(), |i, j| h[(i, j)] + C64::new(0.0, 1.0) * a[(i, j)]);
            let mut expected = ComplexMatrix::zeros(h.dim());
            expected[(0, h.dim() - 1)] = C64::new((1u32 << n) as f64, 0.0);
            assert!(combo.sub(&expected).max_abs() < 1e-13, "n = {n}");
            assert!(a.hermitian_deviation() < 1e-14);
        }
    }

    #[test]
    fn number_functions() {
        let g = SpectralGenerator::number_function(4, |k| k as f64, "N").unwrap();
        assert_eq!(g.eigenvalues(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        let g = SpectralGenerator::number_function(3, |k| (k * k) as f64, "N^2").unwrap();
        assert_eq!(g.eigenvalues(), &[0.0, 1.0, 4.0, 9.0]);
        let g = SpectralGenerator::number_function(3, |_| 2.5, "const").unwrap();
        assert_eq!(g.summarize().distinct_count, 1);
    }

    #[test]
    fn composite_of_single_qubits_is_jz() {
        let p = SpectralGenerator::jz(1).unwrap();
        let g = composite_sum(&[p.clone(), p]).unwrap();
        assert_eq!(g.eigenvalues(), &[2.0, 0.0, 0.0, -2.0]);
        assert_eq!(g.basis(), BasisKind::Qubits { n: 2 });
    }

    #[test]
    fn multipass_uniform_over_range() {
        let g = SpectralGenerator::multipass(3).unwrap();
        let mut vals: Vec<i64> = g.eigenvalues().iter().map(|&v| v as i64).collect();
        vals.sort();
        assert_eq!(vals, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn composite_quadratic_parts_brute_force() {
        let a = SpectralGenerator::jz_pow(1, 2).unwrap();
        let b = SpectralGenerator::jz_pow(2, 2).unwrap();
        let g = composite_sum(&[a.clone(), b.clone()]).unwrap();
        let mut brute = BTreeSet::new();
        for &x in a.eigenvalues() {
            for &y in b.eigenvalues() {
                brute.insert((x + y) as i64);
            }
        }
        let got: BTreeSet<i64> = g.summarize().multiplicities.iter().map(|m| m.value as i64).collect();
        assert_eq!(got, brute);
        assert_eq!(got, BTreeSet::from([1, 5]));
    }

    #[test]
    fn composite_explicit_parts_expand_densely() {
        let h = SpectralGenerator::roy_h(1).unwrap();
        let z = SpectralGenerator::jz(1).unwrap();
        let g = composite_sum(&[h.clone(), z.clone()]).unwrap();
        // H ⊗ I + I ⊗ σz with factor 0 least significant: matrix = I⊗H + σz⊗I
        let expected = ComplexMatrix::identity(2)
            .kron(&h.to_matrix().unwrap())
            .add(&z.to_matrix().unwrap().kron(&ComplexMatrix::identity(2)));
        assert!(g.to_matrix().unwrap().sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn composite_refuses_large() {
        let p = SpectralGenerator::jz(11).unwrap();
        assert!(matches!(
            composite_sum(&[p.clone(), p]),
            Err(Error::SizeExceeded { .. })
        ));
    }

    #[test]
    fn eigenspace_merge_tolerance() {
        let g = SpectralGenerator::diagonal(vec![0.5, 0.5 + 1e-12, 1.5], BasisKind::Generic { dim: 3 }, "t").unwrap();
        assert_eq!(g.eigenspaces().count(), 2);
        let g = SpectralGenerator::diagonal(vec![0.0, 1.0, 1.0], BasisKind::Generic { dim: 3 }, "t").unwrap();
        assert_eq!(g.eigenspaces().labels, vec![0, 1, 1]);
    }

    #[test]
    fn explicit_basis_coordinate_round_trip() {
        let g = SpectralGenerator::roy_a(2).unwrap();
        let a: Vec<C64> = (0..4).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let back = g.eigenbasis().from_eigen_coords(&g.eigenbasis().to_eigen_coords(&a));
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).norm() < 1e-14);
        }
        let rho = ComplexMatrix::outer(&a);
        let m = g.eigenbasis().to_eigen_coords_matrix(&rho);
        let back = g.eigenbasis().from_eigen_coords_matrix(&m);
        assert!(back.sub(&rho).max_abs() < 1e-13);
        // V†ρV element check against the dense route
        let v = g.eigenbasis().dense_matrix(4);
        let dense = v.adjoint().matmul(&rho).matmul(&v);
        assert!(dense.sub(&m).max_abs() < 1e-13);
    }
}
