//! Dense complex linear algebra and scalar helpers.
//!
//! Everything here works on small-to-medium dense matrices (a few thousand
//! rows at most). The eigensolver is a cyclic complex Jacobi method, which is
//! slow compared with Householder tridiagonalisation but gives eigenvectors
//! that are orthonormal to working precision without any re-orthogonalisation.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Relative tolerance on `max|A - A†|` accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius norm, relative to `‖A‖_F`, at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_row_major(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidValue("non-finite matrix entry".into()));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Kronecker product with `self` as the *more* significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |i, j| self[(i / b, j / b)] * other[(i % b, j % b)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |A†A - I|`, zero for a unitary matrix.
    pub fn unitarity_deviation(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        g.sub(&Self::identity(self.dim)).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let (values, vectors) = jacobi(a, true)?;
    Ok(EigenDecomposition {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only (ascending); skips accumulating the rotations.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(a, false)?.0)
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if a.dim() == 0 {
        return Err(Error::BadParameters("empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidValue("non-finite matrix entry".into()));
    }
    let dev = a.hermitian_deviation();
    let allowed = HERMITIAN_TOL * a.max_abs();
    if dev > allowed {
        return Err(Error::NotHermitian {
            asymmetry: dev,
            allowed,
        });
    }
    Ok(())
}

fn jacobi(input: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    check_hermitian(input)?;
    let n = input.dim();
    // symmetrise so round-off in the input cannot accumulate
    let mut a = ComplexMatrix::from_fn(n, |i, j| (input[(i, j)] + input[(j, i)].conj()) * 0.5);
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));

    let scale = a.frobenius_norm();
    let threshold = JACOBI_TOL * scale;
    let skip_below = 1e-18 * scale;

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if off_norm(&a) <= threshold {
            converged = true;
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= skip_below {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase_conj = (apq / mag).conj();
                // U = diag(1, e^{-iα}) · [[c, s], [-s, c]] acting on (p, q)
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = phase_conj * (-s);
                let uqq = phase_conj * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * upp + vkq * uqp;
                        v[(k, q)] = vkp * upq + vkq * uqq;
                    }
                }
            }
        }
    }
    debug_assert!(converged);

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]));
    Ok((values, vectors))
}

/// `x ln x` with the convention `0 ln 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Tolerances for [`shannon_entropy`].
pub const PROB_NEGATIVE_TOL: f64 = 1e-12;
pub const PROB_SUM_TOL: f64 = 1e-9;

/// Shannon entropy in nats. Entries in `[-1e-12, 0)` are treated as zero.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &x in p {
        if !x.is_finite() || x < -PROB_NEGATIVE_TOL {
            return Err(Error::NotNormalized {
                what: "probability vector",
                total: x,
            });
        }
        total += x.max(0.0);
    }
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::NotNormalized {
            what: "probability vector",
            total,
        });
    }
    let h = -p.iter().map(|&x| xlogx(x)).sum::<f64>();
    Ok(h.max(0.0))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
