#![allow(dead_code)]

use num_complex::Complex64 as C64;
use phasebound::numerics::{hermitian_eig, ComplexMatrix};
use phasebound::spectra::{BasisKind, SpectralGenerator};
use phasebound::states::{mix, DensityOperator, Probe, PureState};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_pure<R: Rng>(rng: &mut R, basis: BasisKind) -> PureState {
    let dim = basis.dim();
    // sometimes restrict to a few labels so degenerate blocks are exercised
    let support = if rng.random_bool(0.3) {
        rng.random_range(1..=dim.min(4))
    } else {
        dim
    };
    let mut a = vec![C64::new(0.0, 0.0); dim];
    for _ in 0..support {
        let i = rng.random_range(0..dim);
        a[i] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    if a.iter().all(|z| z.norm() == 0.0) {
        a[0] = C64::new(1.0, 0.0);
    }
    PureState::normalized(a, basis).unwrap()
}

pub fn random_mixed<R: Rng>(rng: &mut R, basis: BasisKind) -> DensityOperator {
    let rank = rng.random_range(2..=4);
    let ensemble: Vec<(f64, PureState)> = (0..rank)
        .map(|_| (rng.random_range(0.05..1.0), random_pure(rng, basis)))
        .collect();
    let total: f64 = ensemble.iter().map(|e| e.0).sum();
    let ensemble: Vec<_> = ensemble.into_iter().map(|(w, s)| (w / total, s)).collect();
    mix(&ensemble).unwrap()
}

pub fn random_probe<R: Rng>(rng: &mut R, basis: BasisKind) -> Probe {
    if rng.random_bool(0.5) {
        Probe::Pure(random_pure(rng, basis))
    } else {
        Probe::Mixed(random_mixed(rng, basis))
    }
}

/// Generators on qubits (`n ≤ max_qubits`) or a number basis (`cutoff < 2^max_qubits`).
pub fn random_generator<R: Rng>(rng: &mut R, max_qubits: u32) -> SpectralGenerator {
    let n = rng.random_range(1..=max_qubits);
    match rng.random_range(0..6) {
        0 => SpectralGenerator::jz(n).unwrap(),
        1 => SpectralGenerator::jz_pow(n, rng.random_range(2..=3)).unwrap(),
        2 => SpectralGenerator::n_jz(n).unwrap(),
        3 => SpectralGenerator::roy_h(n.max(2)).unwrap(),
        4 => SpectralGenerator::roy_a(n.max(2)).unwrap(),
        _ => {
            let cutoff = rng.random_range(1..(1usize << max_qubits));
            let q = rng.random_range(1..=2);
            let modulus = rng.random_range(2..=5u64);
            if rng.random_bool(0.5) {
                SpectralGenerator::number_function(cutoff, |k| (k as f64).powi(q), "N^q").unwrap()
            } else {
                SpectralGenerator::number_function(cutoff, move |k| (k % modulus) as f64, "N mod m").unwrap()
            }
        }
    }
}

/// `(1/w)∫_0^w e^{-iGθ} ρ e^{iGθ} dθ` with `w = 64π`, trapezoid on 2^12 points.
/// Exact when every eigenvalue difference is an integer below 128.
pub fn twirl_oracle(rho: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eig(g).unwrap();
    let n = rho.dim();
    let steps = 1 << 12;
    let w = 64.0 * std::f64::consts::PI;
    // rotate into the eigenbasis once; the phase factors are then diagonal
    let v = ComplexMatrix::from_fn(n, |i, k| eig.vectors[(i, k)]);
    let r = v.adjoint().matmul(rho).matmul(&v);
    let mut acc = ComplexMatrix::zeros(n);
    for s in 0..steps {
        let theta = w * s as f64 / steps as f64;
        let term = ComplexMatrix::from_fn(n, |i, j| {
            r[(i, j)] * C64::from_polar(1.0, -(eig.values[i] - eig.values[j]) * theta)
        });
        acc = acc.add(&term);
    }
    v.matmul(&acc.scale(1.0 / steps as f64)).matmul(&v.adjoint())
}

pub fn spread(g: &SpectralGenerator) -> f64 {
    let s = g.summarize();
    s.max - s.min
}
