//! Dephasing, entropies and the G-asymmetry of a probe state.
//!
//! All quantities are in nats. Functions accept either representation of a
//! probe through [`Probe`]; pure states never build a density matrix.

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, xlogx, ComplexMatrix, ZERO};
use crate::spectra::SpectralGenerator;
use crate::states::{DensityOperator, Probe};

/// Eigenvalues of a density operator in `[-1e-10, 0)` are round-off.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;
/// `S(ρ)` below this counts as a pure state.
pub const PURITY_TOL: f64 = 1e-10;
/// Eigenvalues of the second argument of a relative entropy below this are
/// treated as outside its support.
pub const SUPPORT_TOL: f64 = 1e-12;
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-9;

fn check_dims(probe_basis: crate::spectra::BasisKind, g: &SpectralGenerator) -> Result<()> {
    probe_basis.check_compatible(&g.basis())
}

/// `⟨v_i|ρ|v_i⟩` for every eigenbasis label `i` of `g`.
pub fn label_probabilities(probe: &Probe, g: &SpectralGenerator) -> Result<Vec<f64>> {
    check_dims(probe.basis(), g)?;
    Ok(match probe {
        Probe::Pure(s) => g
            .eigenbasis()
            .to_eigen_coords(s.amplitudes())
            .iter()
            .map(|a| a.norm_sqr())
            .collect(),
        Probe::Mixed(r) => {
            let m = g.eigenbasis().to_eigen_coords_matrix(r.matrix());
            (0..m.dim()).map(|i| m[(i, i)].re).collect()
        }
    })
}

/// Probability of each distinct eigenvalue (ascending), `p_g = tr[ρ Π_g]`.
pub fn eigenvalue_distribution(probe: &Probe, g: &SpectralGenerator) -> Result<Vec<(f64, f64)>> {
    let probs = label_probabilities(probe, g)?;
    let spaces = g.eigenspaces();
    let mut p = vec![0.0; spaces.count()];
    for (label, &space) in spaces.labels.iter().enumerate() {
        p[space] += probs[label];
    }
    Ok(spaces.values.into_iter().zip(p).collect())
}

/// Block-diagonal part `Σ_g Π_g ρ Π_g`, returned in the original basis.
pub fn dephase(rho: &DensityOperator, g: &SpectralGenerator) -> Result<DensityOperator> {
    check_dims(rho.basis(), g)?;
    let basis = g.eigenbasis();
    let mut m = basis.to_eigen_coords_matrix(rho.matrix());
    let labels = g.eigenspaces().labels;
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] {
                m[(i, j)] = ZERO;
            }
        }
    }
    DensityOperator::new(basis.from_eigen_coords_matrix(&m), rho.basis())
}

/// Spectrum of a (possibly unnormalised) positive block, clamped at the
/// round-off floor.
fn positive_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut values = hermitian_eigenvalues(m)?;
    for v in values.iter_mut() {
        if *v < -NEGATIVE_EIGENVALUE_TOL {
            return Err(Error::NegativeEigenvalue { value: *v });
        }
        *v = v.max(0.0);
    }
    Ok(values)
}

/// `S(ρ) = -tr ρ ln ρ`.
pub fn vn_entropy(rho: &DensityOperator) -> Result<f64> {
    let s = -positive_spectrum(rho.matrix())?.into_iter().map(xlogx).sum::<f64>();
    Ok(s.max(0.0))
}

pub fn probe_entropy(probe: &Probe) -> Result<f64> {
    match probe {
        Probe::Pure(_) => Ok(0.0),
        Probe::Mixed(r) => vn_entropy(r),
    }
}

/// Shannon entropy of the eigenvalue distribution of `g` in `probe`.
pub fn generator_entropy(probe: &Probe, g: &SpectralGenerator) -> Result<f64> {
    let p: Vec<f64> = eigenvalue_distribution(probe, g)?.into_iter().map(|(_, p)| p).collect();
    crate::numerics::shannon_entropy(&p)
}

/// `A_G(ρ) = S(U_G(ρ)) - S(ρ)`, clamped at zero.
pub fn g_asymmetry(probe: &Probe, g: &SpectralGenerator) -> Result<f64> {
    let rho = match probe {
        Probe::Pure(_) => return generator_entropy(probe, g),
        Probe::Mixed(r) => r,
    };
    check_dims(rho.basis(), g)?;
    let s_rho = vn_entropy(rho)?;
    let spaces = g.eigenspaces();
    if s_rho < PURITY_TOL || spaces.count() == g.dim() {
        return Ok((generator_entropy(probe, g)? - s_rho).max(0.0));
    }
    Ok((dephased_entropy(rho, g)? - s_rho).max(0.0))
}

/// `S(U_G(ρ))` from the spectra of the individual eigenspace blocks.
pub fn dephased_entropy(rho: &DensityOperator, g: &SpectralGenerator) -> Result<f64> {
    check_dims(rho.basis(), g)?;
    let m = g.eigenbasis().to_eigen_coords_matrix(rho.matrix());
    let spaces = g.eigenspaces();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); spaces.count()];
    for (label, &space) in spaces.labels.iter().enumerate() {
        members[space].push(label);
    }
    let mut s = 0.0;
    for idx in members {
        if idx.len() == 1 {
            let p = m[(idx[0], idx[0])].re;
            if p < -NEGATIVE_EIGENVALUE_TOL {
                return Err(Error::NegativeEigenvalue { value: p });
            }
            s -= xlogx(p.max(0.0));
            continue;
        }
        let block = ComplexMatrix::from_fn(idx.len(), |i, j| m[(idx[i], idx[j])]);
        s -= positive_spectrum(&block)?.into_iter().map(xlogx).sum::<f64>();
    }
    Ok(s.max(0.0))
}

/// `D(σ‖τ) = tr σ (ln σ - ln τ)`.
pub fn relative_entropy(sigma: &DensityOperator, tau: &DensityOperator) -> Result<f64> {
    sigma.basis().check_compatible(&tau.basis())?;
    let s_sigma = vn_entropy(sigma)?;
    let tau_eig = crate::numerics::hermitian_eig(tau.matrix())?;
    let mut cross = 0.0;
    for (k, &mu) in tau_eig.values.iter().enumerate() {
        let w = tau_eig.vector(k);
        let sw = sigma.matrix().mul_vec(&w);
        let weight: f64 = w.iter().zip(&sw).map(|(a, b)| (a.conj() * b).re).sum();
        if mu <= SUPPORT_TOL {
            if weight > SUPPORT_WEIGHT_TOL {
                return Err(Error::SupportViolation);
            }
            continue;
        }
        cross += weight * mu.ln();
    }
    Ok((-s_sigma - cross).max(0.0))
}

/// Root-mean-square deviation `ΔG`.
pub fn generator_variance(probe: &Probe, g: &SpectralGenerator) -> Result<f64> {
    let p = label_probabilities(probe, g)?;
    let total: f64 = p.iter().sum();
    let mean = p.iter().zip(g.eigenvalues()).map(|(p, g)| p * g).sum::<f64>() / total;
    let var = p
        .iter()
        .zip(g.eigenvalues())
        .map(|(p, g)| p * (g - mean) * (g - mean))
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C64;
    use crate::spectra::BasisKind;
    use crate::states::{ghz, mix, plus_product, PureState};

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn ghz_dephased_is_diagonal() {
        let rho = ghz(2).unwrap().projector().unwrap();
        let out = dephase(&rho, &SpectralGenerator::jz(2).unwrap()).unwrap();
        let expected = ComplexMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.matrix().sub(&expected).max_abs() < 1e-15);
        // idempotent
        let again = dephase(&out, &SpectralGenerator::jz(2).unwrap()).unwrap();
        assert!(again.matrix().sub(out.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn entropy_values() {
        let q = BasisKind::Qubits { n: 1 };
        let pure = ghz(3).unwrap().projector().unwrap();
        assert!(vn_entropy(&pure).unwrap() < 1e-12);
        let mm = DensityOperator::maximally_mixed(BasisKind::Qubits { n: 3 }).unwrap();
        assert!((vn_entropy(&mm).unwrap() - 8f64.ln()).abs() < 1e-12);
        let r = DensityOperator::new(ComplexMatrix::diagonal(&[0.75, 0.25]), q).unwrap();
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((vn_entropy(&r).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let q = BasisKind::Qubits { n: 1 };
        let r = DensityOperator::new(ComplexMatrix::diagonal(&[1.1, -0.1]), q).unwrap();
        assert!(matches!(vn_entropy(&r), Err(Error::NegativeEigenvalue { .. })));
    }

    #[test]
    fn generator_entropy_cases() {
        let g = SpectralGenerator::jz(4).unwrap();
        assert!((generator_entropy(&ghz(4).unwrap().into(), &g).unwrap() - LN2).abs() < 1e-14);
        let eig = PureState::basis_state(3, BasisKind::Qubits { n: 4 }).unwrap();
        assert_eq!(generator_entropy(&eig.into(), &g).unwrap(), 0.0);
        let h = generator_entropy(
            &plus_product(5).unwrap().into(),
            &SpectralGenerator::multipass(5).unwrap(),
        )
        .unwrap();
        assert!((h - 5.0 * LN2).abs() < 1e-12);
    }

    #[test]
    fn asymmetry_cases() {
        for n in 2..=6 {
            let g = SpectralGenerator::jz(n).unwrap();
            let a = g_asymmetry(&ghz(n).unwrap().into(), &g).unwrap();
            assert!((a - LN2).abs() < 1e-12);
            // same through the mixed-state path
            let a = g_asymmetry(&ghz(n).unwrap().projector().unwrap().into(), &g).unwrap();
            assert!((a - LN2).abs() < 1e-10);
            // both GHZ branches share the same J_z² eigenvalue
            let g2 = SpectralGenerator::jz_pow(n, 2).unwrap();
            assert!(g_asymmetry(&ghz(n).unwrap().into(), &g2).unwrap().abs() < 1e-12);
            let a = g_asymmetry(&ghz(n).unwrap().projector().unwrap().into(), &g2).unwrap();
            assert!(a.abs() < 1e-10);
        }
        let mm = DensityOperator::maximally_mixed(BasisKind::Qubits { n: 3 }).unwrap();
        assert!(g_asymmetry(&mm.into(), &SpectralGenerator::roy_h(3).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let err = g_asymmetry(&ghz(3).unwrap().into(), &SpectralGenerator::jz(4).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn relative_entropy_cases() {
        let q = BasisKind::Qubits { n: 1 };
        let s = DensityOperator::new(ComplexMatrix::diagonal(&[1.0, 0.0]), q).unwrap();
        let t = DensityOperator::new(ComplexMatrix::diagonal(&[0.5, 0.5]), q).unwrap();
        assert!(relative_entropy(&s, &s).unwrap().abs() < 1e-12);
        assert!((relative_entropy(&s, &t).unwrap() - LN2).abs() < 1e-14);
        assert_eq!(relative_entropy(&t, &s), Err(Error::SupportViolation));
    }

    #[test]
    fn asymmetry_is_relative_entropy_to_dephased() {
        let q = BasisKind::Qubits { n: 2 };
        let a = PureState::normalized(
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.5, 0.3),
                C64::new(0.0, -0.7),
                C64::new(0.2, 0.0),
            ],
            q,
        )
        .unwrap();
        let b = ghz(2).unwrap();
        let rho = mix(&[(0.6, a), (0.4, b)]).unwrap();
        let g = SpectralGenerator::jz(2).unwrap();
        let lhs = g_asymmetry(&rho.clone().into(), &g).unwrap();
        let rhs = relative_entropy(&rho, &dephase(&rho, &g).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn variance_cases() {
        for n in 1..=6 {
            let v = generator_variance(&ghz(n).unwrap().into(), &SpectralGenerator::jz(n).unwrap()).unwrap();
            assert!((v - n as f64).abs() < 1e-12);
        }
        let eig = PureState::basis_state(1, BasisKind::Qubits { n: 2 }).unwrap();
        assert_eq!(
            generator_variance(&eig.into(), &SpectralGenerator::jz(2).unwrap()).unwrap(),
            0.0
        );
    }

    /// `(1/2π)∫ e^{-iGθ} ρ e^{iGθ} dθ` by the trapezoid rule, which is exact
    /// for integer spectra narrower than the number of intervals.
    fn twirl(rho: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
        let eig = crate::numerics::hermitian_eig(g).unwrap();
        let n = rho.dim();
        let steps = 4096;
        let mut acc = ComplexMatrix::zeros(n);
        for s in 0..steps {
            let theta = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
            let u = ComplexMatrix::from_fn(n, |i, j| {
                (0..n)
                    .map(|k| {
                        eig.vectors[(i, k)] * C64::from_polar(1.0, -eig.values[k] * theta) * eig.vectors[(j, k)].conj()
                    })
                    .sum()
            });
            acc = acc.add(&u.matmul(rho).matmul(&u.adjoint()));
        }
        acc.scale(1.0 / steps as f64)
    }

    #[test]
    fn dephasing_matches_twirl() {
        let q = BasisKind::Qubits { n: 2 };
        let a = PureState::normalized(
            vec![
                C64::new(0.3, 0.1),
                C64::new(0.5, 0.3),
                C64::new(0.1, -0.7),
                C64::new(0.2, 0.4),
            ],
            q,
        )
        .unwrap();
        let rho = mix(&[(0.7, a), (0.3, ghz(2).unwrap())]).unwrap();
        for g in [
            SpectralGenerator::jz(2).unwrap(),
            SpectralGenerator::roy_h(2).unwrap(),
            SpectralGenerator::roy_a(2).unwrap(),
        ] {
            let expected = twirl(rho.matrix(), &g.to_matrix().unwrap());
            let got = dephase(&rho, &g).unwrap();
            assert!(got.matrix().sub(&expected).max_abs() < 1e-10, "{}", g.description());
        }
    }
}
