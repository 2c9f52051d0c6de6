mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phasebound::asymmetry::{dephase, g_asymmetry, generator_entropy, generator_variance, probe_entropy, vn_entropy};
use phasebound::bounds::{self, BoundPreset, PriorDistribution};
use phasebound::estimator::stats::wrap_pi;
use phasebound::numerics::{hermitian_eig, shannon_entropy, ComplexMatrix};
use phasebound::output::round_sig;
use phasebound::spectra::{composite_sum, SpectralGenerator};
use phasebound::states::{tensor, DensityOperator, Probe, PureState};

const TOL: f64 = 1e-8;

fn hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<C64> = (0..dim * dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let a = ComplexMatrix::from_row_major(dim, raw).unwrap();
    a.add(&a.adjoint()).scale(0.5)
}

fn check_eig(a: &ComplexMatrix) {
    let e = hermitian_eig(a).unwrap();
    let scale = a.max_abs();
    assert!(e.reconstruct().sub(a).max_abs() <= 1e-9 * scale);
    for w in e.values.windows(2) {
        assert!(w[0] <= w[1]);
    }
    let gram = e.vectors.adjoint().matmul(&e.vectors);
    assert!(gram.sub(&ComplexMatrix::identity(a.dim())).max_abs() <= 1e-10);
    let norm = a.frobenius_norm();
    for (i, &l) in e.values.iter().enumerate() {
        let v = e.vector(i);
        let av = a.mul_vec(&v);
        let r: f64 = av
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - y * l).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(r <= 1e-9 * norm, "residual {r}");
    }
}

#[test]
fn eigensolver_at_dimension_256() {
    check_eig(&hermitian(256, 11));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigensolver_reconstructs(dim in 1usize..48, seed in any::<u64>()) {
        check_eig(&hermitian(dim, seed));
    }

    #[test]
    fn entropy_is_concave(
        p in prop::collection::vec(0.0f64..1.0, 2..12),
        q_seed in any::<u64>(),
        lambda in 0.0f64..=1.0,
    ) {
        use rand::Rng;
        prop_assume!(p.iter().sum::<f64>() > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(q_seed);
        let norm = |v: Vec<f64>| { let s: f64 = v.iter().sum(); v.into_iter().map(|x| x / s).collect::<Vec<_>>() };
        let p = norm(p);
        let q = norm((0..p.len()).map(|_| rng.random_range(0.01..1.0)).collect());
        let m: Vec<f64> = p.iter().zip(&q).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let lhs = shannon_entropy(&m).unwrap();
        let rhs = lambda * shannon_entropy(&p).unwrap() + (1.0 - lambda) * shannon_entropy(&q).unwrap();
        prop_assert!(lhs >= rhs - 1e-12);
    }

    #[test]
    fn powers_of_jz(n in 1u32..=10, q in 1u32..=4) {
        let base = SpectralGenerator::jz(n).unwrap();
        let pow = SpectralGenerator::jz_pow(n, q).unwrap();
        for (a, b) in base.eigenvalues().iter().zip(pow.eigenvalues()) {
            prop_assert_eq!(a.powi(q as i32), *b);
        }
        prop_assert_eq!(base.summarize().distinct_count, n as usize + 1);
    }

    #[test]
    fn roy_generators_have_three_levels(n in 2u32..=12) {
        for g in [SpectralGenerator::roy_h(n).unwrap(), SpectralGenerator::roy_a(n).unwrap()] {
            let s = g.summarize();
            prop_assert_eq!(s.distinct_count, 3);
            prop_assert_eq!(s.max, 2f64.powi(n as i32 - 1));
            prop_assert_eq!(s.min, -s.max);
        }
    }

    #[test]
    fn composite_extremes_add(ns in prop::collection::vec(1u32..=3, 1..4), q in 1u32..=3) {
        let parts: Vec<_> = ns.iter().map(|&n| SpectralGenerator::jz_pow(n, q).unwrap()).collect();
        let sum = composite_sum(&parts).unwrap();
        let s = sum.summarize();
        let lo: f64 = parts.iter().map(|p| p.summarize().min).sum();
        let hi: f64 = parts.iter().map(|p| p.summarize().max).sum();
        prop_assert_eq!((s.min, s.max), (lo, hi));
        prop_assert!(s.distinct_count <= sum.dim());
    }

    #[test]
    fn tensor_is_associative(seed in any::<u64>(), n1 in 1u32..=2, n2 in 1u32..=2, n3 in 1u32..=2) {
        use phasebound::spectra::BasisKind;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_pure(&mut rng, BasisKind::Qubits { n: n1 });
        let b = common::random_pure(&mut rng, BasisKind::Qubits { n: n2 });
        let c = common::random_pure(&mut rng, BasisKind::Qubits { n: n3 });
        let left = tensor(&[tensor(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = tensor(&[a.clone(), tensor(&[b.clone(), c.clone()]).unwrap()]).unwrap();
        let flat = tensor(&[a.clone(), b.clone(), c.clone()]).unwrap();
        for ((x, y), z) in left.amplitudes().iter().zip(right.amplitudes()).zip(flat.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12 && (x - z).norm() < 1e-12);
        }
        // factor 0 is the least significant digit
        let d1 = 1usize << n1;
        let d2 = 1usize << n2;
        let (i, j, k) = (d1 - 1, 0, (1usize << n3) - 1);
        let idx = i + d1 * (j + d2 * k);
        let expect = a.amplitudes()[i] * b.amplitudes()[j] * c.amplitudes()[k];
        prop_assert!((flat.amplitudes()[idx] - expect).norm() < 1e-12);
        let norm: f64 = flat.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn asymmetry_inequalities(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_generator(&mut rng, 4);
        let probe = common::random_probe(&mut rng, g.basis());
        let a = g_asymmetry(&probe, &g).unwrap();
        let h = generator_entropy(&probe, &g).unwrap();
        let s = probe_entropy(&probe).unwrap();
        prop_assert!(a >= -TOL && a <= h + TOL);
        if matches!(probe, Probe::Pure(_)) {
            prop_assert!((a - h).abs() <= TOL);
        }
        if g.summarize().distinct_count == g.dim() {
            prop_assert!((a - (h - s)).abs() <= TOL);
        }
        let squared = g.map_eigenvalues(|x| x * x, "G^2").unwrap();
        let absolute = g.map_eigenvalues(f64::abs, "|G|").unwrap();
        let constant = g.map_eigenvalues(|_| 3.0, "3").unwrap();
        let affine = g.map_eigenvalues(|x| 2.0 * x - 5.0, "2G-5").unwrap();
        for f in [&squared, &absolute, &constant] {
            prop_assert!(g_asymmetry(&probe, f).unwrap() <= a + TOL);
        }
        prop_assert!(g_asymmetry(&probe, &constant).unwrap().abs() <= TOL);
        prop_assert!((g_asymmetry(&probe, &affine).unwrap() - a).abs() <= TOL);

        let dg = generator_variance(&probe, &g).unwrap();
        prop_assert!((-a).exp() + TOL >= (-h).exp());
        prop_assert!((-h).exp() + TOL >= bounds::variance_entropy_floor(dg));
    }

    #[test]
    fn asymmetry_is_convex(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_generator(&mut rng, 4);
        let r1 = common::random_probe(&mut rng, g.basis()).to_density().unwrap();
        let r2 = common::random_probe(&mut rng, g.basis()).to_density().unwrap();
        let m = r1.convex(&r2, lambda).unwrap();
        let am = g_asymmetry(&Probe::Mixed(m), &g).unwrap();
        let a1 = g_asymmetry(&Probe::Mixed(r1), &g).unwrap();
        let a2 = g_asymmetry(&Probe::Mixed(r2), &g).unwrap();
        prop_assert!(am <= lambda * a1 + (1.0 - lambda) * a2 + TOL);
    }

    #[test]
    fn dephasing_properties(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_generator(&mut rng, 4);
        let rho = common::random_mixed(&mut rng, g.basis());
        let d = dephase(&rho, &g).unwrap();
        prop_assert!(dephase(&d, &g).unwrap().matrix().sub(d.matrix()).max_abs() <= TOL);
        prop_assert!((d.matrix().trace().re - 1.0).abs() <= 1e-9);
        prop_assert!(d.matrix().hermitian_deviation() <= 1e-12);
        prop_assert!(vn_entropy(&d).unwrap() >= vn_entropy(&rho).unwrap() - TOL);
        let id = DensityOperator::maximally_mixed(g.basis()).unwrap();
        prop_assert!(dephase(&id, &g).unwrap().matrix().sub(id.matrix()).max_abs() <= TOL);
    }

    #[test]
    fn stronger_information_gives_larger_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_generator(&mut rng, 3);
        let probe = common::random_probe(&mut rng, g.basis());
        let a = g_asymmetry(&probe, &g).unwrap();
        let h = generator_entropy(&probe, &g).unwrap();
        let prior = PriorDistribution::Uniform2Pi;
        let from_a = bounds::error_lower_bound(a, &prior);
        let from_h = bounds::error_lower_bound(h, &prior);
        prop_assert!(from_a >= from_h * (1.0 - 1e-12));
        let dg = generator_variance(&probe, &g).unwrap();
        let floor = bounds::inv_sqrt_2pi_e() * std::f64::consts::TAU * bounds::variance_entropy_floor(dg);
        prop_assert!(from_a >= floor * (1.0 - 1e-9));
    }

    #[test]
    fn qubit_universal_is_the_n_ln2_bound(n in 1u64..200) {
        let prior = PriorDistribution::Uniform2Pi;
        let r = bounds::scheme_bound(&BoundPreset::QubitUniversal { qubits: n }, &prior).unwrap();
        prop_assert_eq!(r.error_lower, bounds::error_lower_bound(n as f64 * std::f64::consts::LN_2, &prior));
        if let Some(i) = r.mi_upper_asymmetry {
            prop_assert!(i <= r.mi_upper_entropy + 1e-9);
        }
        prop_assert!(r.error_lower > 0.0);
    }

    #[test]
    fn wrapped_error_is_principal_argument(x in -100.0f64..100.0) {
        let w = wrap_pi(x);
        let z = C64::from_polar(1.0, x);
        prop_assert!((w - z.arg()).abs() < 1e-9 || (w.abs() - std::f64::consts::PI).abs() < 1e-9);
        prop_assert!(w > -std::f64::consts::PI - 1e-12 && w <= std::f64::consts::PI + 1e-12);
    }

    #[test]
    fn rounding_is_stable(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let r = round_sig(x);
        prop_assert_eq!(round_sig(r), r);
        let text = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<f64>(&text).unwrap(), r);
        if x != 0.0 {
            prop_assert!(((r - x) / x).abs() <= 5e-9);
        }
    }

    #[test]
    fn constructors_are_normalized(seed in any::<u64>(), n in 1u32..=6) {
        use phasebound::spectra::BasisKind;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: PureState = common::random_pure(&mut rng, BasisKind::Qubits { n });
        let norm: f64 = s.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-10);
        let rho = common::random_mixed(&mut rng, BasisKind::Qubits { n });
        prop_assert!(rho.matrix().hermitian_deviation() <= 1e-12);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-9);
        let ev = hermitian_eig(rho.matrix()).unwrap().values;
        prop_assert!(ev.iter().all(|&l| l >= -1e-10));
    }
}
