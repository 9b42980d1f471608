use std::collections::BTreeSet;

use holo_lwe_core::ads_geometry::{
    entropy_gap_to_length_gap, geometry_from_qubits, rt_entropy, rt_geodesic_length, AdsGeometry,
};
use holo_lwe_core::cost_models::holographic_cost;
use holo_lwe_core::gaussian_bulk::{
    build_chain_ground_covariance, bulk_entanglement_entropy, restrict_covariance, symplectic_form,
    symplectic_spectrum, truncated_entropy, CovarianceMatrix,
};
use holo_lwe_core::lwe_etcf::{sample_instance, DiscreteGaussian, LweParams, Mode};
use holo_lwe_core::probe_measurement::{
    holographic_distinguisher, predicted_sample_complexity, regime_report, two_point_expectation, ProbeConfig,
};
use holo_lwe_core::seed::rng_from_seed;
use holo_lwe_core::state_entropy::{entropy_gap, reduce_density_matrix, von_neumann_entropy, PureState, Register};
use holo_lwe_core::LogBase;
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

fn pure_state() -> impl Strategy<Value = PureState> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(di, dout)| {
        prop::collection::vec((0..di, 0..dout, -1.0f64..1.0, -1.0f64..1.0), 1..=12).prop_filter_map(
            "non-zero state",
            move |raw| {
                let entries = raw.into_iter().map(|(i, o, re, im)| (i, o, Complex::new(re, im))).collect();
                PureState::normalized(di, dout, entries).ok()
            },
        )
    })
}

fn noiseless_case() -> impl Strategy<Value = (u64, usize, u32, u64)> {
    (prop::sample::select(vec![2u64, 3, 5]), 1usize..=3, 1u32..=2, any::<u64>())
        .prop_filter("desk-scale domain", |&(q, n, k, _)| (1u64 << k) * q.pow(n as u32) <= 500)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schmidt_symmetry(state in pure_state()) {
        let a = von_neumann_entropy(&reduce_density_matrix(&state, Register::InputRegister).unwrap(), LogBase::Bits).unwrap();
        let b = von_neumann_entropy(&reduce_density_matrix(&state, Register::OutputRegister).unwrap(), LogBase::Bits).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn entropy_bounds_and_relabeling(state in pure_state(), seed in any::<u64>()) {
        let rho = reduce_density_matrix(&state, Register::InputRegister).unwrap();
        let d = rho.dim();
        let s = von_neumann_entropy(&rho, LogBase::Bits).unwrap();
        prop_assert!(s >= 0.0 && s <= (d as f64).log2() + 1e-12);
        let mut perm: Vec<usize> = (0..d).collect();
        use rand::seq::SliceRandom;
        perm.shuffle(&mut rng_from_seed(seed));
        let sp = von_neumann_entropy(&rho.permuted(&perm).unwrap(), LogBase::Bits).unwrap();
        prop_assert!((s - sp).abs() < 1e-9);
    }

    #[test]
    fn noiseless_gap_is_k_bits((q, n, k, seed) in noiseless_case()) {
        let params = LweParams::noiseless(n, n + k as usize + 1, q, k);
        let f = sample_instance(&params, Mode::Injective, seed).unwrap();
        let g = sample_instance(&params, Mode::Degenerate, seed ^ 0x5eed).unwrap();
        prop_assert!((entropy_gap(&f, &g).unwrap() - k as f64).abs() < 1e-9);
    }

    #[test]
    fn census_and_collisions((q, n, k, seed) in noiseless_case()) {
        let params = LweParams::noiseless(n, n + k as usize + 1, q, k);
        let g = sample_instance(&params, Mode::Degenerate, seed).unwrap();
        prop_assert_eq!(g.preimage_census().unwrap().total() as u128, params.domain_size());
        prop_assert!(g.preimage_census().unwrap().counts.values().all(|&c| c == 1 << k));
        let f = sample_instance(&params, Mode::Injective, seed).unwrap();
        prop_assert!(f.preimage_census().unwrap().counts.values().all(|&c| c == 1));
        if k == 1 {
            let s = &g.secrets()[0];
            for idx in 0..g.domain_len() {
                let (b, x) = g.split_index(idx);
                let shifted: Vec<u64> = x.iter().zip(s).map(|(xi, si)| {
                    if b == 1 { (xi + si) % q } else { (xi + q - si) % q }
                }).collect();
                prop_assert_eq!(g.eval(b, &x).unwrap(), g.eval(1 - b, &shifted).unwrap());
            }
        }
    }

    #[test]
    fn rt_identity(r in 0.1f64..10.0, gn in 1e-3f64..2.0, eps in 1e-4f64..1e-1, ratio in 1.0f64..1e6) {
        let geom = AdsGeometry::new(r, gn, eps, 8).unwrap();
        let ell = eps * ratio;
        let s = rt_entropy(&geom, rt_geodesic_length(&geom, ell).unwrap(), LogBase::Nats).unwrap();
        let cft = geom.central_charge() / 3.0 * (ell / eps).ln();
        prop_assert!((s - cft).abs() <= 1e-12 * cft.abs().max(1e-300));
        let ds = ratio.ln();
        let back = rt_entropy(&geom, entropy_gap_to_length_gap(&geom, ds).unwrap(), LogBase::Bits).unwrap();
        prop_assert!((back - ds).abs() <= 1e-12 * ds.max(1.0));
    }

    #[test]
    fn two_point_is_monotone(m in 0.01f64..10.0, l1 in 0.0f64..5.0, dl in 1e-3f64..5.0) {
        let a = two_point_expectation(m, l1).unwrap().value;
        let b = two_point_expectation(m, l1 + dl).unwrap().value;
        prop_assert!(a > b);
    }

    #[test]
    fn predictor_exponential_law(m in 0.5f64..6.0, dl in 0.05f64..2.0) {
        // ln(M m² δL²) − 2mL stays within a band fixed by L, σ and z.
        let l = 1.0;
        let cfg = ProbeConfig::with_mass(m);
        let sc = predicted_sample_complexity(&cfg, l, dl).unwrap();
        let excess = sc.ln_m_exact + 2.0 * (m * dl).ln() - 2.0 * m * l;
        prop_assert!(excess > 8f64.ln() - 1e-9, "excess {}", excess);
        prop_assert!(excess < 8f64.ln() + 2.0 * 12f64.ln(), "excess {}", excess);
    }

    #[test]
    fn heisenberg_never_exceeds_sql(n in 4u64..400, ds in 0.1f64..50.0, kappa in 0.2f64..5.0) {
        let r = regime_report(n, kappa, &ProbeConfig::default(), ds).unwrap();
        for e in [&r.heavy, &r.light] {
            prop_assert!(e.ln_m_heisenberg <= e.ln_m_exact);
        }
    }

    #[test]
    fn distinguisher_determinism(seed in any::<u64>(), budget in 1u64..2000) {
        let geom = geometry_from_qubits(8, 1.0).unwrap();
        let cfg = ProbeConfig { n_qubits: 8, ..ProbeConfig::with_mass(1.0) };
        let a = holographic_distinguisher(&geom, &cfg, Mode::Injective, 0.2, budget, 100, seed).unwrap();
        let b = holographic_distinguisher(&geom, &cfg, Mode::Injective, 0.2, budget, 100, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn symplectic_invariance(h in prop::collection::vec(-0.4f64..0.4, 21), start in 0usize..5) {
        let chain = build_chain_ground_covariance(8, 0.3, 1.0).unwrap();
        let cov = restrict_covariance(&chain, &[start, start + 1, start + 3]).unwrap();
        let mut hm = DMatrix::<f64>::zeros(6, 6);
        let mut it = h.into_iter();
        for i in 0..6 {
            for j in i..6 {
                let v = it.next().unwrap();
                hm[(i, j)] = v;
                hm[(j, i)] = v;
            }
        }
        let s = (symplectic_form(3) * hm).exp();
        let moved = &s * cov.gamma() * s.transpose();
        let moved = CovarianceMatrix::new((&moved + moved.transpose()) * 0.5).unwrap();
        let a = symplectic_spectrum(&cov).unwrap().nus;
        let b = symplectic_spectrum(&moved).unwrap().nus;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8, "{} vs {}", x, y);
        }
    }

    #[test]
    fn chain_bipartitions(mask in 1u32..((1 << 12) - 1), mass0 in 1e-3f64..1.0) {
        let chain = build_chain_ground_covariance(12, mass0, 1.0).unwrap();
        let (a, b): (Vec<usize>, Vec<usize>) = (0..12).partition(|i| mask & (1 << i) != 0);
        let ca = restrict_covariance(&chain, &a).unwrap();
        let cb = restrict_covariance(&chain, &b).unwrap();
        for c in [&ca, &cb] {
            prop_assert!(symplectic_spectrum(c).unwrap().nus.iter().all(|&nu| nu >= 0.5 - 1e-8));
        }
        let sa = bulk_entanglement_entropy(&ca, LogBase::Nats).unwrap();
        let sb = bulk_entanglement_entropy(&cb, LogBase::Nats).unwrap();
        prop_assert!((sa - sb).abs() < 1e-8);
        let full = sa;
        for j in 1..=a.len() {
            let t = truncated_entropy(&ca, j, LogBase::Nats).unwrap();
            prop_assert!((t.value + t.dropped_bound - full).abs() < 1e-12);
        }
    }

    #[test]
    fn holographic_cost_monotone(n in 1u64..500, alpha in 1.0f64..8.0, p in 0.0f64..4.0, b in 0.0f64..3.0) {
        let base = holographic_cost(n, alpha, p, b).unwrap().log2_cost;
        prop_assert!(holographic_cost(n + 1, alpha, p, b).unwrap().log2_cost > base);
        prop_assert!(holographic_cost(n, alpha * 1.1, p, b).unwrap().log2_cost <= base);
        prop_assert!(holographic_cost(n, alpha, p + 0.5, b).unwrap().log2_cost >= base);
        prop_assert!(holographic_cost(n, alpha, p, b + 0.5).unwrap().log2_cost > base);
    }
}

#[test]
fn discrete_gaussian_matches_truncated_pmf() {
    for sigma in [0.8, 1.5, 3.2] {
        let dg = DiscreteGaussian::new(sigma);
        let radius = dg.radius();
        let weights: Vec<f64> = (-radius..=radius).map(|x| (-(x * x) as f64 / (2.0 * sigma * sigma)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let mut counts = vec![0u64; weights.len()];
        let mut rng = rng_from_seed(77);
        let samples = 100_000;
        let mut sum = 0.0;
        for _ in 0..samples {
            let x = dg.sample_centered(&mut rng);
            sum += x as f64;
            counts[(x + radius) as usize] += 1;
        }
        let tv: f64 =
            0.5 * counts.iter().zip(&weights).map(|(&c, &w)| (c as f64 / samples as f64 - w / z).abs()).sum::<f64>();
        assert!(tv < 0.02, "sigma {sigma}: TV {tv}");
        let mean = sum / samples as f64;
        assert!(mean.abs() < 4.0 * sigma / (samples as f64).sqrt(), "sigma {sigma}: mean {mean}");
    }
}

#[test]
fn discrete_gaussian_is_deterministic() {
    let dg = DiscreteGaussian::new(2.0);
    let draw = |seed| {
        let mut rng = rng_from_seed(seed);
        (0..64).map(|_| dg.sample_mod(97, &mut rng)).collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));
}

#[test]
fn qubit_geometry_scaling() {
    let ratios: BTreeSet<u64> = (1..200u64)
        .map(|n| (geometry_from_qubits(n, 1.7).unwrap().central_charge() / n as f64 * 1e12).round() as u64)
        .collect();
    assert_eq!(ratios.len(), 1);
}
