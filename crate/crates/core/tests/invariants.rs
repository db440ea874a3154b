use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use threeway_dof::allocation::{optimal_broadcast, optimal_unicast_closed_form};
use threeway_dof::bounds::{
    broadcast_cutset_terms, cutset_bound_broadcast, cutset_bound_unicast, cutset_unicast_terms, genie_bound_unicast, genie_terms,
};
use threeway_dof::channel::{draw_channels, receive, NODES};
use threeway_dof::linalg::{null_space_basis, numerical_rank, pseudo_inverse, random_gaussian, random_gaussian_vector, rng_for, ComplexVector};
use threeway_dof::rate::estimate_dof;
use threeway_dof::rational::{frac, int};
use threeway_dof::schemes::{build_scheme, verify_scheme, SchemeKind};
use threeway_dof::{AntennaConfig, AntennaSplit, ComplexMatrix, Rational};

fn diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a.as_dmatrix() - b.as_dmatrix()).norm()
}

fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.try_mul(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn penrose_identities(r in 1usize..8, c in 1usize..8, seed in any::<u64>()) {
        let a = random_gaussian(r, c, seed);
        let p = pseudo_inverse(&a).unwrap();
        prop_assert_eq!(p.shape(), (c, r));
        let ap = mul(&a, &p);
        let pa = mul(&p, &a);
        prop_assert!(diff(&mul(&ap, &a), &a) <= 1e-10);
        prop_assert!(diff(&mul(&pa, &p), &p) <= 1e-10 * p.frobenius_norm().max(1.0));
        prop_assert!(diff(&ap, &ap.adjoint()) <= 1e-10);
        prop_assert!(diff(&pa, &pa.adjoint()) <= 1e-10);
    }

    #[test]
    fn null_space_is_orthonormal_and_annihilated(r in 0usize..8, c in 1usize..8, seed in any::<u64>()) {
        let a = random_gaussian(r, c, seed);
        let n = null_space_basis(&a).unwrap();
        prop_assert_eq!(n.cols(), c.saturating_sub(r));
        if n.cols() > 0 {
            prop_assert!(n.orthonormality_defect() <= 1e-10);
            if r > 0 {
                prop_assert!(mul(&a, &n).frobenius_norm() <= 1e-10 * a.frobenius_norm());
            }
        }
    }

    #[test]
    fn gaussian_matrices_have_full_rank(r in 1usize..8, c in 1usize..8, seed in any::<u64>()) {
        prop_assert_eq!(numerical_rank(&random_gaussian(r, c, seed), 0.0).unwrap(), r.min(c));
    }

    #[test]
    fn received_signal_is_linear_in_the_inputs(mt in prop::array::uniform3(0u32..4), mr in prop::array::uniform3(0u32..4), seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let split = AntennaSplit::from_integers(mt, mr);
        let ch = draw_channels(&split, seed).unwrap();
        let mut rng = rng_for(seed, 7);
        let vecs = |rng: &mut _, lens: [u32; 3]| -> [ComplexVector; 3] {
            lens.map(|n| random_gaussian_vector(n as usize, rng))
        };
        let x = vecs(&mut rng, mt);
        let y = vecs(&mut rng, mt);
        let zero = mr.map(|n| DVector::<Complex64>::zeros(n as usize));
        let k = Complex64::new(alpha, 0.0);
        let combined: [ComplexVector; 3] = std::array::from_fn(|i| &x[i] * k + &y[i]);
        let out = receive(&ch, &combined, &zero).unwrap();
        let rx = receive(&ch, &x, &zero).unwrap();
        let ry = receive(&ch, &y, &zero).unwrap();
        for node in NODES {
            let i = node - 1;
            prop_assert!((&out[i] - (&rx[i] * k + &ry[i])).norm() <= 1e-12 * (1.0 + out[i].norm()));
        }
    }

    #[test]
    fn bounds_are_monotone_in_every_count(
        mt in prop::array::uniform3(0i64..12),
        mr in prop::array::uniform3(0i64..12),
        idx in 0usize..6,
        den in 1i64..4,
    ) {
        let base = AntennaSplit::new(mt.map(|v| frac(v, den)), mr.map(|v| frac(v, den))).unwrap();
        let mut t = base.transmit();
        let mut r = base.receive();
        if idx < 3 { t[idx] += int(1) } else { r[idx - 3] += int(1) }
        let grown = AntennaSplit::new(t, r).unwrap();
        for f in [cutset_bound_unicast, genie_bound_unicast, cutset_bound_broadcast] {
            prop_assert!(f(&grown).value() >= f(&base).value());
        }
        prop_assert!(genie_bound_unicast(&base).value() <= cutset_bound_unicast(&base).value());
    }
}

#[test]
fn bounds_are_monotone_on_the_full_grid() {
    fn combined(mt: [i64; 3], mr: [i64; 3]) -> [i64; 3] {
        let min = |t: &[i64]| *t.iter().min().unwrap();
        [min(&cutset_unicast_terms(mt, mr)), min(&genie_terms(mt, mr)), min(&broadcast_cutset_terms(mt, mr))]
    }
    for code in 0..9i64.pow(6) {
        let digits: [i64; 6] = std::array::from_fn(|k| code / 9i64.pow(k as u32) % 9);
        let (mt, mr) = ([digits[0], digits[1], digits[2]], [digits[3], digits[4], digits[5]]);
        let base = combined(mt, mr);
        for idx in 0..6 {
            let (mut t, mut r) = (mt, mr);
            if idx < 3 { t[idx] += 1 } else { r[idx - 3] += 1 }
            let grown = combined(t, r);
            assert!((0..3).all(|k| grown[k] >= base[k]), "mt {mt:?} mr {mr:?} index {idx}");
        }
    }
}

fn ordered_configs(max: u32, min3: u32) -> impl Iterator<Item = AntennaConfig> {
    (min3..=max).flat_map(move |m3| (m3..=max).flat_map(move |m2| (m2..=max).map(move |m1| AntennaConfig::new(m1, m2, m3).unwrap())))
}

#[test]
fn node_one_null_space_matches_the_split_on_every_draw() {
    for cfg in ordered_configs(6, 1) {
        for kind in SchemeKind::ALL {
            let Ok(layout) = kind.layout(&cfg) else { continue };
            for seed in 0..5 {
                let ch = layout.draw_channels(seed).unwrap();
                let s = &layout.split;
                for (from, to) in [(1, 2), (1, 3)] {
                    let h = ch.h(from, to);
                    let expect = s.mt(from).saturating_sub(s.mr(to));
                    assert_eq!(null_space_basis(h).unwrap().cols(), expect, "{kind} {cfg} seed {seed} H_{from}{to}");
                }
            }
        }
    }
}

#[test]
fn achieved_dof_is_optimal_and_respects_the_bound_at_its_split() {
    for cfg in ordered_configs(7, 1) {
        for kind in SchemeKind::ALL {
            let Ok(layout) = kind.layout(&cfg) else { continue };
            let split = layout.split.to_rational();
            let ext = int(i64::from(layout.extension_factor));
            let (bound, optimum): (Rational, Rational) = match kind {
                SchemeKind::Bcast => (cutset_bound_broadcast(&split).value(), optimal_broadcast(&cfg).unwrap().optimal_dof),
                _ => (genie_bound_unicast(&split).value(), optimal_unicast_closed_form(&cfg).optimal_dof),
            };
            for seed in 0..3 {
                let ch = layout.draw_channels(seed).unwrap();
                let scheme = build_scheme(kind, &cfg, &ch, seed).unwrap();
                let report = verify_scheme(&scheme, &ch).unwrap();
                assert!(report.is_valid(), "{kind} {cfg} seed {seed}: {:?}", report.failures);
                assert!(scheme.dof() * ext <= bound, "{kind} {cfg}");
                assert_eq!(scheme.dof(), optimum, "{kind} {cfg}");
            }
        }
    }
}

#[test]
fn slope_error_shrinks_at_higher_snr() {
    let cases = [
        ("3,3,3", SchemeKind::UniA),
        ("4,2,1", SchemeKind::UniB),
        ("5,3,2", SchemeKind::Bcast),
        ("2,2,1", SchemeKind::Bcast),
        ("6,2,2", SchemeKind::UniB),
    ];
    for (m, kind) in cases {
        let c: Vec<u32> = m.split(',').map(|v| v.parse().unwrap()).collect();
        let cfg = AntennaConfig::new(c[0], c[1], c[2]).unwrap();
        for seed in 1..=3 {
            let low = estimate_dof(&cfg, kind, &[20.0, 40.0], 10, seed).unwrap();
            let high = estimate_dof(&cfg, kind, &[40.0, 60.0], 10, seed).unwrap();
            assert!(high.abs_error < low.abs_error, "{kind} {cfg} seed {seed}: {} vs {}", high.abs_error, low.abs_error);
        }
    }
}
