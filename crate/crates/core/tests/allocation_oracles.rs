use proptest::prelude::*;
use threeway_dof::allocation::{
    broadcast_band, optimal_broadcast, optimal_unicast_bruteforce, optimal_unicast_closed_form, optimal_unicast_enumerated,
    Certificate,
};
use threeway_dof::bounds::{cutset_bound_broadcast, genie_bound_unicast, genie_terms};
use threeway_dof::lp::verify_duality;
use threeway_dof::rational::{frac, int};
use threeway_dof::{AntennaConfig, AntennaSplit, Rational};

fn ordered(max: u32) -> Vec<AntennaConfig> {
    let mut out = Vec::new();
    for m1 in 1..=max {
        for m2 in 1..=m1 {
            for m3 in 1..=m2 {
                out.push(AntennaConfig::new(m1, m2, m3).unwrap());
            }
        }
    }
    out
}

#[test]
fn three_solvers_agree_up_to_ten() {
    for cfg in ordered(10) {
        let closed = optimal_unicast_closed_form(&cfg);
        let enumerated = optimal_unicast_enumerated(&cfg).unwrap();
        let brute = optimal_unicast_bruteforce(&cfg, 3).unwrap();
        assert_eq!(enumerated.optimal_dof, closed.optimal_dof, "enumerated vs closed form at {cfg}");
        assert_eq!(brute.optimal_dof, closed.optimal_dof, "grid vs closed form at {cfg}");
        assert_eq!(genie_bound_unicast(&closed.split).value(), closed.optimal_dof, "canonical split at {cfg}");
        assert!(closed.split.matches(&cfg) && enumerated.split.matches(&cfg) && brute.split.matches(&cfg));

        let Certificate::DualityPair { lp, v, lambda, gap, .. } = &enumerated.certificate else {
            panic!("enumerated result without a duality pair at {cfg}");
        };
        assert_eq!(*gap, int(0));
        assert!(verify_duality(lp, v, lambda).unwrap().is_optimal());
    }
}

#[test]
fn bruteforce_matches_closed_form_up_to_twelve() {
    for cfg in ordered(12) {
        let brute = optimal_unicast_bruteforce(&cfg, 3).unwrap();
        assert_eq!(brute.optimal_dof, optimal_unicast_closed_form(&cfg).optimal_dof, "{cfg}");
    }
}

#[test]
fn broadcast_dominates_unicast() {
    for cfg in ordered(10) {
        let b = optimal_broadcast(&cfg).unwrap();
        assert!(b.optimal_dof >= optimal_unicast_closed_form(&cfg).optimal_dof, "{cfg}");
        assert_eq!(cutset_bound_broadcast(&b.split).value(), b.optimal_dof, "{cfg}");
    }
}

#[test]
fn every_split_in_the_broadcast_band_is_optimal() {
    for cfg in ordered(6) {
        let band = broadcast_band(&cfg);
        let target = optimal_broadcast(&cfg).unwrap().optimal_dof;
        let [m1, m2, m3] = cfg.counts();
        for t1 in 0..=m1 {
            for t2 in 0..=m2 {
                for t3 in 0..=m3 {
                    let split = AntennaSplit::from_integers([t1, t2, t3], [m1 - t1, m2 - t2, m3 - t3]);
                    let value = cutset_bound_broadcast(&split).value();
                    assert!(value <= target, "{cfg} {split}");
                    if band.contains(&split) {
                        assert_eq!(value, target, "{cfg} {split}");
                    }
                }
            }
        }
    }
}

#[test]
fn regimes_meet_at_the_boundary() {
    for m3 in 1..=6 {
        for m2 in m3..=8 {
            let cfg = AntennaConfig::new(m2 + m3, m2, m3).unwrap();
            let [m1, m2, m3] = cfg.as_rationals();
            assert_eq!(m1 + (m2 + m3 - m1) / int(3), m2 + m3);
            assert_eq!(optimal_unicast_closed_form(&cfg).optimal_dof, m2 + m3);
        }
    }
}

#[test]
fn fractional_optima_need_extension_three() {
    for cfg in ordered(10) {
        let r = optimal_unicast_closed_form(&cfg);
        assert!(r.extension_factor == 1 || r.extension_factor == 3, "{cfg}");
        assert_eq!(r.extension_factor == 1, r.optimal_dof.is_integer());
    }
}

fn objective(split: &AntennaSplit) -> Rational {
    genie_terms(split.transmit(), split.receive()).into_iter().min().unwrap()
}

proptest! {
    #[test]
    fn objective_is_invariant_under_mirroring(
        m in (1u32..=12, 1u32..=12, 1u32..=12),
        k in (0u32..=36, 0u32..=36, 0u32..=36),
    ) {
        let cfg = AntennaConfig::sorted([m.0, m.1, m.2]);
        let [m1, m2, m3] = cfg.counts();
        let mr = [k.0 % (3 * m1 + 1), k.1 % (3 * m2 + 1), k.2 % (3 * m3 + 1)].map(|x| frac(x.into(), 3));
        let split = AntennaSplit::from_receive(&cfg, mr).unwrap();
        prop_assert_eq!(objective(&split), objective(&split.mirrored()));
    }

    #[test]
    fn no_split_beats_the_closed_form(
        m in (1u32..=12, 1u32..=12, 1u32..=12),
        k in (0u32..=36, 0u32..=36, 0u32..=36),
    ) {
        let cfg = AntennaConfig::sorted([m.0, m.1, m.2]);
        let [m1, m2, m3] = cfg.counts();
        let mr = [k.0 % (3 * m1 + 1), k.1 % (3 * m2 + 1), k.2 % (3 * m3 + 1)].map(|x| frac(x.into(), 3));
        let split = AntennaSplit::from_receive(&cfg, mr).unwrap();
        prop_assert!(objective(&split) <= optimal_unicast_closed_form(&cfg).optimal_dof);
    }
}
