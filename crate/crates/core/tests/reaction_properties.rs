use proptest::prelude::*;
use sbr_settling::constitutive::SettlingParams;
use sbr_settling::reactions::{Asm1Params, Component, ReactionModel};

fn model() -> ReactionModel {
    ReactionModel::asm1(&Asm1Params::default(), &SettlingParams::default()).unwrap()
}

/// Particulates with total at most `x_hat`, solubles on a log scale, some
/// entries exactly zero.
fn state() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    let entry = prop_oneof![1 => Just(0.0), 4 => 0.0f64..1.0];
    let soluble = prop_oneof![1 => Just(0.0), 4 => (-7.0f64..0.5).prop_map(|e| 10f64.powf(e))];
    (prop::collection::vec(entry, 6), 0.0f64..=30.0, prop::collection::vec(soluble, 6)).prop_map(|(w, x, s)| {
        let sum: f64 = w.iter().sum();
        let c = if sum > 0.0 { w.iter().map(|v| x * v / sum * (1.0 - 1e-15)).collect() } else { w };
        (c, s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rates_within_their_caps((c, s) in state()) {
        let m = model();
        let x_hat = SettlingParams::default().x_hat;
        let mut r = vec![0.0; m.n_processes()];
        m.rate_vector(&c, &s, &mut r);
        for (l, &rl) in r.iter().enumerate() {
            prop_assert!(rl >= 0.0);
            let cap = m.law().rate_cap(l, x_hat);
            prop_assert!(rl <= cap * (1.0 + 1e-12), "process {} rate {} cap {}", l, rl, cap);
            for k in 0..6 {
                if m.sigma_c(k, l) < 0.0 && c[k] > 0.0 {
                    let bar = m.law().rbar_cap(l, Component::Particulate(k), x_hat);
                    prop_assert!(rl / c[k] <= bar * (1.0 + 1e-12), "process {} on particulate {}", l, k);
                }
                if m.sigma_s(k, l) < 0.0 && s[k] > 0.0 {
                    let bar = m.law().rbar_cap(l, Component::Soluble(k), x_hat);
                    prop_assert!(rl / s[k] <= bar * (1.0 + 1e-12), "process {} on soluble {}", l, k);
                }
            }
        }
    }

    #[test]
    fn absent_component_is_not_consumed((c, s) in state()) {
        let m = model();
        let (mut rc, mut rs) = (vec![0.0; 6], vec![0.0; 6]);
        m.increments(&c, &s, &mut rc, &mut rs);
        for k in 0..6 {
            if c[k] == 0.0 {
                prop_assert!(rc[k] >= 0.0, "particulate {} gets {}", k, rc[k]);
            }
            if s[k] == 0.0 {
                prop_assert!(rs[k] >= 0.0, "soluble {} gets {}", k, rs[k]);
            }
        }
    }

    #[test]
    fn increments_are_stoichiometry_times_rates((c, s) in state()) {
        let m = model();
        let np = m.n_processes();
        let mut r = vec![0.0; np];
        m.rate_vector(&c, &s, &mut r);
        let (mut rc, mut rs) = (vec![0.0; 6], vec![0.0; 6]);
        m.increments(&c, &s, &mut rc, &mut rs);
        // particulate reactions stop in the band just below x_hat
        let active = c.iter().sum::<f64>() < m.cutoff();
        for k in 0..6 {
            let want_c: f64 = if active { (0..np).map(|l| m.sigma_c(k, l) * r[l]).sum() } else { 0.0 };
            let want_s: f64 = (0..np).map(|l| m.sigma_s(k, l) * r[l]).sum();
            let scale_c: f64 = (0..np).map(|l| (m.sigma_c(k, l) * r[l]).abs()).sum::<f64>().max(1e-300);
            let scale_s: f64 = (0..np).map(|l| (m.sigma_s(k, l) * r[l]).abs()).sum::<f64>().max(1e-300);
            prop_assert!((rc[k] - want_c).abs() <= 1e-12 * scale_c);
            prop_assert!((rs[k] - want_s).abs() <= 1e-12 * scale_s);
        }
    }
}

#[test]
fn solids_production_bounded_by_m_tilde() {
    let m = model();
    let b = m.bounds();
    let mut worst = 0.0f64;
    let (mut rc, mut rs) = (vec![0.0; 6], vec![0.0; 6]);
    // biomass rich, substrate saturated, aerobic: heterotroph growth at its fastest
    for x in [1.0, 5.0, 15.0, 29.0] {
        let c = [0.0, 0.0, x * 0.5, x * 0.5, 0.0, 0.0];
        let s = [0.0, 10.0, 10.0, 10.0, 10.0, 10.0];
        m.increments(&c, &s, &mut rc, &mut rs);
        worst = worst.max(rc.iter().sum());
    }
    assert!(worst > 0.0 && worst <= b.m_tilde, "{worst} vs {}", b.m_tilde);
}

#[test]
fn zero_model_has_no_rates() {
    let m = ReactionModel::zero_asm1_layout(&SettlingParams::default()).unwrap();
    assert!(m.is_zero());
    let b = m.bounds();
    assert_eq!((b.m_c, b.m_s, b.m_tilde), (0.0, 0.0, 0.0));
}
