use proptest::prelude::*;
use sbr_settling::constitutive::{diffusion_coefficient, hindered_settling_velocity, Constitutive, SettlingParams};

/// Adaptive Simpson with Richardson correction.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            left + right + err / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

fn oracle(x: f64, p: &SettlingParams) -> f64 {
    if x <= p.x_c {
        return 0.0;
    }
    let top = x.min(p.x_hat);
    // integrate strictly inside (x_c, top] where d is smooth
    simpson(&|s| diffusion_coefficient(s, p), p.x_c, top, 1e-16)
}

fn params(alpha_comp: f64) -> SettlingParams {
    SettlingParams { alpha_comp, ..SettlingParams::default() }
}

#[test]
fn table_matches_quadrature_oracle() {
    for alpha in [0.02, 0.2, 1.0] {
        let p = params(alpha);
        let cons = Constitutive::new(p).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=500 {
            let x = p.x_c + (p.x_hat - p.x_c) * i as f64 / 500.0 * 0.999_999;
            let want = oracle(x, &p);
            let got = cons.big_d(x);
            worst = worst.max((got - want).abs() / cons.big_d_max());
        }
        assert!(worst < 1e-10, "alpha {alpha}: relative error {worst:e}");
    }
}

#[test]
fn table_end_value() {
    let p = params(0.2);
    let cons = Constitutive::new(p).unwrap();
    let want = simpson(&|s| diffusion_coefficient(s, &p), p.x_c, p.x_hat * (1.0 - 1e-15), 1e-16);
    assert!((cons.big_d_max() - want).abs() <= 1e-10 * want);
    assert_eq!(cons.big_d(p.x_hat + 1.0), cons.big_d_max());
    assert_eq!(cons.big_d(p.x_c), 0.0);
    assert_eq!(cons.big_d(0.0), 0.0);
}

#[test]
fn settling_velocity_closed_form() {
    let p = SettlingParams::default();
    assert_eq!(hindered_settling_velocity(0.0, &p), p.v0);
    assert_eq!(hindered_settling_velocity(p.x_hat, &p), 0.0);
    let x: f64 = 3.87;
    assert!((hindered_settling_velocity(x, &p) - p.v0 / 2.0).abs() < 1e-18);
    let x: f64 = 7.0;
    let want = p.v0 / (1.0 + (x / p.x_breve).powf(p.eta_exp));
    assert_eq!(hindered_settling_velocity(x, &p), want);
}

proptest! {
    #[test]
    fn velocity_non_increasing(a in 0.0f64..40.0, b in 0.0f64..40.0) {
        let p = SettlingParams::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (vl, vh) = (hindered_settling_velocity(lo, &p), hindered_settling_velocity(hi, &p));
        prop_assert!(vh <= vl);
        prop_assert!((0.0..=p.v0).contains(&vh));
    }

    #[test]
    fn big_d_non_decreasing(a in 0.0f64..35.0, b in 0.0f64..35.0, alpha in 0.01f64..1.0) {
        let cons = Constitutive::new(params(alpha)).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(cons.big_d(lo) <= cons.big_d(hi));
        prop_assert!(cons.big_d(lo) >= 0.0);
    }

    #[test]
    fn big_d_derivative_is_d(x in 5.2f64..29.5) {
        let p = params(0.2);
        let cons = Constitutive::new(p).unwrap();
        let h = 1e-4;
        let fd = (cons.big_d(x + h) - cons.big_d(x - h)) / (2.0 * h);
        let d = diffusion_coefficient(x, &p);
        prop_assert!((fd - d).abs() <= 1e-6 * d, "fd {} d {}", fd, d);
    }

    #[test]
    fn slope_bound_dominates_difference_quotients(a in 0.0f64..29.9, dx in 1e-6f64..0.1) {
        let p = SettlingParams::default();
        let cons = Constitutive::new(p).unwrap();
        let b = (a + dx).min(p.x_hat * (1.0 - 1e-12));
        let q = (hindered_settling_velocity(a, &p) - hindered_settling_velocity(b, &p)).abs() / (b - a);
        prop_assert!(q <= cons.v_hs_slope_sup() * (1.0 + 1e-9));
    }
}
