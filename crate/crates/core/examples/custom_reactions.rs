//! A user-defined reaction model: one particulate that dissolves at a
//! first-order rate into one soluble. The tank settles while the solids
//! dissolve, and the stored mass stays equal to the initial mass because the
//! reaction only moves mass between the groups.

use std::sync::Arc;

use sbr_settling::constitutive::{Constitutive, SettlingParams};
use sbr_settling::geometry::{AreaProfile, Geometry};
use sbr_settling::reactions::{Component, RateLaw, ReactionModel};
use sbr_settling::scheme::{Flows, Stepper, Variant};

#[derive(Debug)]
struct Dissolution {
    k: f64,
}

impl RateLaw for Dissolution {
    fn n_processes(&self) -> usize {
        1
    }
    fn rates(&self, c: &[f64], _s: &[f64], out: &mut [f64]) {
        out[0] = self.k * c[0].max(0.0);
    }
    fn rate_cap(&self, _process: usize, x_hat: f64) -> f64 {
        self.k * x_hat
    }
    fn rbar_cap(&self, _process: usize, component: Component, _x_hat: f64) -> f64 {
        match component {
            Component::Particulate(0) => self.k,
            _ => 0.0,
        }
    }
}

fn main() -> sbr_settling::Result<()> {
    let p = SettlingParams::default();
    let model = ReactionModel::new(
        "dissolution",
        vec!["X_A".into()],
        vec!["S_A".into()],
        vec![-1.0],
        vec![1.0],
        Arc::new(Dissolution { k: 1e-3 }),
        &p,
    )?;
    let geom = Geometry::new(1.0, 40, AreaProfile::Constant(1.0))?;
    let mut stepper = Stepper::new(geom.clone(), Constitutive::new(p)?, model, Variant::Split);
    let rep = stepper.cfl(0.0)?;
    println!("tau = {:.4e} s ({})", rep.tau_max, rep.dominant);

    let mut state = stepper.empty_state(geom.surface_at_depth(0.1)?);
    for j in state.surface.jbar..=geom.cells() {
        let f = if j == state.surface.jbar { state.surface.alpha } else { 1.0 };
        state.c_mut(j)[0] = 4.0 * f;
    }
    let (c0, _) = state.mass(&geom);
    let flows = Flows::closed(1, 1);
    let steps = (600.0 / rep.tau_max).ceil() as usize;
    for i in 1..=steps {
        stepper.step(&mut state, &flows, rep.tau_max)?;
        if i % (steps / 5) == 0 {
            let (c, s) = state.mass(&geom);
            println!(
                "t = {:>6.1} s  solids {:.6} kg  dissolved {:.6} kg  total - initial {:+.2e}  bottom X {:.3}",
                i as f64 * rep.tau_max,
                c[0],
                s[0],
                c[0] + s[0] - c0[0],
                state.x(geom.cells())
            );
        }
    }
    Ok(())
}
