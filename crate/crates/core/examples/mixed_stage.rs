//! The fully mixed react stage on its own: the tank content is averaged,
//! aerated for two hours with oxygen held at its setpoint, and written back
//! onto the grid.

use sbr_settling::cli::config::bundled;
use sbr_settling::mixing::{average_below_surface, ode_max_dt, redistribute, Aeration, MixedStepper};
use sbr_settling::scheme::{Flows, TankState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = bundled("reference_sbr")?.with_cells(30);
    let geom = sc.build_geometry()?;
    let model = sc.build_model()?;
    let mut state: TankState = sc.initial_state(&geom, 6, 6)?;

    let mut m = average_below_surface(&state, &geom)?;
    let flows = Flows::closed(6, 6);
    let tau = ode_max_dt(&model, geom.m3(), sc.settling.eps_r, &flows, m.volume).min(60.0);
    let aeration = Some(Aeration { index: model.oxygen_index().expect("ASM1 has oxygen"), setpoint: sc.output.oxygen_setpoint });
    let mut stepper = MixedStepper::new(6, 6);
    let names: Vec<&str> = model.soluble_names().iter().map(String::as_str).collect();
    println!("tau = {tau:.3} s, volume {:.1} m^3", m.volume);
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "t (h)", "X_BH", names[1], names[3], names[4], "O2 added");
    let mut added = 0.0;
    let steps = (2.0 * 3600.0 / tau).round() as usize;
    for i in 0..=steps {
        if i % (steps / 8) == 0 {
            println!(
                "{:>6.2} {:>10.4e} {:>10.4e} {:>10.4e} {:>10.4e} {:>10.3} kg",
                i as f64 * tau / 3600.0,
                m.c[2],
                m.s[1],
                m.s[3],
                m.s[4],
                added
            );
        }
        if i < steps {
            stepper.step(&mut m, &flows, &model, tau, aeration)?;
            added += stepper.aeration[2];
        }
    }
    redistribute(&m, &geom, &mut state)?;
    println!("bottom cell after redistribution: X = {:.4}", state.x(geom.cells()));
    Ok(())
}
