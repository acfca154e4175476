//! Fixtures for the acceptance run: a pass/fail report and random admissible
//! tank states, flows and step lengths.

use std::fmt::Display;
use std::process::ExitCode;

use rand::Rng;
use sbr_settling::constitutive::{Constitutive, SettlingParams};
use sbr_settling::geometry::{AreaProfile, Geometry};
use sbr_settling::reactions::{Asm1Params, ReactionModel};
use sbr_settling::scheme::{cfl_max_dt, CflInputs, Flows, Stepper, SurfaceCase, TankState, Variant};

/// Negative round-off tolerated in a concentration.
pub const NEG_TOL: f64 = 1e-12;

/// Collects one line per criterion.
#[derive(Debug, Default)]
pub struct Report {
    failed: Vec<String>,
    passed: usize,
}

impl Report {
    pub fn record(&mut self, id: &str, title: &str, pass: bool, detail: impl Display) {
        println!("{} criterion {id}: {title} ({detail})", if pass { "PASS" } else { "FAIL" });
        if pass {
            self.passed += 1;
        } else {
            self.failed.push(id.to_string());
        }
    }

    pub fn skip(&mut self, id: &str, title: &str, why: impl Display) {
        println!("SKIP criterion {id}: {title} ({why})");
    }

    pub fn finish(self) -> ExitCode {
        if self.failed.is_empty() {
            println!("acceptance: all {} criteria passed", self.passed);
            ExitCode::SUCCESS
        } else {
            println!("acceptance: {} passed, failed: {}", self.passed, self.failed.join(", "));
            ExitCode::FAILURE
        }
    }
}

/// Total solids, biased towards the edges of `[0, x_hat]` where the scheme
/// has to work hardest.
pub fn random_solids<R: Rng>(rng: &mut R, p: &SettlingParams) -> f64 {
    match rng.gen_range(0..20) {
        0..=1 => 0.0,
        2..=4 => rng.gen_range(0.0..1.0),
        5..=8 => rng.gen_range(p.x_hat - p.eps_r..=p.x_hat),
        9 => p.x_hat,
        _ => rng.gen_range(0.0..=p.x_hat),
    }
}

/// Splits `total` over `k` components, some of them zero. Summed left to
/// right, as the scheme does, the parts give `total` or the next float below.
pub fn random_split<R: Rng>(rng: &mut R, total: f64, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
    let last = match w.iter().rposition(|&v| v > 0.0) {
        Some(i) => i,
        None => {
            let i = rng.gen_range(0..k);
            w[i] = 1.0;
            i
        }
    };
    let sum: f64 = w.iter().sum();
    let mut parts: Vec<f64> = w.iter().map(|v| total * v / sum).collect();
    let others: f64 = parts.iter().enumerate().filter(|&(i, _)| i != last).map(|(_, v)| v).sum();
    parts[last] = (total - others).max(0.0);
    while parts.iter().sum::<f64>() > total && parts[last] > 0.0 {
        parts[last] = f64::from_bits(parts[last].to_bits() - 1);
    }
    parts
}

pub fn random_solubles<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    (0..k).map(|_| if rng.gen_bool(0.2) { 0.0 } else { 10f64.powf(rng.gen_range(-6.0..0.5)) }).collect()
}

pub fn random_particulates<R: Rng>(rng: &mut R, p: &SettlingParams, k: usize) -> Vec<f64> {
    let x = random_solids(rng, p);
    random_split(rng, x, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kinetics {
    None,
    Asm1,
}

/// Settling physics shared by many random draws; building the `D` table is
/// the expensive part.
pub struct Physics {
    pub variants: Vec<(SettlingParams, Constitutive, ReactionModel)>,
}

impl Physics {
    pub fn new(kinetics: Kinetics) -> Self {
        let variants = [0.02, 0.2, 0.6]
            .into_iter()
            .map(|alpha_comp| {
                let p = SettlingParams { alpha_comp, ..SettlingParams::default() };
                let cons = Constitutive::new(p).expect("valid settling parameters");
                let model = match kinetics {
                    Kinetics::None => ReactionModel::zero_asm1_layout(&p),
                    Kinetics::Asm1 => ReactionModel::asm1(&Asm1Params::default(), &p),
                }
                .expect("valid kinetics");
                (p, cons, model)
            })
            .collect();
        Self { variants }
    }
}

/// One step's worth of random input.
pub struct StepFixture {
    pub stepper: Stepper,
    pub params: SettlingParams,
    pub state: TankState,
    pub flows: Flows,
    pub tau: f64,
}

pub fn random_geometry<R: Rng>(rng: &mut R) -> Geometry {
    let n = rng.gen_range(8..=60);
    let b = rng.gen_range(1.0..4.0);
    let a = rng.gen_range(1.0..500.0);
    let profile = if rng.gen_bool(0.5) {
        AreaProfile::Constant(a)
    } else {
        let bottom = a * rng.gen_range(1.0 / 3.0..3.0);
        AreaProfile::Table(vec![[0.0, a], [b, bottom]])
    };
    Geometry::new(b, n, profile).expect("valid geometry")
}

fn random_flows<R: Rng>(rng: &mut R, target: SurfaceCase, unit: f64, p: &SettlingParams) -> Flows {
    let q = |rng: &mut R| unit * 10f64.powf(rng.gen_range(-3.0..1.0));
    let (mut q_f, mut q_u, mut q_e) = (0.0, 0.0, 0.0);
    match target {
        SurfaceCase::A => {
            q_u = q(rng);
            q_f = if rng.gen_bool(0.5) { 0.0 } else { q_u * rng.gen_range(0.0..0.9) };
        }
        SurfaceCase::B => match rng.gen_range(0..4) {
            0 => {}
            1 => q_u = q(rng),
            2 => q_f = q(rng),
            _ => {
                q_f = q(rng);
                q_u = q(rng);
            }
        },
        SurfaceCase::C => {
            q_f = q(rng);
            q_u = if rng.gen_bool(0.5) { 0.0 } else { q_f * rng.gen_range(0.0..0.9) };
        }
        SurfaceCase::D | SurfaceCase::E => {
            q_e = q(rng);
            q_u = if rng.gen_bool(0.5) { 0.0 } else { q(rng) };
        }
    }
    let (c_f, s_f) = if q_f > 0.0 {
        (random_particulates(rng, p, 6), random_solubles(rng, 6))
    } else {
        (vec![0.0; 6], vec![0.0; 6])
    };
    Flows { q_f, q_u, q_e, c_f, s_f }
}

/// Random admissible state, flows and step, arranged so that the surface is
/// likely to move as in `target`. The case actually taken is whatever the
/// stepper reports.
pub fn random_step<R: Rng>(rng: &mut R, physics: &Physics, target: SurfaceCase) -> StepFixture {
    let geom = random_geometry(rng);
    let (p, cons, model) = &physics.variants[rng.gen_range(0..physics.variants.len())];
    let (n, h) = (geom.cells(), geom.h());
    let flows = random_flows(rng, target, geom.a_min() * h, p);

    let report = cfl_max_dt(&CflInputs::new(&geom, cons, model, flows.norm())).expect("admissible bound");
    let tau = if rng.gen_bool(0.5) { report.tau_max } else { report.tau_max * rng.gen_range(0.25..1.0) };

    let jb = rng.gen_range(2..n);
    let a_jb = geom.cell_area(jb);
    let frac = (flows.q_bar() - flows.q_u) * tau / (a_jb * h);
    let alpha = match target {
        SurfaceCase::A | SurfaceCase::E if frac < 0.0 => -frac * rng.gen_range(0.01..0.99),
        SurfaceCase::C if frac > 0.0 => 1.0 - frac * rng.gen_range(0.01..0.99),
        _ if frac < 0.0 => -frac + (1.0 + frac) * rng.gen_range(0.01..=1.0),
        _ => (1.0 - frac) * rng.gen_range(0.01..0.99),
    };
    let volume = geom.volume_below_boundary(jb) + alpha * a_jb * h;
    let surf = geom.surface_at_volume(volume).expect("surface inside the tank");

    let mut state = TankState::zeros(n, 6, 6, surf);
    for j in surf.jbar..=n {
        let f = if j == surf.jbar { surf.alpha } else { 1.0 };
        let c = random_particulates(rng, p, 6);
        let s = random_solubles(rng, 6);
        for (d, v) in state.c_mut(j).iter_mut().zip(&c) {
            *d = f * v;
        }
        for (d, v) in state.s_mut(j).iter_mut().zip(&s) {
            *d = f * v;
        }
    }
    let c = random_particulates(rng, p, 6);
    state.underflow_c_mut().copy_from_slice(&c);
    let s = random_solubles(rng, 6);
    state.underflow_s_mut().copy_from_slice(&s);
    if flows.q_e > 0.0 {
        let c = random_particulates(rng, p, 6);
        state.effluent_c_mut().copy_from_slice(&c);
        let s = random_solubles(rng, 6);
        state.effluent_s_mut().copy_from_slice(&s);
    }

    let stepper = Stepper::new(geom, cons.clone(), model.clone(), Variant::Split);
    StepFixture { stepper, params: *p, state, flows, tau }
}

/// First way in which `state` leaves the invariant region, if any.
pub fn omega_violation(state: &TankState, x_hat: f64) -> Option<String> {
    let n = state.cells();
    let min = state.min_entry();
    if min < -NEG_TOL {
        return Some(format!("negative concentration {min:e}"));
    }
    for j in state.surface.jbar..=n {
        let x = state.x_below_surface(j);
        if x > x_hat + NEG_TOL {
            return Some(format!("X = {x} in cell {j}"));
        }
    }
    for (what, row) in [("underflow", n + 1), ("effluent", n + 2)] {
        let x = state.x(row);
        if x > x_hat + NEG_TOL {
            return Some(format!("{what} X = {x}"));
        }
    }
    None
}

pub const CASES: [SurfaceCase; 5] = [SurfaceCase::A, SurfaceCase::B, SurfaceCase::C, SurfaceCase::D, SurfaceCase::E];

pub fn case_index(c: SurfaceCase) -> usize {
    CASES.iter().position(|&k| k == c).expect("known case")
}
