//! One SBR cycle: stage switching between the resolved and the fully mixed
//! regime, snapshots, and the per-stage mass ledger.

mod diagnostics;
mod scenario;

use std::time::Instant;

use serde::Serialize;

pub use diagnostics::{mass_balance_audit, relative_difference, self_convergence, AuditReport, DiffReport, StageClosure};
pub use scenario::{
    Feed, GeometrySpec, InitialSpec, OutputSpec, ReactionSpec, Regime, Scenario, Segment, StageKind, StageSpec,
    SCHEMA_VERSION, SECONDS_PER_HOUR,
};

use crate::constitutive::Constitutive;
use crate::error::{Result, SimError};
use crate::geometry::CAPACITY_SLACK;
use crate::mixing::{average_below_surface, ode_max_dt, redistribute, Aeration, MixedState, MixedStepper};
use crate::scheme::{CaseCounters, CflReport, MassFlows, Stepper, TankState, Variant};

/// Tank content at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub state: TankState,
}

/// Outlet concentrations at one instant. Zero while the outlet is closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySample {
    pub t: f64,
    pub c_e: Vec<f64>,
    pub s_e: Vec<f64>,
    pub c_u: Vec<f64>,
    pub s_u: Vec<f64>,
}

/// Stored mass at both ends of a stage and what crossed the boundary in
/// between, per component (kg).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Balance {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub inflow: Vec<f64>,
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
    pub reaction: Vec<f64>,
    /// Oxygen supplied by aeration.
    pub aeration: Vec<f64>,
}

impl Balance {
    /// `|end - start - net exchange|` for component `k`.
    pub fn residual(&self, k: usize) -> f64 {
        let net = self.inflow[k] - self.bottom[k] - self.top[k] + self.reaction[k] + self.aeration[k];
        (self.end[k] - self.start[k] - net).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub kind: StageKind,
    pub regime: Regime,
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub steps: u64,
    /// Nominal step of the stage (s).
    pub tau_s: f64,
    pub particulates: Balance,
    pub solubles: Balance,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub name: String,
    pub variant: Variant,
    pub cells: usize,
    pub depth: f64,
    pub particulate_names: Vec<String>,
    pub soluble_names: Vec<String>,
    /// Step used in resolved stages (s).
    pub tau: f64,
    pub cfl: CflReport,
    pub snapshots: Vec<Snapshot>,
    pub series: Vec<BoundarySample>,
    pub stages: Vec<StageRecord>,
    pub counters: CaseCounters,
    pub wall_clock_s: f64,
}

impl RunRecord {
    pub fn h(&self) -> f64 {
        self.depth / self.cells as f64
    }

    pub fn final_state(&self) -> &TankState {
        &self.snapshots.last().expect("a run records at least one snapshot").state
    }

    /// Snapshot taken at time `t` (s), up to round-off.
    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.snapshots.iter().find(|s| (s.t - t).abs() <= tol)
    }

    /// Everything except the wall-clock time agrees bit for bit.
    pub fn same_results(&self, o: &RunRecord) -> bool {
        self.tau.to_bits() == o.tau.to_bits()
            && self.snapshots == o.snapshots
            && self.series == o.series
            && self.stages == o.stages
            && self.counters == o.counters
    }
}

/// Compensated running sums, one per component.
#[derive(Debug, Clone)]
struct Accum {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl Accum {
    fn new(k: usize) -> Self {
        Self { sum: vec![0.0; k], comp: vec![0.0; k] }
    }
    fn add(&mut self, v: &[f64]) {
        for ((s, c), &x) in self.sum.iter_mut().zip(&mut self.comp).zip(v) {
            let t = *s + x;
            *c += if s.abs() >= x.abs() { (*s - t) + x } else { (x - t) + *s };
            *s = t;
        }
    }
    fn total(&self) -> Vec<f64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }
}

struct Ledger {
    inflow: Accum,
    bottom: Accum,
    top: Accum,
    reaction: Accum,
    aeration: Accum,
}

impl Ledger {
    fn new(k: usize) -> Self {
        Self { inflow: Accum::new(k), bottom: Accum::new(k), top: Accum::new(k), reaction: Accum::new(k), aeration: Accum::new(k) }
    }
    fn add(&mut self, m: &MassFlows) {
        self.inflow.add(&m.inflow);
        self.bottom.add(&m.bottom);
        self.top.add(&m.top);
        self.reaction.add(&m.reaction);
    }
    fn finish(self, start: Vec<f64>, end: Vec<f64>) -> Balance {
        Balance {
            start,
            end,
            inflow: self.inflow.total(),
            bottom: self.bottom.total(),
            top: self.top.total(),
            reaction: self.reaction.total(),
            aeration: self.aeration.total(),
        }
    }
}

fn mixed_mass(m: &MixedState) -> (Vec<f64>, Vec<f64>) {
    (m.c.iter().map(|v| v * m.volume).collect(), m.s.iter().map(|v| v * m.volume).collect())
}

/// Snapshot clock: `t0 + k * every` (computed without accumulating) merged
/// with a sorted list of extra instants.
struct Clock {
    t0: f64,
    every: f64,
    k: u64,
    extra: Vec<f64>,
    i: usize,
}

impl Clock {
    fn next(&self) -> f64 {
        let regular = self.t0 + self.k as f64 * self.every;
        self.extra.get(self.i).map_or(regular, |&e| e.min(regular))
    }
    fn advance(&mut self, t: f64) {
        while self.t0 + self.k as f64 * self.every <= t {
            self.k += 1;
        }
        while self.extra.get(self.i).is_some_and(|&e| e <= t) {
            self.i += 1;
        }
    }
}

/// Simulates the whole schedule with one fixed step for the resolved stages.
pub fn run(scenario: &Scenario, variant: Variant) -> Result<RunRecord> {
    run_with_snapshots(scenario, variant, &[])
}

/// As [`run`], with snapshots also taken at the given times (s).
pub fn run_with_snapshots(scenario: &Scenario, variant: Variant, extra: &[f64]) -> Result<RunRecord> {
    let started = Instant::now();
    scenario.validate()?;
    let geom = scenario.build_geometry()?;
    let model = scenario.build_model()?;
    let cons = Constitutive::new(scenario.settling)?;
    let (kc, ks) = (model.n_particulate(), model.n_soluble());
    let n = geom.cells();
    let mut stepper = Stepper::new(geom.clone(), cons, model.clone(), variant);
    let cfl = stepper.cfl(scenario.q_norm(kc, ks))?;
    let tau = cfl.tau_max;
    log::info!("{} cells, tau = {tau:.6e} s, bound set by {}", n, cfl.dominant);

    let mut state = scenario.initial_state(&geom, kc, ks)?;
    let mut t = scenario.start_s();
    let mut extra: Vec<f64> = extra.iter().copied().filter(|&e| e > t && e <= scenario.end_s()).collect();
    extra.sort_by(f64::total_cmp);
    let mut clock = Clock { t0: t, every: scenario.output.snapshot_every_s, k: 0, extra, i: 0 };
    let mut snapshots = Vec::new();
    let mut series = Vec::new();
    let mut stages = Vec::with_capacity(scenario.stages.len());
    let mut mixed: Option<MixedState> = None;
    let mut mstep = MixedStepper::new(kc, ks);
    let mut prev_q_u = 0.0;
    let aeration_index = model.oxygen_index();

    let record = |t: f64, state: &TankState, q_u: f64, snapshots: &mut Vec<Snapshot>, series: &mut Vec<BoundarySample>| {
        let open = |v: &[f64], on: bool| if on { v.to_vec() } else { vec![0.0; v.len()] };
        series.push(BoundarySample {
            t,
            c_e: state.effluent_c().to_vec(),
            s_e: state.effluent_s().to_vec(),
            c_u: open(state.underflow_c(), q_u > 0.0),
            s_u: open(state.underflow_s(), q_u > 0.0),
        });
        snapshots.push(Snapshot { t, state: state.clone() });
    };

    record(t, &state, 0.0, &mut snapshots, &mut series);
    clock.advance(t);

    for stage in &scenario.stages {
        let flows = stage.flows(kc, ks);
        let t_end = stage.end_s();
        let ctx = |e: SimError, t: f64| e.in_stage(&stage.name, t);
        log::info!("stage '{}' ({:?}) from {:.1} s", stage.name, stage.regime, t);
        let mut lc = Ledger::new(kc);
        let mut ls = Ledger::new(ks);
        let mut steps = 0u64;

        let (start_c, start_s, stage_tau) = match stage.regime {
            Regime::Pde => {
                if let Some(m) = mixed.take() {
                    redistribute(&m, &geom, &mut state).map_err(|e| ctx(e, t))?;
                }
                if flows.q_u > 0.0 && prev_q_u == 0.0 {
                    // pipe starts full of bottom mixture
                    let (c, s) = (state.c(n).to_vec(), state.s(n).to_vec());
                    state.underflow_c_mut().copy_from_slice(&c);
                    state.underflow_s_mut().copy_from_slice(&s);
                }
                let (mc, ms) = state.mass(&geom);
                (mc, ms, tau)
            }
            Regime::Ode => {
                if mixed.is_none() {
                    mixed = Some(average_below_surface(&state, &geom).map_err(|e| ctx(e, t))?);
                }
                let m = mixed.as_ref().expect("mixed state set above");
                let v_end = m.volume + (t_end - t) * (flows.q_bar() - flows.q_u);
                if !(v_end > 0.0) {
                    return Err(ctx(SimError::Drained { volume: v_end }, t));
                }
                if v_end > geom.capacity() * (1.0 + CAPACITY_SLACK) {
                    return Err(ctx(SimError::Overflow { volume: v_end, capacity: geom.capacity() }, t));
                }
                let (mc, ms) = mixed_mass(m);
                let t_ode = ode_max_dt(&model, geom.m3(), scenario.settling.eps_r, &flows, m.volume.min(v_end));
                (mc, ms, t_ode.min(t_end - t))
            }
        };
        let aeration = match (stage.aerated, aeration_index) {
            (true, Some(index)) => Some(Aeration { index, setpoint: scenario.output.oxygen_setpoint }),
            _ => None,
        };

        while t < t_end {
            let target = clock.next().min(t_end);
            while t < target {
                let gap = target - t;
                let dt = if gap <= stage_tau { gap } else { stage_tau };
                match stage.regime {
                    Regime::Pde => {
                        stepper.step(&mut state, &flows, dt).map_err(|e| ctx(e, t))?;
                        lc.add(&stepper.ledger().c);
                        ls.add(&stepper.ledger().s);
                    }
                    Regime::Ode => {
                        let m = mixed.as_mut().expect("mixed regime");
                        mstep.step(m, &flows, &model, dt, aeration).map_err(|e| ctx(e, t))?;
                        lc.add(&mstep.ledger_c);
                        ls.add(&mstep.ledger_s);
                        ls.aeration.add(&mstep.aeration);
                    }
                }
                steps += 1;
                t = if dt == gap { target } else { t + dt };
            }
            state.time = t;
            if let Some(m) = &mixed {
                redistribute(m, &geom, &mut state).map_err(|e| ctx(e, t))?;
                let (c, s) = (m.c.clone(), m.s.clone());
                if flows.q_u > 0.0 {
                    state.underflow_c_mut().copy_from_slice(&c);
                    state.underflow_s_mut().copy_from_slice(&s);
                }
                let drawing = flows.q_e > 0.0;
                for (d, v) in state.effluent_c_mut().iter_mut().zip(&c) {
                    *d = if drawing { *v } else { 0.0 };
                }
                for (d, v) in state.effluent_s_mut().iter_mut().zip(&s) {
                    *d = if drawing { *v } else { 0.0 };
                }
            }
            if t >= clock.next() {
                record(t, &state, flows.q_u, &mut snapshots, &mut series);
                clock.advance(t);
            }
        }

        let (end_c, end_s) = match &mixed {
            Some(m) => mixed_mass(m),
            None => state.mass(&geom),
        };
        stages.push(StageRecord {
            name: stage.name.clone(),
            kind: stage.kind,
            regime: stage.regime,
            t_start_s: stage.start_s(),
            t_end_s: t_end,
            steps,
            tau_s: stage_tau,
            particulates: lc.finish(start_c, end_c),
            solubles: ls.finish(start_s, end_s),
        });
        prev_q_u = flows.q_u;
    }

    let last = snapshots.last().map(|s| s.t);
    if last != Some(t) {
        record(t, &state, prev_q_u, &mut snapshots, &mut series);
    }

    Ok(RunRecord {
        name: scenario.name.clone(),
        variant,
        cells: n,
        depth: geom.depth(),
        particulate_names: model.particulate_names().to_vec(),
        soluble_names: model.soluble_names().to_vec(),
        tau,
        cfl,
        snapshots,
        series,
        stages,
        counters: *stepper.counters(),
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}
