//! Fully mixed stage: the tank content below the surface is homogeneous and
//! evolves by an ODE in time only.
//!
//! The state is advanced on the mass `V̄ C` with explicit Euler, so
//! `V̄' C' = V̄ C + τ (Q_f C_f - (Q_u + Q_e) C + V̄ R(C, S))` holds exactly and
//! the volume follows `V̄' = V̄ + τ (Q_f - Q_e - Q_u)`.

use crate::error::{Result, SimError};
use crate::geometry::Geometry;
use crate::reactions::ReactionModel;
use crate::scheme::{Flows, MassFlows, TankState};

/// Homogeneous content of the tank.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    pub c: Vec<f64>,
    pub s: Vec<f64>,
    /// Mixture volume `V̄` (m^3).
    pub volume: f64,
}

impl MixedState {
    pub fn x(&self) -> f64 {
        self.c.iter().sum()
    }
}

/// Volume-weighted averages of all cells below the surface.
pub fn average_below_surface(state: &TankState, geom: &Geometry) -> Result<MixedState> {
    let volume = state.surface.volume;
    if !(volume > 0.0) {
        return Err(SimError::EmptyTank);
    }
    let (mc, ms) = state.mass(geom);
    Ok(MixedState { c: mc.iter().map(|m| m / volume).collect(), s: ms.iter().map(|m| m / volume).collect(), volume })
}

/// Writes the homogeneous content back onto the grid: zero above the
/// surface, `alpha` times the average in the surface cell, the average below.
/// Accumulator cells are left untouched.
pub fn redistribute(m: &MixedState, geom: &Geometry, state: &mut TankState) -> Result<()> {
    if state.cells() != geom.cells() {
        return Err(SimError::GridMismatch("state does not match the geometry".into()));
    }
    let surf = geom.surface_at_volume(m.volume)?;
    for j in 1..=geom.cells() {
        let f = if j < surf.jbar {
            0.0
        } else if j == surf.jbar {
            surf.alpha
        } else {
            1.0
        };
        for (d, v) in state.c_mut(j).iter_mut().zip(&m.c) {
            *d = f * v;
        }
        for (d, v) in state.s_mut(j).iter_mut().zip(&m.s) {
            *d = f * v;
        }
    }
    state.surface = surf;
    Ok(())
}

/// Step bound for the mixed stage with volume never below `v_min`.
pub fn ode_max_dt(model: &ReactionModel, m3: f64, eps_r: f64, flows: &Flows, v_min: f64) -> f64 {
    let b = model.bounds();
    let dilution = ((flows.q_u - flows.q_bar()).abs() + flows.q_f) / v_min;
    let worst = (b.m_c * (1.0 + m3)).max(b.m_s).max(b.m_tilde / eps_r).max(dilution);
    if worst > 0.0 {
        0.5 / worst
    } else {
        f64::INFINITY
    }
}

/// Oxygen held at a setpoint, as by aeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aeration {
    pub index: usize,
    pub setpoint: f64,
}

/// Reusable buffers plus the mass exchanged by the latest step.
#[derive(Debug, Clone)]
pub struct MixedStepper {
    rc: Vec<f64>,
    rs: Vec<f64>,
    pub ledger_c: MassFlows,
    pub ledger_s: MassFlows,
    /// Soluble mass added by aeration in the latest step.
    pub aeration: Vec<f64>,
}

impl MixedStepper {
    pub fn new(kc: usize, ks: usize) -> Self {
        Self {
            rc: vec![0.0; kc],
            rs: vec![0.0; ks],
            ledger_c: MassFlows::zeros(kc),
            ledger_s: MassFlows::zeros(ks),
            aeration: vec![0.0; ks],
        }
    }

    /// One explicit Euler step of the mixed ODE, in place.
    pub fn step(
        &mut self,
        m: &mut MixedState,
        flows: &Flows,
        model: &ReactionModel,
        tau: f64,
        aeration: Option<Aeration>,
    ) -> Result<()> {
        let v0 = m.volume;
        let v1 = v0 + tau * (flows.q_bar() - flows.q_u);
        if !(v1 > 0.0) {
            return Err(SimError::Drained { volume: v1 });
        }
        model.increments(&m.c, &m.s, &mut self.rc, &mut self.rs);
        let out = flows.q_u + flows.q_e;
        advance(&mut m.c, &flows.c_f, &self.rc, flows, out, v0, v1, tau, &mut self.ledger_c);
        advance(&mut m.s, &flows.s_f, &self.rs, flows, out, v0, v1, tau, &mut self.ledger_s);
        m.volume = v1;
        self.aeration.fill(0.0);
        if let Some(a) = aeration {
            let added = v1 * (a.setpoint - m.s[a.index]);
            self.aeration[a.index] = added;
            m.s[a.index] = a.setpoint;
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn advance(u: &mut [f64], feed: &[f64], r: &[f64], fl: &Flows, out: f64, v0: f64, v1: f64, tau: f64, l: &mut MassFlows) {
    for k in 0..u.len() {
        let inflow = tau * fl.q_f * feed[k];
        let under = tau * fl.q_u * u[k];
        let top = tau * fl.q_e * u[k];
        let react = tau * v0 * r[k];
        let mass = v0 * u[k] + inflow - tau * out * u[k] + react;
        u[k] = mass / v1;
        l.inflow[k] = inflow;
        l.bottom[k] = under;
        l.top[k] = top;
        l.reaction[k] = react;
    }
}
