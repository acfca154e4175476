//! Explicit finite-volume stepper for the moving-surface tank.
//!
//! One step first advances the surface by the net volume change, classifies
//! how the surface moved relative to the cell grid, and then updates:
//!
//! * cells `jbar+2..N` by the conservative flux difference,
//! * the surface cell and its neighbours by pooling the mass of the
//!   trapezoid between the old surface and face `jbar+3/2` and distributing
//!   it over the cells below the new surface,
//! * the underflow and effluent accumulator cells.
//!
//! The split variant then applies an explicit Euler reaction step to the
//! transported values; the unsplit variant evaluates reactions at the old
//! time level inside the same update.
//!
//! Surface cases, by the move of the surface cell index:
//!
//! | case | flows        | `jbar^{n+1} - jbar^n` |
//! |------|--------------|-----------------------|
//! | a    | no draw      | +1 (surface sinks)    |
//! | b    | no draw      | 0                     |
//! | c    | no draw      | -1 (surface rises)    |
//! | d    | draw         | 0                     |
//! | e    | draw         | +1                    |

mod cfl;
mod flux;

use serde::{Deserialize, Serialize};

pub use cfl::{cfl_max_dt, CflInputs, CflReport, CflTerm};
pub use flux::{extraction_coefficients, face_coefficients, interface_fluxes, FaceCoefficients, FluxSet};

use crate::constitutive::{Constitutive, SettlingParams};
use crate::error::{Result, SimError};
use crate::geometry::{Geometry, SurfaceTracker};
use crate::reactions::ReactionModel;

/// Cell concentrations, accumulator cells and the surface.
///
/// Rows `0..N` are cells `1..=N`, row `N` is the underflow cell and row `N+1`
/// the effluent cell. The surface cell stores its mass spread over the whole
/// cell, i.e. `alpha` times the concentration below the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct TankState {
    n: usize,
    kc: usize,
    ks: usize,
    c: Vec<f64>,
    s: Vec<f64>,
    pub surface: SurfaceTracker,
    pub time: f64,
}

impl TankState {
    /// All-zero state with the given surface.
    pub fn zeros(n: usize, kc: usize, ks: usize, surface: SurfaceTracker) -> Self {
        Self { n, kc, ks, c: vec![0.0; (n + 2) * kc], s: vec![0.0; (n + 2) * ks], surface, time: 0.0 }
    }

    pub fn cells(&self) -> usize {
        self.n
    }
    pub fn n_particulate(&self) -> usize {
        self.kc
    }
    pub fn n_soluble(&self) -> usize {
        self.ks
    }

    /// Particulates of cell `j` (`1..=N`).
    #[inline]
    pub fn c(&self, j: usize) -> &[f64] {
        &self.c[(j - 1) * self.kc..j * self.kc]
    }
    #[inline]
    pub fn c_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.c[(j - 1) * self.kc..j * self.kc]
    }
    #[inline]
    pub fn s(&self, j: usize) -> &[f64] {
        &self.s[(j - 1) * self.ks..j * self.ks]
    }
    #[inline]
    pub fn s_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.s[(j - 1) * self.ks..j * self.ks]
    }
    pub fn underflow_c(&self) -> &[f64] {
        self.c(self.n + 1)
    }
    pub fn underflow_s(&self) -> &[f64] {
        self.s(self.n + 1)
    }
    pub fn underflow_c_mut(&mut self) -> &mut [f64] {
        let n = self.n;
        self.c_mut(n + 1)
    }
    pub fn underflow_s_mut(&mut self) -> &mut [f64] {
        let n = self.n;
        self.s_mut(n + 1)
    }
    pub fn effluent_c(&self) -> &[f64] {
        self.c(self.n + 2)
    }
    pub fn effluent_s(&self) -> &[f64] {
        self.s(self.n + 2)
    }
    pub fn effluent_c_mut(&mut self) -> &mut [f64] {
        let n = self.n;
        self.c_mut(n + 2)
    }
    pub fn effluent_s_mut(&mut self) -> &mut [f64] {
        let n = self.n;
        self.s_mut(n + 2)
    }

    /// Total solids of cell `j` (also valid for the accumulator rows `N+1`, `N+2`).
    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.c(j).iter().sum()
    }

    /// Total solids below the surface in cell `j`: the stored value divided
    /// by `alpha` in the surface cell.
    pub fn x_below_surface(&self, j: usize) -> f64 {
        if j == self.surface.jbar {
            self.x(j) / self.surface.alpha
        } else {
            self.x(j)
        }
    }

    /// Tank content per component (kg), cells `1..=N` only.
    pub fn mass(&self, geom: &Geometry) -> (Vec<f64>, Vec<f64>) {
        let mut mc = vec![0.0; self.kc];
        let mut ms = vec![0.0; self.ks];
        for j in 1..=self.n {
            let w = geom.cell_area(j) * geom.h();
            for (m, v) in mc.iter_mut().zip(self.c(j)) {
                *m += w * v;
            }
            for (m, v) in ms.iter_mut().zip(self.s(j)) {
                *m += w * v;
            }
        }
        (mc, ms)
    }

    /// Smallest entry over all cells and accumulators.
    pub fn min_entry(&self) -> f64 {
        self.c.iter().chain(self.s.iter()).copied().fold(f64::INFINITY, f64::min)
    }

    pub fn raw(&self) -> (&[f64], &[f64]) {
        (&self.c, &self.s)
    }
}

/// Volumetric flows (m^3/s) and feed concentrations (kg/m^3), constant over a step.
#[derive(Debug, Clone, PartialEq)]
pub struct Flows {
    pub q_f: f64,
    pub q_u: f64,
    pub q_e: f64,
    pub c_f: Vec<f64>,
    pub s_f: Vec<f64>,
}

impl Flows {
    pub fn closed(kc: usize, ks: usize) -> Self {
        Self { q_f: 0.0, q_u: 0.0, q_e: 0.0, c_f: vec![0.0; kc], s_f: vec![0.0; ks] }
    }

    /// Net surface inflow `Q̄ = Q_f - Q_e`.
    pub fn q_bar(&self) -> f64 {
        self.q_f - self.q_e
    }

    /// The flow term of the time-step bound, `max(|Q_u - Q_f|, Q_u + Q_e)`.
    pub fn norm(&self) -> f64 {
        (self.q_u - self.q_f).abs().max(self.q_u + self.q_e)
    }

    pub fn validate(&self, kc: usize, ks: usize) -> Result<()> {
        for (name, q) in [("Q_f", self.q_f), ("Q_u", self.q_u), ("Q_e", self.q_e)] {
            if !(q.is_finite() && q >= 0.0) {
                return Err(SimError::Params(format!("{name} must be finite and non-negative, got {q}")));
            }
        }
        if self.q_f > 0.0 && self.q_e > 0.0 {
            return Err(SimError::Params("cannot fill and draw at the same time".into()));
        }
        if self.c_f.len() != kc || self.s_f.len() != ks {
            return Err(SimError::Params("feed vector length does not match the model".into()));
        }
        if self.c_f.iter().chain(self.s_f.iter()).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(SimError::Params("feed concentrations must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Transport step followed by a reaction step.
    #[default]
    Split,
    /// Reactions evaluated at the old time level inside the transport update.
    Unsplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceCase {
    A,
    B,
    C,
    D,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CaseCounters {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub e: u64,
}

impl CaseCounters {
    pub fn record(&mut self, case: SurfaceCase) {
        match case {
            SurfaceCase::A => self.a += 1,
            SurfaceCase::B => self.b += 1,
            SurfaceCase::C => self.c += 1,
            SurfaceCase::D => self.d += 1,
            SurfaceCase::E => self.e += 1,
        }
    }
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d + self.e
    }
    pub fn add(&mut self, o: &CaseCounters) {
        self.a += o.a;
        self.b += o.b;
        self.c += o.c;
        self.d += o.d;
        self.e += o.e;
    }
}

/// Mass exchanged during one step, per component (kg).
///
/// The tank content changes by `inflow - bottom - top + reaction`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MassFlows {
    /// Feed entering at the surface.
    pub inflow: Vec<f64>,
    /// Leaving through the bottom into the underflow.
    pub bottom: Vec<f64>,
    /// Leaving through the surface into the effluent pipe.
    pub top: Vec<f64>,
    /// Produced by reactions.
    pub reaction: Vec<f64>,
}

impl MassFlows {
    pub fn zeros(k: usize) -> Self {
        Self { inflow: vec![0.0; k], bottom: vec![0.0; k], top: vec![0.0; k], reaction: vec![0.0; k] }
    }
    fn clear(&mut self) {
        for v in [&mut self.inflow, &mut self.bottom, &mut self.top, &mut self.reaction] {
            v.fill(0.0);
        }
    }
    /// Net change of tank content implied by the exchanges.
    pub fn net(&self, k: usize) -> f64 {
        self.inflow[k] - self.bottom[k] - self.top[k] + self.reaction[k]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepLedger {
    pub c: MassFlows,
    pub s: MassFlows,
}

/// `X_j` and `W_j = rho_f (1 - X_j / rho_s) - sum_k S_j^(k)` for cells `1..=N`.
pub fn derived_fields(state: &TankState, params: &SettlingParams) -> (Vec<f64>, Vec<f64>) {
    let n = state.cells();
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for j in 1..=n {
        let xj = state.x(j);
        let sj: f64 = state.s(j).iter().sum();
        x.push(xj);
        w.push(params.rho_f * (1.0 - xj / params.rho_s) - sj);
    }
    (x, w)
}

/// Owns the physics and all scratch buffers for stepping one tank.
#[derive(Debug, Clone)]
pub struct Stepper {
    geom: Geometry,
    cons: Constitutive,
    model: ReactionModel,
    variant: Variant,
    kc: usize,
    ks: usize,
    x: Vec<f64>,
    v_hs: Vec<f64>,
    big_d: Vec<f64>,
    phi_c: Vec<f64>,
    phi_s: Vec<f64>,
    next_c: Vec<f64>,
    next_s: Vec<f64>,
    ups_c: Vec<f64>,
    ups_s: Vec<f64>,
    g_c: Vec<f64>,
    g_s: Vec<f64>,
    tmp_c: Vec<f64>,
    tmp_s: Vec<f64>,
    rc: Vec<f64>,
    rs: Vec<f64>,
    ledger: StepLedger,
    counters: CaseCounters,
}

impl Stepper {
    pub fn new(geom: Geometry, cons: Constitutive, model: ReactionModel, variant: Variant) -> Self {
        let n = geom.cells();
        let (kc, ks) = (model.n_particulate(), model.n_soluble());
        Self {
            x: vec![0.0; n + 1],
            v_hs: vec![0.0; n + 1],
            big_d: vec![0.0; n + 1],
            phi_c: vec![0.0; (n + 1) * kc],
            phi_s: vec![0.0; (n + 1) * ks],
            next_c: vec![0.0; (n + 2) * kc],
            next_s: vec![0.0; (n + 2) * ks],
            ups_c: vec![0.0; kc],
            ups_s: vec![0.0; ks],
            g_c: vec![0.0; kc],
            g_s: vec![0.0; ks],
            tmp_c: vec![0.0; kc],
            tmp_s: vec![0.0; ks],
            rc: vec![0.0; kc],
            rs: vec![0.0; ks],
            ledger: StepLedger { c: MassFlows::zeros(kc), s: MassFlows::zeros(ks) },
            counters: CaseCounters::default(),
            geom,
            cons,
            model,
            variant,
            kc,
            ks,
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }
    pub fn constitutive(&self) -> &Constitutive {
        &self.cons
    }
    pub fn model(&self) -> &ReactionModel {
        &self.model
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }
    /// Mass exchanges of the most recent step.
    pub fn ledger(&self) -> &StepLedger {
        &self.ledger
    }
    pub fn counters(&self) -> &CaseCounters {
        &self.counters
    }

    /// A zero state shaped for this stepper.
    pub fn empty_state(&self, surface: SurfaceTracker) -> TankState {
        TankState::zeros(self.geom.cells(), self.kc, self.ks, surface)
    }

    /// Time-step bound for flows bounded by `q_norm`.
    pub fn cfl(&self, q_norm: f64) -> Result<CflReport> {
        cfl_max_dt(&CflInputs::new(&self.geom, &self.cons, &self.model, q_norm))
    }

    /// Advances `state` by `tau`. On error the state is left unchanged.
    pub fn step(&mut self, state: &mut TankState, flows: &Flows, tau: f64) -> Result<SurfaceCase> {
        let n = self.geom.cells();
        let (kc, ks) = (self.kc, self.ks);
        if state.n != n || state.kc != kc || state.ks != ks {
            return Err(SimError::GridMismatch("state does not match the stepper".into()));
        }
        let h = self.geom.h();
        let rho = self.cons.params().rho_s;
        let s0 = state.surface;
        let jb = s0.jbar;
        if jb >= n {
            return Err(SimError::SurfaceAtBottom { cell: jb });
        }
        let drawing = flows.q_e > 0.0;
        let s1 = self.geom.advance_surface(&s0, (flows.q_bar() - flows.q_u) * tau)?;
        let case = match (drawing, s1.jbar as isize - jb as isize) {
            (false, 1) => SurfaceCase::A,
            (false, 0) => SurfaceCase::B,
            (false, -1) => SurfaceCase::C,
            (true, 0) => SurfaceCase::D,
            (true, 1) => SurfaceCase::E,
            _ => return Err(SimError::SurfaceJump { from: jb, to: s1.jbar }),
        };

        for j in jb..=n {
            let x = state.x(j);
            if !(x < rho) {
                return Err(SimError::DensityBreach { cell: j, x, rho });
            }
            self.x[j] = x;
            self.v_hs[j] = self.cons.v_hs(x);
            self.big_d[j] = self.cons.big_d(x);
        }

        // fluxes through faces jbar+1 ..= N (face k sits at z = k h)
        for k in jb + 1..=n {
            let (c_up, c_dn, s_up, s_dn) = if k < n {
                let area = self.geom.face_area(k);
                let fc = flux::face_from_tables(
                    self.x[k],
                    self.x[k + 1],
                    self.big_d[k],
                    self.big_d[k + 1],
                    self.v_hs[k + 1],
                    flows.q_u / area,
                    1.0,
                    area,
                    h,
                    rho,
                );
                (fc.c_up, fc.c_dn, fc.s_up, fc.s_dn)
            } else {
                (flows.q_u, 0.0, flows.q_u, 0.0)
            };
            for i in 0..kc {
                let dn = if k < n { state.c[k * kc + i] } else { 0.0 };
                self.phi_c[k * kc + i] = c_up * state.c[(k - 1) * kc + i] + c_dn * dn;
            }
            for i in 0..ks {
                let dn = if k < n { state.s[k * ks + i] } else { 0.0 };
                self.phi_s[k * ks + i] = s_up * state.s[(k - 1) * ks + i] + s_dn * dn;
            }
        }

        let (e_c, e_s) = if drawing {
            flux::extraction_from_tables(
                self.geom.face_area(jb),
                self.x[jb + 1],
                self.v_hs[jb + 1],
                self.big_d[jb + 1],
                flows.q_e,
                h,
                rho,
            )
        } else {
            (0.0, 0.0)
        };

        self.ledger.c.clear();
        self.ledger.s.clear();
        let reacting = !self.model.is_zero();
        let unsplit = self.variant == Variant::Unsplit && reacting;
        let a_jb = self.geom.cell_area(jb);
        let a_next = self.geom.cell_area(jb + 1);
        let ratio = a_next / a_jb;
        let lam_jb = tau / (a_jb * h);

        // pooled trapezoid content, per unit of A_jbar h
        if unsplit {
            self.surface_reaction(&state.c, &state.s, jb, s0.alpha, tau);
        }
        for i in 0..kc {
            let c_below = state.c[jb * kc + i];
            let phi_out = self.phi_c[(jb + 1) * kc + i];
            let psi = if drawing { e_c * c_below - phi_out } else { flows.q_f * flows.c_f[i] - phi_out };
            let mut u = state.c[(jb - 1) * kc + i] + ratio * c_below + lam_jb * psi;
            if unsplit {
                u += self.g_c[i];
            }
            self.ups_c[i] = u;
            self.ledger.c.inflow[i] = if drawing { 0.0 } else { tau * flows.q_f * flows.c_f[i] };
            self.ledger.c.top[i] = if drawing { -tau * e_c * c_below } else { 0.0 };
        }
        for i in 0..ks {
            let s_below = state.s[jb * ks + i];
            let phi_out = self.phi_s[(jb + 1) * ks + i];
            let psi = if drawing { e_s * s_below - phi_out } else { flows.q_f * flows.s_f[i] - phi_out };
            let mut u = state.s[(jb - 1) * ks + i] + ratio * s_below + lam_jb * psi;
            if unsplit {
                u += self.g_s[i];
            }
            self.ups_s[i] = u;
            self.ledger.s.inflow[i] = if drawing { 0.0 } else { tau * flows.q_f * flows.s_f[i] };
            self.ledger.s.top[i] = if drawing { -tau * e_s * s_below } else { 0.0 };
        }
        if unsplit {
            let w = a_jb * h;
            for i in 0..kc {
                self.ledger.c.reaction[i] += w * self.g_c[i];
            }
            for i in 0..ks {
                self.ledger.s.reaction[i] += w * self.g_s[i];
            }
        }

        // cells strictly below the trapezoid
        for j in jb + 2..=n {
            let lam = tau / (self.geom.cell_area(j) * h);
            let (rc0, rc1) = ((j - 1) * kc, j * kc);
            let (rs0, rs1) = ((j - 1) * ks, j * ks);
            for i in 0..kc {
                self.next_c[rc0 + i] = state.c[rc0 + i] - lam * (self.phi_c[j * kc + i] - self.phi_c[(j - 1) * kc + i]);
            }
            for i in 0..ks {
                self.next_s[rs0 + i] = state.s[rs0 + i] - lam * (self.phi_s[j * ks + i] - self.phi_s[(j - 1) * ks + i]);
            }
            if unsplit {
                self.model.increments(&state.c[rc0..rc1], &state.s[rs0..rs1], &mut self.rc, &mut self.rs);
                let w = self.geom.cell_area(j) * h * tau;
                for i in 0..kc {
                    self.next_c[rc0 + i] += tau * self.rc[i];
                    self.ledger.c.reaction[i] += w * self.rc[i];
                }
                for i in 0..ks {
                    self.next_s[rs0 + i] += tau * self.rs[i];
                    self.ledger.s.reaction[i] += w * self.rs[i];
                }
            }
        }

        // cells above the trapezoid are empty
        let above = jb.saturating_sub(2);
        self.next_c[..above * kc].fill(0.0);
        self.next_s[..above * ks].fill(0.0);

        let omega = self.omegas(case, jb, s1.alpha);
        for (off, &w) in omega.iter().enumerate() {
            // cell jbar - 1 + off
            let row = jb + off;
            if row < 2 {
                continue;
            }
            let row = row - 2;
            for i in 0..kc {
                self.next_c[row * kc + i] = w * self.ups_c[i];
            }
            for i in 0..ks {
                self.next_s[row * ks + i] = w * self.ups_s[i];
            }
        }

        // underflow
        let lam_u = tau / (self.geom.cell_area(n + 1) * h);
        for i in 0..kc {
            let old = state.c[n * kc + i];
            let phi = self.phi_c[n * kc + i];
            self.next_c[n * kc + i] = old + lam_u * (phi - flows.q_u * old);
            self.ledger.c.bottom[i] = tau * phi;
        }
        for i in 0..ks {
            let old = state.s[n * ks + i];
            let phi = self.phi_s[n * ks + i];
            self.next_s[n * ks + i] = old + lam_u * (phi - flows.q_u * old);
            self.ledger.s.bottom[i] = tau * phi;
        }

        // effluent pipe cell, sized A_1 h
        let lam_e = tau / (self.geom.cell_area(1) * h);
        for i in 0..kc {
            let r = (n + 1) * kc + i;
            self.next_c[r] = if drawing {
                let old = state.c[r];
                old - lam_e * (flows.q_e * old + e_c * state.c[jb * kc + i])
            } else {
                0.0
            };
        }
        for i in 0..ks {
            let r = (n + 1) * ks + i;
            self.next_s[r] = if drawing {
                let old = state.s[r];
                old - lam_e * (flows.q_e * old + e_s * state.s[jb * ks + i])
            } else {
                0.0
            };
        }

        if reacting && self.variant == Variant::Split {
            // fill fraction of cell jbar after transport, matching the content it now holds
            let fill = match case {
                SurfaceCase::B | SurfaceCase::D => s1.alpha,
                _ => 1.0,
            };
            self.split_reactions(jb, n, fill, &omega, tau);
        }

        std::mem::swap(&mut state.c, &mut self.next_c);
        std::mem::swap(&mut state.s, &mut self.next_s);
        state.surface = s1;
        state.time += tau;
        self.counters.record(case);
        Ok(case)
    }

    /// Distribution weights for cells `jbar-1, jbar, jbar+1`.
    fn omegas(&self, case: SurfaceCase, jb: usize, alpha1: f64) -> [f64; 3] {
        let a = |j: usize| self.geom.cell_area(j);
        match case {
            SurfaceCase::A | SurfaceCase::E => [0.0, 0.0, a(jb) / a(jb + 1)],
            SurfaceCase::B | SurfaceCase::D => {
                let eta = a(jb) / (alpha1 * a(jb) + a(jb + 1));
                [0.0, alpha1 * eta, eta]
            }
            SurfaceCase::C => {
                let theta = a(jb) / (alpha1 * a(jb - 1) + a(jb) + a(jb + 1));
                [alpha1 * theta, theta, theta]
            }
        }
    }

    /// `tau (alpha R(U_jbar / alpha) + A_{jbar+1}/A_jbar R(U_{jbar+1}))` into `g_c`, `g_s`.
    fn surface_reaction(&mut self, c: &[f64], s: &[f64], jb: usize, alpha: f64, tau: f64) {
        let (kc, ks) = (self.kc, self.ks);
        let ratio = self.geom.cell_area(jb + 1) / self.geom.cell_area(jb);
        for i in 0..kc {
            self.tmp_c[i] = c[(jb - 1) * kc + i] / alpha;
        }
        for i in 0..ks {
            self.tmp_s[i] = s[(jb - 1) * ks + i] / alpha;
        }
        self.model.increments(&self.tmp_c, &self.tmp_s, &mut self.rc, &mut self.rs);
        for i in 0..kc {
            self.g_c[i] = alpha * self.rc[i];
        }
        for i in 0..ks {
            self.g_s[i] = alpha * self.rs[i];
        }
        self.model.increments(&c[jb * kc..(jb + 1) * kc], &s[jb * ks..(jb + 1) * ks], &mut self.rc, &mut self.rs);
        for i in 0..kc {
            self.g_c[i] = tau * (self.g_c[i] + ratio * self.rc[i]);
        }
        for i in 0..ks {
            self.g_s[i] = tau * (self.g_s[i] + ratio * self.rs[i]);
        }
    }

    /// Reaction half of the split step, applied in place to `next_c`, `next_s`.
    fn split_reactions(&mut self, jb: usize, n: usize, fill: f64, omega: &[f64; 3], tau: f64) {
        let (kc, ks) = (self.kc, self.ks);
        let h = self.geom.h();
        for j in jb + 2..=n {
            let (rc0, rs0) = ((j - 1) * kc, (j - 1) * ks);
            self.model.increments(
                &self.next_c[rc0..rc0 + kc],
                &self.next_s[rs0..rs0 + ks],
                &mut self.rc,
                &mut self.rs,
            );
            let w = self.geom.cell_area(j) * h * tau;
            for i in 0..kc {
                self.next_c[rc0 + i] += tau * self.rc[i];
                self.ledger.c.reaction[i] += w * self.rc[i];
            }
            for i in 0..ks {
                self.next_s[rs0 + i] += tau * self.rs[i];
                self.ledger.s.reaction[i] += w * self.rs[i];
            }
        }
        let (c, s) = (std::mem::take(&mut self.next_c), std::mem::take(&mut self.next_s));
        self.surface_reaction(&c, &s, jb, fill, tau);
        self.next_c = c;
        self.next_s = s;
        for (off, &w) in omega.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let row = jb + off - 2;
            for i in 0..kc {
                self.next_c[row * kc + i] += w * self.g_c[i];
            }
            for i in 0..ks {
                self.next_s[row * ks + i] += w * self.g_s[i];
            }
        }
        let w = self.geom.cell_area(jb) * h;
        for i in 0..kc {
            self.ledger.c.reaction[i] += w * self.g_c[i];
        }
        for i in 0..ks {
            self.ledger.s.reaction[i] += w * self.g_s[i];
        }
    }
}

#[cfg(test)]
mod tests;
