//! Scenario description: tank, physics, kinetics, initial profiles and the
//! stage schedule.
//!
//! Times are given in hours and flows in m^3/h, the units operators use for
//! SBR schedules. They are converted to seconds once, when the run is set up,
//! so a scenario serializes back to exactly the numbers it was read from.

use serde::{Deserialize, Serialize};

use crate::constitutive::SettlingParams;
use crate::error::{Result, SimError};
use crate::geometry::{AreaProfile, Geometry};
use crate::reactions::{Asm1Params, ReactionModel};
use crate::scheme::{Flows, TankState};

pub const SCHEMA_VERSION: u32 = 1;
pub const SECONDS_PER_HOUR: f64 = 3600.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    /// Free text about where the numbers come from.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub settling: SettlingParams,
    pub reactions: ReactionSpec,
    pub initial: InitialSpec,
    pub stages: Vec<StageSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub depth_m: f64,
    pub cells: usize,
    pub area_m2: AreaProfile,
}

/// Kinetics. Both variants carry the twelve ASM1 components, so output
/// layouts do not depend on whether reactions are switched on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReactionSpec {
    None,
    Asm1 {
        #[serde(default)]
        params: Asm1Params,
    },
}

/// Initial content: piecewise-constant concentrations between
/// `surface_depth_m` and the bottom. Depth is measured downward from the top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub surface_depth_m: f64,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub z_from_m: f64,
    pub z_to_m: f64,
    pub c: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    Fill,
    React,
    Settle,
    Draw,
    Idle,
}

/// Whether a stage is resolved in space or treated as fully mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Pde,
    Ode,
}

/// Feed composition: `C_f = x_f * c_fractions`, `S_f = s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Feed {
    pub x_f: f64,
    pub c_fractions: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub name: String,
    pub kind: StageKind,
    pub start_h: f64,
    pub end_h: f64,
    #[serde(default)]
    pub q_f_m3h: f64,
    #[serde(default)]
    pub q_u_m3h: f64,
    #[serde(default)]
    pub q_e_m3h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feed: Option<Feed>,
    pub regime: Regime,
    /// Hold dissolved oxygen at the setpoint (mixed stages only).
    #[serde(default)]
    pub aerated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub snapshot_every_s: f64,
    /// Dissolved-oxygen setpoint under aeration (kg/m^3).
    pub oxygen_setpoint: f64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { snapshot_every_s: 10.0, oxygen_setpoint: 0.01 }
    }
}

impl StageSpec {
    pub fn start_s(&self) -> f64 {
        self.start_h * SECONDS_PER_HOUR
    }
    pub fn end_s(&self) -> f64 {
        self.end_h * SECONDS_PER_HOUR
    }

    /// Flows in SI units for a model with `kc` particulates and `ks` solubles.
    pub fn flows(&self, kc: usize, ks: usize) -> Flows {
        let (c_f, s_f) = match &self.feed {
            Some(f) => (f.c_fractions.iter().map(|v| f.x_f * v).collect(), f.s.clone()),
            None => (vec![0.0; kc], vec![0.0; ks]),
        };
        Flows {
            q_f: self.q_f_m3h / SECONDS_PER_HOUR,
            q_u: self.q_u_m3h / SECONDS_PER_HOUR,
            q_e: self.q_e_m3h / SECONDS_PER_HOUR,
            c_f,
            s_f,
        }
    }
}

fn invalid(path: impl Into<String>, msg: impl std::fmt::Display) -> SimError {
    SimError::Params(format!("{}: {msg}", path.into()))
}

fn check_vec(path: &str, v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(invalid(path, format!("expected {len} entries, got {}", v.len())));
    }
    if let Some(i) = v.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(invalid(format!("{path}[{i}]"), "must be finite and non-negative"));
    }
    Ok(())
}

impl Scenario {
    /// Copy with a different number of cells.
    pub fn with_cells(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.geometry.cells = n;
        s
    }

    pub fn build_geometry(&self) -> Result<Geometry> {
        Geometry::new(self.geometry.depth_m, self.geometry.cells, self.geometry.area_m2.clone())
    }

    pub fn build_model(&self) -> Result<ReactionModel> {
        match &self.reactions {
            ReactionSpec::None => ReactionModel::zero_asm1_layout(&self.settling),
            ReactionSpec::Asm1 { params } => ReactionModel::asm1(params, &self.settling),
        }
    }

    pub fn start_s(&self) -> f64 {
        self.stages.first().map_or(0.0, |s| s.start_s())
    }
    pub fn end_s(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.end_s())
    }

    /// Worst-case flow magnitude over the schedule (m^3/s).
    pub fn q_norm(&self, kc: usize, ks: usize) -> f64 {
        self.stages.iter().map(|s| s.flows(kc, ks).norm()).fold(0.0, f64::max)
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        self.settling.validate().map_err(|e| invalid("settling", e))?;
        let geom = self.build_geometry().map_err(|e| invalid("geometry", e))?;
        let model = self.build_model().map_err(|e| invalid("reactions", e))?;
        let (kc, ks) = (model.n_particulate(), model.n_soluble());

        let ini = &self.initial;
        if !(0.0..geom.depth()).contains(&ini.surface_depth_m) {
            return Err(invalid("initial.surface_depth_m", format!("must lie in [0, {})", geom.depth())));
        }
        for (i, seg) in ini.segments.iter().enumerate() {
            let p = format!("initial.segments[{i}]");
            if !(seg.z_from_m < seg.z_to_m && seg.z_from_m >= ini.surface_depth_m && seg.z_to_m <= geom.depth()) {
                return Err(invalid(&p, "segment must be non-empty and lie between the surface and the bottom"));
            }
            check_vec(&format!("{p}.c"), &seg.c, kc)?;
            check_vec(&format!("{p}.s"), &seg.s, ks)?;
            let x: f64 = seg.c.iter().sum();
            if x > self.settling.x_hat {
                return Err(invalid(&p, format!("solids {x} exceed the maximal concentration {}", self.settling.x_hat)));
            }
        }
        for (i, a) in ini.segments.iter().enumerate() {
            for b in &ini.segments[i + 1..] {
                if a.z_from_m < b.z_to_m && b.z_from_m < a.z_to_m {
                    return Err(invalid("initial.segments", "segments overlap"));
                }
            }
        }

        if self.stages.is_empty() {
            return Err(invalid("stages", "at least one stage is required"));
        }
        for (i, st) in self.stages.iter().enumerate() {
            let p = format!("stages[{i}] '{}'", st.name);
            if !(st.start_h.is_finite() && st.end_h.is_finite() && st.start_h >= 0.0 && st.end_h > st.start_h) {
                return Err(invalid(&p, "needs 0 <= start_h < end_h"));
            }
            for (q, name) in [(st.q_f_m3h, "q_f_m3h"), (st.q_u_m3h, "q_u_m3h"), (st.q_e_m3h, "q_e_m3h")] {
                if !(q.is_finite() && q >= 0.0) {
                    return Err(invalid(format!("{p}.{name}"), "must be finite and non-negative"));
                }
            }
            if st.q_f_m3h > 0.0 && st.q_e_m3h > 0.0 {
                return Err(invalid(&p, "cannot fill and draw at the same time"));
            }
            match (&st.feed, st.q_f_m3h > 0.0) {
                (Some(f), _) => {
                    if !(f.x_f.is_finite() && f.x_f >= 0.0) {
                        return Err(invalid(format!("{p}.feed.x_f"), "must be finite and non-negative"));
                    }
                    check_vec(&format!("{p}.feed.c_fractions"), &f.c_fractions, kc)?;
                    check_vec(&format!("{p}.feed.s"), &f.s, ks)?;
                    let x: f64 = f.x_f * f.c_fractions.iter().sum::<f64>();
                    if x > self.settling.x_hat {
                        return Err(invalid(format!("{p}.feed"), "feed solids exceed the maximal concentration"));
                    }
                }
                (None, true) => return Err(invalid(&p, "a stage with inflow needs a feed")),
                (None, false) => {}
            }
            if st.aerated && st.regime != Regime::Ode {
                return Err(invalid(&p, "aeration is only modelled in mixed (ode) stages"));
            }
        }
        for w in self.stages.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.start_h < a.end_h {
                return Err(invalid("stages", format!("stages '{}' and '{}' overlap", a.name, b.name)));
            }
            if b.start_h > a.end_h {
                return Err(invalid("stages", format!("gap between stages '{}' and '{}'", a.name, b.name)));
            }
        }
        let out = &self.output;
        if !(out.snapshot_every_s.is_finite() && out.snapshot_every_s > 0.0) {
            return Err(invalid("output.snapshot_every_s", "must be positive"));
        }
        if !(out.oxygen_setpoint.is_finite() && out.oxygen_setpoint >= 0.0) {
            return Err(invalid("output.oxygen_setpoint", "must be non-negative"));
        }
        if self.stages.iter().any(|s| s.aerated) && model.oxygen_index().is_none() {
            return Err(invalid("stages", "aeration requested but the reaction model has no oxygen component"));
        }
        Ok(())
    }

    /// Cell averages of the initial profiles. The surface cell holds the
    /// mass of its submerged part divided by the full cell volume.
    pub fn initial_state(&self, geom: &Geometry, kc: usize, ks: usize) -> Result<TankState> {
        let surf = geom.surface_at_depth(self.initial.surface_depth_m)?;
        let mut state = TankState::zeros(geom.cells(), kc, ks, surf);
        let h = geom.h();
        let profile = geom.profile();
        for j in surf.jbar..=geom.cells() {
            let (top, bot) = ((j - 1) as f64 * h, j as f64 * h);
            let cell_volume = geom.cell_area(j) * h;
            for seg in &self.initial.segments {
                let lo = top.max(seg.z_from_m).max(self.initial.surface_depth_m);
                let hi = bot.min(seg.z_to_m);
                if hi <= lo {
                    continue;
                }
                let w = if lo == top && hi == bot { 1.0 } else { profile.integral(lo, hi) / cell_volume };
                for (d, v) in state.c_mut(j).iter_mut().zip(&seg.c) {
                    *d += w * v;
                }
                for (d, v) in state.s_mut(j).iter_mut().zip(&seg.s) {
                    *d += w * v;
                }
            }
        }
        state.time = self.start_s();
        Ok(state)
    }
}
