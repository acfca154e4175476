//! Time-step restriction.

use std::fmt;

use serde::Serialize;

use crate::constitutive::Constitutive;
use crate::error::{Result, SimError};
use crate::geometry::Geometry;
use crate::reactions::{ReactionBounds, ReactionModel};

/// Everything the bound depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CflInputs {
    pub h: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub a_min: f64,
    /// Smallest cell-averaged area, for the surface-motion bound.
    pub a_cell_min: f64,
    /// `max_t max(|Q_u - Q_f|, Q_u + Q_e)` (m^3/s).
    pub q_norm: f64,
    /// `sup |v_hs'|` on `[0, x_hat]`.
    pub v_slope: f64,
    /// `v_hs(0)`.
    pub v0: f64,
    /// `sup d` on `[0, x_hat]`.
    pub d_sup: f64,
    /// `D(x_hat)`.
    pub big_d_hat: f64,
    pub x_hat: f64,
    pub rho_s: f64,
    pub eps_r: f64,
    pub reactions: ReactionBounds,
}

impl CflInputs {
    pub fn new(geom: &Geometry, cons: &Constitutive, model: &ReactionModel, q_norm: f64) -> Self {
        let p = cons.params();
        let a_cell_min = (1..=geom.cells()).map(|j| geom.cell_area(j)).fold(f64::INFINITY, f64::min);
        Self {
            h: geom.h(),
            m1: geom.m1(),
            m2: geom.m2(),
            m3: geom.m3(),
            a_min: geom.a_min(),
            a_cell_min,
            q_norm,
            v_slope: cons.v_hs_slope_sup(),
            v0: p.v0,
            d_sup: cons.d_sup(),
            big_d_hat: cons.big_d_max(),
            x_hat: p.x_hat,
            rho_s: p.rho_s,
            eps_r: p.eps_r,
            reactions: model.bounds(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CflTerm {
    /// Transport of the particulates.
    Beta1,
    /// Transport of the solubles.
    Beta2,
    ParticulateReactions,
    SolubleReactions,
    SolidsGrowth,
    SurfaceMotion,
}

impl fmt::Display for CflTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CflTerm::Beta1 => "beta1 (particulate transport)",
            CflTerm::Beta2 => "beta2 (soluble transport)",
            CflTerm::ParticulateReactions => "M_C(1+M3) (particulate reactions)",
            CflTerm::SolubleReactions => "M_S (soluble reactions)",
            CflTerm::SolidsGrowth => "M_tilde/eps (solids growth)",
            CflTerm::SurfaceMotion => "surface motion",
        };
        f.write_str(s)
    }
}

/// Largest admissible step and the size of each constraint (all in 1/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CflReport {
    pub tau_max: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub particulate_reactions: f64,
    pub soluble_reactions: f64,
    pub solids_growth: f64,
    pub surface_motion: f64,
    pub dominant: CflTerm,
}

impl CflReport {
    /// `tau / tau_max`; values at or below 1 satisfy the bound.
    pub fn margin(&self, tau: f64) -> f64 {
        tau / self.tau_max
    }
}

pub fn cfl_max_dt(inp: &CflInputs) -> Result<CflReport> {
    if !(inp.x_hat < inp.rho_s) {
        return Err(SimError::Params(format!(
            "maximal concentration {} must be below the solids density {}",
            inp.x_hat, inp.rho_s
        )));
    }
    if !(inp.h > 0.0 && inp.a_min > 0.0 && inp.eps_r > 0.0) {
        return Err(SimError::Params("time-step bound needs h, A_min and eps_r positive".into()));
    }
    let (h, xh, rho) = (inp.h, inp.x_hat, inp.rho_s);
    let flow = inp.q_norm / (inp.a_min * h);
    let beta1 = flow + inp.m1 / h * (inp.v_slope * xh + inp.v0) + 2.0 * inp.m2 / (h * h) * (inp.d_sup * xh + inp.big_d_hat);
    let beta2 = inp.m1.max(1.0) * (rho + xh) / (rho - xh) * flow
        + xh * inp.m1 / (rho - xh) * 2.0 * inp.v0 / h
        + xh * inp.m2 / (rho - xh) * inp.big_d_hat / (h * h);
    let r = inp.reactions;
    let terms = [
        (CflTerm::Beta1, beta1),
        (CflTerm::Beta2, beta2),
        (CflTerm::ParticulateReactions, r.m_c * (1.0 + inp.m3)),
        (CflTerm::SolubleReactions, r.m_s),
        (CflTerm::SolidsGrowth, r.m_tilde / inp.eps_r),
        (CflTerm::SurfaceMotion, inp.q_norm / (inp.a_cell_min * h)),
    ];
    let (dominant, worst) = terms
        .iter()
        .copied()
        .fold((CflTerm::Beta1, f64::NEG_INFINITY), |acc, t| if t.1 > acc.1 { t } else { acc });
    if !(worst.is_finite() && worst > 0.0) {
        return Err(SimError::Params(format!("time-step bound is degenerate ({worst})")));
    }
    Ok(CflReport {
        tau_max: 1.0 / worst,
        beta1,
        beta2,
        particulate_reactions: terms[2].1,
        soluble_reactions: terms[3].1,
        solids_growth: terms[4].1,
        surface_motion: terms[5].1,
        dominant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::SettlingParams;
    use crate::geometry::AreaProfile;

    fn inputs(n: usize, q: f64, model_zero: bool) -> CflInputs {
        let p = SettlingParams::default();
        let cons = Constitutive::new(p).unwrap();
        let geom = Geometry::new(3.0, n, AreaProfile::Constant(395.0)).unwrap();
        let model = if model_zero {
            ReactionModel::zero(6, 6, &p).unwrap()
        } else {
            ReactionModel::asm1(&Default::default(), &p).unwrap()
        };
        CflInputs::new(&geom, &cons, &model, q)
    }

    #[test]
    fn settling_only_bound() {
        let mut inp = inputs(100, 0.0, true);
        inp.d_sup = 0.0;
        inp.big_d_hat = 0.0;
        let r = cfl_max_dt(&inp).unwrap();
        let expect = inp.m1 / inp.h * (inp.v_slope * inp.x_hat + inp.v0);
        assert!((1.0 / r.tau_max - expect).abs() < 1e-12 * expect);
        assert_eq!(r.dominant, CflTerm::Beta1);
    }

    #[test]
    fn compression_term_scales_with_h_squared() {
        let a = cfl_max_dt(&inputs(400, 0.0, true)).unwrap();
        let b = cfl_max_dt(&inputs(800, 0.0, true)).unwrap();
        let ratio = a.tau_max / b.tau_max;
        assert!(ratio > 3.8 && ratio <= 4.0, "{ratio}");
    }

    #[test]
    fn rejects_x_hat_at_density() {
        let mut inp = inputs(10, 0.0, true);
        inp.x_hat = inp.rho_s;
        assert!(cfl_max_dt(&inp).is_err());
    }

    #[test]
    fn asm1_soluble_term_present() {
        let r = cfl_max_dt(&inputs(100, 1570.0 / 3600.0, false)).unwrap();
        assert!(r.soluble_reactions > 0.0);
        assert!(r.tau_max <= 1.0 / r.soluble_reactions);
    }
}
