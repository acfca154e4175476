//! Modified ASM1 with six particulate and six soluble components.
//!
//! Particulates: `X_I, X_S, X_BH, X_BA, X_P, X_ND`.
//! Solubles: `S_I, S_S, S_O, S_NO, S_NH, S_ND`.
//!
//! Parameters are given in the customary table units (g/m^3, 1/d) and
//! converted to kg/m^3 and 1/s on load.

use serde::{Deserialize, Serialize};

use super::{Component, RateLaw};
use crate::error::{Result, SimError};

pub const ASM1_PARTICULATES: [&str; 6] = ["X_I", "X_S", "X_BH", "X_BA", "X_P", "X_ND"];
pub const ASM1_SOLUBLES: [&str; 6] = ["S_I", "S_S", "S_O", "S_NO", "S_NH", "S_ND"];

const X_S: usize = 1;
const X_BH: usize = 2;
const X_BA: usize = 3;
const X_ND: usize = 5;
const S_S: usize = 1;
const S_O: usize = 2;
const S_NO: usize = 3;
const S_NH: usize = 4;
const S_ND: usize = 5;

const G_PER_KG: f64 = 1000.0;
const S_PER_DAY: f64 = 86_400.0;

/// ASM1 parameters in table units: concentrations in g/m^3, rates in 1/d,
/// `k_a` in m^3/(g d). `k_x` is dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Asm1Params {
    pub y_a: f64,
    pub y_h: f64,
    pub f_p: f64,
    pub i_xb: f64,
    pub i_xp: f64,
    pub mu_h: f64,
    pub k_s: f64,
    pub k_oh: f64,
    pub k_no: f64,
    pub b_h: f64,
    pub eta_g: f64,
    pub eta_h: f64,
    pub k_h: f64,
    pub k_x: f64,
    pub mu_a: f64,
    /// Ammonium half-saturation in the heterotrophic growth switches.
    pub k_nh_bar: f64,
    pub k_nh: f64,
    pub b_a: f64,
    pub k_oa: f64,
    pub k_a: f64,
}

impl Default for Asm1Params {
    fn default() -> Self {
        Self {
            y_a: 0.24,
            y_h: 0.57,
            f_p: 0.1,
            i_xb: 0.07,
            i_xp: 0.06,
            mu_h: 4.0,
            k_s: 20.0,
            k_oh: 0.25,
            k_no: 0.5,
            b_h: 0.5,
            eta_g: 0.8,
            eta_h: 0.35,
            k_h: 1.5,
            k_x: 0.02,
            mu_a: 0.879,
            k_nh_bar: 0.007,
            k_nh: 1.0,
            b_a: 0.132,
            k_oa: 0.5,
            k_a: 0.08,
        }
    }
}

impl Asm1Params {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("y_a", self.y_a),
            ("y_h", self.y_h),
            ("k_s", self.k_s),
            ("k_oh", self.k_oh),
            ("k_no", self.k_no),
            ("k_x", self.k_x),
            ("k_nh_bar", self.k_nh_bar),
            ("k_nh", self.k_nh),
            ("k_oa", self.k_oa),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::Params(format!("ASM1 parameter {name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("f_p", self.f_p),
            ("i_xb", self.i_xb),
            ("i_xp", self.i_xp),
            ("mu_h", self.mu_h),
            ("b_h", self.b_h),
            ("eta_g", self.eta_g),
            ("eta_h", self.eta_h),
            ("k_h", self.k_h),
            ("mu_a", self.mu_a),
            ("b_a", self.b_a),
            ("k_a", self.k_a),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SimError::Params(format!("ASM1 parameter {name} must be non-negative, got {v}")));
            }
        }
        if self.y_h >= 1.0 || self.f_p > 1.0 {
            return Err(SimError::Params("ASM1 requires y_h < 1 and f_p <= 1".into()));
        }
        Ok(())
    }

    /// Converts to SI units (kg/m^3, 1/s).
    pub fn to_si(&self) -> Asm1Rates {
        let c = |v: f64| v / G_PER_KG;
        let r = |v: f64| v / S_PER_DAY;
        Asm1Rates {
            y_a: self.y_a,
            y_h: self.y_h,
            f_p: self.f_p,
            i_xb: self.i_xb,
            i_xp: self.i_xp,
            mu_h: r(self.mu_h),
            k_s: c(self.k_s),
            k_oh: c(self.k_oh),
            k_no: c(self.k_no),
            b_h: r(self.b_h),
            eta_g: self.eta_g,
            eta_h: self.eta_h,
            k_h: r(self.k_h),
            k_x: self.k_x,
            mu_a: r(self.mu_a),
            k_nh_bar: c(self.k_nh_bar),
            k_nh: c(self.k_nh),
            b_a: r(self.b_a),
            k_oa: c(self.k_oa),
            k_a: self.k_a * G_PER_KG / S_PER_DAY,
        }
    }
}

/// ASM1 rate law in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asm1Rates {
    pub y_a: f64,
    pub y_h: f64,
    pub f_p: f64,
    pub i_xb: f64,
    pub i_xp: f64,
    pub mu_h: f64,
    pub k_s: f64,
    pub k_oh: f64,
    pub k_no: f64,
    pub b_h: f64,
    pub eta_g: f64,
    pub eta_h: f64,
    pub k_h: f64,
    pub k_x: f64,
    pub mu_a: f64,
    pub k_nh_bar: f64,
    pub k_nh: f64,
    pub b_a: f64,
    pub k_oa: f64,
    pub k_a: f64,
}

#[inline]
fn monod(u: f64, k: f64) -> f64 {
    u / (k + u)
}

#[inline]
fn inhibit(u: f64, k: f64) -> f64 {
    k / (k + u)
}

impl Asm1Rates {
    /// Row-major (component x process) stoichiometric matrices.
    pub fn stoichiometry(&self) -> (Vec<f64>, Vec<f64>) {
        let (ya, yh, fp) = (self.y_a, self.y_h, self.f_p);
        let nd = self.i_xb - fp * self.i_xp;
        #[rustfmt::skip]
        let sigma_c = vec![
            0.0, 0.0, 0.0, 0.0,      0.0,      0.0, 0.0,  0.0,
            0.0, 0.0, 0.0, 1.0 - fp, 1.0 - fp, 0.0, -1.0, 0.0,
            1.0, 1.0, 0.0, -1.0,     0.0,      0.0, 0.0,  0.0,
            0.0, 0.0, 1.0, 0.0,      -1.0,     0.0, 0.0,  0.0,
            0.0, 0.0, 0.0, fp,       fp,       0.0, 0.0,  0.0,
            0.0, 0.0, 0.0, nd,       nd,       0.0, 0.0,  -1.0,
        ];
        #[rustfmt::skip]
        let sigma_s = vec![
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            -1.0 / yh, -1.0 / yh, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
            -(1.0 - yh) / yh, 0.0, -(4.57 - ya) / ya, 0.0, 0.0, 0.0, 0.0, 0.0,
            0.0, -(1.0 - yh) / (2.86 * yh), 1.0 / ya, 0.0, 0.0, 0.0, 0.0, 0.0,
            -self.i_xb, -self.i_xb, -self.i_xb - 1.0 / ya, 0.0, 0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0,
        ];
        (sigma_c, sigma_s)
    }

    fn hydrolysis_cap(&self) -> f64 {
        self.k_h * (1.0 + self.eta_h) / self.k_x
    }
}

impl RateLaw for Asm1Rates {
    fn n_processes(&self) -> usize {
        8
    }

    fn rates(&self, c: &[f64], s: &[f64], out: &mut [f64]) {
        let p = |i: usize| c[i].max(0.0);
        let q = |i: usize| s[i].max(0.0);
        let (xs, xbh, xba, xnd) = (p(X_S), p(X_BH), p(X_BA), p(X_ND));
        let (ss, so, sno, snh, snd) = (q(S_S), q(S_O), q(S_NO), q(S_NH), q(S_ND));

        let nh_h = monod(snh, self.k_nh_bar);
        let sub = monod(ss, self.k_s);
        let o_on = monod(so, self.k_oh);
        let o_off = inhibit(so, self.k_oh);
        let no = monod(sno, self.k_no);

        out[0] = self.mu_h * nh_h * sub * o_on * xbh;
        out[1] = self.mu_h * nh_h * sub * o_off * no * self.eta_g * xbh;
        out[2] = self.mu_a * monod(snh, self.k_nh) * monod(so, self.k_oa) * xba;
        out[3] = self.b_h * xbh;
        out[4] = self.b_a * xba;
        out[5] = self.k_a * snd * xbh;

        let switch = o_on + self.eta_h * o_off * no;
        let denom = self.k_x * xbh + xs;
        let mu7 = if xs == 0.0 || xbh == 0.0 { 0.0 } else { xs * xbh / denom };
        let mu8 = if xbh == 0.0 { 0.0 } else { xbh * xnd / denom };
        out[6] = self.k_h * mu7 * switch;
        out[7] = self.k_h * mu8 * switch;
    }

    fn rate_cap(&self, process: usize, x_hat: f64) -> f64 {
        match process {
            0 => self.mu_h * x_hat,
            1 => self.mu_h * self.eta_g * x_hat,
            2 => self.mu_a * x_hat,
            3 => self.b_h * x_hat,
            4 => self.b_a * x_hat,
            6 => self.k_h * (1.0 + self.eta_h) * x_hat,
            7 => self.hydrolysis_cap() * x_hat,
            // proportional to S_ND, which has no a priori bound
            _ => f64::INFINITY,
        }
    }

    fn rbar_cap(&self, process: usize, component: Component, x_hat: f64) -> f64 {
        use Component::{Particulate, Soluble};
        match (process, component) {
            (3, Particulate(X_BH)) => self.b_h,
            (4, Particulate(X_BA)) => self.b_a,
            (6, Particulate(X_S)) | (7, Particulate(X_ND)) => self.hydrolysis_cap(),
            (0, Soluble(S_S)) => self.mu_h * x_hat / self.k_s,
            (1, Soluble(S_S)) => self.mu_h * self.eta_g * x_hat / self.k_s,
            (0, Soluble(S_O)) => self.mu_h * x_hat / self.k_oh,
            (2, Soluble(S_O)) => self.mu_a * x_hat / self.k_oa,
            (1, Soluble(S_NO)) => self.mu_h * self.eta_g * x_hat / self.k_no,
            (0, Soluble(S_NH)) => self.mu_h * x_hat / self.k_nh_bar,
            (1, Soluble(S_NH)) => self.mu_h * self.eta_g * x_hat / self.k_nh_bar,
            (2, Soluble(S_NH)) => self.mu_a * x_hat / self.k_nh,
            (5, Soluble(S_ND)) => self.k_a * x_hat,
            _ => f64::INFINITY,
        }
    }

    fn oxygen_index(&self) -> Option<usize> {
        Some(S_O)
    }
}
