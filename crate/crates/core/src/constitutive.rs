//! Hindered settling, effective solids stress and the compression
//! primitive `D(X)`.
//!
//! The settling law is the power-law form
//!
//! ```text
//! v_hs(X) = v0 / (1 + (X / x_breve)^eta)        0 <= X < x_hat
//! v_hs(X) = 0                                   X >= x_hat
//! ```
//!
//! and the effective stress is linear above the critical concentration, so
//! `sigma_e'(X) = alpha` for `X > x_c` and zero otherwise. The diffusion
//! coefficient is `d(X) = v_hs(X) rho_s sigma_e'(X) / (g X (rho_s - rho_f))`
//! and `D(X)` is its primitive from `x_c`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Number of nodes in the `D(X)` lookup table.
pub const TABLE_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SettlingParams {
    /// Settling velocity of a dilute suspension (m/s).
    pub v0: f64,
    /// Concentration at which `v_hs` is halved (kg/m^3).
    pub x_breve: f64,
    /// Power-law exponent.
    pub eta_exp: f64,
    /// Critical concentration where the particle network forms (kg/m^3).
    pub x_c: f64,
    /// Slope of the effective solids stress above `x_c` (m^2/s^2).
    pub alpha_comp: f64,
    /// Solids density (kg/m^3).
    pub rho_s: f64,
    /// Fluid density (kg/m^3).
    pub rho_f: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
    /// Maximal solids concentration (kg/m^3).
    pub x_hat: f64,
    /// Width of the band below `x_hat` where particulate reactions are
    /// switched off (kg/m^3).
    pub eps_r: f64,
}

impl Default for SettlingParams {
    fn default() -> Self {
        Self {
            v0: 1.76e-3,
            x_breve: 3.87,
            eta_exp: 3.58,
            x_c: 5.0,
            alpha_comp: 0.2,
            rho_s: 1050.0,
            rho_f: 998.0,
            g: 9.81,
            x_hat: 30.0,
            eps_r: 1.0,
        }
    }
}

impl SettlingParams {
    pub fn validate(&self) -> Result<()> {
        let p = self;
        let all = [
            p.v0, p.x_breve, p.eta_exp, p.x_c, p.alpha_comp, p.rho_s, p.rho_f, p.g, p.x_hat,
            p.eps_r,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Params("settling parameters must be finite".into()));
        }
        let checks: [(bool, &str); 8] = [
            (p.v0 > 0.0, "v0 > 0"),
            (p.x_breve > 0.0, "x_breve > 0"),
            (p.eta_exp > 0.0, "eta_exp > 0"),
            (0.0 < p.x_c && p.x_c < p.x_hat, "0 < x_c < x_hat"),
            (p.x_hat < p.rho_s, "x_hat < rho_s"),
            (p.rho_f < p.rho_s, "rho_f < rho_s"),
            (p.alpha_comp >= 0.0 && p.g > 0.0, "alpha_comp >= 0 and g > 0"),
            (0.0 < p.eps_r && p.eps_r < p.x_hat, "0 < eps_r < x_hat"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(SimError::Params(format!("settling parameters violate {what}")));
            }
        }
        Ok(())
    }

    fn delta_rho(&self) -> f64 {
        self.rho_s - self.rho_f
    }

    /// Power-law settling velocity without the clamp at `x_hat`.
    fn v_power_law(&self, x: f64) -> f64 {
        self.v0 / (1.0 + (x / self.x_breve).powf(self.eta_exp))
    }

    /// `d(X)` on `(x_c, x_hat)`, where `sigma_e' = alpha`.
    fn d_compressive(&self, x: f64) -> f64 {
        self.v_power_law(x) * self.rho_s * self.alpha_comp / (self.g * x * self.delta_rho())
    }
}

pub fn hindered_settling_velocity(x: f64, p: &SettlingParams) -> f64 {
    if x <= 0.0 {
        p.v0
    } else if x >= p.x_hat {
        0.0
    } else {
        p.v_power_law(x)
    }
}

/// `sigma_e'(X)`; the kink at `x_c` belongs to the zero branch.
pub fn effective_stress_derivative(x: f64, p: &SettlingParams) -> f64 {
    if x > p.x_c {
        p.alpha_comp
    } else {
        0.0
    }
}

pub fn diffusion_coefficient(x: f64, p: &SettlingParams) -> f64 {
    if x <= p.x_c || x >= p.x_hat {
        0.0
    } else {
        hindered_settling_velocity(x, p) * p.rho_s * effective_stress_derivative(x, p)
            / (p.g * x * p.delta_rho())
    }
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (xi, wi) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        sum += wi * (f(mid - half * xi) + f(mid + half * xi));
    }
    sum * half
}

/// Constitutive functions with a precomputed table for `D(X)`.
///
/// The table stores `D` and its derivative `d` on a uniform grid over
/// `[x_c, x_hat]` and interpolates with cubic Hermite polynomials, so
/// lookups are O(1) and allocation-free.
#[derive(Debug, Clone)]
pub struct Constitutive {
    params: SettlingParams,
    dx: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Constitutive {
    pub fn new(params: SettlingParams) -> Result<Self> {
        params.validate()?;
        let n = TABLE_POINTS;
        let dx = (params.x_hat - params.x_c) / (n - 1) as f64;
        let node = |i: usize| params.x_c + dx * i as f64;
        let mut values = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 1..n {
            acc += gauss_legendre(|s| params.d_compressive(s), node(i - 1), node(i));
            values.push(acc);
        }
        // One-sided limits from inside (x_c, x_hat); the endpoints carry jumps in d.
        for i in 0..n {
            slopes.push(params.d_compressive(node(i)));
        }
        Ok(Self { params, dx, values, slopes })
    }

    pub fn params(&self) -> &SettlingParams {
        &self.params
    }

    #[inline]
    pub fn v_hs(&self, x: f64) -> f64 {
        hindered_settling_velocity(x, &self.params)
    }

    #[inline]
    pub fn d(&self, x: f64) -> f64 {
        diffusion_coefficient(x, &self.params)
    }

    /// `D(X)` by cubic Hermite interpolation of the table.
    #[inline]
    pub fn big_d(&self, x: f64) -> f64 {
        let p = &self.params;
        if x <= p.x_c {
            return 0.0;
        }
        if x >= p.x_hat {
            return self.values[TABLE_POINTS - 1];
        }
        let s = (x - p.x_c) / self.dx;
        let i = (s as usize).min(TABLE_POINTS - 2);
        let t = s - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.dx, self.slopes[i + 1] * self.dx);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// `D(x_hat)`.
    pub fn big_d_max(&self) -> f64 {
        self.values[TABLE_POINTS - 1]
    }

    /// `max |d|` over `[0, x_hat]`.
    pub fn d_sup(&self) -> f64 {
        self.slopes.iter().copied().fold(0.0, f64::max)
    }

    /// `max |v_hs'|` over `[0, x_hat]`, from the stationary point of the
    /// power law. Infinite when `eta_exp < 1`.
    pub fn v_hs_slope_sup(&self) -> f64 {
        let p = &self.params;
        let eta = p.eta_exp;
        let slope = |u: f64| p.v0 * eta / p.x_breve * u.powf(eta - 1.0) / (1.0 + u.powf(eta)).powi(2);
        if eta < 1.0 {
            f64::INFINITY
        } else if eta == 1.0 {
            p.v0 / p.x_breve
        } else {
            let u_star = ((eta - 1.0) / (eta + 1.0)).powf(1.0 / eta);
            let u_max = p.x_hat / p.x_breve;
            slope(u_star.min(u_max))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SettlingParams {
        SettlingParams::default()
    }

    #[test]
    fn settling_velocity_values() {
        let p = reference();
        assert_eq!(hindered_settling_velocity(0.0, &p), 1.76e-3);
        assert!((hindered_settling_velocity(3.87, &p) - 8.8e-4).abs() < 1e-15);
        // direct evaluation: 1.76e-3 / (1 + (5/3.87)^3.58)
        let oracle = 1.76e-3 / (1.0 + (5.0f64 / 3.87).powf(3.58));
        assert!((hindered_settling_velocity(5.0, &p) - oracle).abs() < 1e-18);
        assert!((oracle - 5.02e-4).abs() < 1e-6);
        assert_eq!(hindered_settling_velocity(p.x_hat, &p), 0.0);
        assert_eq!(hindered_settling_velocity(-1.0, &p), p.v0);
        assert_eq!(hindered_settling_velocity(100.0, &p), 0.0);
    }

    #[test]
    fn stress_derivative_branches() {
        let p = reference();
        assert_eq!(effective_stress_derivative(4.9, &p), 0.0);
        assert_eq!(effective_stress_derivative(5.1, &p), 0.2);
        assert_eq!(effective_stress_derivative(p.x_c, &p), 0.0);
    }

    #[test]
    fn diffusion_values() {
        let p = reference();
        assert_eq!(diffusion_coefficient(3.0, &p), 0.0);
        assert_eq!(diffusion_coefficient(p.x_hat, &p), 0.0);
        let v6 = 1.76e-3 / (1.0 + (6.0f64 / 3.87).powf(3.58));
        let oracle = v6 * 1050.0 * 0.2 / (9.81 * 6.0 * 52.0);
        let got = diffusion_coefficient(6.0, &p);
        assert!((got - oracle).abs() < 1e-18);
        assert!((got - 2.08e-5).abs() < 1e-7);
    }

    #[test]
    fn slope_sup_matches_dense_sampling() {
        let c = Constitutive::new(reference()).unwrap();
        let p = reference();
        let h = 1e-6;
        let mut sampled: f64 = 0.0;
        let n = 200_000;
        for i in 1..n {
            let x = p.x_hat * i as f64 / n as f64;
            if x + h >= p.x_hat {
                break;
            }
            let s = (hindered_settling_velocity(x + h, &p) - hindered_settling_velocity(x - h, &p)) / (2.0 * h);
            sampled = sampled.max(s.abs());
        }
        let bound = c.v_hs_slope_sup();
        assert!(bound >= sampled * (1.0 - 1e-6));
        assert!(bound <= sampled * (1.0 + 1e-4));
    }

    #[test]
    fn d_sup_is_right_limit_at_critical() {
        let c = Constitutive::new(reference()).unwrap();
        let p = reference();
        let limit = diffusion_coefficient(p.x_c * (1.0 + 1e-14), &p);
        assert!((c.d_sup() - limit).abs() / limit < 1e-10);
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = reference();
        p.x_hat = 2000.0;
        assert!(Constitutive::new(p).is_err());
        let mut p = reference();
        p.eps_r = 0.0;
        assert!(Constitutive::new(p).is_err());
    }
}
