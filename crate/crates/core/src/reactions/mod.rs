//! Reaction models `R_C = sigma_C r(C, S)`, `R_S = sigma_S r(C, S)`.
//!
//! A model is a pair of constant stoichiometric matrices plus a rate law.
//! Rate laws must have the positivity structure: whenever process `l`
//! consumes component `k`, the rate factors as `r^(l) = rbar^(l) * u_k` with
//! `rbar^(l)` bounded on the invariant region. The caps a law reports for
//! `rbar` and `r` feed the time-step bound.

mod asm1;

use std::fmt;
use std::sync::Arc;

pub use asm1::{Asm1Params, Asm1Rates, ASM1_PARTICULATES, ASM1_SOLUBLES};

use crate::constitutive::SettlingParams;
use crate::error::{Result, SimError};

/// Upper limit on the number of processes; rate evaluation uses a stack buffer.
pub const MAX_PROCESSES: usize = 32;

/// A state component, by group and index within the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Particulate(usize),
    Soluble(usize),
}

/// Process rates as a function of the local state.
pub trait RateLaw: Send + Sync + fmt::Debug {
    fn n_processes(&self) -> usize;

    /// Writes the `n_processes()` non-negative rates into `out`.
    fn rates(&self, c: &[f64], s: &[f64], out: &mut [f64]);

    /// Supremum of `r^(l)` over states with total solids at most `x_hat`.
    fn rate_cap(&self, process: usize, x_hat: f64) -> f64;

    /// Supremum of `rbar^(l) = r^(l) / u_k` for a component the process consumes.
    fn rbar_cap(&self, process: usize, component: Component, x_hat: f64) -> f64;

    /// Index of dissolved oxygen among the solubles, if the model has one.
    fn oxygen_index(&self) -> Option<usize> {
        None
    }
}

#[derive(Debug)]
struct NoRates;

impl RateLaw for NoRates {
    fn n_processes(&self) -> usize {
        0
    }
    fn rates(&self, _c: &[f64], _s: &[f64], _out: &mut [f64]) {}
    fn rate_cap(&self, _process: usize, _x_hat: f64) -> f64 {
        0.0
    }
    fn rbar_cap(&self, _process: usize, _component: Component, _x_hat: f64) -> f64 {
        0.0
    }
}

/// Bound constants used by the time-step restriction.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct ReactionBounds {
    /// `max_k sum_{l consumes k} |sigma_C(k,l)| sup rbar^(l)` (1/s).
    pub m_c: f64,
    /// Same for the solubles (1/s).
    pub m_s: f64,
    /// `sup sum_k R_C^(k)` (kg/(m^3 s)).
    pub m_tilde: f64,
}

#[derive(Clone)]
pub struct ReactionModel {
    name: String,
    particulate_names: Vec<String>,
    soluble_names: Vec<String>,
    n_proc: usize,
    sigma_c: Vec<f64>,
    sigma_s: Vec<f64>,
    law: Arc<dyn RateLaw>,
    x_hat: f64,
    x_cutoff: f64,
    bounds: ReactionBounds,
}

impl fmt::Debug for ReactionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReactionModel")
            .field("name", &self.name)
            .field("n_particulate", &self.particulate_names.len())
            .field("n_soluble", &self.soluble_names.len())
            .field("n_processes", &self.n_proc)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl ReactionModel {
    /// General constructor. `sigma_c` and `sigma_s` are row-major
    /// (component x process).
    pub fn new(
        name: impl Into<String>,
        particulate_names: Vec<String>,
        soluble_names: Vec<String>,
        sigma_c: Vec<f64>,
        sigma_s: Vec<f64>,
        law: Arc<dyn RateLaw>,
        settling: &SettlingParams,
    ) -> Result<Self> {
        let n_proc = law.n_processes();
        let (kc, ks) = (particulate_names.len(), soluble_names.len());
        if kc == 0 {
            return Err(SimError::Params("at least one particulate component is required".into()));
        }
        if n_proc > MAX_PROCESSES {
            return Err(SimError::Params(format!(
                "{n_proc} processes exceed the supported maximum {MAX_PROCESSES}"
            )));
        }
        if sigma_c.len() != kc * n_proc || sigma_s.len() != ks * n_proc {
            return Err(SimError::Params("stoichiometric matrix shape mismatch".into()));
        }
        if sigma_c.iter().chain(sigma_s.iter()).any(|v| !v.is_finite()) {
            return Err(SimError::Params("stoichiometric coefficients must be finite".into()));
        }
        let mut model = Self {
            name: name.into(),
            particulate_names,
            soluble_names,
            n_proc,
            sigma_c,
            sigma_s,
            law,
            x_hat: settling.x_hat,
            x_cutoff: settling.x_hat - settling.eps_r,
            bounds: ReactionBounds::default(),
        };
        model.bounds = model.compute_bounds();
        Ok(model)
    }

    /// A model without reactions.
    pub fn zero(n_particulate: usize, n_soluble: usize, settling: &SettlingParams) -> Result<Self> {
        let pn = (1..=n_particulate).map(|i| format!("C{i}")).collect();
        let sn = (1..=n_soluble).map(|i| format!("S{i}")).collect();
        Self::new("none", pn, sn, Vec::new(), Vec::new(), Arc::new(NoRates), settling)
    }

    /// A model without reactions using the ASM1 component roster.
    pub fn zero_asm1_layout(settling: &SettlingParams) -> Result<Self> {
        Self::new(
            "none",
            ASM1_PARTICULATES.iter().map(|s| s.to_string()).collect(),
            ASM1_SOLUBLES.iter().map(|s| s.to_string()).collect(),
            Vec::new(),
            Vec::new(),
            Arc::new(NoRates),
            settling,
        )
    }

    /// Modified ASM1 with the given (table-unit) parameters.
    pub fn asm1(params: &Asm1Params, settling: &SettlingParams) -> Result<Self> {
        params.validate()?;
        let rates = params.to_si();
        let (sigma_c, sigma_s) = rates.stoichiometry();
        Self::new(
            "asm1",
            ASM1_PARTICULATES.iter().map(|s| s.to_string()).collect(),
            ASM1_SOLUBLES.iter().map(|s| s.to_string()).collect(),
            sigma_c,
            sigma_s,
            Arc::new(rates),
            settling,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n_particulate(&self) -> usize {
        self.particulate_names.len()
    }
    pub fn n_soluble(&self) -> usize {
        self.soluble_names.len()
    }
    pub fn n_processes(&self) -> usize {
        self.n_proc
    }
    pub fn particulate_names(&self) -> &[String] {
        &self.particulate_names
    }
    pub fn soluble_names(&self) -> &[String] {
        &self.soluble_names
    }
    pub fn is_zero(&self) -> bool {
        self.n_proc == 0
    }
    pub fn oxygen_index(&self) -> Option<usize> {
        self.law.oxygen_index()
    }
    pub fn sigma_c(&self, k: usize, l: usize) -> f64 {
        self.sigma_c[k * self.n_proc + l]
    }
    pub fn sigma_s(&self, k: usize, l: usize) -> f64 {
        self.sigma_s[k * self.n_proc + l]
    }
    pub fn law(&self) -> &dyn RateLaw {
        self.law.as_ref()
    }
    /// Total solids at or above which particulate reactions vanish.
    pub fn cutoff(&self) -> f64 {
        self.x_cutoff
    }

    pub fn rate_vector(&self, c: &[f64], s: &[f64], out: &mut [f64]) {
        self.law.rates(c, s, &mut out[..self.n_proc]);
    }

    /// Writes `R_C` and `R_S` for one state.
    #[inline]
    pub fn increments(&self, c: &[f64], s: &[f64], rc: &mut [f64], rs: &mut [f64]) {
        rc.fill(0.0);
        rs.fill(0.0);
        if self.n_proc == 0 {
            return;
        }
        let mut r = [0.0; MAX_PROCESSES];
        let r = &mut r[..self.n_proc];
        self.law.rates(c, s, r);
        let x: f64 = c.iter().sum();
        if x < self.x_cutoff {
            for (k, out) in rc.iter_mut().enumerate() {
                let row = &self.sigma_c[k * self.n_proc..(k + 1) * self.n_proc];
                *out = row.iter().zip(r.iter()).map(|(a, b)| a * b).sum();
            }
        }
        for (k, out) in rs.iter_mut().enumerate() {
            let row = &self.sigma_s[k * self.n_proc..(k + 1) * self.n_proc];
            *out = row.iter().zip(r.iter()).map(|(a, b)| a * b).sum();
        }
    }

    pub fn bounds(&self) -> ReactionBounds {
        self.bounds
    }

    fn compute_bounds(&self) -> ReactionBounds {
        let np = self.n_proc;
        let group = |sigma: &[f64], ncomp: usize, wrap: fn(usize) -> Component| -> f64 {
            (0..ncomp)
                .map(|k| {
                    (0..np)
                        .filter(|&l| sigma[k * np + l] < 0.0)
                        .map(|l| sigma[k * np + l].abs() * self.law.rbar_cap(l, wrap(k), self.x_hat))
                        .sum::<f64>()
                })
                .fold(0.0, f64::max)
        };
        let m_c = group(&self.sigma_c, self.n_particulate(), Component::Particulate);
        let m_s = group(&self.sigma_s, self.n_soluble(), Component::Soluble);
        let m_tilde = (0..np)
            .map(|l| {
                let col: f64 = (0..self.n_particulate()).map(|k| self.sigma_c[k * np + l]).sum();
                if col > 0.0 {
                    col * self.law.rate_cap(l, self.x_hat)
                } else {
                    0.0
                }
            })
            .sum();
        ReactionBounds { m_c, m_s, m_tilde }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_has_zero_bounds_and_increments() {
        let p = SettlingParams::default();
        let m = ReactionModel::zero(3, 2, &p).unwrap();
        assert_eq!(m.bounds(), ReactionBounds::default());
        let (mut rc, mut rs) = ([1.0; 3], [1.0; 2]);
        m.increments(&[1.0, 2.0, 3.0], &[0.5, 0.5], &mut rc, &mut rs);
        assert_eq!(rc, [0.0; 3]);
        assert_eq!(rs, [0.0; 2]);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let p = SettlingParams::default();
        let err = ReactionModel::new(
            "bad",
            vec!["a".into()],
            vec![],
            vec![1.0, 2.0],
            vec![],
            Arc::new(NoRates),
            &p,
        );
        assert!(err.is_err());
    }
}
