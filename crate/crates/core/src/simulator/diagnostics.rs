//! Post-run checks: mass closure per stage and L¹ distances between runs.

use serde::Serialize;

use super::{Regime, RunRecord};
use crate::error::{Result, SimError};
use crate::scheme::TankState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageClosure {
    pub name: String,
    pub regime: Regime,
    /// Relative closure error per particulate, then per soluble.
    pub particulates: Vec<f64>,
    pub solubles: Vec<f64>,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub stages: Vec<StageClosure>,
    pub max: f64,
}

/// `|Δ stored - net exchange| / max stored` for every stage and component.
/// A component that is absent throughout a stage reports its absolute residual.
pub fn mass_balance_audit(record: &RunRecord) -> AuditReport {
    let rel = |b: &super::Balance| -> Vec<f64> {
        (0..b.start.len())
            .map(|k| {
                let scale = b.start[k].abs().max(b.end[k].abs());
                let r = b.residual(k);
                if scale > 0.0 {
                    r / scale
                } else {
                    r
                }
            })
            .collect()
    };
    let stages: Vec<StageClosure> = record
        .stages
        .iter()
        .map(|s| {
            let particulates = rel(&s.particulates);
            let solubles = rel(&s.solubles);
            let max = particulates.iter().chain(&solubles).copied().fold(0.0, f64::max);
            StageClosure { name: s.name.clone(), regime: s.regime, particulates, solubles, max }
        })
        .collect();
    let max = stages.iter().map(|s| s.max).fold(0.0, f64::max);
    AuditReport { stages, max }
}

/// Sum over components of relative L¹ distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub value: f64,
    /// Components left out because the reference vanishes.
    pub skipped: Vec<String>,
}

fn l1_relative(a: &[Vec<f64>], b: &[Vec<f64>], names: &[String]) -> DiffReport {
    let mut value = 0.0;
    let mut skipped = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let den: f64 = b[k].iter().map(|v| v.abs()).sum();
        if den == 0.0 {
            log::warn!("component {name} vanishes in the reference run; left out of the distance");
            skipped.push(name.clone());
            continue;
        }
        let num: f64 = a[k].iter().zip(&b[k]).map(|(x, y)| (x - y).abs()).sum();
        value += num / den;
    }
    DiffReport { value, skipped }
}

/// Cell columns per component, particulates first.
fn columns(state: &TankState) -> Vec<Vec<f64>> {
    let n = state.cells();
    let mut out = Vec::with_capacity(state.n_particulate() + state.n_soluble());
    for k in 0..state.n_particulate() {
        out.push((1..=n).map(|j| state.c(j)[k]).collect());
    }
    for k in 0..state.n_soluble() {
        out.push((1..=n).map(|j| state.s(j)[k]).collect());
    }
    out
}

fn names(r: &RunRecord) -> Vec<String> {
    r.particulate_names.iter().chain(&r.soluble_names).cloned().collect()
}

fn snapshot(r: &RunRecord, t: f64) -> Result<&TankState> {
    r.snapshot_at(t)
        .map(|s| &s.state)
        .ok_or_else(|| SimError::GridMismatch(format!("no snapshot at t = {t} s")))
}

/// `Σ_k ‖a_k - b_k‖ / ‖b_k‖` at time `t`, with `b` as reference. The cell
/// width cancels in each ratio.
pub fn relative_difference(a: &RunRecord, b: &RunRecord, t: f64) -> Result<DiffReport> {
    if a.cells != b.cells || a.depth != b.depth || names(a) != names(b) {
        return Err(SimError::GridMismatch("runs use different grids or components".into()));
    }
    let (sa, sb) = (snapshot(a, t)?, snapshot(b, t)?);
    Ok(l1_relative(&columns(sa), &columns(sb), &names(b)))
}

/// Distance between a coarse run and a finer one, the fine cells averaged
/// onto the coarse grid. The fine run serves as reference.
pub fn self_convergence(coarse: &RunRecord, fine: &RunRecord, t: f64) -> Result<DiffReport> {
    if !fine.cells.is_multiple_of(coarse.cells) || coarse.depth != fine.depth || names(coarse) != names(fine) {
        return Err(SimError::GridMismatch(format!(
            "{} cells cannot be averaged onto {} cells",
            fine.cells, coarse.cells
        )));
    }
    let r = fine.cells / coarse.cells;
    let (sc, sf) = (snapshot(coarse, t)?, snapshot(fine, t)?);
    let projected: Vec<Vec<f64>> = columns(sf)
        .iter()
        .map(|col| col.chunks(r).map(|w| w.iter().sum::<f64>() / r as f64).collect())
        .collect();
    Ok(l1_relative(&columns(sc), &projected, &names(fine)))
}
