//! Interface and extraction fluxes.

use crate::constitutive::Constitutive;
use crate::error::{Result, SimError};
use crate::geometry::Geometry;

use super::{Flows, TankState};

/// Upwind weights of one interface flux:
/// `Φ^C = c_up C_j + c_dn C_{j+1}`, `Φ^S = s_up S_j + s_dn S_{j+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceCoefficients {
    /// Solids interface velocity `v^X`.
    pub v: f64,
    /// Scalar solids flux `F^X`.
    pub f: f64,
    pub c_up: f64,
    pub c_dn: f64,
    pub s_up: f64,
    pub s_dn: f64,
}

/// Weights at an interior face between concentrations `x_up` (above) and
/// `x_dn` (below), given the cell-level `v_hs` and `D` of both sides.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn face_from_tables(
    x_up: f64,
    x_dn: f64,
    big_d_up: f64,
    big_d_dn: f64,
    v_hs_dn: f64,
    q: f64,
    gamma: f64,
    area: f64,
    h: f64,
    rho: f64,
) -> FaceCoefficients {
    let j = (big_d_dn - big_d_up) / h;
    let v = q + gamma * (v_hs_dn - j);
    let (vm, vp) = (v.min(0.0), v.max(0.0));
    let f = vm * x_dn + vp * x_up;
    let w = rho * q - f;
    FaceCoefficients {
        v,
        f,
        c_up: area * vp,
        c_dn: area * vm,
        s_up: area * w.max(0.0) / (rho - x_up),
        s_dn: area * w.min(0.0) / (rho - x_dn),
    }
}

/// Interface weights for face `k + 1/2` between cells `k` and `k + 1`.
/// `q_u` is the underflow rate; the face is assumed to lie below the surface.
pub fn face_coefficients(
    cons: &Constitutive,
    geom: &Geometry,
    k: usize,
    x_up: f64,
    x_dn: f64,
    q_u: f64,
) -> FaceCoefficients {
    let area = geom.face_area(k);
    let gamma = if k >= 1 && k < geom.cells() { 1.0 } else { 0.0 };
    face_from_tables(
        x_up,
        x_dn,
        cons.big_d(x_up),
        cons.big_d(x_dn),
        cons.v_hs(x_dn),
        q_u / area,
        gamma,
        area,
        geom.h(),
        cons.params().rho_s,
    )
}

/// Weights `(e_c, e_s)` of the surface extraction fluxes
/// `Φ_e^C = e_c C_{jbar+1}` and `Φ_e^S = e_s S_{jbar+1}`; both are `<= 0`.
pub fn extraction_coefficients(cons: &Constitutive, area: f64, x: f64, q_e: f64, h: f64) -> (f64, f64) {
    extraction_from_tables(area, x, cons.v_hs(x), cons.big_d(x), q_e, h, cons.params().rho_s)
}

#[inline]
pub(crate) fn extraction_from_tables(area: f64, x: f64, v_hs: f64, big_d: f64, q_e: f64, h: f64, rho: f64) -> (f64, f64) {
    let settle = v_hs - big_d / h;
    let e_c = (area * settle - q_e).min(0.0);
    let e_s = (-area * x / (rho - x) * settle - q_e).min(0.0);
    (e_c, e_s)
}

/// All fluxes of one state, for inspection. Faces are indexed `k = 0..=N`
/// for `z = kh`; faces at or above the surface cell carry zero flux.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSet {
    pub compression: Vec<f64>,
    pub velocity: Vec<f64>,
    pub solids: Vec<f64>,
    /// `(N+1) x k_C`, face-major.
    pub phi_c: Vec<f64>,
    /// `(N+1) x k_S`, face-major.
    pub phi_s: Vec<f64>,
    pub extraction_c: Vec<f64>,
    pub extraction_s: Vec<f64>,
}

/// Evaluates every interface flux of `state` under `flows`.
pub fn interface_fluxes(state: &TankState, flows: &Flows, geom: &Geometry, cons: &Constitutive) -> Result<FluxSet> {
    let n = geom.cells();
    let (kc, ks) = (state.n_particulate(), state.n_soluble());
    let rho = cons.params().rho_s;
    let jb = state.surface.jbar;
    let mut out = FluxSet {
        compression: vec![0.0; n + 1],
        velocity: vec![0.0; n + 1],
        solids: vec![0.0; n + 1],
        phi_c: vec![0.0; (n + 1) * kc],
        phi_s: vec![0.0; (n + 1) * ks],
        extraction_c: vec![0.0; kc],
        extraction_s: vec![0.0; ks],
    };
    for j in jb..=n {
        let x = state.x(j);
        if x >= rho {
            return Err(SimError::DensityBreach { cell: j, x, rho });
        }
    }
    for k in jb..=n {
        let x_up = state.x(k);
        let x_dn = if k < n { state.x(k + 1) } else { 0.0 };
        let fc = if k < n {
            face_coefficients(cons, geom, k, x_up, x_dn, flows.q_u)
        } else {
            let q = flows.q_u / geom.face_area(n);
            FaceCoefficients { v: q, f: q * x_up, c_up: flows.q_u, c_dn: 0.0, s_up: flows.q_u, s_dn: 0.0 }
        };
        if k < n {
            out.compression[k] = (cons.big_d(x_dn) - cons.big_d(x_up)) / geom.h();
        }
        out.velocity[k] = fc.v;
        out.solids[k] = fc.f;
        for i in 0..kc {
            let dn = if k < n { state.c(k + 1)[i] } else { 0.0 };
            out.phi_c[k * kc + i] = fc.c_up * state.c(k)[i] + fc.c_dn * dn;
        }
        for i in 0..ks {
            let dn = if k < n { state.s(k + 1)[i] } else { 0.0 };
            out.phi_s[k * ks + i] = fc.s_up * state.s(k)[i] + fc.s_dn * dn;
        }
    }
    if flows.q_e > 0.0 && jb < n {
        let x = state.x(jb + 1);
        let (ec, es) = extraction_coefficients(cons, geom.face_area(jb), x, flows.q_e, geom.h());
        for i in 0..kc {
            out.extraction_c[i] = ec * state.c(jb + 1)[i];
        }
        for i in 0..ks {
            out.extraction_s[i] = es * state.s(jb + 1)[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::SettlingParams;
    use crate::geometry::AreaProfile;

    fn setup() -> (Constitutive, Geometry) {
        let cons = Constitutive::new(SettlingParams::default()).unwrap();
        let geom = Geometry::new(1.0, 10, AreaProfile::Constant(2.0)).unwrap();
        (cons, geom)
    }

    #[test]
    fn batch_face_below_critical() {
        let (cons, geom) = setup();
        let fc = face_coefficients(&cons, &geom, 3, 1.0, 2.0, 0.0);
        let v = cons.v_hs(2.0);
        assert!((fc.v - v).abs() < 1e-18);
        assert_eq!(fc.c_dn, 0.0);
        assert!((fc.c_up - 2.0 * v).abs() < 1e-18);
        assert!((fc.f - v * 1.0).abs() < 1e-18);
    }

    #[test]
    fn packed_face_is_still() {
        let (cons, geom) = setup();
        let xh = cons.params().x_hat;
        let fc = face_coefficients(&cons, &geom, 4, xh, xh, 0.0);
        assert_eq!(fc.v, 0.0);
        assert_eq!(fc.c_up, 0.0);
        assert_eq!(fc.c_dn, 0.0);
    }

    #[test]
    fn bottom_face_has_no_settling() {
        let (cons, geom) = setup();
        let fc = face_coefficients(&cons, &geom, 10, 3.0, 3.0, 0.5);
        assert!((fc.v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn extraction_without_solids() {
        let (cons, _) = setup();
        let (ec, es) = extraction_coefficients(&cons, 2.0, 0.0, 0.3, 0.1);
        assert_eq!(es, -0.3);
        // clear water: settling velocity v0 times area exceeds Q_e? 2 * 1.76e-3 < 0.3
        assert!((ec - (2.0 * 1.76e-3 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn strong_settling_clips_particulate_extraction() {
        let (cons, _) = setup();
        let x = 0.5;
        let q_e = 0.5 * 2.0 * cons.v_hs(x);
        let (ec, es) = extraction_coefficients(&cons, 2.0, x, q_e, 0.1);
        assert_eq!(ec, 0.0);
        assert!(es < 0.0);
    }
}
