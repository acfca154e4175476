use thiserror::Error;

/// Errors raised while building or stepping a simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("surface moved from cell {from} to cell {to} in one step (CFL violated)")]
    SurfaceJump { from: usize, to: usize },

    #[error("tank drained: mixture volume would become {volume:.6e} m^3")]
    Drained { volume: f64 },

    #[error("tank overflow: mixture volume {volume:.6e} m^3 exceeds capacity {capacity:.6e} m^3")]
    Overflow { volume: f64, capacity: f64 },

    #[error("surface reached the bottom cell {cell}; the scheme needs a cell below the surface")]
    SurfaceAtBottom { cell: usize },

    #[error("solids concentration {x:.6e} in cell {cell} reaches the solids density {rho:.6e}")]
    DensityBreach { cell: usize, x: f64, rho: f64 },

    #[error("time step {tau:.6e} s exceeds the CFL bound {tau_max:.6e} s")]
    TimeStep { tau: f64, tau_max: f64 },

    #[error("tank empty: cannot average over zero volume")]
    EmptyTank,

    #[error("{source} (stage '{stage}', t = {time:.3} s)")]
    InStage {
        stage: String,
        time: f64,
        #[source]
        source: Box<SimError>,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl SimError {
    pub(crate) fn in_stage(self, stage: &str, time: f64) -> Self {
        SimError::InStage {
            stage: stage.to_string(),
            time,
            source: Box::new(self),
        }
    }

    /// Innermost error, stripping stage context.
    pub fn root(&self) -> &SimError {
        match self {
            SimError::InStage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
