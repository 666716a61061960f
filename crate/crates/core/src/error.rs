use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {t} outside curve domain [{min}, {max}]")]
    Domain { t: f64, min: f64, max: f64 },
    #[error("invalid curve spec: {0}")]
    InvalidSpec(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate parametrization at t={t}: speed {speed:e}")]
    Degenerate { t: f64, speed: f64 },
    #[error("curvature {kappa:e} at t={t} is below the minimum; osculating circle undefined")]
    VanishingCurvature { t: f64, kappa: f64 },
    #[error("singular surface point at (s={s}, u={u})")]
    SingularPoint { s: f64, u: f64 },
    #[error("finite-difference stencil leaves the domain at (s={s}, u={u})")]
    StencilOutOfDomain { s: f64, u: f64 },
    #[error("only {regular} regular grid points, need at least {needed}")]
    InsufficientGrid { regular: usize, needed: usize },
    #[error("mesh is not closed: {0}")]
    MeshNotClosed(String),
    #[error("malformed OBJ at line {line}: {msg}")]
    Obj { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
