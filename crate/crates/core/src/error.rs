use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bessel order {0} outside supported range")]
    OrderOutOfRange(i32),
    #[error("angular momentum {0} outside 0..={max}", max = crate::special::L_MAX)]
    AngularMomentumOutOfRange(u32),
    #[error("argument {x} not allowed for order {order}")]
    SingularArgument { order: i32, x: f64 },
    #[error("invalid potential: {0}")]
    InvalidSpec(String),
    #[error("hard sphere is analytic-only; numeric routes do not apply")]
    AnalyticOnly,
    #[error("resonant input at strength {0}")]
    ResonantInput(f64),
    #[error("scattering length is zero; effective range undefined")]
    ZeroScatteringLength,
    #[error("matching denominator vanishes")]
    DegenerateMatching,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("non-monotone grid at line {0}")]
    NonMonotoneGrid(usize),
    #[error("fewer than 4 points ({0})")]
    TooFewPoints(usize),
    #[error("radius {0} below tabulated range")]
    OutsideTable(f64),
    #[error("potential tail decays as r^-{exponent:.3}, too slow for l = {l}")]
    WignerViolation { l: u32, exponent: f64 },
    #[error("Numerov step is pathological at r = {0}; reduce h")]
    PathologicalStep(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("normalization extraction failed: {0}")]
    Normalization(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("cot(delta) pole near k = {0}")]
    CotPole(f64),
    #[error("unsupported sweep: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(String),
}
