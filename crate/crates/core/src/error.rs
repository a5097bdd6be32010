//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension {0} is not supported (only 1 and 2)")]
    UnsupportedDimension(u32),

    #[error("points per axis must be a power of two >= 8, got {0}")]
    BadPointCount(u32),

    #[error("half width must be positive and finite, got {0}")]
    BadHalfWidth(f64),

    #[error("sample buffer has length {got}, grid needs {want}")]
    SampleCountMismatch { got: usize, want: usize },

    #[error("field contains a non-finite sample at flat index {0}")]
    NonFiniteSample(usize),

    #[error("grid rescale factor must be positive and finite, got {0}")]
    BadRescaleFactor(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid norm parameter: {0}")]
    BadNormParameter(String),

    #[error("exponent pair (q={q}, r={r}) is not admissible in dimension {dim}")]
    NotAdmissible { q: String, r: String, dim: u32 },

    #[error("trajectory needs at least {need} snapshots, got {got}")]
    TooFewSnapshots { need: usize, got: usize },

    #[error("trajectory time stamps must be strictly monotone")]
    NonMonotoneTimes,

    #[error("empty exponent pair list")]
    EmptyPairList,

    #[error("gaussian width parameter must be positive and finite, got {0}")]
    BadGaussianWidth(f64),

    #[error("resolution contract violated: {0}")]
    BoundaryDecay(String),

    #[error("solver step size must be positive and finite, got {0}")]
    BadStepSize(f64),

    #[error("solution exceeded the blow-up threshold at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },

    #[error("transform time {t} is below the resolvable cutoff {t_min}")]
    TimeTooSmall { t: f64, t_min: f64 },

    #[error(
        "quadratic phase under-resolved at the grid edge: {samples_per_period:.2} \
         samples per period, need >= {need}"
    )]
    PhaseUnderResolved { samples_per_period: f64, need: f64 },

    #[error("input field is numerically zero")]
    ZeroInput,

    #[error("no dyadic horizon satisfies the smallness target {delta} (norm {norm} at the smallest probe)")]
    NoAdmissibleHorizon { delta: f64, norm: f64 },

    #[error("spacetime norm bound violated: {0}")]
    NormBoundViolated(String),

    #[error("composed-map leg {leg} failed: {source}")]
    PipelineLeg {
        leg: u8,
        #[source]
        source: Box<CoreError>,
    },

    #[error("cascade schedule infeasible: gap ratio would exceed {0:e}")]
    InfeasibleSchedule(f64),

    #[error("cascade schedule parameter out of range: {0}")]
    BadScheduleParameter(String),

    #[error("quadrature failed to converge (best error estimate {0:e})")]
    QuadratureDidNotConverge(f64),

    #[error("snapshot i/o failed: {0}")]
    SnapshotIo(#[from] std::io::Error),

    #[error("snapshot header magic mismatch")]
    SnapshotBadMagic,

    #[error("snapshot truncated: expected {want} bytes, got {got}")]
    SnapshotTruncated { want: usize, got: usize },

    #[error("snapshot checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    SnapshotChecksum { stored: u64, computed: u64 },
}
