use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid curve descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("operation not supported for curve kind `{0}`")]
    UnsupportedKind(&'static str),
    #[error("curve is not a simple closed polyline: {0}")]
    NotJordan(String),
    #[error("curve is not convex")]
    NotConvex,
    #[error("index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("point lies inside the region; no separating line exists")]
    NoSeparator,
    #[error("value {value} outside the admissible range {range}")]
    OutOfRange { value: f64, range: &'static str },
    #[error("no real solution: {0}")]
    NoRealSolution(String),
    #[error("regions overlap; not a packing: {0}")]
    NotAPacking(String),
    #[error("degenerate region: {0}")]
    Degenerate(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("raster of {requested} cells exceeds the cap of {cap}")]
    MemoryGuard { requested: u64, cap: u64 },
    #[error("scale {delta} is below the raster cell size {cell}")]
    ScaleBelowCell { delta: f64, cell: f64 },
    #[error("regions are not sorted by decreasing diameter (first violation at index {0})")]
    Unsorted(usize),
    #[error("cover does not contain the residual set: {0}")]
    CoverMissesResidual(String),
    #[error("lambda {lambda} is infeasible; the inset rectangle needs lambda < {threshold}")]
    InfeasibleLambda { lambda: f64, threshold: f64 },
    #[error("construction infeasible: {0}")]
    Infeasible(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
}
