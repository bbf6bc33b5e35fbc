use thiserror::Error;

/// Errors raised by grid construction and the numerical operators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be 1 or 2, got {0}")]
    Dimension(usize),

    #[error("box side length must be an even integer >= 2, got {0}")]
    SideLength(usize),

    #[error("samples per unit length must be a power of two >= 2, got {0}")]
    Resolution(usize),

    #[error("value array has {got} entries but the grid holds {expected}")]
    Length { expected: usize, got: usize },

    #[error("non-finite sample {value} at grid index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("grid functions live on different grids")]
    SpecMismatch,

    #[error("axis {axis} out of range for dimension {dim}")]
    Axis { axis: usize, dim: usize },

    #[error("{0} is not a power of two")]
    NotDyadic(f64),

    #[error("grid spacing {0} exceeds one unit cube; no cube partition exists")]
    CoarseGrid(f64),

    #[error("invalid exponent {name} = {value}: {reason}")]
    Exponent { name: &'static str, value: f64, reason: &'static str },

    #[error(
        "exponent triple (p, q, alpha) = ({p}, {q}, {alpha}) violates p <= alpha <= q; \
         the space is non trivial if and only if p <= alpha <= q"
    )]
    Nontrivial { p: f64, q: f64, alpha: f64 },

    #[error("exponent triple outside the theorem range ({0})")]
    TheoremRange(String),

    #[error("ladder must be nonempty with positive base and ratio > 1 (base {base}, ratio {ratio}, count {count})")]
    Ladder { base: f64, ratio: f64, count: usize },

    #[error("scale parameter must be positive, got {0}")]
    Scale(f64),

    #[error("truncation radius {eps} is below two grid spacings ({min})")]
    Truncation { eps: f64, min: f64 },

    #[error("slab needs at least {needed} slices, got {got}")]
    TooFewSlices { needed: usize, got: usize },

    #[error("slice times must be strictly increasing")]
    SliceOrder,

    #[error("system has kind {got:?}, operation expects {expected:?}")]
    SystemKind { expected: crate::cauchy_riemann::SystemKind, got: crate::cauchy_riemann::SystemKind },

    #[error("component count {got} does not match dimension + 1 = {expected}")]
    Components { expected: usize, got: usize },

    #[error("time derivative does not decay: {0}")]
    QuadratureTail(String),

    #[error("multiplier table has {got} entries, frequency lattice has {expected}")]
    SymbolSize { expected: usize, got: usize },

    #[error("imaginary residue {0:e} exceeds tolerance for a real-valued result")]
    ImaginaryResidue(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
