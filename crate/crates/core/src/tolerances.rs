//! Numerical thresholds shared by the library, the CLI and the test suites.

/// `|det g| / prod(row norms)` below this is treated as singular.
pub const SINGULAR_RELATIVE_DET: f64 = 1e-12;
/// Eigenvalues with magnitude below this count as zero when reading off a signature.
pub const SIGNATURE_ZERO: f64 = 1e-10;

/// Residual of the defining equation `∇h = h ⊗ Ψ`.
pub const DEFINING_EQUATION: f64 = 1e-9;
/// Deck equivariance of Christoffel symbols.
pub const EQUIVARIANCE: f64 = 1e-10;
/// Deck invariance of metrics and 1-forms.
pub const DECK_INVARIANCE: f64 = 1e-10;
/// Closedness `dΨ = 0` checked at sample points.
pub const CLOSEDNESS: f64 = 1e-10;
/// Closedness violation that aborts construction of a Weyl connection.
pub const CLOSEDNESS_ABORT: f64 = 1e-8;

/// Periods below this (in absolute value) count as zero.
pub const EXACTNESS: f64 = 1e-8;
/// Richardson error estimate of Simpson quadrature, relative to `max(1, |I|)`.
pub const QUADRATURE: f64 = 1e-9;
/// Default Simpson subintervals per smooth curve piece.
pub const QUADRATURE_INTERVALS: usize = 10_000;

/// Default RK4 step in curve parameter.
pub const RK4_STEP: f64 = 1e-3;
/// Transport step-halving gate, relative to `max(1, |result|)`.
pub const TRANSPORT_HALVING: f64 = 1e-8;
/// Geodesic step-halving gate on the endpoint, relative to `max(1, |x|)`.
pub const GEODESIC_HALVING: f64 = 1e-7;
/// Coordinate magnitude that aborts a geodesic.
pub const BLOW_UP: f64 = 1e12;

/// Relative agreement between a holonomy scale factor and `exp(-period)`.
pub const SCALE_LAW: f64 = 1e-6;
/// Relative least-squares residual above which a transported form is not a multiple of the original.
pub const MULTIPLE_FIT: f64 = 1e-4;
/// Cocycle residual `c(x,y) c(y,z) = c(x,z)`.
pub const COCYCLE: f64 = 1e-5;

/// Algebraic Bianchi identity.
pub const BIANCHI: f64 = 1e-8;
/// Einstein tensor under constant gauge rescaling.
pub const GAUGE_INVARIANCE: f64 = 1e-9;

/// Default number of sample points for pointwise checks.
pub const SAMPLE_POINTS: usize = 100;
