pub mod connection;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod fields;
pub mod sampling;
pub mod scenarios;
pub mod tolerances;
pub mod transport;

pub use connection::{levi_civita, weyl_connection, Christoffel, ConnectionField};
pub use error::{Error, Result};
pub use expr::{Bindings, ScalarExpr, Scope};
pub use fields::{DeckMap, MetricField, OneFormField, Point, QuotientSpec, Signature};
pub use sampling::SampleBox;
pub use scenarios::{builtin, Scenario};
pub use transport::{Curve, HolonomyOutcome, HolonomyReport, Verdict};
