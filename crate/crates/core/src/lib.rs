//! Spectral computations for Schrödinger operators `-d²/dx² + q` on compact
//! metric graphs with δ-coupling vertex conditions.

pub mod ambarzumian;
pub mod asymptotics;
pub mod error;
pub mod expr;
pub mod fem;
pub mod fixtures;
pub mod graph;
pub mod ode;
pub mod potential;
pub mod quadrature;
pub mod secular;

pub use error::{Error, Result};
pub use graph::{GraphClass, GraphSpec, MetricGraph};
pub use potential::Potential;
