//! Polar envelopes and polar proximal maps of gauges, polar convolution
//! checks, gauge-dual solvers with primal recovery, and the projected polar
//! proximal-point methods on perspective transforms.

pub mod error;
pub mod gauge;
pub mod checks;
pub mod convolution;
pub mod dual;
pub mod envelope;
pub mod oracle;
pub mod perspective;
pub mod trace;

pub use error::{GaugeError, Result};

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

pub(crate) fn serialize_vector<S: serde::Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}
