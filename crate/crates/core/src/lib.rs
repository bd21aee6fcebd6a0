//! Certified frequency- and amplitude-dependent L2-gain bounds for Lur'e
//! systems, built from scaled relative graph geometry and a Sobolev
//! amplitude bound, plus a time-domain simulation oracle that checks them.

pub mod error;
pub mod gain;
pub mod geometry;
pub mod lti;
pub mod nonlinearity;
pub mod sim;

pub use error::{Error, Hypothesis, Result};
pub use gain::{gain_surface, AnalysisConfig, GainRecord, GainSurface};
pub use lti::{StateSpace, TransferFunction};
pub use nonlinearity::{Interval, Nonlinearity, NonlinearityBounds};
