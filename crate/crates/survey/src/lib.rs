//! Survey service for perceptual color-difference experiments.
//!
//! [`store`] keeps sessions and an append-only judgment log on disk,
//! [`service`] exposes it over HTTP, and [`simulate`] drives the API with
//! synthetic respondents.

pub mod error;
pub mod service;
pub mod simulate;
pub mod store;

pub use error::{Result, SurveyError};
pub use service::{router, run, serve, ServiceConfig};
pub use store::{Stimulus, Submission, SurveyStore};
