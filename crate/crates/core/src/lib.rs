//! Classify repository accounts as bots or humans from their issue and pull
//! request comments.
//!
//! The pipeline groups comments per account ([`corpus`]), measures how
//! repetitive they are ([`textsim`], [`patterns`]), summarizes each account
//! as four numbers ([`features`]) and feeds those to a cost-sensitive random
//! forest ([`model`]). [`eval`] holds the evaluation protocol.
//!
//! Distance, inequality and agreement computations are generic over
//! [`Scalar`]; the aliases below fix the common choices.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod model;
pub mod patterns;
pub mod scalar;
pub mod textsim;

pub use num_rational::Rational64;
pub use scalar::{Real, Scalar};

pub type DistanceMatrixF64 = textsim::DistanceMatrix<f64>;
pub type ExactDistanceMatrix = textsim::DistanceMatrix<Rational64>;
pub type ClusteringParamsF64 = patterns::ClusteringParams<f64>;
pub type Metrics = eval::MetricsReport<f64>;
pub type ExactMetrics = eval::MetricsReport<Rational64>;
pub type KappaF64 = eval::Kappa<f64>;
