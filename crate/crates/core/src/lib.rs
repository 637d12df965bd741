//! Probabilistic unclean data-graphs.
//!
//! A clean data-graph is drawn from a prior, a noisy observer turns it into
//! the observed graph, and the modules here invert that process: exact
//! posteriors, most-likely clean graphs under structural restrictions,
//! probabilistic query answering for GXPath queries, constraint reweighting,
//! and executable hardness gadgets used as test fixtures.

pub mod cleaning;
pub mod constraints;
pub mod datagraph;
pub mod emdg;
pub mod error;
pub mod gadgets;
pub mod gxpath;
pub mod pqa;
pub mod rational;

pub use datagraph::{DataGraph, Edge, NodeId};
pub use error::{Error, Result};
pub use rational::Rational;
