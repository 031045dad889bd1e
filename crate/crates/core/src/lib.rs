//! Discrete Bayesian network auditing: inference, Dirichlet-multinomial
//! learning, sequential model monitors and one-way sensitivity analysis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod cli;
pub mod error;
pub mod inference;
pub mod io;
pub mod model;
pub mod monitors;
pub mod sample;
pub mod sensitivity;

pub use error::{Error, Result};
pub use model::{Cpt, Dag, Dataset, DiscreteBn, ParamRef, Variable};
