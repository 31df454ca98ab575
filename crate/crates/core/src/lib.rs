//! Metastability toolkit for the contact process (SIS epidemic) on finite
//! random graphs.
//!
//! The crate bundles four kinds of machinery:
//!
//! * random graph generation (Erdős–Rényi, configuration model) and exact or
//!   sampled edge-boundary minimisation ([`graph`]),
//! * exact log-domain hitting times of birth-death chains together with the
//!   product lower bound and the max-prefix upper bound ([`birthdeath`]),
//! * an event-driven contact-process simulator with censoring ([`contact`]),
//! * closed-form and variational threshold functions for Erdős–Rényi and
//!   configuration-model graphs ([`bounds_er`], [`bounds_cm`], [`pairing`]).
//!
//! Everything stochastic is driven by counter-based streams keyed on
//! `(seed, purpose, index)` ([`rng`]), so results do not depend on the number
//! of worker threads.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birthdeath;
pub mod bounds_cm;
pub mod bounds_er;
pub mod cli;
pub mod contact;
pub mod degree;
pub mod error;
pub mod graph;
pub mod lognum;
pub mod pairing;
pub mod report;
pub mod rng;
mod sumtree;

pub use error::{Error, Result};
pub use lognum::LogNumber;
