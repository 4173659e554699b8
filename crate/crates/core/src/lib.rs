//! Exact finite-set engine for models of double theories: lax functors
//! into spans of finite sets, their instances, collages, models of
//! elements, data migration and comprehensive factorization.

pub mod config;
pub mod elements;
pub mod error;
pub mod finset;
pub mod report;
pub mod search;
pub mod sketch;

pub mod cartesian;
pub mod collage;
pub mod instance;
pub mod io;
pub mod migration;
pub mod span_model;
pub mod theory_core;

pub use config::Config;
pub use error::{Error, Result};
pub use finset::FiniteSet;
pub use report::Report;
