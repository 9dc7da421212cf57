//! Exact operator algebra and numerical experiments for positive singular
//! solutions of the sixth-order equation `(-Δ)³u = uᵖ` on a punctured ball.
//!
//! The crate is split into layers: exact arithmetic (`rat`, `hp`, `laurent`,
//! `diffop`, `logpow`), the derivation engine (`operator_algebra`), printed
//! coefficient tables (`appendix_tables`), and numerics on top of them
//! (`cylinder_dynamics`, `pohozaev_lab`, `profile_analysis`).

pub mod appendix_tables;
pub mod constants;
pub mod cylinder_dynamics;
pub mod diffop;
pub mod error;
pub mod hp;
pub mod jet;
pub mod laurent;
pub mod logpow;
pub mod operator_algebra;
pub mod pohozaev_lab;
pub mod profile_analysis;
pub mod rat;
pub mod report;
pub mod surd;

pub use constants::{CriticalExponents, NamedConstants, Params, Regime};
pub use diffop::{BaseVar, DiffOp};
pub use error::{Error, Result};
pub use hp::HpReal;
pub use laurent::LaurentPoly;
pub use logpow::LogPowerExpr;
pub use rat::Q;
pub use report::{DiscrepancyEntry, DiscrepancyReport, Severity};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
