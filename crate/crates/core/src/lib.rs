//! Retrofit planning for electricity-gas integrated energy systems with
//! carbon capture, utilization and storage (CCUS) and power-to-gas (PtG).
//!
//! The crate is organised bottom-up:
//!
//! * [`instance`] holds the validated problem data and builtin test instances.
//! * [`milp`] is a solver-agnostic MILP representation with pluggable adapters.
//! * [`formulation`] turns an instance into MILP blocks.
//! * [`engine`] assembles and solves the four planning modes.
//! * [`oracle`] is a brute-force optimizer for cross-checking tiny instances.
//! * [`sweep`] and [`report`] run tax/price sensitivity grids and write CSV.

pub mod engine;
pub mod formulation;
pub mod instance;
pub mod milp;
pub mod oracle;
pub mod par;
pub mod report;
pub mod sweep;

pub use instance::{builtin_instance, load_instance, PlanningInstance};
pub use engine::{PlanningError, PlanningOptions, PlanningSolution};
pub use milp::{MilpModel, SolveOptions, Solver};
