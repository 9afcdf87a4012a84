//! Simulation and analysis of the multicoloured hardcore model.
//!
//! Vertices of a graph carry colours in `0..=K` (`0` meaning inactive) with no
//! edge joining two vertices of the same nonzero colour. Each vertex updates
//! at its own rate: it tosses a biased coin, proposes a uniform colour, and
//! takes that colour if the coin shows heads and no neighbour holds it,
//! otherwise it becomes inactive.
//!
//! - [`graph`]: graphs, random generators, edge-list I/O.
//! - [`model`]: configurations, parameters, the update rule, degree heuristics.
//! - [`dynamics`]: event-driven simulation with observers.
//! - [`coupling`]: grand coupling, coalescence times, exact contraction checks.
//! - [`oracle`]: exact stationary law and transient distances on small graphs.
//! - [`queueing`]: queues served only while active, Lyapunov diagnostics.
//! - [`analysis`]: the mixing condition and closed-form bounds.
//! - [`runner`]: config-driven experiments writing CSV artifacts.
//!
//! Runnable examples (`cargo run --release --example <name>`): `generate_graph`,
//! `simulate`, `exact_oracle`, `coupling`, `bounds`, `queue_network`,
//! `reproduce_figure`, `config_experiment`.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod queueing;
pub mod rng;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{degree_stats, DegreeStats, Graph};
pub use model::{Colour, Configuration, HeuristicVariant, ModelParams, UpdateDraw};
