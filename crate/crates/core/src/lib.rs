//! Online broadcast range assignment.
//!
//! Points arrive one at a time; every point carries a transmission range,
//! ranges never decrease, and after each arrival the directed graph with an
//! edge `(i, j)` whenever `dist(i, j) <= r(i)` must contain a broadcast tree
//! rooted at the first point. The cost of an assignment is the sum of
//! ranges raised to a distance-power gradient `alpha > 1`.
//!
//! The crate provides:
//!
//! - [`instance`]: spaces (line, plane, metric matrix), arrival sequences,
//!   assignments, traces, cost, and feasibility checking;
//! - [`strategies`]: the online engines (nearest-neighbor,
//!   cheapest-increase, factor-k expansion, and the dual-raising algorithm
//!   for general metrics);
//! - [`oracle`]: exact and approximate offline solvers for the priority
//!   set-cover formulation, the denominators of ratio measurements;
//! - [`bounds`]: closed-form ratio constants and adversarial generators;
//! - [`analysis`]: charging disks, nearest-predecessor charge sums, and the
//!   competitive-ratio harness.
//!
//! ```
//! use rangecast::oracle::solve_optimal;
//! use rangecast::{simulate, Alpha, ArrivalInstance, StrategyConfig};
//!
//! // Four arrivals on the line; the nearest-neighbor strategy overpays for
//! // the second point once the true extremes show up.
//! let instance = ArrivalInstance::line(vec![0.0, 0.01, 1.0, -1.0])?;
//! let alpha = Alpha::new(2.0)?;
//! let run = simulate(&instance, &StrategyConfig::nn(alpha));
//! let optimum = solve_optimal(&instance, alpha)?;
//! let ratio = run.total_cost() / optimum.cost;
//! assert!((ratio - 1.9801).abs() < 1e-9);
//! # Ok::<(), rangecast::Error>(())
//! ```

// Negated comparisons (`!(x > 0.0)`) reject NaN parameters; index loops
// over symmetric matrices read better than iterator chains here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod instance;
pub mod oracle;
pub mod strategies;

pub use error::{Error, Result};
pub use instance::{cost_alpha, Alpha, ArrivalInstance, AssignmentTrace, RangeAssignment, Space};
pub use strategies::{simulate, Simulation, StrategyConfig, StrategyKind};
