//! Risk-sensitive multi-robot task allocation and its inverse.
//!
//! The forward problem assigns robots to targets greedily by reward over
//! Prelec-weighted risk, subject to a survival budget. The inverse problem
//! recovers the risk parameters closest to a nominal guess under which the
//! greedy reproduces a human-suggested allocation. It is solved by a
//! depth-first search over pick orders whose nodes are fixed-order
//! subproblems, each handled by a box branch-and-bound over `(beta, delta)`
//! with closed-form `alpha` intervals.
//!
//! ```
//! use irmrta::{greedy_solve, solve_inverse, InverseConfig, ObjectiveWeights, ParamBounds};
//! use irmrta::{ProblemInstance, RiskParams, Suggestion};
//!
//! let instance = ProblemInstance::new(
//!     vec![vec![10.0, 4.0], vec![3.0, 9.0]],
//!     vec![vec![0.95, 0.7], vec![0.6, 0.97]],
//! )?;
//! let nominal = RiskParams::new(1.0, 1.0, 0.8)?;
//! let (alloc, _trace) = greedy_solve(&instance, &nominal);
//! let suggestion = Suggestion::from_allocation(&alloc)?;
//! let sol = solve_inverse(
//!     &instance,
//!     &suggestion,
//!     &nominal,
//!     &ObjectiveWeights::default(),
//!     &ParamBounds::default(),
//!     &InverseConfig::default(),
//! )?;
//! assert!(sol.objective < 1e-9 && sol.verified);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bench;
pub mod convex;
pub mod error;
pub mod forward;
pub mod inverse;
pub mod io;
pub mod model;
pub mod oracle;
pub mod ordered;
pub mod scenario;

pub use error::{ModelError, Result};
pub use forward::{
    greedy_solve, greedy_solve_preferring, verify_forward, ForwardCheck, GreedyStep, GreedyTrace,
    Termination,
};
pub use inverse::{solve_inverse, InverseConfig, InverseError, InverseSolution, SearchStats};
pub use model::{
    allocation_cost, budget, prelec_weight, Allocation, Interval, ObjectiveWeights, Pair,
    ParamBounds, ProblemInstance, RiskParams, Suggestion,
};
pub use oracle::{dense_scan_ordered, grid_inverse, GridSpec, OracleResult};
pub use ordered::{ordered_gap_bound, solve_ordered, OrderedError, OrderedSolution};
pub use scenario::{generate_scenario, load_fixture_qualitative, ScenarioConfig};
