//! Policy-aware planning.
//!
//! A domain describes a transition system over boolean fluents; a policy of
//! strict and defeasible rules assigns permissions and obligations to actions
//! at each state. Every step of a plan is classified for authorization
//! (strong, weak, non-compliant) and obligation compliance, violations carry a
//! penalty in `1..=3`, and the planner returns the goal-achieving plan with the
//! smallest total penalty within a horizon.
//!
//! ```
//! use penplan::{dsl, ground, penalty::PenaltyConfig, planner};
//!
//! let dom = dsl::parse_domain("fluent on. action flip. causes flip: on.").unwrap();
//! let pol = dsl::parse_policy("rule r: -permitted(flip). penalty r = 1.").unwrap();
//! let prb = dsl::parse_problem("init -on. goal on. horizon 1.").unwrap();
//! let domain = ground::ground_domain(&dom).unwrap();
//! let q = planner::PlanQuery {
//!     policy: ground::ground_policy(&pol, &domain).unwrap(),
//!     config: PenaltyConfig::from_spec(&pol),
//!     domain,
//!     problem: prb,
//! };
//! let best = planner::best_plan(&q).unwrap().best.unwrap();
//! assert_eq!(best.total(), 1);
//! ```

pub mod compliance;
pub mod dsl;
mod exec;
pub mod ground;
pub mod penalty;
pub mod planner;
pub mod policy_eval;
pub mod transition;

pub use exec::parallel_available;
