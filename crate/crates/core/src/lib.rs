//! Perspective relaxations and safe screening for sparse least squares.
//!
//! Two problems over `x ∈ ℝⁿ` are supported:
//!
//! * regularized: `min ‖y − Ax‖² + (1/γ)‖x‖² + μ‖x‖₀`
//! * cardinality-constrained: `min ‖y − Ax‖² + (1/γ)‖x‖²` subject to `‖x‖₀ ≤ k`
//!
//! The pipeline is: solve the perspective relaxation ([`relax`]), round it to a
//! feasible incumbent ([`heuristics`]), use the certified lower bound and the
//! incumbent to fix indicators safely ([`screening`]), then solve what remains
//! exactly ([`exact`]).
//!
//! ```
//! use l0screen::{relax, screening, heuristics, Instance, ProblemSpec, SolverConfig};
//!
//! let inst = Instance::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[3.0, 0.1])?;
//! let spec = ProblemSpec::reg(1.0, 1.0)?;
//! let sol = relax::solve_relaxation(&inst, &spec, &SolverConfig::default())?;
//! let inc = heuristics::round(&inst, &spec, &sol)?;
//! let report = screening::screen(&inst, &spec, &sol, inc.objective)?;
//! assert_eq!((report.n_one, report.n_zero, report.n_free), (1, 1, 0));
//! # Ok::<(), l0screen::Error>(())
//! ```

pub mod berhu;
pub mod datagen;
pub mod error;
pub mod exact;
pub mod heuristics;
pub mod problem;
pub mod relax;
pub mod screening;
pub mod select;

pub use berhu::BerhuPenalty;
pub use error::{Error, Result};
pub use exact::{branch_and_bound, brute_force, BnBConfig, BnBStats, BranchRule};
pub use heuristics::HeuristicConfig;
pub use problem::{FixState, Incumbent, Instance, ProblemSpec};
pub use relax::{Certificate, DualCertificate, RelaxSolution, SolverConfig};
pub use screening::{ReducedProblem, ScreenReport};

// The guide's chapters are compiled and run as doctests so their snippets
// cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/relaxation.md")]
    mod relaxation {}
    #[doc = include_str!("../../../book/src/screening.md")]
    mod screening {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/datagen.md")]
    mod datagen {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
