//! Exact dual simplex-type solver for the infimum of a finite point set with
//! respect to the second-order cone `Q = {(x0; xbar) : ||xbar|| <= x0}`:
//!
//! ```text
//! max x0  s.t.  x <=_Q p_i,  i = 1..m
//! ```
//!
//! i.e. the highest apex `x` whose translated cone `x + Q` contains every
//! point. The smallest enclosing ball of balls, the smallest intersecting
//! ball and the largest ball inside an intersection of balls all reduce to
//! this problem (see [`reductions`]).
//!
//! The solver keeps a dual feasible support set and walks exactly along the
//! curve of points that keep the support on the cone boundary, dropping
//! points whose dual weight reaches zero and adding the entering point once
//! it becomes active. Results carry a dual certificate that [`oracle`] can
//! check independently.
//!
//! ```
//! use coneinf::{solve, Instance, SolverConfig};
//!
//! let inst = Instance::from_rows(&[
//!     vec![0.0, -1.0, 0.0],
//!     vec![0.0, 1.0, 0.0],
//!     vec![0.0, 0.0, 3.0],
//! ])
//! .unwrap();
//! let res = solve(&inst, &SolverConfig::default()).unwrap();
//! assert!((res.x0() + 5.0 / 3.0).abs() < 1e-12);
//! ```

pub mod bench;
pub mod cone;
pub mod curve;
pub mod error;
pub mod generate;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pivot;
pub mod qr;
pub mod reductions;
pub mod solver;

pub use cone::{cone_leq, infeasibility, is_point_solution, two_point_solve};
pub use error::{Error, Result};
pub use model::{
    validate_instance, DualCertificate, DualEntry, Instance, Point, SolveResult, SolveStats,
    SupportState,
};
pub use oracle::{kkt_check, KktReport};
pub use qr::QrFactors;
pub use reductions::{Ball, BallResult, BallMode};
pub use solver::{solve, PivotRule, SolverConfig};
