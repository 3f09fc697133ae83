//! Exact classification and solution of the quadratic quaternion equation
//!
//! ```text
//! X P X* + X Q + R X* = S,      P ≠ 0,
//! ```
//!
//! whose solution set is empty, one or two points, a circle, or a 3-sphere.
//!
//! ```
//! use quateq::{solve, EquationCoefficients, Quaternion, SolutionSet, SolverConfig};
//!
//! let one = Quaternion::ONE;
//! let c = EquationCoefficients::new(one, one, one, -one).unwrap();
//! let set = solve(&c, &SolverConfig::default()).unwrap();
//! assert_eq!(set, SolutionSet::Point(-one));
//! ```

// `!(x > 0.0)` is used on purpose so NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod generators;
pub mod geometry;
pub mod oracle;
pub mod quaternion;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{
    bisector_plane, circle_point, intersect_circle_hyperplane, intersect_sphere_line,
    intersect_sphere_line_with_tol, solution_circle, AffineLine, BisectorPlane, CircleHyperplane,
    CircleOrOrigin, Hyperplane, SolutionCircle,
};
pub use oracle::{
    jacobian, newton_multistart, real_system, verify_solution_set, OracleConfig, OracleReport,
    Verdict,
};
pub use quaternion::{vec_mul_identity_check, Quaternion, Vector3};
pub use solver::{
    classify_p, reduce_nonreal, reduce_real, residual, solve, solve_nonreal_p, solve_real_p,
    Branch, EquationCoefficients, ReducedNonrealForm, ReducedRealForm, SolutionSet, SolverConfig,
};
