//! Error type shared across the crate.

use crate::exact::Int;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("cone is not strictly convex: the normals span a {rank}-dimensional space in dimension {dim}")]
    NotStrictlyConvex { dim: usize, rank: usize },

    #[error("cone is not full-dimensional")]
    NotFullDimensional,

    #[error("normal {index} is redundant: it cuts no facet of the cone")]
    RedundantNormal { index: usize },

    #[error("normal {index} is not a primitive integer vector")]
    NotPrimitive { index: usize },

    #[error("cone is not good: facet normals {facets:?} span a non-saturated sublattice")]
    NotGood { facets: Vec<usize> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("angle vector must be strictly positive (entry {index} is not)")]
    NonPositiveAngle { index: usize },

    #[error("Reeb vector is not in the interior of the dual cone: nonpositive pairing with extreme ray {ray:?}")]
    ReebNotInterior { ray: Vec<i64> },

    #[error("angle vector is outside the angles' cone; violated kernel relation {certificate:?}")]
    NotInAnglesCone { certificate: Vec<Int> },

    #[error("queried ray {ray:?} lies outside the dual cone")]
    RayOutsideCone { ray: Vec<i64> },

    #[error("transversal polytope is degenerate (zero volume)")]
    DegeneratePolytope,

    #[error("point lies outside the open moment cone (ℓ_{facet} ≤ 0)")]
    OutsideCone { facet: usize },

    #[error("Hessian is numerically singular (condition estimate {condition:.3e})")]
    SingularHessian { condition: f64 },

    #[error("finite-difference step {step} too large at distance {distance} from the boundary")]
    StepTooLarge { step: f64, distance: f64 },

    #[error("line search failed at iteration {iterations} (gradient norm {gradient_norm:.3e})")]
    LineSearchFailure {
        iterations: usize,
        xi: Vec<f64>,
        gradient_norm: f64,
    },

    #[error("no convergence within {max_iter} iterations (gradient norm {gradient_norm:.3e})")]
    MaxIterations {
        max_iter: usize,
        xi: Vec<f64>,
        gradient_norm: f64,
    },

    #[error("moment matrix is singular; the transversal polytope should be full-dimensional")]
    SingularMomentMatrix,

    #[error(
        "cone is not a cone over a compact polytope: the vertical direction is not a Reeb vector"
    )]
    NotAConeOverPolytope,

    #[error("fixture check failed: {0}")]
    FixtureCheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
