//! Exact computation on good toric Kähler cones.
//!
//! A good strictly convex rational polyhedral cone `C ⊂ ℝ^{n+1}` is described
//! by its primitive inward facet normals. This crate computes, for such a
//! cone, the bijection between Reeb vectors `ξ` (interior of the dual cone)
//! and angle vectors `β` (the angles' cone) realized by Calabi-Yau cone
//! metrics with conical singularities along the toric divisors, together with
//! the supporting certificates: angles'-cone membership with exact witnesses
//! or kernel certificates, klt discrepancies, transversal-polytope moments,
//! the exact rational volume function and its minimization over the
//! normalized Reeb slice, symplectic potentials with their curvature data,
//! and the log Futaki invariant.
//!
//! Combinatorics and every quantity evaluated at rational input are computed
//! in exact rational arithmetic; the convex minimization runs in `f64` with
//! exactly recomputed residuals on request.

pub mod angles;
pub mod cone;
pub mod correspond;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod futaki;
pub mod polytope;
pub mod potential;
pub mod report;
pub mod volume;

pub use angles::{
    angles_cone_membership, cartier_klt, chern_class_criterion, AngleVector, LogPairCertificate,
    Membership, ReebVector,
};
pub use cone::GoodCone;
pub use correspond::{angles_to_reeb, reeb_to_angles, CorrespondenceResult, SolveOptions};
pub use error::Error;
pub use exact::Rat;
pub use futaki::{
    integrated_scalar_identity, log_futaki, r_invariant, total_transversal_scalar, FutakiReport,
};
pub use polytope::{boundary_integrals, facet_volumes, moments, slice, TransversalPolytope};
pub use potential::{PotentialKind, SymplecticPotential};
pub use volume::{weil_petersson_hessian, VolumeFunction};
