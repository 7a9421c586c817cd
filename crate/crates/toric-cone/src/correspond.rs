//! The Reeb vector / cone angle correspondence.
//!
//! Forward: `ξ ↦ β` with `β_a = 2(n+1)·ℓ_a(bar(P_ξ))`, exact at rational
//! `ξ`. The scaling constant is pinned by the flat model (the octant maps
//! `ξ = (β_1^{-1}, …, β_{n+1}^{-1})` to `β`) and by the anticanonical
//! examples at the regular Reeb vector.
//!
//! Backward: `β ↦ ξ` by damped Newton minimization of `vol(Δ_ξ)` over the
//! normalized Reeb slice `Ξ_β = {ξ ∈ C*₀ : ⟨ξ, q_β⟩ = 1/2}` where `q_β` is
//! the point on the monotone ray with `β_a^{-1} ℓ_a(q_β) = 1/(2(n+1))`. At
//! the minimizer the barycenter of `P_ξ` equals `q_β`, which inverts the
//! forward map. The minimizer is generally irrational, so this half runs in
//! `f64`; residuals can be recomputed exactly at the dyadic rational value
//! of the iterate.

use nalgebra::{DMatrix, DVector};
use num_traits::Signed;

use crate::angles::{angles_cone_membership, AngleVector, Membership, ReebVector};
use crate::cone::GoodCone;
use crate::error::{Error, Result};
use crate::exact::{self, Rat};
use crate::polytope;
use crate::volume::VolumeFunction;

/// Options for the `β → ξ` solve.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Terminate when the projected gradient norm drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Recompute residuals in exact arithmetic at the dyadic rational
    /// rounding of the minimizer.
    pub certify: bool,
    /// Optional starting point; it is rescaled onto the slice `Ξ_β`.
    pub initial: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iter: 200,
            certify: false,
            initial: None,
        }
    }
}

/// Residuals of a correspondence computation, in floating point.
#[derive(Debug, Clone, Default)]
pub struct Residuals {
    /// `max_a |bar(P_ξ) − q_β|` componentwise.
    pub barycenter_gap: f64,
    /// Projected gradient norm at termination.
    pub gradient_norm: f64,
    /// `max_a |β_a(ξ) − β_a| / max(1, β_a)` for the recomputed angles.
    pub roundtrip: f64,
}

/// Exact residues recomputed at a rational rounding of the minimizer.
#[derive(Debug, Clone)]
pub struct CertifiedResiduals {
    pub xi: Vec<Rat>,
    /// Angles of the rounded minimizer, exact.
    pub beta_at_xi: Vec<Rat>,
    /// `max_a |β_a(ξ) − β_a|`, exact, reported as f64.
    pub max_angle_gap: f64,
    /// `max_i |bar(P_ξ)_i − (q_β)_i|`, exact, reported as f64.
    pub max_barycenter_gap: f64,
}

/// One direction of the correspondence, with enough data to audit it.
#[derive(Debug, Clone)]
pub struct CorrespondenceResult {
    pub xi: Vec<f64>,
    /// Present when the Reeb vector is exactly rational (always for the
    /// forward map at rational input).
    pub xi_exact: Option<Vec<Rat>>,
    pub beta: Vec<f64>,
    pub beta_exact: Option<Vec<Rat>>,
    /// Barycenter of `P_ξ`, ambient coordinates.
    pub barycenter: Vec<f64>,
    pub barycenter_exact: Option<Vec<Rat>>,
    /// The monotone point `q_β = bar(P_ξ)` at a correspondence pair.
    pub monotone_point: Vec<f64>,
    pub monotone_exact: Option<Vec<Rat>>,
    pub residuals: Residuals,
    pub iterations: usize,
    /// `vol(Δ_ξ)` at the output Reeb vector.
    pub volume_at_min: f64,
    pub certified: Option<CertifiedResiduals>,
}

/// Scaling constant of the correspondence: `β = scale · L(bar(P_ξ))`.
fn angle_scale(cone: &GoodCone) -> Rat {
    exact::rat_int(2 * cone.dim() as i64)
}

/// The angles cut by the Reeb vector `ξ`: `β_a = 2(n+1)·ℓ_a(bar(P_ξ))`.
/// Exact; the output always lies in the angles' cone, with witness
/// `2(n+1)·bar(P_ξ)`.
pub fn reeb_to_angles(cone: &GoodCone, xi: &ReebVector) -> Result<CorrespondenceResult> {
    let p = polytope::slice(cone, xi)?;
    let mom = polytope::moments(&p)?;
    let scale = angle_scale(cone);
    let beta: Vec<Rat> = cone
        .ell_all(&mom.barycenter)
        .into_iter()
        .map(|l| l * &scale)
        .collect();
    debug_assert!(beta.iter().all(|b| b.is_positive()));
    Ok(CorrespondenceResult {
        xi: xi.to_f64(),
        xi_exact: Some(xi.entries().to_vec()),
        beta: exact::vec_to_f64(&beta),
        beta_exact: Some(beta),
        barycenter: exact::vec_to_f64(&mom.barycenter),
        barycenter_exact: Some(mom.barycenter.clone()),
        monotone_point: exact::vec_to_f64(&mom.barycenter),
        monotone_exact: Some(mom.barycenter),
        residuals: Residuals::default(),
        iterations: 0,
        volume_at_min: exact::rat_to_f64(&mom.euclid_volume_delta),
        certified: None,
    })
}

/// The monotone point `q_β`: the point on the ray `E_β` (where all
/// `β_a^{-1} ℓ_a` agree) with `β_a^{-1} ℓ_a(q_β) = 1/(2(n+1))`.
pub fn monotone_point(cone: &GoodCone, beta: &AngleVector) -> Result<Vec<Rat>> {
    match angles_cone_membership(cone, beta)? {
        Membership::Member { witness } => {
            let scale = angle_scale(cone);
            Ok(witness.into_iter().map(|x| x / &scale).collect())
        }
        Membership::NotMember { certificate } => Err(Error::NotInAnglesCone { certificate }),
    }
}

/// The unique Reeb vector carrying the prescribed cone angles, by damped
/// Newton minimization of the volume of `Δ_ξ` over the slice `Ξ_β`.
pub fn angles_to_reeb(
    cone: &GoodCone,
    beta: &AngleVector,
    opts: &SolveOptions,
) -> Result<CorrespondenceResult> {
    if beta.len() != cone.num_facets() {
        return Err(Error::DimensionMismatch {
            expected: cone.num_facets(),
            got: beta.len(),
        });
    }
    let m = cone.dim();
    let q = monotone_point(cone, beta)?;
    let q_f64 = exact::vec_to_f64(&q);
    let vf = VolumeFunction::new(cone);
    let rays_f64: Vec<Vec<f64>> = cone
        .rays()
        .iter()
        .map(|u| {
            u.iter()
                .map(|x| exact::rat_to_f64(&Rat::from_integer(x.clone())))
                .collect()
        })
        .collect();

    // Start at the canonical Reeb vector ξ^can = Σ β_a^{-1} v_a scaled onto
    // the slice (a positive combination of the normals is always interior,
    // and ⟨ξ^can, q_β⟩ = d/(2(n+1)) makes the scale exact).
    let xi0: Vec<f64> = match &opts.initial {
        Some(init) => {
            if init.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: init.len(),
                });
            }
            let pairing: f64 = init.iter().zip(&q_f64).map(|(a, b)| a * b).sum();
            if !(pairing > 0.0) {
                return Err(Error::LineSearchFailure {
                    iterations: 0,
                    xi: init.clone(),
                    gradient_norm: f64::NAN,
                });
            }
            init.iter().map(|x| x / (2.0 * pairing)).collect()
        }
        None => {
            let mut canonical = vec![Rat::from_integer(0.into()); m];
            for (v, b) in cone.normals().iter().zip(beta.entries()) {
                let w = b.recip();
                for (c, vi) in canonical.iter_mut().zip(v) {
                    *c += Rat::from_integer(vi.clone()) * &w;
                }
            }
            let t = exact::rat(m as i64, beta.len() as i64);
            canonical
                .iter()
                .map(|x| exact::rat_to_f64(&(x * &t)))
                .collect()
        }
    };

    // Orthonormal basis of the tangent space {ν : ⟨ν, q_β⟩ = 0}.
    let tangent = tangent_basis(&q_f64);
    let feasible = |xi: &[f64]| {
        rays_f64
            .iter()
            .all(|u| u.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() > 0.0)
    };
    if !feasible(&xi0) {
        return Err(Error::LineSearchFailure {
            iterations: 0,
            xi: xi0,
            gradient_norm: f64::NAN,
        });
    }

    let mut xi = DVector::from_row_slice(&xi0);
    let mut iterations = 0;
    let mut grad_norm;
    loop {
        let g_full = vf.grad(xi.as_slice());
        let g = tangent.transpose() * &g_full;
        grad_norm = g.norm();
        if grad_norm < opts.tol {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::MaxIterations {
                max_iter: opts.max_iter,
                xi: xi.as_slice().to_vec(),
                gradient_norm: grad_norm,
            });
        }
        let h_full = vf.hess(xi.as_slice());
        let h = tangent.transpose() * &h_full * &tangent;
        // vol is strictly convex on the slice; a failed factorization means
        // the iterate left the region where the model is trustworthy.
        let Some(chol) = h.clone().cholesky() else {
            return Err(Error::SingularHessian {
                condition: f64::INFINITY,
            });
        };
        let dir = -chol.solve(&g);
        let f0 = vf.eval(xi.as_slice());
        // Near the minimizer the true decrease drops below the resolution of
        // f64 evaluations of vol; there a step is accepted when it shrinks
        // the projected gradient instead.
        let noise = 32.0 * f64::EPSILON * f0.abs();
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-18 {
            let candidate = &xi + &tangent * (t * &dir);
            if feasible(candidate.as_slice()) {
                let f_new = vf.eval(candidate.as_slice());
                let improved = if f_new < f0 {
                    true
                } else if f_new <= f0 + noise {
                    let g_new = tangent.transpose() * vf.grad(candidate.as_slice());
                    g_new.norm() < 0.99 * grad_norm
                } else {
                    false
                };
                if improved {
                    xi = candidate;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::LineSearchFailure {
                iterations,
                xi: xi.as_slice().to_vec(),
                gradient_norm: grad_norm,
            });
        }
        iterations += 1;
    }
    // One polishing Newton step: quadratic convergence lands the gradient at
    // the floating-point noise floor instead of just below tol.
    {
        let g_full = vf.grad(xi.as_slice());
        let g = tangent.transpose() * &g_full;
        let h = tangent.transpose() * &vf.hess(xi.as_slice()) * &tangent;
        if let Some(chol) = h.cholesky() {
            let dir = -chol.solve(&g);
            let candidate = &xi + &tangent * &dir;
            if feasible(candidate.as_slice()) {
                let g_new = tangent.transpose() * &vf.grad(candidate.as_slice());
                if g_new.norm() < grad_norm {
                    xi = candidate;
                    grad_norm = g_new.norm();
                }
            }
        }
    }

    let xi_vec = xi.as_slice().to_vec();
    let xi_rat = exact::vec_from_f64(&xi_vec).expect("finite iterate");
    let reeb = ReebVector::new(xi_rat.clone());
    let check = reeb_to_angles(cone, &reeb)?;
    let bar_exact = check
        .barycenter_exact
        .clone()
        .expect("forward map is exact");
    let beta_check = check.beta_exact.clone().expect("forward map is exact");
    let barycenter_gap = bar_exact
        .iter()
        .zip(&q)
        .map(|(a, b)| exact::rat_to_f64(&(a - b)).abs())
        .fold(0.0, f64::max);
    let roundtrip = beta_check
        .iter()
        .zip(beta.entries())
        .map(|(got, want)| {
            let denom = exact::rat_to_f64(want).abs().max(1.0);
            exact::rat_to_f64(&(got - want)).abs() / denom
        })
        .fold(0.0, f64::max);
    // Independent verification of the fixed point: the angles recomputed
    // from the minimizer (through the exact forward map) must match the
    // request to within 10·tol.
    if roundtrip >= 10.0 * opts.tol {
        return Err(Error::MaxIterations {
            max_iter: opts.max_iter,
            xi: xi_vec,
            gradient_norm: grad_norm,
        });
    }
    let certified = opts.certify.then(|| CertifiedResiduals {
        xi: xi_rat,
        beta_at_xi: beta_check.clone(),
        max_angle_gap: beta_check
            .iter()
            .zip(beta.entries())
            .map(|(a, b)| exact::rat_to_f64(&(a - b)).abs())
            .fold(0.0, f64::max),
        max_barycenter_gap: barycenter_gap,
    });
    Ok(CorrespondenceResult {
        xi: xi_vec.clone(),
        xi_exact: None,
        beta: exact::vec_to_f64(beta.entries()),
        beta_exact: Some(beta.entries().to_vec()),
        barycenter: check.barycenter,
        barycenter_exact: Some(bar_exact),
        monotone_point: q_f64,
        monotone_exact: Some(q),
        residuals: Residuals {
            barycenter_gap,
            gradient_norm: grad_norm,
            roundtrip,
        },
        iterations,
        volume_at_min: vf.eval(&xi_vec),
        certified,
    })
}

/// Orthonormal basis (columns) of the hyperplane orthogonal to `q`.
fn tangent_basis(q: &[f64]) -> DMatrix<f64> {
    let m = q.len();
    let qn = DVector::from_row_slice(q).normalize();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(m - 1);
    for i in 0..m {
        let mut e = DVector::zeros(m);
        e[i] = 1.0;
        let mut v = &e - &qn * qn.dot(&e);
        for c in &cols {
            let proj = c.dot(&v);
            v -= c * proj;
        }
        let norm = v.norm();
        if norm > 1e-9 {
            cols.push(v / norm);
        }
        if cols.len() == m - 1 {
            break;
        }
    }
    assert_eq!(cols.len(), m - 1, "tangent space has codimension one");
    DMatrix::from_columns(&cols)
}
