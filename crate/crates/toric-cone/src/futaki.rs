//! Obstruction-side invariants: the log Futaki invariant, the affine
//! function it projects onto, total transversal scalar curvature, the
//! integrated scalar curvature identity, and the `R`-invariant of cones
//! over polarized toric manifolds.
//!
//! All quantities are computed exactly at rational `(ξ, β)`.

use num_traits::{One, Signed, Zero};

use crate::angles::{angles_cone_membership, AngleVector, Membership, ReebVector};
use crate::cone::GoodCone;
use crate::correspond::reeb_to_angles;
use crate::error::{Error, Result};
use crate::exact::{self, dot, Int, Rat};
use crate::polytope::{self, boundary_integrals_with_weights, AffineFn, TransversalPolytope};

/// The log Futaki invariant evaluated on the affine basis `{1, x̃_1, …,
/// x̃_n}` of the slice chart, with the barycenter comparison and the affine
/// function `A_β` from the moment system.
///
/// Basis values and `A` coefficients are chart-covariant; the vanishing
/// verdict is chart-independent.
#[derive(Debug, Clone)]
pub struct FutakiReport {
    /// `L(1), L(x̃_1), …, L(x̃_n)`; `L(1) = 0` by construction.
    pub l_values: Vec<Rat>,
    /// Coefficients `A_0, …, A_n` solving `Σ_j (∫ x̃_i x̃_j) A_j = 2 ∫_{∂P} x̃_i σ`.
    pub a_coeffs: Vec<Rat>,
    /// Barycenter of `(P_ξ, dx̃)` in chart coordinates.
    pub barycenter_interior: Vec<Rat>,
    /// Barycenter of `(∂P_ξ, σ_{ξ,β})` in chart coordinates.
    pub barycenter_boundary: Vec<Rat>,
    /// `max_i |L(x̃_i)|` as a float, compared against `tol`.
    pub max_l: f64,
    /// `max_i |bar_∂ − bar|_i` as a float.
    pub barycenter_gap: f64,
    pub vanishes: bool,
    pub tol: f64,
}

/// Default tolerance for the vanishing verdict on exact input.
pub const FUTAKI_TOL_EXACT: f64 = 1e-10;

/// Evaluates the log Futaki invariant `L_{ξ,β}` on the affine basis of the
/// slice chart.
pub fn log_futaki(
    cone: &GoodCone,
    xi: &ReebVector,
    beta: &AngleVector,
    tol: f64,
) -> Result<FutakiReport> {
    let p = polytope::slice(cone, xi)?;
    log_futaki_on(&p, beta, tol)
}

/// As [`log_futaki`], on an already-sliced polytope.
pub fn log_futaki_on(
    p: &TransversalPolytope,
    beta: &AngleVector,
    tol: f64,
) -> Result<FutakiReport> {
    let n = p.cone.n();
    let m = p.cone.dim();
    let (vol, first, second) = polytope::chart_moments(p)?;
    // The chart coordinate functions as ambient affine functions.
    let basis: Vec<AffineFn> = (0..=n)
        .map(|i| {
            if i == 0 {
                AffineFn::constant_one(m)
            } else {
                let retained: Vec<usize> = (0..m).filter(|&k| k != p.chart.dropped).collect();
                let k = retained[i - 1];
                let mut linear = vec![Rat::zero(); m];
                linear[k] = Rat::one();
                AffineFn {
                    constant: -p.chart.origin[k].clone(),
                    linear,
                }
            }
        })
        .collect();
    let boundary: Vec<Rat> = basis
        .iter()
        .map(|f| Ok(boundary_integrals_with_weights(p, beta.entries(), f)?.total))
        .collect::<Result<_>>()?;
    let interior: Vec<Rat> = (0..=n)
        .map(|i| {
            if i == 0 {
                vol.clone()
            } else {
                first[i - 1].clone()
            }
        })
        .collect();
    let mean_factor = &boundary[0] / &vol;
    let l_values: Vec<Rat> = (0..=n)
        .map(|i| &boundary[i] - &mean_factor * &interior[i])
        .collect();
    debug_assert!(l_values[0].is_zero());

    // Moment matrix over the affine basis; x̃_0 = 1.
    let mut moment = vec![vec![Rat::zero(); n + 1]; n + 1];
    moment[0][0] = vol.clone();
    for i in 1..=n {
        moment[0][i] = first[i - 1].clone();
        moment[i][0] = first[i - 1].clone();
        for j in 1..=n {
            moment[i][j] = second[i - 1][j - 1].clone();
        }
    }
    let rhs: Vec<Rat> = boundary.iter().map(|b| b * exact::rat_int(2)).collect();
    let a_coeffs = exact::solve(&moment, &rhs).ok_or(Error::SingularMomentMatrix)?;

    let barycenter_interior: Vec<Rat> = first.iter().map(|x| x / &vol).collect();
    let barycenter_boundary: Vec<Rat> = (1..=n).map(|i| &boundary[i] / &boundary[0]).collect();
    let max_l = l_values
        .iter()
        .map(|l| exact::rat_to_f64(l).abs())
        .fold(0.0, f64::max);
    let barycenter_gap = barycenter_interior
        .iter()
        .zip(&barycenter_boundary)
        .map(|(a, b)| exact::rat_to_f64(&(a - b)).abs())
        .fold(0.0, f64::max);
    Ok(FutakiReport {
        vanishes: max_l < tol,
        l_values,
        a_coeffs,
        barycenter_interior,
        barycenter_boundary,
        max_l,
        barycenter_gap,
        tol,
    })
}

/// Total transversal scalar curvature data.
#[derive(Debug, Clone)]
pub struct TotalScalar {
    /// `2 β_a ∫_{F_a} σ_{ξ,1}` per facet (chart measure).
    pub facet_terms: Vec<Rat>,
    /// Their sum, `𝐒(ξ) = 2 ∫_{∂P_ξ} σ_{ξ,β}`.
    pub value: Rat,
    /// The monotone level `λ_ξ = β_a^{-1} ℓ_a(E_β ∩ H_ξ)`, when `β ∈ 𝓑`.
    pub lambda: Option<Rat>,
    /// The Stokes cross-check `2(n/λ_ξ)·vol(P_ξ)`, when `β ∈ 𝓑`.
    pub cross_check: Option<Rat>,
    /// Chart volume of `P_ξ`.
    pub volume: Rat,
}

/// `𝐒(ξ) = 2 Σ_a β_a ∫_{F_a ∩ P_ξ} σ_{ξ,1}`, with the exact monotone
/// cross-check when `β` lies in the angles' cone.
pub fn total_transversal_scalar(
    cone: &GoodCone,
    xi: &ReebVector,
    beta: &AngleVector,
) -> Result<TotalScalar> {
    let p = polytope::slice(cone, xi)?;
    let ones = vec![Rat::one(); cone.num_facets()];
    let unit = boundary_integrals_with_weights(&p, &ones, &AffineFn::constant_one(cone.dim()))?;
    let two = exact::rat_int(2);
    let facet_terms: Vec<Rat> = unit
        .per_facet
        .iter()
        .zip(beta.entries())
        .map(|(i, b)| &two * b * i)
        .collect();
    let value: Rat = facet_terms.iter().sum();
    let volume = polytope::moments(&p)?.volume;
    let (lambda, cross_check) = match angles_cone_membership(cone, beta)? {
        Membership::Member { witness } => {
            // E_β ∩ H_ξ = witness / (2⟨ξ, witness⟩), where β_a^{-1}ℓ_a = λ.
            let lam = (&two * dot(xi.entries(), &witness)).recip();
            let check = &two * exact::rat_int(cone.n() as i64) / &lam * &volume;
            (Some(lam), Some(check))
        }
        Membership::NotMember { .. } => (None, None),
    };
    Ok(TotalScalar {
        facet_terms,
        value,
        lambda,
        cross_check,
        volume,
    })
}

/// Both sides of the integrated scalar curvature identity, in closed form.
///
/// Volumes carry transcendental factors, so everything is reported in units
/// of powers of `2π`: `vol(Σ_a) = sigma_coeff_a (2π)^n` and
/// `vol(S) = link_coeff (2π)^{n+1}`.
#[derive(Debug, Clone)]
pub struct ScalarIdentity {
    pub sigma_coeff: Vec<Rat>,
    pub link_coeff: Rat,
    /// `(2π/n) Σ_a β_a vol(Σ_a)` divided by `(2π)^{n+1}`.
    pub boundary_term: Rat,
    /// `2(n+1) vol(S)` divided by `(2π)^{n+1}`.
    pub bulk_term: Rat,
    /// Their difference: `∫_{Δ_ξ} R_X dx / (2π)^{n+1}`.
    pub integrated_scalar: Rat,
    /// Whether `π Σ β_a vol(Σ_a) = n(n+1) vol(S)` holds exactly.
    pub ricci_flat_balance: bool,
}

pub fn integrated_scalar_identity(
    cone: &GoodCone,
    xi: &ReebVector,
    beta: &AngleVector,
) -> Result<ScalarIdentity> {
    let p = polytope::slice(cone, xi)?;
    let fv = polytope::facet_volumes(&p)?;
    let n = exact::rat_int(cone.n() as i64);
    let np1 = exact::rat_int(cone.dim() as i64);
    let weighted: Rat = fv
        .sigma_coeff
        .iter()
        .zip(beta.entries())
        .map(|(s, b)| s * b)
        .sum();
    // (2π/n)·Σ β_a s_a (2π)^n = [Σ β_a s_a / n] (2π)^{n+1}.
    let boundary_term = &weighted / &n;
    let bulk_term = exact::rat_int(2) * &np1 * &fv.link_coeff;
    let integrated_scalar = &boundary_term - &bulk_term;
    // π Σ β_a vol(Σ_a) = n(n+1) vol(S) ⟺ Σ β_a s_a = 2 n(n+1) link_coeff.
    let ricci_flat_balance = weighted == exact::rat_int(2) * &n * &np1 * &fv.link_coeff;
    Ok(ScalarIdentity {
        sigma_coeff: fv.sigma_coeff,
        link_coeff: fv.link_coeff,
        boundary_term,
        bulk_term,
        integrated_scalar,
        ricci_flat_balance,
    })
}

/// The `R`-invariant of a cone over a polarized toric manifold.
#[derive(Debug, Clone)]
pub struct RInvariant {
    /// Angles at the regular Reeb vector `(0, …, 0, n+1)`.
    pub beta: Vec<Rat>,
    /// `R = (max_a β_a)^{-1}`.
    pub r: Rat,
}

/// Computes `R = (max_a β_a)^{-1}` with `β` the angles cut by the regular
/// Reeb vector `(0, …, 0, n+1)`.
///
/// Requires the cone to be a cone over a compact polytope `P × {1}`, i.e.
/// the vertical direction must pair positively with every extreme ray.
pub fn r_invariant(cone: &GoodCone) -> Result<RInvariant> {
    let m = cone.dim();
    let vertical: Vec<Int> = (0..m)
        .map(|i| if i + 1 == m { Int::one() } else { Int::zero() })
        .collect();
    let regular_ok = cone
        .rays()
        .iter()
        .all(|u| exact::dot_int(&vertical, u).is_positive());
    if !regular_ok {
        return Err(Error::NotAConeOverPolytope);
    }
    let mut xi = vec![Rat::zero(); m];
    xi[m - 1] = exact::rat_int(m as i64);
    let out = reeb_to_angles(cone, &ReebVector::new(xi))?;
    let beta = out
        .beta_exact
        .expect("forward map at rational input is exact");
    let max = beta
        .iter()
        .cloned()
        .reduce(|a, b| if b > a { b } else { a })
        .expect("nonempty angle vector");
    Ok(RInvariant {
        beta,
        r: max.recip(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn octant(dim: usize) -> GoodCone {
        let normals: Vec<Vec<i64>> = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect();
        GoodCone::new(&normals).unwrap()
    }

    fn dp1() -> GoodCone {
        GoodCone::new(&[
            vec![1, 0, 1],
            vec![0, -1, 1],
            vec![-1, -1, 1],
            vec![0, 1, 1],
        ])
        .unwrap()
    }

    fn dp2() -> GoodCone {
        GoodCone::new(&[
            vec![1, 0, 1],
            vec![0, -1, 1],
            vec![0, 1, 1],
            vec![-1, 0, 1],
            vec![-1, -1, 1],
        ])
        .unwrap()
    }

    #[test]
    fn futaki_vanishes_on_the_symmetric_simplex() {
        let cone = octant(3);
        let xi = ReebVector::from_i64(&[1, 1, 1]);
        let beta = AngleVector::from_i64(&[1, 1, 1]).unwrap();
        let report = log_futaki(&cone, &xi, &beta, FUTAKI_TOL_EXACT).unwrap();
        assert!(report.vanishes);
        for l in &report.l_values {
            assert!(l.is_zero());
        }
        assert_eq!(report.barycenter_interior, report.barycenter_boundary);
        // A_β is constant: A_1 = A_2 = 0.
        assert!(report.a_coeffs[1].is_zero());
        assert!(report.a_coeffs[2].is_zero());
    }

    #[test]
    fn futaki_vanishes_exactly_at_the_dp1_pair() {
        let cone = dp1();
        let xi = ReebVector::from_i64(&[0, 0, 3]);
        let beta = AngleVector::new(vec![rat(13, 12), rat(7, 6), rat(13, 12), rat(5, 6)]).unwrap();
        let report = log_futaki(&cone, &xi, &beta, FUTAKI_TOL_EXACT).unwrap();
        // (ξ, β) is a correspondence pair, so the invariant vanishes as an
        // exact rational identity.
        for l in &report.l_values {
            assert!(l.is_zero(), "L = {:?}", report.l_values);
        }
        assert!(report.vanishes);
    }

    #[test]
    fn futaki_does_not_vanish_off_the_pair() {
        let cone = dp1();
        // Perturb the Reeb vector within the slice through q_β by ε in the
        // first coordinate (the slice is {ξ₃ = 3} for this β).
        let beta = AngleVector::new(vec![rat(13, 12), rat(7, 6), rat(13, 12), rat(5, 6)]).unwrap();
        let xi = ReebVector::new(vec![rat(1, 100), Rat::zero(), rat_int(3)]);
        let report = log_futaki(&cone, &xi, &beta, FUTAKI_TOL_EXACT).unwrap();
        assert!(!report.vanishes);
        assert!(report.max_l > 1e-6);
    }

    #[test]
    fn three_futaki_tests_agree() {
        let cone = dp2();
        let xis = [
            ReebVector::from_i64(&[0, 0, 3]),
            ReebVector::new(vec![rat(1, 9), rat(-1, 11), rat_int(3)]),
        ];
        let betas = [
            AngleVector::from_i64(&[1, 1, 1, 1, 1]).unwrap(),
            AngleVector::new(vec![
                rat(19, 21),
                rat(23, 21),
                rat(19, 21),
                rat(23, 21),
                rat(25, 21),
            ])
            .unwrap(),
        ];
        for xi in &xis {
            for beta in &betas {
                let report = log_futaki(&cone, xi, beta, FUTAKI_TOL_EXACT).unwrap();
                let by_l = report.max_l < report.tol;
                let by_a = report.a_coeffs[1..]
                    .iter()
                    .map(|a| exact::rat_to_f64(a).abs())
                    .fold(0.0, f64::max)
                    < report.tol;
                let by_bar = report.barycenter_gap < report.tol;
                assert_eq!(by_l, by_a);
                assert_eq!(by_l, by_bar);
            }
        }
    }

    #[test]
    fn total_scalar_cross_check_is_exact() {
        let cone = dp1();
        let witness = vec![rat(1, 8), rat(-1, 9), rat_int(1)];
        let beta = AngleVector::new(cone.ell_all(&witness)).unwrap();
        for xi in [
            ReebVector::from_i64(&[0, 0, 3]),
            ReebVector::new(vec![rat(1, 4), rat(1, 6), rat_int(2)]),
        ] {
            let ts = total_transversal_scalar(&cone, &xi, &beta).unwrap();
            assert_eq!(ts.value, ts.cross_check.clone().unwrap());
        }
    }

    #[test]
    fn total_scalar_at_the_monotone_normalization() {
        // When the Reeb vector is scaled so that λ_ξ = 1/(n+1), the total
        // transversal scalar curvature is 2n(n+1)·vol(P_ξ).
        let cone = dp1();
        let witness = vec![rat(1, 8), rat(-1, 9), rat_int(1)];
        let beta = AngleVector::new(cone.ell_all(&witness)).unwrap();
        let xi0 = ReebVector::new(vec![rat(1, 4), rat(1, 6), rat_int(2)]);
        // λ scales inversely with ξ: pick t with λ_{tξ} = 1/(n+1).
        let lam0 = total_transversal_scalar(&cone, &xi0, &beta)
            .unwrap()
            .lambda
            .unwrap();
        let np1 = rat_int(cone.dim() as i64);
        let t = lam0 * np1.clone();
        let xi = xi0.scaled(&t);
        let ts = total_transversal_scalar(&cone, &xi, &beta).unwrap();
        assert_eq!(ts.lambda.clone().unwrap(), np1.recip());
        let n = rat_int(cone.n() as i64);
        assert_eq!(ts.value, rat_int(2) * &n * &np1 * &ts.volume);
        // Linearity in β: doubling the angles doubles 𝐒.
        let doubled = beta.scaled(&rat_int(2)).unwrap();
        let ts2 = total_transversal_scalar(&cone, &xi, &doubled).unwrap();
        assert_eq!(ts2.value, rat_int(2) * &ts.value);
    }

    #[test]
    fn two_sphere_integrated_scalar_identity() {
        // ℂ² octant at ξ = (1/β₁, 1/β₂): both displayed terms equal
        // 4π²β₁β₂, so the integrated scalar curvature vanishes and the
        // Ricci-flat balance holds.
        let cone = octant(2);
        let b1 = rat(2, 3);
        let b2 = rat(7, 4);
        let xi = ReebVector::new(vec![b1.recip(), b2.recip()]);
        let beta = AngleVector::new(vec![b1.clone(), b2.clone()]).unwrap();
        let id = integrated_scalar_identity(&cone, &xi, &beta).unwrap();
        assert!(id.integrated_scalar.is_zero());
        assert!(id.ricci_flat_balance);
        // (2π/n)Σβ_a vol(Σ_a) = 2π(β₁·2πβ₂ + β₂·2πβ₁) = 4π²·2β₁β₂
        //  = [2β₁β₂]·(2π)²  (n = 1).
        assert_eq!(id.boundary_term, rat_int(2) * &b1 * &b2);
    }

    #[test]
    fn dp3_balance_at_the_gorenstein_pair() {
        let cone = GoodCone::new(&[
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![1, -1, 1],
            vec![-1, 1, 1],
            vec![-1, 0, 1],
            vec![0, -1, 1],
        ])
        .unwrap();
        let xi = ReebVector::from_i64(&[0, 0, 3]);
        let beta = AngleVector::from_i64(&[1; 6]).unwrap();
        let id = integrated_scalar_identity(&cone, &xi, &beta).unwrap();
        assert!(id.ricci_flat_balance);
        assert!(id.integrated_scalar.is_zero());
        // The balance encodes the monotone normalization ⟨ξ, p_β⟩ = n+1,
        // so it survives slice-preserving perturbations and fails once the
        // normalization breaks.
        let xi_slide = ReebVector::new(vec![rat(1, 5), Rat::zero(), rat_int(3)]);
        let id_slide = integrated_scalar_identity(&cone, &xi_slide, &beta).unwrap();
        assert!(id_slide.ricci_flat_balance);
        let xi_off = ReebVector::new(vec![rat(1, 5), Rat::zero(), rat_int(2)]);
        let id_off = integrated_scalar_identity(&cone, &xi_off, &beta).unwrap();
        assert!(!id_off.ricci_flat_balance);
    }

    #[test]
    fn scaling_of_the_identity_terms() {
        // Under ξ → tξ both terms scale by t^{-n}; with β → β/t the weighted
        // boundary term picks up another 1/t, as does the bulk term… the
        // individually assertable statements are the homogeneities of
        // vol(Σ_a) and vol(S).
        let cone = dp1();
        let xi = ReebVector::new(vec![rat(1, 7), rat(1, 5), rat_int(2)]);
        let t = rat(4, 3);
        let beta = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
        let id = integrated_scalar_identity(&cone, &xi, &beta).unwrap();
        let id_t = integrated_scalar_identity(&cone, &xi.scaled(&t), &beta).unwrap();
        let n = cone.n() as i32;
        for (s, st) in id.sigma_coeff.iter().zip(&id_t.sigma_coeff) {
            assert_eq!(*st, s * t.pow(-n));
        }
        assert_eq!(id_t.link_coeff, &id.link_coeff * t.pow(-(n + 1)));
    }

    #[test]
    fn r_invariants_of_the_del_pezzo_cones() {
        assert_eq!(r_invariant(&dp1()).unwrap().r, rat(6, 7));
        assert_eq!(r_invariant(&dp2()).unwrap().r, rat(21, 25));
        // The Y^{2,1} cone is not a cone over a polytope in these
        // coordinates: the vertical direction lies outside the Reeb cone.
        let ypq =
            GoodCone::new(&[vec![1, 0, 0], vec![1, 0, 1], vec![1, 2, 2], vec![1, 1, 0]]).unwrap();
        assert!(matches!(
            r_invariant(&ypq),
            Err(Error::NotAConeOverPolytope)
        ));
    }

    #[test]
    fn r_invariant_of_the_non_anticanonical_polarization() {
        // Cone over the quadrilateral with vertices (1,0), (1,1), (2,2),
        // (2,0): angles ∝ (5/9, 7/9, 4/9, 7/9) and R = 9/7.
        let cone = GoodCone::new(&[
            vec![1, 0, -1],
            vec![1, -1, 0],
            vec![-1, 0, 2],
            vec![0, 1, 0],
        ])
        .unwrap();
        let inv = r_invariant(&cone).unwrap();
        assert_eq!(inv.beta, vec![rat(5, 9), rat(7, 9), rat(4, 9), rat(7, 9)]);
        assert_eq!(inv.r, rat(9, 7));
    }
}
