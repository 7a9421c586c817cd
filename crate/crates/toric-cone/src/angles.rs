//! Angle vectors, Reeb vectors, and the angles' cone.
//!
//! The angles' cone is the set of strictly positive `β ∈ ℝ^d` of the form
//! `β_a = ℓ_a(p)` for an interior point `p` of the moment cone. Membership is
//! decided exactly: either a unique witness `p` is produced, or a kernel
//! relation `η` of the stacked normal matrix with `⟨β, η⟩ ≠ 0` certifies
//! failure.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::cone::GoodCone;
use crate::error::{Error, Result};
use crate::exact::{self, dot_int_rat, Int, Rat};

/// Strictly positive cone angles `β_a`, one per facet (the metric angle
/// along the divisor `D_a` is `2πβ_a`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleVector {
    entries: Vec<Rat>,
}

impl AngleVector {
    pub fn new(entries: Vec<Rat>) -> Result<Self> {
        for (i, b) in entries.iter().enumerate() {
            if !b.is_positive() {
                return Err(Error::NonPositiveAngle { index: i });
            }
        }
        Ok(AngleVector { entries })
    }

    pub fn from_i64(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| exact::rat_int(x)).collect())
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, t: &Rat) -> Result<Self> {
        Self::new(self.entries.iter().map(|b| b * t).collect())
    }
}

/// A candidate Reeb vector; interiority in the dual cone is checked against
/// a specific cone by the operations that consume it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReebVector {
    entries: Vec<Rat>,
}

impl ReebVector {
    pub fn new(entries: Vec<Rat>) -> Self {
        ReebVector { entries }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        ReebVector::new(exact::rat_vec(entries))
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn scaled(&self, t: &Rat) -> Self {
        ReebVector::new(self.entries.iter().map(|x| x * t).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        exact::vec_to_f64(&self.entries)
    }
}

/// Outcome of the angles'-cone membership test.
#[derive(Debug, Clone)]
pub enum Membership {
    /// The unique interior point with `ℓ_a(p) = β_a` for all `a`.
    Member { witness: Vec<Rat> },
    /// A kernel relation of the normal matrix that `β` violates:
    /// `Σ_a η_a v_a = 0` but `⟨β, η⟩ ≠ 0`.
    NotMember { certificate: Vec<Int> },
}

impl Membership {
    pub fn witness(&self) -> Option<&[Rat]> {
        match self {
            Membership::Member { witness } => Some(witness),
            Membership::NotMember { .. } => None,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Decides `β ∈ 𝓑` exactly, returning the witness `p` with `ℓ_a(p) = β_a`
/// or a violated kernel relation.
pub fn angles_cone_membership(cone: &GoodCone, beta: &AngleVector) -> Result<Membership> {
    if beta.len() != cone.num_facets() {
        return Err(Error::DimensionMismatch {
            expected: cone.num_facets(),
            got: beta.len(),
        });
    }
    let rows: Vec<Vec<Rat>> = cone
        .normals()
        .iter()
        .map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    if let Some(p) = exact::solve(&rows, beta.entries()) {
        debug_assert!(cone.is_interior_point(&p));
        return Ok(Membership::Member { witness: p });
    }
    // Kernel of the transposed normal matrix: relations Σ_a η_a v_a = 0.
    let transpose: Vec<Vec<Rat>> = (0..cone.dim())
        .map(|i| rows.iter().map(|r| r[i].clone()).collect())
        .collect();
    let kernel = exact::kernel_basis(&transpose);
    let eta = kernel
        .into_iter()
        .find(|eta| {
            let pairing: Rat = eta
                .iter()
                .zip(beta.entries())
                .map(|(e, b)| Rat::from_integer(e.clone()) * b)
                .sum();
            !pairing.is_zero()
        })
        .expect("an inconsistent system violates some kernel relation");
    Ok(Membership::NotMember { certificate: eta })
}

/// Kernel basis of the transposed normal matrix; the linear relations that
/// cut the angles' cone out of the positive orthant.
pub fn angles_cone_relations(cone: &GoodCone) -> Vec<Vec<Int>> {
    let transpose: Vec<Vec<Rat>> = (0..cone.dim())
        .map(|i| {
            cone.normals()
                .iter()
                .map(|v| Rat::from_integer(v[i].clone()))
                .collect()
        })
        .collect();
    exact::kernel_basis(&transpose)
}

/// The cohomological reading of membership: the logarithmic first Chern
/// class of the contact distribution vanishes for the angles `β` exactly
/// when `β` lies in the angles' cone.
pub fn chern_class_criterion(cone: &GoodCone, beta: &AngleVector) -> Result<bool> {
    Ok(angles_cone_membership(cone, beta)?.is_member())
}

/// Certificate for the log pair attached to `(C, β)`.
#[derive(Debug, Clone)]
pub struct LogPairCertificate {
    /// Witness `p` with `ℓ_a(p) = β_a`; present exactly when ℝ-Cartier.
    pub interior_point: Option<Vec<Rat>>,
    pub is_r_cartier: bool,
    /// `(v′, a_{v′})` with discrepancy `a_{v′} = ⟨p, v′⟩ − 1` for each
    /// queried ray; empty when not ℝ-Cartier.
    pub discrepancies: Vec<(Vec<Int>, Rat)>,
    pub is_klt: bool,
    /// Whether the all-angles-equal direction lies in the angles' cone.
    pub is_q_gorenstein: bool,
    /// Kernel certificate when not ℝ-Cartier.
    pub certificate: Option<Vec<Int>>,
}

/// ℝ-Cartier and klt checks with discrepancies on caller-supplied rays.
///
/// Each queried ray must be a primitive integer vector inside the dual cone
/// `σ = C*` (a nonnegative combination of the facet normals); the
/// discrepancy along it is `⟨p, v′⟩ − 1` with `p` the Cartier witness.
pub fn cartier_klt(
    cone: &GoodCone,
    beta: &AngleVector,
    interior_rays: &[Vec<Int>],
) -> Result<LogPairCertificate> {
    for ray in interior_rays {
        if ray.len() != cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: cone.dim(),
                got: ray.len(),
            });
        }
        let as_i64: Vec<i64> = ray.iter().map(|x| x.to_i64().unwrap_or(0)).collect();
        if exact::is_zero_vec(ray) || !cone.dual_contains(ray) {
            return Err(Error::RayOutsideCone { ray: as_i64 });
        }
        if !exact::is_primitive(ray) {
            return Err(Error::RayOutsideCone { ray: as_i64 });
        }
    }
    let q_gorenstein = {
        let ones = AngleVector::new(vec![Rat::from_integer(Int::from(1)); cone.num_facets()])
            .expect("all-ones vector is positive");
        angles_cone_membership(cone, &ones)?.is_member()
    };
    match angles_cone_membership(cone, beta)? {
        Membership::Member { witness } => {
            let discrepancies: Vec<(Vec<Int>, Rat)> = interior_rays
                .iter()
                .map(|v| {
                    let a = dot_int_rat(v, &witness) - Rat::from_integer(Int::from(1));
                    (v.clone(), a)
                })
                .collect();
            // Discrepancies of rays in the dual cone exceed −1 whenever the
            // pair is ℝ-Cartier; asserted, not assumed.
            let minus_one = Rat::from_integer(Int::from(-1));
            let is_klt = discrepancies.iter().all(|(_, a)| a > &minus_one);
            debug_assert!(is_klt);
            Ok(LogPairCertificate {
                interior_point: Some(witness),
                is_r_cartier: true,
                discrepancies,
                is_klt,
                is_q_gorenstein: q_gorenstein,
                certificate: None,
            })
        }
        Membership::NotMember { certificate } => Ok(LogPairCertificate {
            interior_point: None,
            is_r_cartier: false,
            discrepancies: Vec::new(),
            is_klt: false,
            is_q_gorenstein: q_gorenstein,
            certificate: Some(certificate),
        }),
    }
}
