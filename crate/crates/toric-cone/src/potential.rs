//! Symplectic potentials on the moment cone and their curvature data.
//!
//! Every potential handled here is a sum of terms `½ c f log f` with `f` a
//! linear form: the Guillemin potential with angle weights,
//! `G = ½ Σ_a β_a^{-1} ℓ_a log ℓ_a`, and its Reeb-adapted variant
//! `G_ξ^can = G^can + ½ ℓ_ξ log ℓ_ξ − ½ ℓ_∞ log ℓ_∞` with
//! `ℓ_∞ = Σ_a β_a^{-1} ℓ_a`. Each such term contributes `½ c (1 + log f) v`
//! to the gradient and `½ c v vᵀ / f` to the Hessian, so values, gradients
//! and Hessians are assembled in closed form; only the scalar curvature uses
//! finite differences (of the inverse Hessian, per the Abreu formula).

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};

use crate::angles::{AngleVector, ReebVector};
use crate::cone::GoodCone;
use crate::error::{Error, Result};
use crate::exact::{self, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// `½ Σ_a β_a^{-1} ℓ_a log ℓ_a`; its Reeb vector is `Σ_a β_a^{-1} v_a`.
    GuilleminBeta,
    /// The Guillemin potential corrected to have a prescribed Reeb vector.
    CanonicalXi,
}

/// One `½ coeff · ⟨vector, x⟩ log ⟨vector, x⟩` summand.
#[derive(Debug, Clone)]
struct LogTerm {
    coeff: Rat,
    vector: Vec<Rat>,
    coeff_f64: f64,
    vector_f64: Vec<f64>,
    /// Facet index when the linear form is a facet normal (for errors).
    facet: Option<usize>,
}

impl LogTerm {
    fn new(coeff: Rat, vector: Vec<Rat>, facet: Option<usize>) -> Self {
        LogTerm {
            coeff_f64: exact::rat_to_f64(&coeff),
            vector_f64: exact::vec_to_f64(&vector),
            coeff,
            vector,
            facet,
        }
    }
}

/// A symplectic potential, evaluable on the interior of the moment cone.
#[derive(Debug, Clone)]
pub struct SymplecticPotential {
    pub kind: PotentialKind,
    cone: GoodCone,
    beta: Vec<Rat>,
    xi: Option<Vec<Rat>>,
    terms: Vec<LogTerm>,
}

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone)]
pub struct PotentialEval {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// The metric data of a potential at an interior point: in action-angle
/// coordinates the metric splits into the Hessian block on `dx ⊗ dx` and
/// the inverse-Hessian block on `dθ ⊗ dθ`.
#[derive(Debug, Clone)]
pub struct MetricSample {
    pub point: Vec<f64>,
    pub hessian: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    /// `max_j |2 (Hess G · x)_j − ξ_j|` against the potential's Reeb vector.
    pub reeb_residual: f64,
    pub condition: f64,
}

/// Finite-difference scalar curvature estimate with a Richardson error
/// indicator.
#[derive(Debug, Clone)]
pub struct ScalarCurvature {
    /// Richardson-extrapolated value from the two steps.
    pub value: f64,
    /// `|R(h/2) − R(h)| / 3`.
    pub error_indicator: f64,
    pub coarse: f64,
    pub fine: f64,
}

impl SymplecticPotential {
    pub fn guillemin(cone: &GoodCone, beta: &AngleVector) -> Result<Self> {
        if beta.len() != cone.num_facets() {
            return Err(Error::DimensionMismatch {
                expected: cone.num_facets(),
                got: beta.len(),
            });
        }
        let terms = guillemin_terms(cone, beta);
        Ok(SymplecticPotential {
            kind: PotentialKind::GuilleminBeta,
            cone: cone.clone(),
            beta: beta.entries().to_vec(),
            xi: None,
            terms,
        })
    }

    pub fn canonical_xi(cone: &GoodCone, beta: &AngleVector, xi: &ReebVector) -> Result<Self> {
        if beta.len() != cone.num_facets() {
            return Err(Error::DimensionMismatch {
                expected: cone.num_facets(),
                got: beta.len(),
            });
        }
        cone.check_reeb(xi.entries())?;
        let mut terms = guillemin_terms(cone, beta);
        let ell_infty = ell_infinity(cone, beta);
        terms.push(LogTerm::new(Rat::one(), xi.entries().to_vec(), None));
        terms.push(LogTerm::new(-Rat::one(), ell_infty, None));
        Ok(SymplecticPotential {
            kind: PotentialKind::CanonicalXi,
            cone: cone.clone(),
            beta: beta.entries().to_vec(),
            xi: Some(xi.entries().to_vec()),
            terms,
        })
    }

    pub fn cone(&self) -> &GoodCone {
        &self.cone
    }

    pub fn beta(&self) -> &[Rat] {
        &self.beta
    }

    /// The prescribed Reeb vector; `None` for the plain Guillemin potential
    /// (whose Reeb vector is the canonical `Σ_a β_a^{-1} v_a`).
    pub fn xi(&self) -> Option<&[Rat]> {
        self.xi.as_deref()
    }

    /// The Reeb vector of the metric: `2 Hess(G)(x) · x`, which telescopes
    /// to `Σ_t c_t v_t` independently of `x`.
    pub fn reeb(&self) -> Vec<Rat> {
        let m = self.cone.dim();
        let mut out = vec![Rat::zero(); m];
        for t in &self.terms {
            for (o, v) in out.iter_mut().zip(&t.vector) {
                *o += &t.coeff * v;
            }
        }
        out
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cone.dim(),
                got: x.len(),
            });
        }
        for t in &self.terms {
            let f = dot_f64(&t.vector_f64, x);
            if f <= 0.0 {
                return Err(Error::OutsideCone {
                    facet: t.facet.unwrap_or(usize::MAX),
                });
            }
        }
        Ok(())
    }

    /// Closed-form value, gradient and Hessian at an interior point.
    pub fn eval(&self, x: &[f64]) -> Result<PotentialEval> {
        self.check_point(x)?;
        let m = self.cone.dim();
        let mut value = 0.0;
        let mut gradient = DVector::zeros(m);
        let mut hessian = DMatrix::zeros(m, m);
        for t in &self.terms {
            let f = dot_f64(&t.vector_f64, x);
            let log_f = f.ln();
            value += 0.5 * t.coeff_f64 * f * log_f;
            let gfactor = 0.5 * t.coeff_f64 * (1.0 + log_f);
            let hfactor = 0.5 * t.coeff_f64 / f;
            for i in 0..m {
                gradient[i] += gfactor * t.vector_f64[i];
                for j in 0..m {
                    hessian[(i, j)] += hfactor * t.vector_f64[i] * t.vector_f64[j];
                }
            }
        }
        Ok(PotentialEval {
            value,
            gradient,
            hessian,
        })
    }

    /// The Hessian is a rational function of the point; exact at rational
    /// input.
    pub fn hessian_exact(&self, x: &[Rat]) -> Result<Vec<Vec<Rat>>> {
        let m = self.cone.dim();
        if x.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: x.len(),
            });
        }
        let mut h = vec![vec![Rat::zero(); m]; m];
        let half = exact::rat(1, 2);
        for t in &self.terms {
            let f = exact::dot(&t.vector, x);
            if !f.is_positive() {
                return Err(Error::OutsideCone {
                    facet: t.facet.unwrap_or(usize::MAX),
                });
            }
            let factor = &half * &t.coeff / f;
            for i in 0..m {
                for j in 0..m {
                    h[i][j] += &factor * &t.vector[i] * &t.vector[j];
                }
            }
        }
        Ok(h)
    }

    /// Hessian, inverse, and the Reeb identity residual at a point.
    pub fn metric_at(&self, x: &[f64]) -> Result<MetricSample> {
        let eval = self.eval(x)?;
        let m = self.cone.dim();
        let svd = eval.hessian.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(condition < 1e12) {
            return Err(Error::SingularHessian { condition });
        }
        let inverse = eval
            .hessian
            .clone()
            .try_inverse()
            .ok_or(Error::SingularHessian { condition })?;
        let reeb = exact::vec_to_f64(&self.reeb());
        let hx = &eval.hessian * DVector::from_row_slice(x);
        let reeb_residual = (0..m)
            .map(|j| (2.0 * hx[j] - reeb[j]).abs())
            .fold(0.0, f64::max);
        Ok(MetricSample {
            point: x.to_vec(),
            hessian: eval.hessian,
            inverse,
            reeb_residual,
            condition,
        })
    }

    /// Scalar curvature `R_X = −Σ_{ij} ∂² G^{ij} / ∂x_i ∂x_j` by central
    /// finite differences of the inverse Hessian at steps `h` and `h/2`,
    /// Richardson-extrapolated.
    pub fn abreu_scalar_curvature(&self, x: &[f64], h: f64) -> Result<ScalarCurvature> {
        self.check_point(x)?;
        if !(h > 0.0) {
            return Err(Error::StepTooLarge {
                step: h,
                distance: 0.0,
            });
        }
        for (a, v) in self.cone.normals().iter().enumerate() {
            let vf: Vec<f64> = v
                .iter()
                .map(|c| exact::rat_to_f64(&Rat::from_integer(c.clone())))
                .collect();
            let dist = dot_f64(&vf, x);
            if dist <= 10.0 * h {
                let _ = a;
                return Err(Error::StepTooLarge {
                    step: h,
                    distance: dist,
                });
            }
        }
        let coarse = self.scalar_curvature_step(x, h)?;
        let fine = self.scalar_curvature_step(x, h / 2.0)?;
        Ok(ScalarCurvature {
            value: (4.0 * fine - coarse) / 3.0,
            error_indicator: (fine - coarse).abs() / 3.0,
            coarse,
            fine,
        })
    }

    fn inverse_hessian_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let eval = self.eval(x)?;
        eval.hessian.try_inverse().ok_or(Error::SingularHessian {
            condition: f64::INFINITY,
        })
    }

    fn scalar_curvature_step(&self, x: &[f64], h: f64) -> Result<f64> {
        let m = self.cone.dim();
        let center = self.inverse_hessian_at(x)?;
        let mut total = 0.0;
        for i in 0..m {
            // ∂²G^{ii}… same-variable second difference.
            let mut plus = x.to_vec();
            plus[i] += h;
            let mut minus = x.to_vec();
            minus[i] -= h;
            let gp = self.shifted_inverse(&plus, h)?;
            let gm = self.shifted_inverse(&minus, h)?;
            total += (gp[(i, i)] - 2.0 * center[(i, i)] + gm[(i, i)]) / (h * h);
            for j in (i + 1)..m {
                let mut pp = x.to_vec();
                pp[i] += h;
                pp[j] += h;
                let mut pm = x.to_vec();
                pm[i] += h;
                pm[j] -= h;
                let mut mp = x.to_vec();
                mp[i] -= h;
                mp[j] += h;
                let mut mm = x.to_vec();
                mm[i] -= h;
                mm[j] -= h;
                let second = (self.shifted_inverse(&pp, h)?[(i, j)]
                    - self.shifted_inverse(&pm, h)?[(i, j)]
                    - self.shifted_inverse(&mp, h)?[(i, j)]
                    + self.shifted_inverse(&mm, h)?[(i, j)])
                    / (4.0 * h * h);
                total += 2.0 * second;
            }
        }
        Ok(-total)
    }

    fn shifted_inverse(&self, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
        self.inverse_hessian_at(x).map_err(|e| match e {
            Error::OutsideCone { .. } => Error::StepTooLarge {
                step: h,
                distance: 0.0,
            },
            other => other,
        })
    }
}

fn guillemin_terms(cone: &GoodCone, beta: &AngleVector) -> Vec<LogTerm> {
    cone.normals()
        .iter()
        .zip(beta.entries())
        .enumerate()
        .map(|(a, (v, b))| {
            let vector: Vec<Rat> = v.iter().map(|c| Rat::from_integer(c.clone())).collect();
            LogTerm::new(b.recip(), vector, Some(a))
        })
        .collect()
}

fn ell_infinity(cone: &GoodCone, beta: &AngleVector) -> Vec<Rat> {
    let m = cone.dim();
    let mut out = vec![Rat::zero(); m];
    for (v, b) in cone.normals().iter().zip(beta.entries()) {
        let w = b.recip();
        for (o, c) in out.iter_mut().zip(v) {
            *o += Rat::from_integer(c.clone()) * &w;
        }
    }
    out
}

fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
