//! The volume of the truncated cone `Δ_ξ` as an exact rational function of
//! the Reeb vector.
//!
//! A simplicial decomposition of the cone into subcones spanned by extreme
//! rays turns `vol(Δ_ξ)` into `Σ_σ c_σ / Π_i ⟨ξ, u_i⟩` with positive rational
//! coefficients `c_σ = |det(u_1 … u_{n+1})| / (2^{n+1} (n+1)!)`. The function
//! is homogeneous of degree `−(n+1)` and strictly positive on the Reeb cone;
//! its closed-form gradient and Hessian drive the Newton minimization, and
//! the Hessian of its logarithm is the canonical metric on the Reeb cone.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};

use crate::angles::ReebVector;
use crate::cone::GoodCone;
use crate::error::Result;
use crate::exact::{self, dot_int_rat, Int, Rat};

#[derive(Debug, Clone)]
pub struct VolumeTerm {
    pub coeff: Rat,
    /// Indices into the cone's extreme rays.
    pub rays: Vec<usize>,
}

/// `vol(Δ_ξ) = Σ_σ coeff_σ / Π_{i ∈ σ} ⟨ξ, u_i⟩`, exact.
#[derive(Debug, Clone)]
pub struct VolumeFunction {
    dim: usize,
    terms: Vec<VolumeTerm>,
    rays: Vec<Vec<Int>>,
    rays_f64: Vec<Vec<f64>>,
    coeffs_f64: Vec<f64>,
}

/// Builds the exact term list from the cone's pulling triangulation.
pub fn build_volume_function(cone: &GoodCone) -> VolumeFunction {
    VolumeFunction::new(cone)
}

impl VolumeFunction {
    pub fn new(cone: &GoodCone) -> Self {
        let m = cone.dim();
        let denom =
            Rat::from_integer((1..=m).fold(Int::from(1u32 << m), |acc, k| acc * Int::from(k)));
        let terms: Vec<VolumeTerm> = cone
            .triangulate()
            .into_iter()
            .map(|simplex| {
                let rows: Vec<Vec<Int>> = simplex.iter().map(|&r| cone.rays()[r].clone()).collect();
                let det = Rat::from_integer(exact::det_int(&rows).abs());
                VolumeTerm {
                    coeff: det / &denom,
                    rays: simplex,
                }
            })
            .collect();
        let rays = cone.rays().to_vec();
        let rays_f64: Vec<Vec<f64>> = rays
            .iter()
            .map(|u| {
                u.iter()
                    .map(|x| exact::rat_to_f64(&Rat::from_integer(x.clone())))
                    .collect()
            })
            .collect();
        let coeffs_f64 = terms.iter().map(|t| exact::rat_to_f64(&t.coeff)).collect();
        VolumeFunction {
            dim: m,
            terms,
            rays,
            rays_f64,
            coeffs_f64,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[VolumeTerm] {
        &self.terms
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    /// Exact evaluation at a rational Reeb vector.
    pub fn eval_exact(&self, xi: &[Rat]) -> Rat {
        let mut total = Rat::zero();
        for term in &self.terms {
            let mut denom = Rat::one();
            for &r in &term.rays {
                denom *= dot_int_rat(&self.rays[r], xi);
            }
            total += &term.coeff / denom;
        }
        total
    }

    pub fn eval_reeb(&self, xi: &ReebVector) -> Rat {
        self.eval_exact(xi.entries())
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let mut total = 0.0;
        for (term, &c) in self.terms.iter().zip(&self.coeffs_f64) {
            let mut denom = 1.0;
            for &r in &term.rays {
                denom *= dot_f64(&self.rays_f64[r], xi);
            }
            total += c / denom;
        }
        total
    }

    /// Closed-form gradient: each term contributes `−t_σ Σ_i u_i / ⟨ξ, u_i⟩`
    /// where `t_σ` is the term's value.
    pub fn grad(&self, xi: &[f64]) -> DVector<f64> {
        let m = self.dim;
        let mut g = DVector::zeros(m);
        for (term, &c) in self.terms.iter().zip(&self.coeffs_f64) {
            let pairings: Vec<f64> = term
                .rays
                .iter()
                .map(|&r| dot_f64(&self.rays_f64[r], xi))
                .collect();
            let value = c / pairings.iter().product::<f64>();
            for (&r, &p) in term.rays.iter().zip(&pairings) {
                for i in 0..m {
                    g[i] -= value * self.rays_f64[r][i] / p;
                }
            }
        }
        g
    }

    /// Closed-form Hessian:
    /// `t_σ [ (Σ_i u_i/⟨ξ,u_i⟩)(Σ_j u_j/⟨ξ,u_j⟩)ᵀ + Σ_i u_i u_iᵀ/⟨ξ,u_i⟩² ]`.
    pub fn hess(&self, xi: &[f64]) -> DMatrix<f64> {
        let m = self.dim;
        let mut h = DMatrix::zeros(m, m);
        for (term, &c) in self.terms.iter().zip(&self.coeffs_f64) {
            let pairings: Vec<f64> = term
                .rays
                .iter()
                .map(|&r| dot_f64(&self.rays_f64[r], xi))
                .collect();
            let value = c / pairings.iter().product::<f64>();
            let mut s: DVector<f64> = DVector::zeros(m);
            for (&r, &p) in term.rays.iter().zip(&pairings) {
                for i in 0..m {
                    s[i] += self.rays_f64[r][i] / p;
                }
            }
            for i in 0..m {
                for j in 0..m {
                    h[(i, j)] += value * s[i] * s[j];
                }
            }
            for (&r, &p) in term.rays.iter().zip(&pairings) {
                for i in 0..m {
                    for j in 0..m {
                        h[(i, j)] += value * self.rays_f64[r][i] * self.rays_f64[r][j] / (p * p);
                    }
                }
            }
        }
        h
    }

    /// Gradient of `log vol`.
    pub fn log_grad(&self, xi: &[f64]) -> DVector<f64> {
        let v = self.eval(xi);
        self.grad(xi) / v
    }

    /// Hessian of `log vol`, the canonical (Weil–Petersson type) metric on
    /// the Reeb cone.
    pub fn log_hess(&self, xi: &[f64]) -> DMatrix<f64> {
        let v = self.eval(xi);
        let g = self.grad(xi);
        let h = self.hess(xi);
        h / v - (&g * g.transpose()) / (v * v)
    }
}

/// Hessian of `ξ ↦ log vol(Δ_ξ)` at an interior rational Reeb vector.
pub fn weil_petersson_hessian(cone: &GoodCone, xi: &ReebVector) -> Result<DMatrix<f64>> {
    cone.check_reeb(xi.entries())?;
    let vf = VolumeFunction::new(cone);
    Ok(vf.log_hess(&xi.to_f64()))
}

fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
