//! Transversal polytopes `P_ξ = C ∩ {⟨ξ, x⟩ = 1/2}` and the truncated cones
//! `Δ_ξ = C ∩ {⟨ξ, x⟩ ≤ 1/2}`, in exact rational arithmetic.
//!
//! All integrals (volumes, moments, boundary measures) are computed from the
//! pulling triangulation inherited from the cone's face lattice. The chart on
//! the slicing hyperplane drops the ambient coordinate with the largest
//! `|ξ_k|`; chart-dependent scalars are labelled as such, everything feeding
//! the Reeb/angle correspondence (barycenters, ratios) is chart-independent.

use num_traits::{One, Signed, Zero};

use crate::angles::{AngleVector, ReebVector};
use crate::cone::GoodCone;
use crate::error::{Error, Result};
use crate::exact::{self, dot, dot_int_rat, Int, Rat};

/// Affine chart on the hyperplane `H_ξ`: drop one ambient coordinate and
/// translate its origin to a vertex.
#[derive(Debug, Clone)]
pub struct Chart {
    pub dropped: usize,
    pub origin: Vec<Rat>,
}

impl Chart {
    /// Linear part: drop the chosen coordinate of a tangent vector.
    pub fn project(&self, v: &[Rat]) -> Vec<Rat> {
        v.iter()
            .enumerate()
            .filter(|(i, _)| *i != self.dropped)
            .map(|(_, x)| x.clone())
            .collect()
    }

    /// Chart coordinates of an ambient point on `H_ξ`.
    pub fn point(&self, x: &[Rat]) -> Vec<Rat> {
        let shifted: Vec<Rat> = x.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        self.project(&shifted)
    }
}

/// The compact slice of a cone by a Reeb hyperplane, with its chart,
/// vertices, triangulation and facet structure. Immutable.
#[derive(Debug, Clone)]
pub struct TransversalPolytope {
    pub cone: GoodCone,
    pub xi: Vec<Rat>,
    pub chart: Chart,
    /// Ambient coordinates; vertex `i` is extreme ray `i` scaled onto `H_ξ`.
    pub vertices: Vec<Vec<Rat>>,
    /// Top-dimensional simplices as vertex-index tuples.
    pub triangulation: Vec<Vec<usize>>,
    /// For each cone facet, the vertices lying on it.
    pub facet_map: Vec<Vec<usize>>,
}

/// Chart volume, ambient barycenter and second moments of `P_ξ`, plus the
/// Euclidean volume of the truncated cone `Δ_ξ`.
#[derive(Debug, Clone)]
pub struct PolytopeMoments {
    /// `∫_{P_ξ} dx̃` in the polytope's chart.
    pub volume: Rat,
    /// Barycenter in ambient coordinates (chart-independent).
    pub barycenter: Vec<Rat>,
    /// `∫_{P_ξ} x_i x_j dx̃` in ambient coordinates.
    pub second_moments: Vec<Vec<Rat>>,
    /// Euclidean volume of `Δ_ξ` (chart-independent).
    pub euclid_volume_delta: Rat,
}

/// An affine function on ambient space, `x ↦ constant + ⟨linear, x⟩`; its
/// restriction to any hyperplane is affine.
#[derive(Debug, Clone)]
pub struct AffineFn {
    pub constant: Rat,
    pub linear: Vec<Rat>,
}

impl AffineFn {
    pub fn constant_one(dim: usize) -> Self {
        AffineFn {
            constant: Rat::one(),
            linear: vec![Rat::zero(); dim],
        }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        &self.constant + dot(&self.linear, x)
    }
}

/// Facet-wise integrals against the boundary measure `σ_{ξ,β}`.
#[derive(Debug, Clone)]
pub struct BoundaryIntegrals {
    pub per_facet: Vec<Rat>,
    pub total: Rat,
}

/// Per-facet conversion factors between the chart Lebesgue measure on
/// `F_a ∩ P_ξ` and `σ_{ξ,β}`. Reported in floating point (the Euclidean
/// facet measure involves a square root); all integrals stay exact.
#[derive(Debug, Clone)]
pub struct BoundaryMeasure {
    pub beta: Vec<Rat>,
    pub densities: Vec<f64>,
}

/// Euclidean facet and cone volumes, with the induced link volumes in units
/// of powers of `2π`.
#[derive(Debug, Clone)]
pub struct FacetVolumes {
    /// `vol(Δ_ξ)`, Euclidean.
    pub delta_volume: Rat,
    /// `vol(F_a) / |v_a|`; rational, unlike `vol(F_a)` itself.
    pub facet_volume_over_norm: Vec<Rat>,
    /// `vol(F_a)`, Euclidean, floating point.
    pub facet_euclid: Vec<f64>,
    /// `|v_a|²`.
    pub normal_norm_sq: Vec<Int>,
    /// `vol(Σ_a) = coeff · (2π)^n`.
    pub sigma_coeff: Vec<Rat>,
    /// `vol(S) = coeff · (2π)^{n+1}`.
    pub link_coeff: Rat,
}

/// Slices the cone by `{⟨ξ, x⟩ = 1/2}` with the deterministic chart (drop
/// the coordinate maximizing `|ξ_k|`, ties to the smallest index).
pub fn slice(cone: &GoodCone, xi: &ReebVector) -> Result<TransversalPolytope> {
    let mut best = 0;
    for k in 1..xi.entries().len() {
        if xi.entries()[k].abs() > xi.entries()[best].abs() {
            best = k;
        }
    }
    slice_with_drop(cone, xi, best)
}

/// As [`slice`], with an explicit dropped coordinate. `ξ_k` must be nonzero
/// for the projection to be a chart of `H_ξ`.
pub fn slice_with_drop(
    cone: &GoodCone,
    xi: &ReebVector,
    dropped: usize,
) -> Result<TransversalPolytope> {
    cone.check_reeb(xi.entries())?;
    assert!(
        !xi.entries()[dropped].is_zero(),
        "dropped coordinate must have nonzero Reeb component"
    );
    let two = exact::rat_int(2);
    let vertices: Vec<Vec<Rat>> = cone
        .rays()
        .iter()
        .map(|u| {
            let pairing = dot_int_rat(u, xi.entries());
            let t = (&two * pairing).recip();
            u.iter()
                .map(|ui| Rat::from_integer(ui.clone()) * &t)
                .collect()
        })
        .collect();
    let chart = Chart {
        dropped,
        origin: vertices[0].clone(),
    };
    let triangulation = cone.triangulate();
    let facet_map: Vec<Vec<usize>> = cone
        .incidence()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(r, _)| r)
                .collect()
        })
        .collect();
    Ok(TransversalPolytope {
        cone: cone.clone(),
        xi: xi.entries().to_vec(),
        chart,
        vertices,
        triangulation,
        facet_map,
    })
}

/// Chart volume of the simplex spanned by the given vertices.
fn simplex_chart_volume(p: &TransversalPolytope, simplex: &[usize]) -> Rat {
    let n = p.cone.n();
    let base = &p.vertices[simplex[0]];
    let rows: Vec<Vec<Rat>> = simplex[1..]
        .iter()
        .map(|&i| {
            let edge: Vec<Rat> = p.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect();
            p.chart.project(&edge)
        })
        .collect();
    exact::det(&rows).abs() / Rat::from_integer(factorial(n))
}

fn factorial(n: usize) -> Int {
    (1..=n).fold(Int::one(), |acc, k| acc * Int::from(k))
}

/// Euclidean volume of `Δ_ξ` from the induced cone triangulation:
/// each simplicial cone on rays `u_i` contributes
/// `|det(u_1 … u_m)| / (2^m · m! · Π ⟨ξ, u_i⟩)`.
pub fn euclid_volume_delta(p: &TransversalPolytope) -> Rat {
    let m = p.cone.dim();
    let mut total = Rat::zero();
    let denom = Rat::from_integer(factorial(m) * Int::from(1u32 << m));
    for simplex in &p.triangulation {
        let rows: Vec<Vec<Int>> = simplex.iter().map(|&r| p.cone.rays()[r].clone()).collect();
        let det = Rat::from_integer(exact::det_int(&rows).abs());
        let mut pairings = Rat::one();
        for &r in simplex {
            pairings *= dot_int_rat(&p.cone.rays()[r], &p.xi);
        }
        total += det / (&denom * pairings);
    }
    total
}

/// Volume, barycenter and second moments of `P_ξ`.
pub fn moments(p: &TransversalPolytope) -> Result<PolytopeMoments> {
    let m = p.cone.dim();
    let n = p.cone.n();
    let mut volume = Rat::zero();
    let mut bary_num = vec![Rat::zero(); m];
    let mut second = vec![vec![Rat::zero(); m]; m];
    let np1 = Rat::from_integer(Int::from(n as i64 + 1));
    let np2 = Rat::from_integer(Int::from(n as i64 + 2));
    for simplex in &p.triangulation {
        let vol = simplex_chart_volume(p, simplex);
        if vol.is_zero() {
            continue;
        }
        let verts: Vec<&Vec<Rat>> = simplex.iter().map(|&i| &p.vertices[i]).collect();
        let mut sum = vec![Rat::zero(); m];
        for w in &verts {
            for (si, wi) in sum.iter_mut().zip(w.iter()) {
                *si += wi;
            }
        }
        for i in 0..m {
            bary_num[i] += &vol * &sum[i] / &np1;
        }
        // ∫_σ x xᵀ = vol · (Σ_k w_k w_kᵀ + s sᵀ) / ((n+1)(n+2)), s = Σ_k w_k.
        for i in 0..m {
            for j in i..m {
                let mut acc = &sum[i] * &sum[j];
                for w in &verts {
                    acc += &w[i] * &w[j];
                }
                let contrib = &vol * acc / (&np1 * &np2);
                second[i][j] += &contrib;
                if i != j {
                    second[j][i] += contrib;
                }
            }
        }
        volume += vol;
    }
    if volume.is_zero() {
        return Err(Error::DegeneratePolytope);
    }
    let barycenter: Vec<Rat> = bary_num.into_iter().map(|x| x / &volume).collect();
    Ok(PolytopeMoments {
        volume,
        barycenter,
        second_moments: second,
        euclid_volume_delta: euclid_volume_delta(p),
    })
}

/// Chart-coordinate volume, first and second moments, for the affine basis
/// used by the log Futaki invariant.
pub(crate) fn chart_moments(p: &TransversalPolytope) -> Result<(Rat, Vec<Rat>, Vec<Vec<Rat>>)> {
    let n = p.cone.n();
    let mut volume = Rat::zero();
    let mut first = vec![Rat::zero(); n];
    let mut second = vec![vec![Rat::zero(); n]; n];
    let np1 = Rat::from_integer(Int::from(n as i64 + 1));
    let np2 = Rat::from_integer(Int::from(n as i64 + 2));
    for simplex in &p.triangulation {
        let vol = simplex_chart_volume(p, simplex);
        if vol.is_zero() {
            continue;
        }
        let verts: Vec<Vec<Rat>> = simplex
            .iter()
            .map(|&i| p.chart.point(&p.vertices[i]))
            .collect();
        let mut sum = vec![Rat::zero(); n];
        for w in &verts {
            for (si, wi) in sum.iter_mut().zip(w.iter()) {
                *si += wi;
            }
        }
        for i in 0..n {
            first[i] += &vol * &sum[i] / &np1;
        }
        for i in 0..n {
            for j in i..n {
                let mut acc = &sum[i] * &sum[j];
                for w in &verts {
                    acc += &w[i] * &w[j];
                }
                let contrib = &vol * acc / (&np1 * &np2);
                second[i][j] += &contrib;
                if i != j {
                    second[j][i] += contrib;
                }
            }
        }
        volume += vol;
    }
    if volume.is_zero() {
        return Err(Error::DegeneratePolytope);
    }
    Ok((volume, first, second))
}

/// Tangent vector `u` of `H_ξ` with `⟨v_a, u⟩ = w_a`, used to contract the
/// chart volume form into the facet measure.
fn facet_contraction(p: &TransversalPolytope, facet: usize, weight: &Rat) -> Vec<Rat> {
    let rows = vec![
        p.xi.clone(),
        p.cone.normals()[facet]
            .iter()
            .map(|x| Rat::from_integer(x.clone()))
            .collect(),
    ];
    let rhs = vec![Rat::zero(), weight.clone()];
    exact::solve(&rows, &rhs).expect("ξ is interior, v_a extreme: the system is consistent")
}

/// Integrals `∫_{F_a ∩ P_ξ} f σ` where the facet measure satisfies
/// `w_a^{-1} dℓ_a ∧ σ = −dx̃`; `w = β` gives `σ_{ξ,β}`, `w = 1` gives
/// `σ_{ξ,1}`.
pub(crate) fn boundary_integrals_with_weights(
    p: &TransversalPolytope,
    weights: &[Rat],
    f: &AffineFn,
) -> Result<BoundaryIntegrals> {
    if weights.len() != p.cone.num_facets() {
        return Err(Error::DimensionMismatch {
            expected: p.cone.num_facets(),
            got: weights.len(),
        });
    }
    let n = p.cone.n();
    let nm1_fact = Rat::from_integer(factorial(n.saturating_sub(1)));
    let mut per_facet = Vec::with_capacity(p.cone.num_facets());
    for a in 0..p.cone.num_facets() {
        let u = facet_contraction(p, a, &weights[a]);
        let u_chart = p.chart.project(&u);
        let mut integral = Rat::zero();
        for simplex in p.cone.facet_triangulation(a) {
            // σ on a facet simplex: contract dx̃ with u against the edges.
            let base = &p.vertices[simplex[0]];
            let mut rows = vec![u_chart.clone()];
            for &i in &simplex[1..] {
                let edge: Vec<Rat> = p.vertices[i].iter().zip(base).map(|(x, b)| x - b).collect();
                rows.push(p.chart.project(&edge));
            }
            let measure = exact::det(&rows).abs() / &nm1_fact;
            let mut mean = Rat::zero();
            for &i in &simplex {
                mean += f.eval(&p.vertices[i]);
            }
            mean /= Rat::from_integer(Int::from(simplex.len() as i64));
            integral += measure * mean;
        }
        per_facet.push(integral);
    }
    let total = per_facet.iter().sum();
    Ok(BoundaryIntegrals { per_facet, total })
}

/// Integrals of an affine function against `σ_{ξ,β}`, facet by facet.
pub fn boundary_integrals(
    p: &TransversalPolytope,
    beta: &AngleVector,
    f: &AffineFn,
) -> Result<BoundaryIntegrals> {
    boundary_integrals_with_weights(p, beta.entries(), f)
}

/// The per-facet densities of `σ_{ξ,β}` against the Euclidean chart measure.
pub fn boundary_measure(p: &TransversalPolytope, beta: &AngleVector) -> Result<BoundaryMeasure> {
    let n = p.cone.n();
    let nm1_fact = Rat::from_integer(factorial(n.saturating_sub(1)));
    let mut densities = Vec::with_capacity(p.cone.num_facets());
    for a in 0..p.cone.num_facets() {
        let u = facet_contraction(p, a, &beta.entries()[a]);
        let u_chart = p.chart.project(&u);
        let simplex = &p.cone.facet_triangulation(a)[0];
        let base = &p.vertices[simplex[0]];
        let mut rows = vec![u_chart];
        let mut edges_f64: Vec<Vec<f64>> = Vec::new();
        for &i in &simplex[1..] {
            let edge: Vec<Rat> = p.vertices[i].iter().zip(base).map(|(x, b)| x - b).collect();
            edges_f64.push(exact::vec_to_f64(&p.chart.project(&edge)));
            rows.push(p.chart.project(&edge));
        }
        let sigma = exact::rat_to_f64(&(exact::det(&rows).abs() / &nm1_fact));
        let lebesgue = chart_simplex_euclid_volume(&edges_f64);
        densities.push(sigma / lebesgue);
    }
    Ok(BoundaryMeasure {
        beta: beta.entries().to_vec(),
        densities,
    })
}

fn chart_simplex_euclid_volume(edges: &[Vec<f64>]) -> f64 {
    let k = edges.len();
    if k == 0 {
        return 1.0;
    }
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| {
        edges[i]
            .iter()
            .zip(&edges[j])
            .map(|(a, b)| a * b)
            .sum::<f64>()
    });
    let fact: f64 = (1..=k).map(|x| x as f64).product();
    gram.determinant().abs().sqrt() / fact
}

/// Euclidean volumes of `Δ_ξ` and its lateral facets, with the link volumes
/// they induce.
pub fn facet_volumes(p: &TransversalPolytope) -> Result<FacetVolumes> {
    let m = p.cone.dim();
    let n = p.cone.n();
    let delta_volume = euclid_volume_delta(p);
    let pow = Rat::from_integer(Int::from(1u32 << n));
    let n_fact = Rat::from_integer(factorial(n));
    let mut facet_volume_over_norm = Vec::new();
    let mut facet_euclid = Vec::new();
    let mut normal_norm_sq = Vec::new();
    let mut sigma_coeff = Vec::new();
    for a in 0..p.cone.num_facets() {
        let v = &p.cone.normals()[a];
        let norm_sq: Int = v.iter().map(|x| x * x).sum();
        // Q_a = Σ |det(u_1 … u_n, v_a)| (1/2)^n / (n! Π ⟨ξ, u_i⟩)
        // equals |v_a| · vol(F_a); dividing by |v_a|² keeps it rational.
        let mut q = Rat::zero();
        for simplex in p.cone.facet_triangulation(a) {
            let mut rows: Vec<Vec<Int>> =
                simplex.iter().map(|&r| p.cone.rays()[r].clone()).collect();
            rows.push(v.clone());
            let det = Rat::from_integer(exact::det_int(&rows).abs());
            let mut pairings = Rat::one();
            for &r in &simplex {
                pairings *= dot_int_rat(&p.cone.rays()[r], &p.xi);
            }
            q += det / (&pow * &n_fact * pairings);
        }
        let over_norm = &q / Rat::from_integer(norm_sq.clone());
        facet_euclid.push(
            exact::rat_to_f64(&q) / exact::rat_to_f64(&Rat::from_integer(norm_sq.clone())).sqrt(),
        );
        sigma_coeff.push(Rat::from_integer(Int::from(2 * n as i64)) * &over_norm);
        facet_volume_over_norm.push(over_norm);
        normal_norm_sq.push(norm_sq);
    }
    let link_coeff = Rat::from_integer(Int::from(2 * m as i64)) * &delta_volume;
    Ok(FacetVolumes {
        delta_volume,
        facet_volume_over_norm,
        facet_euclid,
        normal_norm_sq,
        sigma_coeff,
        link_coeff,
    })
}
