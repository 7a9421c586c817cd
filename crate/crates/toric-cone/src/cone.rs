//! Good strictly convex rational polyhedral cones.
//!
//! A cone is described by primitive inward facet normals `v_a ∈ ℤ^{n+1}`,
//! so `C = ∩_a {⟨v_a, ·⟩ ≥ 0}`. Validation computes the extreme rays by the
//! double description method in exact arithmetic, enumerates the face
//! lattice from the ray–facet incidence, and checks the lattice saturation
//! condition (goodness) on every proper face by Smith normal form.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, dot_int, dot_int_rat, is_saturated, primitive, rank_int, Int, Rat};

/// A validated good cone. Immutable after construction.
#[derive(Debug, Clone)]
pub struct GoodCone {
    dim: usize,
    normals: Vec<Vec<Int>>,
    rays: Vec<Vec<Int>>,
    /// `incidence[a][r]` is true when extreme ray `r` lies on facet `a`.
    incidence: Vec<Vec<bool>>,
    faces: Vec<Face>,
    /// For each face, the indices of its codimension-one subfaces.
    children: Vec<Vec<usize>>,
    /// Face index of each facet.
    facet_faces: Vec<usize>,
    name: Option<String>,
}

/// A proper face of positive dimension, identified by the extreme rays it
/// contains and the facets containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub rays: Vec<usize>,
    pub facets: Vec<usize>,
    pub dim: usize,
}

impl GoodCone {
    /// Validates facet normals and builds the cone. This is the only way to
    /// obtain a `GoodCone`.
    pub fn new(normals: &[Vec<i64>]) -> Result<Self> {
        let int_normals: Vec<Vec<Int>> = normals
            .iter()
            .map(|v| v.iter().map(|&x| Int::from(x)).collect())
            .collect();
        Self::from_int_normals(int_normals)
    }

    pub fn from_int_normals(normals: Vec<Vec<Int>>) -> Result<Self> {
        let dim = normals.first().map_or(0, Vec::len);
        if dim < 2 {
            return Err(Error::NotFullDimensional);
        }
        for (i, v) in normals.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if exact::is_zero_vec(v) || !exact::is_primitive(v) {
                return Err(Error::NotPrimitive { index: i });
            }
        }
        for i in 0..normals.len() {
            for j in 0..i {
                if normals[i] == normals[j] {
                    return Err(Error::RedundantNormal { index: i });
                }
            }
        }
        let nrank = rank_int(&normals);
        if nrank < dim {
            // The lineality space is the orthogonal complement of the
            // normals' span, so rank deficiency means C contains a line.
            return Err(Error::NotStrictlyConvex { dim, rank: nrank });
        }

        let rays = double_description(&normals, dim)?;
        if rays.is_empty() || rank_int(&rays) < dim {
            return Err(Error::NotFullDimensional);
        }

        let incidence: Vec<Vec<bool>> = normals
            .iter()
            .map(|v| rays.iter().map(|u| dot_int(v, u).is_zero()).collect())
            .collect();
        for (a, row) in incidence.iter().enumerate() {
            if row.iter().all(|&b| b) {
                // ℓ_a vanishes identically on the cone.
                return Err(Error::NotFullDimensional);
            }
            let facet_rays: Vec<Vec<Int>> = row
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(r, _)| rays[r].clone())
                .collect();
            if rank_int(&facet_rays) != dim - 1 {
                return Err(Error::RedundantNormal { index: a });
            }
        }

        let faces = enumerate_faces(&rays, &incidence);
        for face in &faces {
            let stacked: Vec<Vec<Int>> = face.facets.iter().map(|&a| normals[a].clone()).collect();
            if !is_saturated(&stacked) {
                return Err(Error::NotGood {
                    facets: face.facets.clone(),
                });
            }
        }

        let children: Vec<Vec<usize>> = faces
            .iter()
            .map(|f| {
                faces
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| g.dim + 1 == f.dim && is_subset(&g.rays, &f.rays))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let facet_faces: Vec<usize> = incidence
            .iter()
            .map(|row| {
                let ray_set: Vec<usize> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(r, _)| r)
                    .collect();
                faces
                    .iter()
                    .position(|f| f.rays == ray_set)
                    .expect("facet appears in the face lattice")
            })
            .collect();

        Ok(GoodCone {
            dim,
            normals,
            rays,
            incidence,
            faces,
            children,
            facet_faces,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Transversal dimension `n`.
    pub fn n(&self) -> usize {
        self.dim - 1
    }

    pub fn num_facets(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[Vec<Int>] {
        &self.normals
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn incidence(&self) -> &[Vec<bool>] {
        &self.incidence
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// `ℓ_a(x) = ⟨v_a, x⟩`.
    pub fn ell(&self, a: usize, x: &[Rat]) -> Rat {
        dot_int_rat(&self.normals[a], x)
    }

    pub fn ell_all(&self, x: &[Rat]) -> Vec<Rat> {
        self.normals.iter().map(|v| dot_int_rat(v, x)).collect()
    }

    /// True when `ℓ_a(x) > 0` for all facets.
    pub fn is_interior_point(&self, x: &[Rat]) -> bool {
        self.normals.iter().all(|v| dot_int_rat(v, x).is_positive())
    }

    /// Membership of an integer vector in the dual cone `C* = cone(v_a)`,
    /// tested against the extreme rays of `C`.
    pub fn dual_contains(&self, q: &[Int]) -> bool {
        self.rays.iter().all(|u| !dot_int(q, u).is_negative())
    }

    /// Errors unless `⟨ξ, u⟩ > 0` on every extreme ray `u`, i.e. unless `ξ`
    /// lies in the Reeb cone (interior of the dual cone).
    pub fn check_reeb(&self, xi: &[Rat]) -> Result<()> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        for u in &self.rays {
            if !dot_int_rat(u, xi).is_positive() {
                return Err(Error::ReebNotInterior {
                    ray: u.iter().map(|x| x.to_i64().unwrap_or(0)).collect(),
                });
            }
        }
        Ok(())
    }

    /// Sum of the extreme rays; an interior point of `C`.
    pub fn sum_of_rays(&self) -> Vec<Rat> {
        let mut s = vec![Int::zero(); self.dim];
        for u in &self.rays {
            for (si, ui) in s.iter_mut().zip(u) {
                *si += ui;
            }
        }
        s.into_iter().map(Rat::from_integer).collect()
    }

    /// Extreme rays of the dual cone `C*`, computed by double description
    /// from the extreme rays of `C` (which are the facet normals of `C*`).
    ///
    /// Double duality makes this an independent route: the result must
    /// coincide with the validated facet normals as a set of rays.
    pub fn dual_rays(&self) -> Vec<Vec<Int>> {
        double_description(&self.rays, self.dim)
            .expect("dual of a validated cone is pointed and full-dimensional")
    }

    /// Pulling triangulation of the cone into simplicial subcones spanned by
    /// extreme rays, as tuples of ray indices. Deterministic for a fixed
    /// priority; lower priority values are pulled first.
    pub fn triangulate_with_priority(&self, priority: &[usize]) -> Vec<Vec<usize>> {
        assert_eq!(priority.len(), self.rays.len());
        let mut memo: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
        let all: Vec<usize> = (0..self.rays.len()).collect();
        self.pull(&all, self.dim, &self.facet_faces, priority, &mut memo)
    }

    /// Triangulation with the identity priority (lexicographic ray order).
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let priority: Vec<usize> = (0..self.rays.len()).collect();
        self.triangulate_with_priority(&priority)
    }

    /// Pulling triangulation of one facet into (dim−1)-ray simplices.
    pub fn facet_triangulation(&self, facet: usize) -> Vec<Vec<usize>> {
        let priority: Vec<usize> = (0..self.rays.len()).collect();
        let mut memo = HashMap::new();
        self.triangulate_face(self.facet_faces[facet], &priority, &mut memo)
    }

    fn pull(
        &self,
        rays: &[usize],
        dim: usize,
        child_faces: &[usize],
        priority: &[usize],
        memo: &mut HashMap<usize, Vec<Vec<usize>>>,
    ) -> Vec<Vec<usize>> {
        if rays.len() == dim {
            return vec![rays.to_vec()];
        }
        let pivot = *rays
            .iter()
            .min_by_key(|&&r| priority[r])
            .expect("face has rays");
        let mut simplices = Vec::new();
        for &g in child_faces {
            if self.faces[g].rays.contains(&pivot) {
                continue;
            }
            for sub in self.triangulate_face(g, priority, memo) {
                let mut s = sub;
                s.push(pivot);
                s.sort_unstable();
                simplices.push(s);
            }
        }
        simplices
    }

    fn triangulate_face(
        &self,
        face: usize,
        priority: &[usize],
        memo: &mut HashMap<usize, Vec<Vec<usize>>>,
    ) -> Vec<Vec<usize>> {
        if let Some(cached) = memo.get(&face) {
            return cached.clone();
        }
        let f = &self.faces[face];
        let result = self.pull(
            &f.rays.clone(),
            f.dim,
            &self.children[face].clone(),
            priority,
            memo,
        );
        memo.insert(face, result.clone());
        result
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Extreme rays of `{x : ⟨row, x⟩ ≥ 0 for all rows}` for a pointed cone, as
/// primitive integer vectors in lexicographic order.
///
/// Classic double description: start from a simplicial subcone cut out by a
/// maximal independent subset of the rows, then insert the remaining
/// halfspaces one at a time, combining adjacent positive/negative ray pairs.
/// Adjacency is the standard combinatorial test on tight sets.
fn double_description(rows: &[Vec<Int>], dim: usize) -> Result<Vec<Vec<Int>>> {
    // Greedy maximal independent subset, by index.
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<Int>> = basis.iter().map(|&j| rows[j].clone()).collect();
        trial.push(rows[i].clone());
        if rank_int(&trial) == trial.len() {
            basis.push(i);
        }
        if basis.len() == dim {
            break;
        }
    }
    if basis.len() < dim {
        return Err(Error::NotStrictlyConvex {
            dim,
            rank: basis.len(),
        });
    }

    let basis_rows: Vec<Vec<Rat>> = basis
        .iter()
        .map(|&i| {
            rows[i]
                .iter()
                .map(|x| Rat::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let inv = exact::inverse(&basis_rows).expect("independent rows are invertible");
    // Columns of the inverse form the dual basis: ray j pairs to δ_ij.
    let mut rays: Vec<Vec<Int>> = (0..dim)
        .map(|j| {
            let col: Vec<Rat> = inv.iter().map(|row| row[j].clone()).collect();
            exact::primitive_from_rat(&col).expect("inverse columns are nonzero")
        })
        .collect();
    // primitive_from_rat fixes signs by first nonzero entry; restore the
    // inward orientation ⟨row_j, ray_j⟩ > 0.
    for (j, ray) in rays.iter_mut().enumerate() {
        if dot_int(&rows[basis[j]], ray).is_negative() {
            for x in ray.iter_mut() {
                *x = -x.clone();
            }
        }
    }

    let mut processed: Vec<usize> = basis.clone();
    for next in 0..rows.len() {
        if basis.contains(&next) {
            continue;
        }
        let v = &rows[next];
        let signs: Vec<i32> = rays
            .iter()
            .map(|r| {
                let s = dot_int(v, r);
                if s.is_zero() {
                    0
                } else if s.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .collect();
        if signs.iter().all(|&s| s >= 0) {
            processed.push(next);
            continue;
        }
        // Tight sets over processed constraints, for the adjacency test.
        let tight: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .copied()
                    .filter(|&a| dot_int(&rows[a], r).is_zero())
                    .collect()
            })
            .collect();
        let mut new_rays: Vec<Vec<Int>> = Vec::new();
        for p in 0..rays.len() {
            if signs[p] != 1 {
                continue;
            }
            for m in 0..rays.len() {
                if signs[m] != -1 {
                    continue;
                }
                let common: Vec<usize> = tight[p]
                    .iter()
                    .copied()
                    .filter(|a| tight[m].contains(a))
                    .collect();
                let adjacent = (0..rays.len())
                    .all(|t| t == p || t == m || !common.iter().all(|a| tight[t].contains(a)));
                if !adjacent {
                    continue;
                }
                let sp = dot_int(v, &rays[p]);
                let sm = dot_int(v, &rays[m]);
                let w: Vec<Int> = rays[p]
                    .iter()
                    .zip(&rays[m])
                    .map(|(pi, mi)| &sp * mi - &sm * pi)
                    .collect();
                new_rays.push(primitive(&w).expect("combined ray is nonzero"));
            }
        }
        rays = rays
            .into_iter()
            .zip(signs)
            .filter(|(_, s)| *s >= 0)
            .map(|(r, _)| r)
            .collect();
        rays.extend(new_rays);
        processed.push(next);
    }

    rays.sort();
    rays.dedup();
    Ok(rays)
}

/// All proper faces of dimension ≥ 1, from the closure of the facet ray sets
/// under intersection. Ordered by (dimension, ray set) for determinism.
fn enumerate_faces(rays: &[Vec<Int>], incidence: &[Vec<bool>]) -> Vec<Face> {
    let num_rays = rays.len();
    assert!(num_rays <= 64, "ray sets are stored as 64-bit masks");
    let facet_masks: Vec<u64> = incidence
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .fold(0u64, |m, (r, _)| m | (1 << r))
        })
        .collect();
    let mut masks: Vec<u64> = facet_masks.clone();
    masks.sort_unstable();
    masks.dedup();
    loop {
        let mut added = false;
        let snapshot = masks.clone();
        for &m in &snapshot {
            for &f in &facet_masks {
                let inter = m & f;
                if inter != 0 && !masks.contains(&inter) {
                    masks.push(inter);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let mut faces: Vec<Face> = masks
        .into_iter()
        .map(|mask| {
            let ray_list: Vec<usize> = (0..num_rays).filter(|r| mask & (1 << r) != 0).collect();
            let facets: Vec<usize> = facet_masks
                .iter()
                .enumerate()
                .filter(|(_, &fm)| mask & !fm == 0)
                .map(|(a, _)| a)
                .collect();
            let ray_vecs: Vec<Vec<Int>> = ray_list.iter().map(|&r| rays[r].clone()).collect();
            let dim = rank_int(&ray_vecs);
            Face {
                rays: ray_list,
                facets,
                dim,
            }
        })
        .collect();
    faces.sort_by(|a, b| (a.dim, &a.rays).cmp(&(b.dim, &b.rays)));
    faces
}
