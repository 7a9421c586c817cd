//! Shared helpers for the integration suites: seeded random sampling of
//! Reeb vectors, admissible angle vectors, and interior points.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toric_cone::angles::{AngleVector, ReebVector};
use toric_cone::cone::GoodCone;
use toric_cone::exact::{self, Rat};

pub const DEFAULT_SEED: u64 = 0x5eed_ca5e;

/// Deterministic generator; override with TORIC_CY_SEED for exploration.
pub fn rng() -> ChaCha8Rng {
    let seed = std::env::var("TORIC_CY_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    ChaCha8Rng::seed_from_u64(seed)
}

/// A positive rational with numerator and denominator in `1..=bound`.
pub fn rand_rat(rng: &mut ChaCha8Rng, bound: i64) -> Rat {
    exact::rat(rng.gen_range(1..=bound), rng.gen_range(1..=bound))
}

/// Random interior Reeb vector: a positive rational combination of the
/// facet normals, normalized so the pairing with the first extreme ray is 1.
pub fn random_reeb(cone: &GoodCone, rng: &mut ChaCha8Rng) -> ReebVector {
    let m = cone.dim();
    let mut xi = vec![Rat::zero(); m];
    for v in cone.normals() {
        let w = rand_rat(rng, 6);
        for (x, c) in xi.iter_mut().zip(v) {
            *x += Rat::from_integer(c.clone()) * &w;
        }
    }
    let scale = exact::dot_int_rat(&cone.rays()[0], &xi);
    ReebVector::new(xi.into_iter().map(|x| x / &scale).collect())
}

/// Random admissible angles: the facet values of a positive rational
/// combination of the extreme rays, normalized so max+min = 2.
pub fn random_angles(cone: &GoodCone, rng: &mut ChaCha8Rng) -> AngleVector {
    let m = cone.dim();
    let mut p = vec![Rat::zero(); m];
    for u in cone.rays() {
        let w = rand_rat(rng, 6);
        for (x, c) in p.iter_mut().zip(u) {
            *x += Rat::from_integer(c.clone()) * &w;
        }
    }
    let beta = cone.ell_all(&p);
    let max = beta
        .iter()
        .cloned()
        .reduce(|a, b| if b > a { b } else { a })
        .unwrap();
    let min = beta
        .iter()
        .cloned()
        .reduce(|a, b| if b < a { b } else { a })
        .unwrap();
    let scale = (max + min) / exact::rat_int(2);
    AngleVector::new(beta.into_iter().map(|b| b / &scale).collect())
        .expect("facet values of an interior point are positive")
}

/// Random interior point of the cone, as a positive rational combination of
/// the extreme rays with weights in `[1/4, 4]`.
pub fn random_interior_point(cone: &GoodCone, rng: &mut ChaCha8Rng) -> Vec<Rat> {
    let m = cone.dim();
    let mut p = vec![Rat::zero(); m];
    for u in cone.rays() {
        let w = exact::rat(rng.gen_range(1..=16), rng.gen_range(1..=4));
        for (x, c) in p.iter_mut().zip(u) {
            *x += Rat::from_integer(c.clone()) * &w;
        }
    }
    p
}

pub fn fixture_cone(name: &str) -> GoodCone {
    toric_cone::fixtures::by_name(name)
        .unwrap_or_else(|| panic!("fixture {name} exists"))
        .cone()
        .expect("fixture cones validate")
}

pub fn all_fixture_cones() -> Vec<GoodCone> {
    toric_cone::fixtures::all()
        .iter()
        .map(|f| f.cone().expect("fixture cones validate"))
        .collect()
}
