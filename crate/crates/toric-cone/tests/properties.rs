//! Oracle-backed property tests: Monte-Carlo moment estimation, grid
//! refinement of the volume minimization, chart and triangulation
//! consistency, and randomized algebraic invariants.

mod common;

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::{all_fixture_cones, fixture_cone, random_angles, random_reeb, rng};
use toric_cone::angles::{angles_cone_membership, AngleVector, ReebVector};
use toric_cone::correspond::{angles_to_reeb, monotone_point, reeb_to_angles, SolveOptions};
use toric_cone::exact::{self, rat, rat_int, Rat};
use toric_cone::polytope::{self, AffineFn};
use toric_cone::potential::SymplecticPotential;
use toric_cone::volume::VolumeFunction;

/// Uniform rejection sampling in the chart bounding box, compared against
/// the exact chart volume and ambient moments at three standard errors.
#[test]
fn monte_carlo_moment_oracle() {
    let mut rng = rng();
    const SAMPLES: usize = 1_000_000;
    for cone in all_fixture_cones() {
        let m = cone.dim();
        let xi = random_reeb(&cone, &mut rng);
        let p = polytope::slice(&cone, &xi).unwrap();
        let mom = polytope::moments(&p).unwrap();

        let dropped = p.chart.dropped;
        let retained: Vec<usize> = (0..m).filter(|&k| k != dropped).collect();
        let xi_f: Vec<f64> = xi.to_f64();
        let origin: Vec<f64> = exact::vec_to_f64(&p.chart.origin);
        let chart_vertices: Vec<Vec<f64>> = p
            .vertices
            .iter()
            .map(|v| exact::vec_to_f64(&p.chart.point(v)))
            .collect();
        let n = m - 1;
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in &chart_vertices {
            for i in 0..n {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let box_vol: f64 = (0..n).map(|i| hi[i] - lo[i]).product();
        let normals_f: Vec<Vec<f64>> = cone
            .normals()
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| exact::rat_to_f64(&Rat::from_integer(x.clone())))
                    .collect()
            })
            .collect();

        // Accumulators for 1, x_i, x_i x_j (ambient) with their squares.
        let n_stats = 1 + m + m * m;
        let mut sums = vec![0.0f64; n_stats];
        let mut sq_sums = vec![0.0f64; n_stats];
        let mut ambient = vec![0.0f64; m];
        for _ in 0..SAMPLES {
            let mut inside = true;
            // Map the chart sample to ambient coordinates on H_ξ.
            for k in 0..m {
                ambient[k] = origin[k];
            }
            for (i, &r) in retained.iter().enumerate() {
                let y: f64 = rng.gen_range(lo[i]..hi[i]);
                ambient[r] += y;
                ambient[dropped] -= y * xi_f[r] / xi_f[dropped];
            }
            for row in &normals_f {
                let pairing: f64 = row.iter().zip(&ambient).map(|(a, b)| a * b).sum();
                if pairing < 0.0 {
                    inside = false;
                    break;
                }
            }
            if !inside {
                continue;
            }
            let mut idx = 0;
            sums[idx] += 1.0;
            sq_sums[idx] += 1.0;
            idx += 1;
            for i in 0..m {
                sums[idx] += ambient[i];
                sq_sums[idx] += ambient[i] * ambient[i];
                idx += 1;
            }
            for i in 0..m {
                for j in 0..m {
                    let v = ambient[i] * ambient[j];
                    sums[idx] += v;
                    sq_sums[idx] += v * v;
                    idx += 1;
                }
            }
        }
        let mut exact_values = vec![exact::rat_to_f64(&mom.volume)];
        for i in 0..m {
            exact_values.push(exact::rat_to_f64(&(&mom.barycenter[i] * &mom.volume)));
        }
        for i in 0..m {
            for j in 0..m {
                exact_values.push(exact::rat_to_f64(&mom.second_moments[i][j]));
            }
        }
        for (k, expected) in exact_values.iter().enumerate() {
            let mean = sums[k] / SAMPLES as f64;
            let var = (sq_sums[k] / SAMPLES as f64 - mean * mean).max(0.0);
            let estimate = box_vol * mean;
            let stderr = box_vol * (var / SAMPLES as f64).sqrt();
            assert!(
                (estimate - expected).abs() <= 3.0 * stderr,
                "{:?} moment {k}: estimate {estimate} vs exact {expected} (3σ = {})",
                cone.name(),
                3.0 * stderr
            );
        }
    }
}

/// Independent minimization oracle: refine a grid on the slice Ξ_β and
/// compare with the Newton output on the irregular Y(2,1) cone.
#[test]
fn y21_newton_matches_grid_refinement() {
    let cone = fixture_cone("y21");
    let beta = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
    let solved = angles_to_reeb(&cone, &beta, &SolveOptions::default()).unwrap();
    assert!(solved.residuals.roundtrip < 1e-9);
    assert!(solved.residuals.barycenter_gap < 1e-9);

    let vf = VolumeFunction::new(&cone);
    let q = exact::vec_to_f64(&monotone_point(&cone, &beta).unwrap());
    let m = cone.dim();
    // Orthonormal basis of {ν ⊥ q}, with the start point on the slice.
    let qn = DVector::from_row_slice(&q).normalize();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..m {
        let mut e = DVector::zeros(m);
        e[i] = 1.0;
        let mut v = &e - &qn * qn.dot(&e);
        for c in &cols {
            let proj = c.dot(&v);
            v -= c * proj;
        }
        if v.norm() > 1e-9 {
            cols.push(v.normalize());
        }
    }
    let rays_f: Vec<Vec<f64>> = cone
        .rays()
        .iter()
        .map(|u| {
            u.iter()
                .map(|x| exact::rat_to_f64(&Rat::from_integer(x.clone())))
                .collect()
        })
        .collect();
    let feasible = |xi: &DVector<f64>| {
        rays_f
            .iter()
            .all(|u| u.iter().zip(xi.iter()).map(|(a, b)| a * b).sum::<f64>() > 0.0)
    };
    let start: Vec<f64> = {
        // Canonical Reeb vector scaled onto the slice.
        let mut canonical = vec![0.0; m];
        for v in cone.normals() {
            for (c, vi) in canonical.iter_mut().zip(v) {
                *c += exact::rat_to_f64(&Rat::from_integer(vi.clone()));
            }
        }
        let pairing: f64 = canonical.iter().zip(&q).map(|(a, b)| a * b).sum();
        canonical.iter().map(|x| x / (2.0 * pairing)).collect()
    };
    let mut center = DVector::from_row_slice(&start);
    let mut radius = center.norm();
    for _ in 0..14 {
        let mut best = center.clone();
        let mut best_val = f64::INFINITY;
        for i in -10i32..=10 {
            for j in -10i32..=10 {
                let candidate = &center
                    + &cols[0] * (radius * i as f64 / 10.0)
                    + &cols[1] * (radius * j as f64 / 10.0);
                if !feasible(&candidate) {
                    continue;
                }
                let val = vf.eval(candidate.as_slice());
                if val < best_val {
                    best_val = val;
                    best = candidate;
                }
            }
        }
        center = best;
        radius *= 0.25;
    }
    for (grid, newton) in center.iter().zip(&solved.xi) {
        assert!(
            (grid - newton).abs() < 1e-5,
            "grid {grid} vs newton {newton}"
        );
    }
}

/// The p1p1 cone sliced at the regular Reeb vector is a square.
#[test]
fn p1p1_square_slice() {
    let cone = fixture_cone("p1p1");
    let p = polytope::slice(&cone, &ReebVector::from_i64(&[0, 0, 3])).unwrap();
    let mut verts = p.vertices.clone();
    verts.sort();
    let s = rat(1, 6);
    let expected: Vec<Vec<Rat>> = vec![
        vec![-s.clone(), -s.clone(), s.clone()],
        vec![-s.clone(), s.clone(), s.clone()],
        vec![s.clone(), -s.clone(), s.clone()],
        vec![s.clone(), s.clone(), s.clone()],
    ];
    assert_eq!(verts, expected);
}

/// At the minimizer the barycenter hits the monotone point; nearby slice
/// points miss it by a definite margin.
#[test]
fn minimizer_is_the_barycenter_condition() {
    let cone = fixture_cone("dp1");
    let beta = AngleVector::new(vec![rat(13, 12), rat(7, 6), rat(13, 12), rat(5, 6)]).unwrap();
    let q = monotone_point(&cone, &beta).unwrap();
    // Exact vanishing at the rational minimizer (0, 0, 3).
    let exact_bar = reeb_to_angles(&cone, &ReebVector::from_i64(&[0, 0, 3]))
        .unwrap()
        .barycenter_exact
        .unwrap();
    assert_eq!(exact_bar, q);

    let tol = 1e-12;
    let mut rng = rng();
    for _ in 0..20 {
        // A random slice direction ν ⊥ q of size about 1e-6.
        let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let qf = exact::vec_to_f64(&q);
        let qq: f64 = qf.iter().map(|x| x * x).sum();
        let dot: f64 = raw.iter().zip(&qf).map(|(a, b)| a * b).sum();
        let mut nu: Vec<f64> = raw
            .iter()
            .zip(&qf)
            .map(|(r, qi)| r - dot / qq * qi)
            .collect();
        let norm: f64 = nu.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        for v in &mut nu {
            *v *= 1e-6 * 3.0 / norm;
        }
        let perturbed: Vec<Rat> = [0.0, 0.0, 3.0]
            .iter()
            .zip(&nu)
            .map(|(x, d)| exact::rat_from_f64(x + d).unwrap())
            .collect();
        // Rescale exactly onto the slice through q.
        let pairing = exact::dot(&perturbed, &q);
        let scale = (rat_int(2) * pairing).recip();
        let xi = ReebVector::new(perturbed.into_iter().map(|x| x * &scale).collect());
        let bar = reeb_to_angles(&cone, &xi)
            .unwrap()
            .barycenter_exact
            .unwrap();
        let gap = bar
            .iter()
            .zip(&q)
            .map(|(a, b)| exact::rat_to_f64(&(a - b)).abs())
            .fold(0.0, f64::max);
        assert!(
            gap > tol,
            "barycenter gap {gap} too small off the minimizer"
        );
    }
}

/// Second moments restricted to the tangent directions of the slice form a
/// positive definite form.
#[test]
fn second_moments_positive_definite_on_tangent_space() {
    let mut rng = rng();
    for cone in all_fixture_cones() {
        let m = cone.dim();
        let xi = random_reeb(&cone, &mut rng);
        let p = polytope::slice(&cone, &xi).unwrap();
        let mom = polytope::moments(&p).unwrap();
        let second = DMatrix::from_fn(m, m, |i, j| exact::rat_to_f64(&mom.second_moments[i][j]));
        let qn = DVector::from_row_slice(&xi.to_f64()).normalize();
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for i in 0..m {
            let mut e = DVector::zeros(m);
            e[i] = 1.0;
            let mut v = &e - &qn * qn.dot(&e);
            for c in &cols {
                let proj = c.dot(&v);
                v -= c * proj;
            }
            if v.norm() > 1e-9 {
                cols.push(v.normalize());
            }
        }
        let basis = DMatrix::from_columns(&cols);
        let restricted = basis.transpose() * &second * &basis;
        assert!(
            restricted.cholesky().is_some(),
            "{:?}: tangent second moments not positive definite",
            cone.name()
        );
    }
}

/// Pulling triangulations with opposite priorities tile every fixture
/// slice with positive simplices of equal total volume.
#[test]
fn triangulation_soundness_across_fixtures() {
    let mut rng = rng();
    for cone in all_fixture_cones() {
        let xi = random_reeb(&cone, &mut rng);
        let p = polytope::slice(&cone, &xi).unwrap();
        let base = polytope::moments(&p).unwrap();
        let priority: Vec<usize> = (0..cone.rays().len()).rev().collect();
        let mut flipped = p.clone();
        flipped.triangulation = cone.triangulate_with_priority(&priority);
        let alt = polytope::moments(&flipped).unwrap();
        assert_eq!(base.volume, alt.volume, "{:?}", cone.name());
        assert_eq!(base.barycenter, alt.barycenter, "{:?}", cone.name());
        assert_eq!(
            base.euclid_volume_delta,
            alt.euclid_volume_delta,
            "{:?}",
            cone.name()
        );
    }
}

/// Potential gradients match central finite differences at 50 points per
/// fixture.
#[test]
fn potential_gradient_finite_difference_oracle() {
    let mut rng = rng();
    for cone in all_fixture_cones() {
        let beta = random_angles(&cone, &mut rng);
        let xi = random_reeb(&cone, &mut rng);
        let pots = [
            SymplecticPotential::guillemin(&cone, &beta).unwrap(),
            SymplecticPotential::canonical_xi(&cone, &beta, &xi).unwrap(),
        ];
        for _ in 0..25 {
            let x = exact::vec_to_f64(&common::random_interior_point(&cone, &mut rng));
            for pot in &pots {
                let eval = pot.eval(&x).unwrap();
                let h = 1e-6;
                let mut fd = DVector::zeros(cone.dim());
                for i in 0..cone.dim() {
                    let mut plus = x.clone();
                    plus[i] += h;
                    let mut minus = x.clone();
                    minus[i] -= h;
                    fd[i] = (pot.eval(&plus).unwrap().value - pot.eval(&minus).unwrap().value)
                        / (2.0 * h);
                }
                let rel = (&eval.gradient - &fd).norm() / fd.norm().max(1.0);
                assert!(rel < 1e-6, "{:?}: fd mismatch {rel:.3e}", cone.name());
            }
        }
    }
}

/// The exact volume function agrees with the truncated-cone volume from the
/// polytope engine at 20 random rational Reeb vectors per fixture.
#[test]
fn volume_function_cross_module_oracle() {
    let mut rng = rng();
    for cone in all_fixture_cones() {
        let vf = VolumeFunction::new(&cone);
        for _ in 0..20 {
            let xi = random_reeb(&cone, &mut rng);
            let p = polytope::slice(&cone, &xi).unwrap();
            let direct = polytope::euclid_volume_delta(&p);
            assert!(direct.is_positive());
            assert_eq!(vf.eval_exact(xi.entries()), direct, "{:?}", cone.name());
        }
    }
}

/// The three vanishing tests of the log Futaki invariant (basis values, the
/// affine coefficients, the barycenter gap) agree on random data.
#[test]
fn three_way_futaki_consistency() {
    let mut rng = rng();
    let mut total = 0;
    for cone in all_fixture_cones() {
        for _ in 0..8 {
            let xi = random_reeb(&cone, &mut rng);
            let beta = random_angles(&cone, &mut rng);
            let report = toric_cone::futaki::log_futaki(&cone, &xi, &beta, 1e-10).unwrap();
            let by_l = report.max_l < report.tol;
            let by_a = report.a_coeffs[1..]
                .iter()
                .map(|a| exact::rat_to_f64(a).abs())
                .fold(0.0, f64::max)
                < report.tol;
            let by_bar = report.barycenter_gap < report.tol;
            assert_eq!(by_l, by_a, "{:?}", cone.name());
            assert_eq!(by_l, by_bar, "{:?}", cone.name());
            total += 1;
        }
    }
    assert!(total >= 100);
}

/// Facet-sum total transversal scalar curvature equals the Stokes identity
/// value 2(n/λ_ξ)·vol(P_ξ) exactly, for admissible angles at any Reeb
/// vector.
#[test]
fn total_scalar_stokes_identity_across_fixtures() {
    let mut rng = rng();
    for cone in all_fixture_cones() {
        for _ in 0..5 {
            let xi = random_reeb(&cone, &mut rng);
            let beta = random_angles(&cone, &mut rng);
            let ts = toric_cone::futaki::total_transversal_scalar(&cone, &xi, &beta).unwrap();
            let check = ts.cross_check.clone().expect("beta is admissible");
            assert_eq!(ts.value, check, "{:?}", cone.name());
        }
    }
}

/// Reconstructing a cone from its dual rays restores the extreme rays: the
/// double-dual round trip, exact.
#[test]
fn double_dual_round_trip() {
    for cone in all_fixture_cones() {
        let dual = toric_cone::cone::GoodCone::from_int_normals(cone.dual_rays())
            .expect("dual cones validate");
        assert_eq!(dual.rays(), {
            let mut rays = cone.rays().to_vec();
            rays.sort();
            rays
        });
    }
}

/// The metric Hessian is symmetric positive definite at random interior
/// points, for both potential kinds.
#[test]
fn metric_positive_definite_at_random_points() {
    let mut rng = rng();
    for cone in all_fixture_cones() {
        let beta = random_angles(&cone, &mut rng);
        let xi = random_reeb(&cone, &mut rng);
        let pots = [
            SymplecticPotential::guillemin(&cone, &beta).unwrap(),
            SymplecticPotential::canonical_xi(&cone, &beta, &xi).unwrap(),
        ];
        for _ in 0..50 {
            let x = exact::vec_to_f64(&common::random_interior_point(&cone, &mut rng));
            for pot in &pots {
                let sample = pot.metric_at(&x).unwrap();
                assert!(
                    sample.hessian.clone().cholesky().is_some(),
                    "{:?}: Hessian not positive definite at {:?}",
                    cone.name(),
                    x
                );
                let id = &sample.inverse * &sample.hessian;
                for i in 0..cone.dim() {
                    assert!((id[(i, i)] - 1.0).abs() < 1e-12 * sample.condition.max(1.0));
                }
            }
        }
    }
}

/// The advertised concurrency model: geometry values are immutable and
/// shareable, and concurrent solves on one cone are independent.
#[test]
fn values_are_shareable_and_solves_run_concurrently() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<toric_cone::cone::GoodCone>();
    assert_send_sync::<toric_cone::polytope::TransversalPolytope>();
    assert_send_sync::<VolumeFunction>();
    assert_send_sync::<SymplecticPotential>();
    assert_send_sync::<AngleVector>();
    assert_send_sync::<ReebVector>();

    let cone = fixture_cone("dp2");
    let betas: Vec<AngleVector> = {
        let mut rng = rng();
        (0..4).map(|_| random_angles(&cone, &mut rng)).collect()
    };
    let results: Vec<Vec<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = betas
            .iter()
            .map(|beta| {
                let cone = &cone;
                scope.spawn(move || {
                    angles_to_reeb(cone, beta, &SolveOptions::default())
                        .unwrap()
                        .xi
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    // Same answers as the sequential runs.
    for (beta, xi) in betas.iter().zip(&results) {
        let sequential = angles_to_reeb(&cone, beta, &SolveOptions::default())
            .unwrap()
            .xi;
        assert_eq!(&sequential, xi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Membership witnesses scale linearly with the angles.
    #[test]
    fn membership_scaling(
        weights in proptest::collection::vec(1i64..12, 4),
        t_num in 1i64..40,
        t_den in 1i64..40,
    ) {
        let cone = fixture_cone("dp1");
        let mut p = vec![Rat::zero(); 3];
        for (u, w) in cone.rays().iter().zip(&weights) {
            for (x, c) in p.iter_mut().zip(u) {
                *x += Rat::from_integer(c.clone()) * rat_int(*w);
            }
        }
        let beta = AngleVector::new(cone.ell_all(&p)).unwrap();
        let witness = angles_cone_membership(&cone, &beta)
            .unwrap()
            .witness()
            .unwrap()
            .to_vec();
        prop_assert_eq!(&witness, &p);
        let t = rat(t_num, t_den);
        let scaled = beta.scaled(&t).unwrap();
        let scaled_witness = angles_cone_membership(&cone, &scaled)
            .unwrap()
            .witness()
            .unwrap()
            .to_vec();
        let expected: Vec<Rat> = p.iter().map(|x| x * &t).collect();
        prop_assert_eq!(scaled_witness, expected);
    }

    /// Chart volumes scale as t^{-n} and the truncated-cone volume as
    /// t^{-(n+1)} under ξ → tξ.
    #[test]
    fn slice_scaling(
        weights in proptest::collection::vec((1i64..6, 1i64..6), 4),
        t_num in 1i64..20,
        t_den in 1i64..20,
    ) {
        let cone = fixture_cone("p1p1");
        let mut xi = vec![Rat::zero(); 3];
        for (v, (a, b)) in cone.normals().iter().zip(&weights) {
            for (x, c) in xi.iter_mut().zip(v) {
                *x += Rat::from_integer(c.clone()) * rat(*a, *b);
            }
        }
        let xi = ReebVector::new(xi);
        let t = rat(t_num, t_den);
        let p = polytope::slice(&cone, &xi).unwrap();
        let pt = polytope::slice(&cone, &xi.scaled(&t)).unwrap();
        let base = polytope::moments(&p).unwrap();
        let scaled = polytope::moments(&pt).unwrap();
        let n = cone.n() as i32;
        prop_assert_eq!(scaled.volume, &base.volume * t.pow(-n));
        prop_assert_eq!(
            scaled.euclid_volume_delta,
            &base.euclid_volume_delta * t.pow(-(n + 1))
        );
    }

    /// Boundary integration is linear in the integrand.
    #[test]
    fn boundary_linearity(
        f_coeffs in proptest::collection::vec(-9i64..9, 4),
        g_coeffs in proptest::collection::vec(-9i64..9, 4),
    ) {
        let cone = fixture_cone("dp2");
        let xi = ReebVector::from_i64(&[0, 0, 3]);
        let p = polytope::slice(&cone, &xi).unwrap();
        let beta = AngleVector::from_i64(&[1, 1, 1, 1, 1]).unwrap();
        let f = AffineFn {
            constant: rat_int(f_coeffs[0]),
            linear: exact::rat_vec(&f_coeffs[1..]),
        };
        let g = AffineFn {
            constant: rat_int(g_coeffs[0]),
            linear: exact::rat_vec(&g_coeffs[1..]),
        };
        let sum = AffineFn {
            constant: &f.constant + &g.constant,
            linear: f.linear.iter().zip(&g.linear).map(|(a, b)| a + b).collect(),
        };
        let bf = polytope::boundary_integrals(&p, &beta, &f).unwrap();
        let bg = polytope::boundary_integrals(&p, &beta, &g).unwrap();
        let bsum = polytope::boundary_integrals(&p, &beta, &sum).unwrap();
        prop_assert_eq!(bsum.total, bf.total + bg.total);
        for a in 0..cone.num_facets() {
            prop_assert_eq!(
                &bsum.per_facet[a],
                &(&bf.per_facet[a] + &bg.per_facet[a])
            );
        }
    }
}
