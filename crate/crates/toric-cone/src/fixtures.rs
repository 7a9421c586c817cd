//! Bundled example cones with their known reference values.
//!
//! Each fixture carries a set of named checks (exact correspondence values,
//! kernel relations, volume closed forms, R-invariants) that `run_checks`
//! evaluates; the CLI exposes them through `fixtures run-all`.

use num_traits::Zero;

use crate::angles::{
    angles_cone_membership, angles_cone_relations, cartier_klt, AngleVector, Membership, ReebVector,
};
use crate::cone::GoodCone;
use crate::correspond::{angles_to_reeb, reeb_to_angles, SolveOptions};
use crate::error::Result;
use crate::exact::{self, int_vec, rat, rat_int, Rat};
use crate::futaki::{self, integrated_scalar_identity, log_futaki};
use crate::volume::VolumeFunction;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub normals: Vec<Vec<i64>>,
}

impl Fixture {
    pub fn cone(&self) -> Result<GoodCone> {
        Ok(GoodCone::new(&self.normals)?.with_name(self.name))
    }
}

fn octant_normals(dim: usize) -> Vec<Vec<i64>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn ypq_normals(p: i64, q: i64) -> Vec<Vec<i64>> {
    vec![
        vec![1, 0, 0],
        vec![1, p - q - 1, p - q],
        vec![1, p, p],
        vec![1, 1, 0],
    ]
}

/// The bundled fixture library, ordered by name.
pub fn all() -> Vec<Fixture> {
    let mut fixtures = vec![
        Fixture {
            name: "conifold",
            description: "quadric cone singularity, a subcone of the p1p1 cone",
            normals: vec![vec![0, 0, 1], vec![0, 1, 1], vec![1, 1, 1], vec![1, 0, 1]],
        },
        Fixture {
            name: "dp1",
            description: "anticanonical cone over the one-point blow-up of the plane",
            normals: vec![vec![1, 0, 1], vec![0, -1, 1], vec![-1, -1, 1], vec![0, 1, 1]],
        },
        Fixture {
            name: "dp1-l12",
            description: "cone over the one-point blow-up polarized by the quadrilateral (1,0)(1,1)(2,2)(2,0)",
            normals: vec![vec![1, 0, -1], vec![1, -1, 0], vec![-1, 0, 2], vec![0, 1, 0]],
        },
        Fixture {
            name: "dp2",
            description: "anticanonical cone over the two-point blow-up of the plane",
            normals: vec![
                vec![1, 0, 1],
                vec![0, -1, 1],
                vec![0, 1, 1],
                vec![-1, 0, 1],
                vec![-1, -1, 1],
            ],
        },
        Fixture {
            name: "dp3",
            description: "anticanonical cone over the three-point blow-up of the plane",
            normals: vec![
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![1, -1, 1],
                vec![-1, 1, 1],
                vec![-1, 0, 1],
                vec![0, -1, 1],
            ],
        },
        Fixture {
            name: "p1p1",
            description: "anticanonical cone over the product of two projective lines",
            normals: vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]],
        },
        Fixture {
            name: "p1p1-o12",
            description: "cone over the product of two lines polarized by the (1,2) rectangle",
            normals: vec![vec![1, 0, 0], vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 2]],
        },
        Fixture {
            name: "y21",
            description: "Y(2,1) cone",
            normals: ypq_normals(2, 1),
        },
        Fixture {
            name: "y31",
            description: "Y(3,1) cone",
            normals: ypq_normals(3, 1),
        },
        Fixture {
            name: "y32",
            description: "Y(3,2) cone",
            normals: ypq_normals(3, 2),
        },
    ];
    for dim in 2..=5 {
        let name: &'static str = match dim {
            2 => "octant2",
            3 => "octant3",
            4 => "octant4",
            _ => "octant5",
        };
        fixtures.push(Fixture {
            name,
            description: "flat model: the positive orthant",
            normals: octant_normals(dim),
        });
    }
    fixtures.sort_by_key(|f| f.name);
    fixtures
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

/// Outcome of one reference-value check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub fixture: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

fn check(
    results: &mut Vec<CheckResult>,
    fixture: &str,
    name: &str,
    body: impl FnOnce() -> std::result::Result<String, String>,
) {
    let (passed, detail) = match body() {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    results.push(CheckResult {
        fixture: fixture.to_string(),
        check: name.to_string(),
        passed,
        detail,
    });
}

/// Runs every reference-value check bundled with the fixture.
pub fn run_checks(fixture: &Fixture) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let name = fixture.name;
    let cone = match fixture.cone() {
        Ok(c) => c,
        Err(e) => {
            check(&mut out, name, "good", || Err(format!("{e}")));
            return out;
        }
    };
    check(&mut out, name, "good", || {
        Ok(format!("{} extreme rays", cone.rays().len()))
    });

    if name.starts_with("octant") {
        octant_checks(&mut out, name, &cone);
    }
    match name {
        "p1p1" => p1p1_checks(&mut out, name, &cone),
        "conifold" => conifold_checks(&mut out, name, &cone),
        "dp1" => dp1_checks(&mut out, name, &cone),
        "dp2" => dp2_checks(&mut out, name, &cone),
        "dp3" => dp3_checks(&mut out, name, &cone),
        "dp1-l12" => dp1_l12_checks(&mut out, name, &cone),
        "p1p1-o12" => p1p1_o12_checks(&mut out, name, &cone),
        "y21" => ypq_checks(&mut out, name, &cone, 2, 1),
        "y31" => ypq_checks(&mut out, name, &cone, 3, 1),
        "y32" => ypq_checks(&mut out, name, &cone, 3, 2),
        _ => {}
    }
    out
}

pub fn run_all() -> Vec<CheckResult> {
    let mut results = Vec::new();
    for fixture in all() {
        results.extend(run_checks(&fixture));
    }
    results
}

fn expect_exact_beta(
    cone: &GoodCone,
    xi: &[i64],
    expected: &[Rat],
) -> std::result::Result<String, String> {
    let out = reeb_to_angles(cone, &ReebVector::from_i64(xi)).map_err(|e| e.to_string())?;
    let beta = out.beta_exact.expect("rational input");
    if beta == expected {
        Ok(format!(
            "beta = ({})",
            beta.iter()
                .map(exact::format_rat)
                .collect::<Vec<_>>()
                .join(", ")
        ))
    } else {
        Err(format!(
            "expected ({}), got ({})",
            expected
                .iter()
                .map(exact::format_rat)
                .collect::<Vec<_>>()
                .join(", "),
            beta.iter()
                .map(exact::format_rat)
                .collect::<Vec<_>>()
                .join(", ")
        ))
    }
}

fn expect_r_invariant(cone: &GoodCone, expected: Rat) -> std::result::Result<String, String> {
    let inv = futaki::r_invariant(cone).map_err(|e| e.to_string())?;
    if inv.r == expected {
        Ok(format!("R = {}", exact::format_rat(&inv.r)))
    } else {
        Err(format!(
            "expected R = {}, got {}",
            exact::format_rat(&expected),
            exact::format_rat(&inv.r)
        ))
    }
}

fn octant_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    let dim = cone.dim();
    check(out, name, "self_dual", || {
        let mut normals = cone.normals().to_vec();
        normals.sort();
        if cone.dual_rays() == normals {
            Ok("dual rays equal the normals".into())
        } else {
            Err("dual rays differ from the normals".into())
        }
    });
    check(out, name, "flat_model_forward", || {
        let beta: Vec<Rat> = (0..dim).map(|i| rat(i as i64 + 2, 3)).collect();
        let xi = ReebVector::new(beta.iter().map(|b| b.recip()).collect());
        let got = reeb_to_angles(cone, &xi)
            .map_err(|e| e.to_string())?
            .beta_exact
            .unwrap();
        if got == beta {
            Ok("xi = (1/beta_a) maps to beta exactly".into())
        } else {
            Err("flat model forward map failed".into())
        }
    });
    check(out, name, "flat_model_backward", || {
        let beta: Vec<Rat> = (0..dim).map(|i| rat(i as i64 + 2, 3)).collect();
        let av = AngleVector::new(beta.clone()).unwrap();
        let sol = angles_to_reeb(cone, &av, &SolveOptions::default()).map_err(|e| e.to_string())?;
        let worst = sol
            .xi
            .iter()
            .zip(&beta)
            .map(|(x, b)| (x - 1.0 / exact::rat_to_f64(b)).abs())
            .fold(0.0, f64::max);
        if worst < 1e-9 {
            Ok(format!("max deviation {worst:.2e}"))
        } else {
            Err(format!("max deviation {worst:.2e} exceeds 1e-9"))
        }
    });
    if dim == 2 {
        check(out, name, "round_link_volume", || {
            let b1 = rat(2, 3);
            let b2 = rat(7, 5);
            let xi = ReebVector::new(vec![b1.recip(), b2.recip()]);
            let p = crate::polytope::slice(cone, &xi).map_err(|e| e.to_string())?;
            let fv = crate::polytope::facet_volumes(&p).map_err(|e| e.to_string())?;
            let expected = &b1 * &b2 / rat_int(2);
            if fv.link_coeff == expected {
                Ok("vol(S) = 2 pi^2 beta1 beta2".into())
            } else {
                Err("link volume mismatch".into())
            }
        });
        check(out, name, "ricci_flat_balance", || {
            let b1 = rat(5, 4);
            let b2 = rat(3, 7);
            let xi = ReebVector::new(vec![b1.recip(), b2.recip()]);
            let beta = AngleVector::new(vec![b1, b2]).unwrap();
            let id = integrated_scalar_identity(cone, &xi, &beta).map_err(|e| e.to_string())?;
            if id.ricci_flat_balance && id.integrated_scalar.is_zero() {
                Ok("integrated scalar curvature identity balances".into())
            } else {
                Err("identity out of balance".into())
            }
        });
    }
}

fn p1p1_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    check(out, name, "kernel_relation", || {
        let rel = angles_cone_relations(cone);
        if rel == vec![int_vec(&[1, -1, 1, -1])] {
            Ok("beta1 + beta3 = beta2 + beta4".into())
        } else {
            Err(format!("unexpected relations {rel:?}"))
        }
    });
    check(out, name, "regular_pair", || {
        expect_exact_beta(
            cone,
            &[0, 0, 3],
            &[rat_int(1), rat_int(1), rat_int(1), rat_int(1)],
        )
    });
    check(out, name, "q_gorenstein", || {
        let ones = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
        match angles_cone_membership(cone, &ones).map_err(|e| e.to_string())? {
            Membership::Member { .. } => Ok("all-ones angles admissible".into()),
            Membership::NotMember { .. } => Err("all-ones angles rejected".into()),
        }
    });
}

fn conifold_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    check(out, name, "volume_closed_form", || {
        let vf = VolumeFunction::new(cone);
        let expected_const = rat(1, 48);
        let mut samples = 0;
        for i in 1..=10i64 {
            let xi = vec![rat(i, i + 2), rat(1, 2), rat_int(2)];
            let vol = vf.eval_exact(&xi);
            let shape = &xi[2] / (&xi[0] * &xi[1] * (&xi[2] - &xi[1]) * (&xi[2] - &xi[0]));
            if &vol / shape != expected_const {
                return Err(format!("constant drift at sample {i}"));
            }
            samples += 1;
        }
        Ok(format!(
            "vol = xi3 / (48 xi1 xi2 (xi3-xi2)(xi3-xi1)) at {samples} samples"
        ))
    });
    check(out, name, "klt_discrepancy", || {
        let beta = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
        let cert = cartier_klt(cone, &beta, &[int_vec(&[1, 1, 2])]).map_err(|e| e.to_string())?;
        let p_ok = cert.interior_point.as_deref() == Some(&exact::rat_vec(&[0, 0, 1])[..]);
        let a_ok = cert.discrepancies.first().map(|(_, a)| a.clone()) == Some(rat_int(1));
        if p_ok && a_ok && cert.is_klt {
            Ok("witness (0,0,1), discrepancy 1 along (1,1,2)".into())
        } else {
            Err("unexpected certificate".into())
        }
    });
}

fn dp1_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    check(out, name, "regular_beta", || {
        expect_exact_beta(
            cone,
            &[0, 0, 3],
            &[rat(13, 12), rat(7, 6), rat(13, 12), rat(5, 6)],
        )
    });
    check(out, name, "kernel_relation", || {
        let eta = int_vec(&[2, -3, 2, -1]);
        for i in 0..cone.dim() {
            let s: exact::Int = cone
                .normals()
                .iter()
                .zip(&eta)
                .map(|(v, e)| &v[i] * e)
                .sum();
            if !s.is_zero() {
                return Err("2 beta1 + 2 beta3 = 3 beta2 + beta4 is not a relation".into());
            }
        }
        Ok("2 beta1 + 2 beta3 = 3 beta2 + beta4".into())
    });
    check(out, name, "r_invariant", || {
        expect_r_invariant(cone, rat(6, 7))
    });
    check(out, name, "futaki_vanishes_at_pair", || {
        let beta = AngleVector::new(vec![rat(13, 12), rat(7, 6), rat(13, 12), rat(5, 6)]).unwrap();
        let report = log_futaki(cone, &ReebVector::from_i64(&[0, 0, 3]), &beta, 1e-10)
            .map_err(|e| e.to_string())?;
        if report.l_values.iter().all(Zero::is_zero) {
            Ok("invariant vanishes exactly".into())
        } else {
            Err("invariant does not vanish".into())
        }
    });
}

fn dp2_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    let beta = vec![
        rat(19, 21),
        rat(23, 21),
        rat(19, 21),
        rat(23, 21),
        rat(25, 21),
    ];
    check(out, name, "regular_beta", || {
        expect_exact_beta(cone, &[0, 0, 3], &beta)
    });
    check(out, name, "kernel_relations", || {
        // beta1 + 3 beta4 = 2 beta3 + 2 beta5 and beta2 + 2 beta4 = beta3 + 2 beta5.
        for eta in [int_vec(&[1, 0, -2, 3, -2]), int_vec(&[0, 1, -1, 2, -2])] {
            for i in 0..cone.dim() {
                let s: exact::Int = cone
                    .normals()
                    .iter()
                    .zip(&eta)
                    .map(|(v, e)| &v[i] * e)
                    .sum();
                if !s.is_zero() {
                    return Err("documented relation fails on the normals".into());
                }
            }
            let pairing: Rat = eta
                .iter()
                .zip(&beta)
                .map(|(e, b)| Rat::from_integer(e.clone()) * b)
                .sum();
            if !pairing.is_zero() {
                return Err("regular angles violate a documented relation".into());
            }
        }
        Ok("both angle relations hold".into())
    });
    check(out, name, "r_invariant", || {
        expect_r_invariant(cone, rat(21, 25))
    });
}

fn dp3_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    check(out, name, "gorenstein_pair", || {
        expect_exact_beta(cone, &[0, 0, 3], &vec![rat_int(1); 6])
    });
    check(out, name, "inverse_at_equal_angles", || {
        let beta = AngleVector::from_i64(&[1; 6]).unwrap();
        let sol =
            angles_to_reeb(cone, &beta, &SolveOptions::default()).map_err(|e| e.to_string())?;
        let target = [0.0, 0.0, 3.0];
        let worst = sol
            .xi
            .iter()
            .zip(&target)
            .map(|(x, t)| (x - t).abs())
            .fold(0.0, f64::max);
        if worst < 1e-9 {
            Ok(format!("xi = (0,0,3) within {worst:.2e}"))
        } else {
            Err(format!("deviation {worst:.2e} from (0,0,3)"))
        }
    });
    check(out, name, "r_invariant", || {
        expect_r_invariant(cone, rat_int(1))
    });
}

fn dp1_l12_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    check(out, name, "regular_beta", || {
        expect_exact_beta(
            cone,
            &[0, 0, 3],
            &[rat(5, 9), rat(7, 9), rat(4, 9), rat(7, 9)],
        )
    });
    check(out, name, "r_invariant", || {
        expect_r_invariant(cone, rat(9, 7))
    });
    check(out, name, "not_q_gorenstein", || {
        let ones = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
        match angles_cone_membership(cone, &ones).map_err(|e| e.to_string())? {
            Membership::NotMember { .. } => Ok("all-ones angles not admissible".into()),
            Membership::Member { .. } => Err("unexpectedly Q-Gorenstein".into()),
        }
    });
}

fn p1p1_o12_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone) {
    check(out, name, "regular_beta", || {
        expect_exact_beta(
            cone,
            &[0, 0, 3],
            &[rat(1, 2), rat_int(1), rat(1, 2), rat_int(1)],
        )
    });
    check(out, name, "not_q_gorenstein", || {
        let ones = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
        match angles_cone_membership(cone, &ones).map_err(|e| e.to_string())? {
            Membership::NotMember { .. } => Ok("normals do not lie on a hyperplane".into()),
            Membership::Member { .. } => Err("unexpectedly Q-Gorenstein".into()),
        }
    });
}

fn ypq_checks(out: &mut Vec<CheckResult>, name: &str, cone: &GoodCone, p: i64, q: i64) {
    check(out, name, "kernel_relation", || {
        let rel = angles_cone_relations(cone);
        let expected = int_vec(&[p + q, -p, p - q, -p]);
        if rel == vec![expected] {
            Ok(format!("({})b1 + ({})b3 = {}b2 + {}b4", p + q, p - q, p, p))
        } else {
            Err(format!("unexpected relations {rel:?}"))
        }
    });
    check(out, name, "q_gorenstein", || {
        let ones = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
        match angles_cone_membership(cone, &ones).map_err(|e| e.to_string())? {
            Membership::Member { witness } => {
                if witness == exact::rat_vec(&[1, 0, 0]) {
                    Ok("witness (1,0,0)".into())
                } else {
                    Ok("member".into())
                }
            }
            Membership::NotMember { .. } => Err("all-ones angles rejected".into()),
        }
    });
    check(out, name, "equal_angle_minimizer", || {
        let beta = AngleVector::from_i64(&[1, 1, 1, 1]).unwrap();
        let sol =
            angles_to_reeb(cone, &beta, &SolveOptions::default()).map_err(|e| e.to_string())?;
        if sol.residuals.roundtrip < 1e-9 && sol.residuals.barycenter_gap < 1e-9 {
            Ok(format!(
                "xi = ({:.6}, {:.6}, {:.6}), roundtrip {:.2e}",
                sol.xi[0], sol.xi[1], sol.xi[2], sol.residuals.roundtrip
            ))
        } else {
            Err(format!("residuals too large: {:?}", sol.residuals))
        }
    });
}
