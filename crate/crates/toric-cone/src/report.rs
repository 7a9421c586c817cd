//! JSON rendering of results.
//!
//! Exact rationals render as `"p/q"` strings (plain integers when the
//! denominator is one); floats go through serde_json's shortest
//! round-trip formatting, which is deterministic, and maps keep sorted key
//! order, so repeated runs emit byte-identical output.

use serde_json::{json, Map, Value};

use crate::angles::{LogPairCertificate, Membership};
use crate::cone::GoodCone;
use crate::correspond::CorrespondenceResult;
use crate::exact::{self, Int, Rat};
use crate::fixtures::CheckResult;
use crate::futaki::{FutakiReport, RInvariant, ScalarIdentity, TotalScalar};
use crate::polytope::{FacetVolumes, PolytopeMoments};
use crate::potential::ScalarCurvature;

pub fn rat_json(x: &Rat) -> Value {
    Value::String(exact::format_rat(x))
}

pub fn rat_vec_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

/// Integers render as JSON numbers when they fit, strings otherwise.
pub fn int_json(x: &Int) -> Value {
    use num_traits::ToPrimitive;
    match x.to_i64() {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

pub fn int_vec_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn f64_json(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{x}")))
}

pub fn f64_vec_json(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| f64_json(x)).collect())
}

/// Rational entries as "p/q" strings when `exact`, floats otherwise.
pub fn number_vec_json(v: &[Rat], exact_mode: bool) -> Value {
    if exact_mode {
        rat_vec_json(v)
    } else {
        Value::Array(v.iter().map(|x| f64_json(exact::rat_to_f64(x))).collect())
    }
}

pub fn cone_json(cone: &GoodCone) -> Value {
    let normals: Vec<Value> = cone.normals().iter().map(|v| int_vec_json(v)).collect();
    let rays: Vec<Value> = cone.rays().iter().map(|v| int_vec_json(v)).collect();
    let incidence: Vec<Value> = cone
        .incidence()
        .iter()
        .map(|row| Value::Array(row.iter().map(|&b| Value::Bool(b)).collect()))
        .collect();
    let mut map = Map::new();
    map.insert("dim".into(), json!(cone.dim()));
    if let Some(name) = cone.name() {
        map.insert("name".into(), json!(name));
    }
    map.insert("normals".into(), Value::Array(normals));
    map.insert("rays".into(), Value::Array(rays));
    map.insert("incidence".into(), Value::Array(incidence));
    map.insert("facets".into(), json!(cone.num_facets()));
    Value::Object(map)
}

pub fn membership_json(m: &Membership, exact_mode: bool) -> Value {
    match m {
        Membership::Member { witness } => json!({
            "member": true,
            "witness": number_vec_json(witness, exact_mode),
        }),
        Membership::NotMember { certificate } => json!({
            "member": false,
            "eta": int_vec_json(certificate),
        }),
    }
}

pub fn correspondence_json(res: &CorrespondenceResult, exact_mode: bool) -> Value {
    let mut map = Map::new();
    let xi = match (&res.xi_exact, exact_mode) {
        (Some(exact), true) => rat_vec_json(exact),
        _ => f64_vec_json(&res.xi),
    };
    let beta = match (&res.beta_exact, exact_mode) {
        (Some(exact), true) => rat_vec_json(exact),
        _ => f64_vec_json(&res.beta),
    };
    let barycenter = match (&res.barycenter_exact, exact_mode) {
        (Some(exact), true) => rat_vec_json(exact),
        _ => f64_vec_json(&res.barycenter),
    };
    let monotone = match (&res.monotone_exact, exact_mode) {
        (Some(exact), true) => rat_vec_json(exact),
        _ => f64_vec_json(&res.monotone_point),
    };
    map.insert("xi".into(), xi);
    map.insert("beta".into(), beta);
    map.insert("barycenter".into(), barycenter);
    map.insert("monotone_point".into(), monotone);
    map.insert(
        "residuals".into(),
        json!({
            "barycenter_gap": f64_json(res.residuals.barycenter_gap),
            "gradient_norm": f64_json(res.residuals.gradient_norm),
            "roundtrip": f64_json(res.residuals.roundtrip),
        }),
    );
    map.insert("iterations".into(), json!(res.iterations));
    map.insert("volume".into(), f64_json(res.volume_at_min));
    if let Some(cert) = &res.certified {
        map.insert(
            "certified".into(),
            json!({
                "xi": rat_vec_json(&cert.xi),
                "beta_at_xi": rat_vec_json(&cert.beta_at_xi),
                "max_angle_gap": f64_json(cert.max_angle_gap),
                "max_barycenter_gap": f64_json(cert.max_barycenter_gap),
            }),
        );
    }
    Value::Object(map)
}

pub fn moments_json(m: &PolytopeMoments, exact_mode: bool) -> Value {
    json!({
        "chart_volume": if exact_mode { rat_json(&m.volume) } else { f64_json(exact::rat_to_f64(&m.volume)) },
        "barycenter": number_vec_json(&m.barycenter, exact_mode),
        "second_moments": m.second_moments.iter().map(|row| number_vec_json(row, exact_mode)).collect::<Vec<_>>(),
        "delta_volume": if exact_mode { rat_json(&m.euclid_volume_delta) } else { f64_json(exact::rat_to_f64(&m.euclid_volume_delta)) },
    })
}

pub fn klt_json(cert: &LogPairCertificate, exact_mode: bool) -> Value {
    let mut map = Map::new();
    map.insert("r_cartier".into(), json!(cert.is_r_cartier));
    map.insert("klt".into(), json!(cert.is_klt));
    map.insert("q_gorenstein".into(), json!(cert.is_q_gorenstein));
    if let Some(p) = &cert.interior_point {
        map.insert("witness".into(), number_vec_json(p, exact_mode));
    }
    if let Some(eta) = &cert.certificate {
        map.insert("eta".into(), int_vec_json(eta));
    }
    let discrepancies: Vec<Value> = cert
        .discrepancies
        .iter()
        .map(|(ray, a)| {
            json!({
                "ray": int_vec_json(ray),
                "discrepancy": if exact_mode { rat_json(a) } else { f64_json(exact::rat_to_f64(a)) },
            })
        })
        .collect();
    map.insert("discrepancies".into(), Value::Array(discrepancies));
    Value::Object(map)
}

pub fn futaki_json(report: &FutakiReport, exact_mode: bool) -> Value {
    json!({
        "l_values": number_vec_json(&report.l_values, exact_mode),
        "a_coeffs": number_vec_json(&report.a_coeffs, exact_mode),
        "barycenter_interior": number_vec_json(&report.barycenter_interior, exact_mode),
        "barycenter_boundary": number_vec_json(&report.barycenter_boundary, exact_mode),
        "max_l": f64_json(report.max_l),
        "barycenter_gap": f64_json(report.barycenter_gap),
        "vanishes": report.vanishes,
        "tol": f64_json(report.tol),
    })
}

pub fn total_scalar_json(ts: &TotalScalar, exact_mode: bool) -> Value {
    let mut map = Map::new();
    map.insert(
        "facet_terms".into(),
        number_vec_json(&ts.facet_terms, exact_mode),
    );
    map.insert(
        "total".into(),
        if exact_mode {
            rat_json(&ts.value)
        } else {
            f64_json(exact::rat_to_f64(&ts.value))
        },
    );
    if let Some(lambda) = &ts.lambda {
        map.insert("lambda".into(), rat_json(lambda));
    }
    if let Some(check) = &ts.cross_check {
        map.insert("monotone_cross_check".into(), rat_json(check));
        map.insert("cross_check_matches".into(), json!(check == &ts.value));
    }
    Value::Object(map)
}

pub fn scalar_identity_json(id: &ScalarIdentity, exact_mode: bool) -> Value {
    json!({
        "sigma_coeff_2pi_n": number_vec_json(&id.sigma_coeff, exact_mode),
        "link_coeff_2pi_n1": if exact_mode { rat_json(&id.link_coeff) } else { f64_json(exact::rat_to_f64(&id.link_coeff)) },
        "boundary_term_2pi_n1": if exact_mode { rat_json(&id.boundary_term) } else { f64_json(exact::rat_to_f64(&id.boundary_term)) },
        "bulk_term_2pi_n1": if exact_mode { rat_json(&id.bulk_term) } else { f64_json(exact::rat_to_f64(&id.bulk_term)) },
        "integrated_scalar_2pi_n1": if exact_mode { rat_json(&id.integrated_scalar) } else { f64_json(exact::rat_to_f64(&id.integrated_scalar)) },
        "ricci_flat_balance": id.ricci_flat_balance,
    })
}

pub fn facet_volumes_json(fv: &FacetVolumes, exact_mode: bool) -> Value {
    json!({
        "delta_volume": if exact_mode { rat_json(&fv.delta_volume) } else { f64_json(exact::rat_to_f64(&fv.delta_volume)) },
        "facet_euclid": f64_vec_json(&fv.facet_euclid),
        "facet_volume_over_norm": number_vec_json(&fv.facet_volume_over_norm, exact_mode),
        "sigma_coeff_2pi_n": number_vec_json(&fv.sigma_coeff, exact_mode),
        "link_coeff_2pi_n1": if exact_mode { rat_json(&fv.link_coeff) } else { f64_json(exact::rat_to_f64(&fv.link_coeff)) },
    })
}

pub fn r_invariant_json(inv: &RInvariant, exact_mode: bool) -> Value {
    json!({
        "beta": number_vec_json(&inv.beta, exact_mode),
        "r": if exact_mode { rat_json(&inv.r) } else { f64_json(exact::rat_to_f64(&inv.r)) },
    })
}

pub fn scalar_curvature_json(sc: &ScalarCurvature) -> Value {
    json!({
        "value": f64_json(sc.value),
        "error_indicator": f64_json(sc.error_indicator),
        "coarse_step": f64_json(sc.coarse),
        "fine_step": f64_json(sc.fine),
    })
}

pub fn check_result_json(r: &CheckResult) -> Value {
    json!({
        "fixture": r.fixture,
        "check": r.check,
        "passed": r.passed,
        "detail": r.detail,
    })
}
