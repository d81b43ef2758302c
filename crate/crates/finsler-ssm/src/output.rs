//! Catalog listing, tensor dumps and geodesic traces.

use std::fmt::Write as _;

use finsler_ssm_core::cartan::{cartan_norm, cartan_oracle, mean_cartan, semi_c_reducible};
use finsler_ssm_core::landsberg::{landsberg_oracle, mean_landsberg, stretch_decompose, stretch_tensor};
use finsler_ssm_core::metric::{angular_metric, fundamental_tensor_oracle, inverse_metric};
use finsler_ssm_core::spray::{pqr_decompose, spray_oracle, Trajectory};
use finsler_ssm_core::{catalog, Error, EvalPoint, PhiModel, SymTensor2, SymTensor3};
use serde_json::{json, Value};

pub fn catalog_text() -> String {
    let mut out = String::new();
    for m in catalog() {
        let params = m
            .params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        let params = if params.is_empty() { "-".to_string() } else { params };
        writeln!(
            out,
            "{:<10} params {:<14} domain {}",
            m.name(),
            params,
            m.domain_description()
        )
        .unwrap();
    }
    out
}

pub fn catalog_json() -> Value {
    Value::Array(
        catalog()
            .iter()
            .map(|m| {
                json!({
                    "name": m.name(),
                    "params": m.params().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
                    "domain": m.domain_description(),
                    "uses_anchor": m.uses_anchor(),
                })
            })
            .collect(),
    )
}

fn matrix2(t: &SymTensor2) -> Value {
    json!(t.rows())
}

fn tensor3(t: &SymTensor3) -> Value {
    let n = t.dim();
    json!((0..n)
        .map(|i| (0..n)
            .map(|j| (0..n).map(|k| t.get(i, j, k)).collect::<Vec<_>>())
            .collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn field<T>(r: Result<T, Error>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(v) => f(v),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Every tensor of the engine at `p`, with failures reported inline.
/// Fails only when `p` is outside the model's domain.
pub fn tensors_json(m: &PhiModel, p: &EvalPoint) -> Result<Value, Error> {
    m.admit(p)?;
    let g = fundamental_tensor_oracle(m, p);
    let ginv = g.clone().and_then(|g| inverse_metric(&g));
    let spray = spray_oracle(m, p);
    let pqr = spray.clone().and_then(|s| pqr_decompose(&s, p));
    Ok(json!({
        "schema": 1,
        "metric": m.name(),
        "params": m.params().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "point": { "x": p.x(), "y": p.y(), "a": p.a() },
        "F": m.norm_at(p),
        "g": field(g, |g| matrix2(&g)),
        "g_inv": field(ginv, |g| matrix2(&g)),
        "h": field(angular_metric(m, p), |h| matrix2(&h)),
        "C": field(cartan_oracle(m, p), |c| tensor3(&c)),
        "I": field(mean_cartan(m, p), |i| json!(i.covector)),
        "I_norm": field(cartan_norm(m, p), |v| json!(v)),
        "semi_c": field(semi_c_reducible(m, p), |r| json!({
            "P": r.p, "Q": r.q, "method": r.method.as_str(),
            "residual": r.residual, "best_fit": r.best_fit, "best_fit_residual": r.best_fit_residual,
        })),
        "G": field(spray, |s| json!(s)),
        "PQR": field(pqr, |f| json!({ "P": f.p, "Q": f.q, "R": f.r, "residual": f.residual })),
        "L": field(landsberg_oracle(m, p), |l| tensor3(&l)),
        "J": field(mean_landsberg(m, p), |j| json!({
            "J": j.j, "H_land": j.h_land, "K_land": j.k_land, "leg_residual": j.leg_residual,
        })),
        "Sigma": field(stretch_tensor(m, p), |s| json!(s.rows())),
        "TZW": field(stretch_decompose(m, p), |d| json!({
            "T": d.t, "Z": d.z, "W": d.w, "residual": d.residual, "scale": d.scale,
        })),
    }))
}

/// CSV with header `tau,x1..xn,y1..yn,F` and a trailing `#` summary line.
pub fn trajectory_csv(tr: &Trajectory) -> String {
    let n = tr.points.first().map_or(0, |p| p.x.len());
    let mut out = String::from("tau");
    for i in 1..=n {
        write!(out, ",x{i}").unwrap();
    }
    for i in 1..=n {
        write!(out, ",y{i}").unwrap();
    }
    out.push_str(",F\n");
    for p in &tr.points {
        write!(out, "{:e}", p.tau).unwrap();
        for v in p.x.iter().chain(&p.y) {
            write!(out, ",{v:e}").unwrap();
        }
        writeln!(out, ",{:e}", p.f).unwrap();
    }
    writeln!(
        out,
        "# steps={} max_F_drift={:e} domain_exit={}",
        tr.points.len().saturating_sub(1),
        tr.max_drift,
        tr.domain_exit
    )
    .unwrap();
    out
}
