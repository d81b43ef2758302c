//! The identity suite run by `verify`: per-point checks aggregated into a
//! deterministic report.

use std::collections::BTreeMap;

use finsler_ssm_core::cartan::{
    berwald_example_bound, berwald_norm_formula, cartan_closed, cartan_norm, cartan_norm_direct, cartan_oracle,
    randers_beta_norm, randers_bound, semi_c_reducible, spherical_norm_formula,
};
use finsler_ssm_core::landsberg::{landsberg_closed, landsberg_oracle, mean_landsberg, stretch_decompose};
use finsler_ssm_core::linalg::norm;
use finsler_ssm_core::metric::{fundamental_tensor, fundamental_tensor_oracle};
use finsler_ssm_core::spray::{pqr_decompose, spray_closed, spray_homogeneity_residual, spray_oracle};
use finsler_ssm_core::{Error, EvalPoint, ModelKind, PhiModel};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, RunConfig};
use crate::sampler::{sample_points, SamplerOptions};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "FINSLER_SSM_THREADS";

/// How a residual is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
}

/// Static description of one check family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckDef {
    pub name: &'static str,
    /// Identity the check exercises.
    pub anchor: &'static str,
    /// Tolerance key in [`RunConfig::tolerances`], or `None` for bound
    /// checks whose residual is a ratio against 1.
    pub tolerance_key: Option<&'static str>,
    pub comparison: Comparison,
}

const fn def(name: &'static str, anchor: &'static str, key: &'static str) -> CheckDef {
    CheckDef {
        name,
        anchor,
        tolerance_key: Some(key),
        comparison: Comparison::AtMost,
    }
}

const fn bound(name: &'static str, anchor: &'static str) -> CheckDef {
    CheckDef {
        name,
        anchor,
        tolerance_key: None,
        comparison: Comparison::Below,
    }
}

pub const METRIC_ORACLE: CheckDef = def("metric_closed_vs_oracle", "fundamental-tensor", "oracle_rel");
pub const METRIC_HOMOGENEITY: CheckDef = def("metric_homogeneity", "fundamental-tensor-degree-0", "identity_rel");
pub const CARTAN_ORACLE: CheckDef = def("cartan_closed_vs_oracle", "cartan-torsion", "oracle_rel");
pub const CARTAN_Y: CheckDef = def("cartan_y_contraction", "cartan-torsion-y-contraction", "identity_rel");
pub const MEAN_CARTAN_NORM: CheckDef = def("mean_cartan_norm", "mean-cartan-norm", "oracle_rel");
pub const SEMI_C_RESIDUAL: CheckDef = def("semi_c_reconstruction", "semi-c-reducibility", "theorem1_rel");
pub const SEMI_C_BEST_FIT: CheckDef = def("semi_c_best_fit", "semi-c-best-fit", "theorem1_rel");
pub const SEMI_C_PARTITION: CheckDef = def("semi_c_p_plus_q", "semi-c-partition", "partition_abs");
pub const RANDERS_Q: CheckDef = def("randers_q_magnitude", "randers-c-reducibility", "randers_q");
pub const RANDERS_BOUND: CheckDef = bound("randers_norm_bound", "randers-mean-cartan-bound");
pub const BERWALD_PLANAR: CheckDef = def(
    "berwald_planar_formula",
    "berwald-planar-mean-cartan-norm",
    "planar_rel",
);
pub const BERWALD_BOUND: CheckDef = bound("berwald_norm_bound", "berwald-mean-cartan-bound");
pub const SPRAY_ORACLE: CheckDef = def("spray_closed_vs_oracle", "geodesic-spray", "oracle_rel");
pub const SPRAY_SPAN: CheckDef = def("spray_span", "spray-pqr-frame", "oracle_rel");
pub const SPRAY_HOMOGENEITY: CheckDef = def("spray_homogeneity", "spray-degree-2", "identity_rel");
pub const LANDSBERG_SYMMETRY: CheckDef = def("landsberg_symmetry", "landsberg-curvature", "identity_rel");
pub const LANDSBERG_Y: CheckDef = def("landsberg_y_contraction", "landsberg-y-contraction", "landsberg_y_rel");
pub const LANDSBERG_CLOSED: CheckDef = def("landsberg_closed_vs_oracle", "landsberg-closed-form", "fd_rel");
pub const MEAN_LANDSBERG_LEGS: CheckDef = def("mean_landsberg_legs", "mean-landsberg-legs", "leg_rel");
pub const STRETCH_BIVECTOR: CheckDef = def("stretch_bivector", "weakly-stretch-bivectors", "theorem2_rel");

/// Checks run for `m` in dimension `n`, in report order.
pub fn checks_for(m: &PhiModel, n: usize) -> Vec<CheckDef> {
    let mut v = vec![
        METRIC_ORACLE,
        METRIC_HOMOGENEITY,
        CARTAN_ORACLE,
        CARTAN_Y,
        MEAN_CARTAN_NORM,
        SEMI_C_RESIDUAL,
        SEMI_C_BEST_FIT,
        SEMI_C_PARTITION,
    ];
    match m.kind() {
        ModelKind::Funk => v.extend([RANDERS_Q, RANDERS_BOUND]),
        ModelKind::Berwald if n == 2 => v.extend([BERWALD_PLANAR, BERWALD_BOUND]),
        _ => {}
    }
    v.extend([
        SPRAY_ORACLE,
        SPRAY_SPAN,
        SPRAY_HOMOGENEITY,
        LANDSBERG_SYMMETRY,
        LANDSBERG_Y,
        LANDSBERG_CLOSED,
        MEAN_LANDSBERG_LEGS,
        STRETCH_BIVECTOR,
    ]);
    v
}

/// Result of one check at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Residual(f64),
    /// Not applicable at this point (Riemannian point, degenerate frame).
    Skipped,
    Failed(String),
}

fn skip_on(e: Error, skippable: &[Error]) -> Outcome {
    if skippable.contains(&e) {
        Outcome::Skipped
    } else {
        Outcome::Failed(e.to_string())
    }
}

fn outcome(r: Result<f64, Error>, skippable: &[Error]) -> Outcome {
    match r {
        Ok(v) => Outcome::Residual(v),
        Err(e) => skip_on(e, skippable),
    }
}

/// Fraction of its natural magnitude below which a reference quantity is
/// treated as vanishing.
pub const VANISHING_FRACTION: f64 = 1e-6;

/// `diff / reference`, or `diff / natural` when the reference is negligible
/// against the natural magnitude of the quantity at that point.
pub fn rel_or_natural(diff: f64, reference: f64, natural: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if reference >= VANISHING_FRACTION * natural {
        diff / reference
    } else {
        diff / natural
    }
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Natural magnitude of the Cartan torsion, `‖g‖ / |y|`.
fn cartan_scale(m: &PhiModel, p: &EvalPoint) -> Result<f64, Error> {
    Ok(fundamental_tensor_oracle(m, p)?.frobenius() / norm(p.y()))
}

/// `F·‖I‖` divided by the applicable bound, so that `< 1` means the bound
/// holds strictly.
fn bound_ratio(m: &PhiModel, p: &EvalPoint, bound: f64) -> Result<f64, Error> {
    Ok(m.norm_at(p) * cartan_norm(m, p)? / bound)
}

/// Evaluates one check family at one point.
pub fn evaluate(check: &CheckDef, m: &PhiModel, p: &EvalPoint) -> Outcome {
    use Error::*;
    let n = p.dim();
    match check.name {
        "metric_closed_vs_oracle" => outcome(
            (|| Ok(fundamental_tensor(m, p)?.rel_diff(&fundamental_tensor_oracle(m, p)?)))(),
            &[],
        ),
        "metric_homogeneity" => outcome(
            (|| {
                let g = fundamental_tensor_oracle(m, p)?;
                Ok(fundamental_tensor_oracle(m, &p.scaled(2.0)?)?.rel_diff(&g))
            })(),
            &[],
        ),
        "cartan_closed_vs_oracle" => outcome(
            (|| {
                let o = cartan_oracle(m, p)?;
                let c = cartan_closed(m, p)?;
                let diff = diff_norm(c.as_slice(), o.as_slice());
                Ok(rel_or_natural(diff, o.frobenius(), cartan_scale(m, p)?))
            })(),
            &[],
        ),
        "cartan_y_contraction" => outcome(
            (|| {
                let c = cartan_oracle(m, p)?;
                let cy = norm(&c.contract_last(p.y())) / norm(p.y());
                Ok(rel_or_natural(cy, c.frobenius(), cartan_scale(m, p)?))
            })(),
            &[],
        ),
        "mean_cartan_norm" => outcome(
            (|| {
                let d = cartan_norm_direct(m, p)?;
                let c = cartan_norm(m, p)?;
                Ok(rel_or_natural((c - d).abs(), d, 1.0 / m.norm_at(p)))
            })(),
            &[],
        ),
        "semi_c_reconstruction" => outcome(semi_c_reducible(m, p).map(|r| r.residual), &[RiemannianPoint]),
        "semi_c_best_fit" => outcome(semi_c_reducible(m, p).map(|r| r.best_fit_residual), &[RiemannianPoint]),
        "semi_c_p_plus_q" => outcome(
            semi_c_reducible(m, p).map(|r| (r.p + r.q - 1.0).abs()),
            &[RiemannianPoint],
        ),
        "randers_q_magnitude" => outcome(semi_c_reducible(m, p).map(|r| r.q.abs()), &[RiemannianPoint]),
        "randers_norm_bound" => match randers_beta_norm(m, p.x()) {
            Some(beta) => outcome(bound_ratio(m, p, randers_bound(n, beta)), &[]),
            None => Outcome::Skipped,
        },
        "berwald_planar_formula" => outcome(
            (|| {
                let a = berwald_norm_formula(p)?;
                let b = spherical_norm_formula(m, p)?;
                Ok(if b == 0.0 { a.abs() } else { (a - b).abs() / b })
            })(),
            &[],
        ),
        "berwald_norm_bound" => outcome(bound_ratio(m, p, berwald_example_bound(norm(p.x()))), &[]),
        "spray_closed_vs_oracle" => outcome(
            (|| {
                let o = spray_oracle(m, p)?;
                let c = spray_closed(m, p)?;
                let diff = diff_norm(&c, &o);
                Ok(rel_or_natural(diff, norm(&o), norm(p.y()).powi(2)))
            })(),
            &[],
        ),
        "spray_span" => outcome(
            (|| pqr_decompose(&spray_oracle(m, p)?, p).map(|f| f.residual))(),
            &[RankDeficientFrame],
        ),
        "spray_homogeneity" => outcome(spray_homogeneity_residual(m, p), &[]),
        "landsberg_symmetry" => outcome(landsberg_oracle(m, p).map(|l| l.asymmetry()), &[]),
        "landsberg_y_contraction" => outcome(
            landsberg_oracle(m, p)
                .map(|l| rel_or_natural(norm(&l.contract_last(p.y())) / norm(p.y()), l.frobenius(), 1.0)),
            &[],
        ),
        "landsberg_closed_vs_oracle" => outcome(
            (|| {
                let o = landsberg_oracle(m, p)?;
                let c = landsberg_closed(m, p)?;
                let diff = diff_norm(c.as_slice(), o.as_slice());
                Ok(rel_or_natural(diff, o.frobenius(), 1.0))
            })(),
            &[RankDeficientFrame],
        ),
        "mean_landsberg_legs" => outcome(mean_landsberg(m, p).map(|j| j.leg_residual), &[RankDeficientFrame]),
        "stretch_bivector" => outcome(stretch_decompose(m, p).map(|d| d.residual), &[RankDeficientFrame]),
        other => Outcome::Failed(format!("unknown check `{other}`")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub anchor: String,
    pub points_tested: usize,
    pub points_skipped: usize,
    pub errors: usize,
    pub max_residual: f64,
    /// Index of the point attaining `max_residual`.
    pub worst_point: Option<usize>,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub pass: bool,
    /// First error message, when any point failed to evaluate.
    pub first_error: Option<String>,
}

impl CheckRecord {
    pub fn from_outcomes(check: &CheckDef, tolerance: f64, outcomes: &[Outcome]) -> CheckRecord {
        let mut rec = CheckRecord {
            check_name: check.name.into(),
            anchor: check.anchor.into(),
            points_tested: 0,
            points_skipped: 0,
            errors: 0,
            max_residual: 0.0,
            worst_point: None,
            comparison: check.comparison,
            tolerance,
            pass: true,
            first_error: None,
        };
        for (i, o) in outcomes.iter().enumerate() {
            match o {
                Outcome::Residual(v) => {
                    rec.points_tested += 1;
                    let worse = v.is_nan() || *v > rec.max_residual;
                    if rec.worst_point.is_none() || (!rec.max_residual.is_nan() && worse) {
                        rec.max_residual = *v;
                        rec.worst_point = Some(i);
                    }
                }
                Outcome::Skipped => rec.points_skipped += 1,
                Outcome::Failed(msg) => {
                    rec.errors += 1;
                    rec.first_error.get_or_insert_with(|| format!("point {i}: {msg}"));
                }
            }
        }
        let within = match check.comparison {
            Comparison::AtMost => rec.max_residual <= tolerance,
            Comparison::Below => rec.max_residual < tolerance,
        };
        rec.pass = rec.errors == 0 && within;
        rec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub metric: String,
    pub params: BTreeMap<String, f64>,
    pub dimension: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub checks: usize,
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    /// One line per check plus a verdict line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let op = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::Below => "<",
            };
            out.push_str(&format!(
                "{:<4} {:<28} max {:.3e} {op} {:.1e}  tested {} skipped {} errors {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.check_name,
                c.max_residual,
                c.tolerance,
                c.points_tested,
                c.points_skipped,
                c.errors
            ));
        }
        out.push_str(if self.summary.pass {
            "verdict: PASS\n"
        } else {
            "verdict: FAIL\n"
        });
        out
    }
}

/// Worker pool honoring [`THREADS_ENV`].
pub fn thread_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if k > 0 {
            b = b.num_threads(k);
        }
    }
    b.build().expect("thread pool")
}

/// Runs `checks` over `points`; results are keyed by point index, so the
/// report does not depend on scheduling.
pub fn run_checks(m: &PhiModel, points: &[EvalPoint], checks: &[CheckDef], cfg: &RunConfig) -> Vec<CheckRecord> {
    let per_point: Vec<Vec<Outcome>> = thread_pool().install(|| {
        points
            .par_iter()
            .map(|p| checks.iter().map(|c| evaluate(c, m, p)).collect())
            .collect()
    });
    checks
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let outs: Vec<Outcome> = per_point.iter().map(|row| row[ci].clone()).collect();
            let tol = c.tolerance_key.map_or(1.0, |k| cfg.tolerance(k));
            CheckRecord::from_outcomes(c, tol, &outs)
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sampling(#[from] crate::sampler::SamplingError),
}

/// Samples points from `cfg`, runs the full suite and assembles the report.
pub fn run(cfg: &RunConfig) -> Result<VerificationReport, VerifyError> {
    cfg.validate()?;
    let m = cfg.model()?;
    let opts = SamplerOptions {
        domain_margin: cfg.domain_margin,
        ..SamplerOptions::default()
    };
    let points = sample_points(&m, cfg.dimension, cfg.sample_count, cfg.seed, &opts)?;
    let checks = run_checks(&m, &points, &checks_for(&m, cfg.dimension), cfg);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.check_name.clone())
        .collect();
    Ok(VerificationReport {
        schema: 1,
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            seed: cfg.seed,
            metric: m.name().into(),
            params: m.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            dimension: cfg.dimension,
            samples: cfg.sample_count,
        },
        summary: Summary {
            pass: failed.is_empty(),
            checks: checks.len(),
            failed,
        },
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_aggregation() {
        let outs = [
            Outcome::Residual(1e-12),
            Outcome::Skipped,
            Outcome::Residual(3e-10),
            Outcome::Residual(2e-11),
        ];
        let r = CheckRecord::from_outcomes(&METRIC_ORACLE, 1e-9, &outs);
        assert_eq!((r.points_tested, r.points_skipped, r.worst_point), (3, 1, Some(2)));
        assert!(r.pass);
        let r = CheckRecord::from_outcomes(&METRIC_ORACLE, 1e-10, &outs);
        assert!(!r.pass);
        let r = CheckRecord::from_outcomes(&METRIC_ORACLE, 1.0, &[Outcome::Failed("boom".into())]);
        assert!(!r.pass);
        assert_eq!(r.first_error.as_deref(), Some("point 0: boom"));
    }

    #[test]
    fn nan_residual_fails() {
        let r = CheckRecord::from_outcomes(
            &METRIC_ORACLE,
            1.0,
            &[Outcome::Residual(0.0), Outcome::Residual(f64::NAN)],
        );
        assert!(!r.pass);
        let later = [
            Outcome::Residual(f64::NAN),
            Outcome::Residual(0.5),
            Outcome::Residual(0.7),
        ];
        let r = CheckRecord::from_outcomes(&METRIC_ORACLE, 1.0, &later);
        assert!(!r.pass && r.max_residual.is_nan() && r.worst_point == Some(0));
    }

    #[test]
    fn bound_checks_are_strict() {
        let r = CheckRecord::from_outcomes(&RANDERS_BOUND, 1.0, &[Outcome::Residual(1.0)]);
        assert!(!r.pass);
    }

    #[test]
    fn euclidean_suite_passes() {
        let cfg = RunConfig {
            sample_count: 5,
            seed: 7,
            ..RunConfig::default()
        };
        let rep = run(&cfg).unwrap();
        assert!(rep.summary.pass, "{}", rep.to_text());
        assert!(rep.checks.iter().all(|c| c.max_residual <= 1e-12));
    }
}
