//! Seeded sampling of admissible evaluation points.

use finsler_ssm_core::linalg::min_eigenvalue;
use finsler_ssm_core::metric::fundamental_tensor_oracle;
use finsler_ssm_core::{EvalPoint, PhiModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerOptions {
    /// `x` is drawn uniformly from the ball of this radius times the model's
    /// domain radius.
    pub radius_fraction: f64,
    /// Range of `|y|`.
    pub y_norm: (f64, f64),
    /// Minimum accepted `λ_min(g) / ‖g‖`.
    pub domain_margin: f64,
    /// Override of the anchor norm; the model's own value when `None`.
    pub anchor: Option<f64>,
    pub max_attempts: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            radius_fraction: 0.8,
            y_norm: (0.5, 2.0),
            domain_margin: 1e-6,
            anchor: None,
            max_attempts: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("could only draw {drawn} admissible points out of {requested}")]
pub struct SamplingError {
    pub drawn: usize,
    pub requested: usize,
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Draws `count` admissible points in dimension `n`, deterministically in
/// `seed`; `a = |a|·e₁`.
pub fn sample_points(
    m: &PhiModel,
    n: usize,
    count: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<Vec<EvalPoint>, SamplingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![0.0; n];
    a[0] = opts.anchor.unwrap_or_else(|| m.anchor_norm());
    let radius = opts.radius_fraction * m.ball_radius();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts >= opts.max_attempts * count.max(1) {
            return Err(SamplingError {
                drawn: out.len(),
                requested: count,
            });
        }
        attempts += 1;
        let rho = radius * rng.random::<f64>().powf(1.0 / n as f64);
        let x: Vec<f64> = unit_vector(&mut rng, n).into_iter().map(|c| rho * c).collect();
        let r = rng.random_range(opts.y_norm.0..=opts.y_norm.1);
        let y: Vec<f64> = unit_vector(&mut rng, n).into_iter().map(|c| r * c).collect();
        let Ok(p) = EvalPoint::new(x, y, a.clone()) else {
            continue;
        };
        if m.admit(&p).is_err() {
            continue;
        }
        let Ok(g) = fundamental_tensor_oracle(m, &p) else {
            continue;
        };
        let fro = g.frobenius();
        if min_eigenvalue(g.as_slice(), n) <= opts.domain_margin * fro {
            continue;
        }
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_within_bounds() {
        let m = PhiModel::shen(0.3).unwrap();
        let opts = SamplerOptions::default();
        let a = sample_points(&m, 4, 20, 11, &opts).unwrap();
        let b = sample_points(&m, 4, 20, 11, &opts).unwrap();
        assert_eq!(a, b);
        for p in &a {
            let xn = p.x().iter().map(|c| c * c).sum::<f64>().sqrt();
            let yn = p.y().iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!(xn <= 0.8 + 1e-12);
            assert!((0.5 - 1e-12..=2.0 + 1e-12).contains(&yn));
            assert_eq!(p.a()[0], 0.3);
        }
        let c = sample_points(&m, 4, 20, 12, &opts).unwrap();
        assert_ne!(a, c);
    }
}
