//! Fundamental tensor, angular metric, inverse metric and the quadratic
//! forms `g^{ij}sᵢsⱼ`, `g^{ij}sᵢtⱼ`, `g^{ij}tᵢtⱼ`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::expansion;
use crate::invariants::{EvalPoint, Invariants};
use crate::linalg::spd_inverse;
use crate::phi::{phi_jet_at, PhiJet, PhiModel};
use crate::tensor::SymTensor2;

/// Relative eigenvalue floor below which a metric counts as singular.
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// φ and its `(s, t)` partials up to order 3 plus the `u`, `v` mixed
/// partials the spray needs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Partials {
    pub f: f64,
    pub fu: f64,
    pub fs: f64,
    pub fv: f64,
    pub ft: f64,
    pub fss: f64,
    pub fst: f64,
    pub ftt: f64,
    pub fus: f64,
    pub fut: f64,
    pub fvs: f64,
    pub fvt: f64,
    pub fsss: f64,
    pub fsst: f64,
    pub fstt: f64,
    pub fttt: f64,
}

impl Partials {
    pub fn from_jet(jet: &PhiJet) -> Self {
        let o = jet.order();
        let g = |idx: [u8; 4]| {
            if idx.iter().map(|&e| e as usize).sum::<usize>() <= o {
                jet.get(idx)
            } else {
                0.0
            }
        };
        Partials {
            f: g([0, 0, 0, 0]),
            fu: g([1, 0, 0, 0]),
            fs: g([0, 1, 0, 0]),
            fv: g([0, 0, 1, 0]),
            ft: g([0, 0, 0, 1]),
            fss: g([0, 2, 0, 0]),
            fst: g([0, 1, 0, 1]),
            ftt: g([0, 0, 0, 2]),
            fus: g([1, 1, 0, 0]),
            fut: g([1, 0, 0, 1]),
            fvs: g([0, 1, 1, 0]),
            fvt: g([0, 0, 1, 1]),
            fsss: g([0, 3, 0, 0]),
            fsst: g([0, 2, 0, 1]),
            fstt: g([0, 1, 0, 2]),
            fttt: g([0, 0, 0, 3]),
        }
    }

    /// Admits `p`, then evaluates the jet at its invariants.
    ///
    /// Without an anchor `v` and `t` vanish identically along the fibre and
    /// the base, so their partials never reach `F` and are dropped.
    pub fn at(m: &PhiModel, p: &EvalPoint, order: usize) -> Result<(Invariants, Partials)> {
        let inv = m.admit(p)?;
        let jet = phi_jet_at(m, &inv, order)?;
        let mut d = Partials::from_jet(&jet);
        if !p.has_anchor() {
            d.drop_anchor();
        }
        Ok((inv, d))
    }

    fn drop_anchor(&mut self) {
        for v in [
            &mut self.fv,
            &mut self.ft,
            &mut self.fst,
            &mut self.ftt,
            &mut self.fut,
            &mut self.fvs,
            &mut self.fvt,
            &mut self.fsst,
            &mut self.fstt,
            &mut self.fttt,
        ] {
            *v = 0.0;
        }
    }

    /// `σ₁ = φ − sφ_s − tφ_t`
    pub fn sigma1(&self, inv: &Invariants) -> f64 {
        self.f - inv.s * self.fs - inv.t * self.ft
    }
}

/// The coefficients `c₀ … c₆` of the fundamental tensor in the basis
/// `δ, aa, rr, ar+ra, xr+rx, ax+xa, xx`.
pub fn metric_coefficients(d: &Partials, inv: &Invariants) -> [f64; 7] {
    let (s, t) = (inv.s, inv.t);
    let f = d.f;
    let ss = d.fs * d.fs + f * d.fss;
    let tt = d.ft * d.ft + f * d.ftt;
    let st = d.fs * d.ft + f * d.fst;
    [
        f * f - s * f * d.fs - t * f * d.ft,
        tt,
        s * s * ss + t * t * tt + 2.0 * t * s * st - s * f * d.fs - t * f * d.ft,
        f * d.ft - s * st - t * tt,
        f * d.fs - s * ss - t * st,
        st,
        ss,
    ]
}

/// `g_ij` assembled from `c₀ … c₆`.
pub fn fundamental_tensor(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor2> {
    let (inv, d) = Partials::at(m, p, 2)?;
    let c = metric_coefficients(&d, &inv);
    let (x, a, r) = (p.x(), p.a(), &inv.r_cov);
    Ok(SymTensor2::from_fn(p.dim(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        c[0] * delta
            + c[1] * a[i] * a[j]
            + c[2] * r[i] * r[j]
            + c[3] * (a[j] * r[i] + a[i] * r[j])
            + c[4] * (x[j] * r[i] + x[i] * r[j])
            + c[5] * (a[j] * x[i] + a[i] * x[j])
            + c[6] * x[i] * x[j]
    }))
}

/// `g_ij` assembled in the frame `rᵢ, sᵢ, tᵢ`.
pub fn fundamental_tensor_frame(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor2> {
    let (inv, d) = Partials::at(m, p, 2)?;
    let sigma1 = d.sigma1(&inv);
    let f = d.f;
    let (r, sv, tv) = (&inv.r_cov, &inv.s_cov, &inv.t_cov);
    let rr = inv.s * f * d.fs + inv.t * f * d.ft;
    let sss = d.fs * d.fs + f * d.fss;
    let ttt = d.ft * d.ft + f * d.ftt;
    let sst = d.fs * d.ft + f * d.fst;
    Ok(SymTensor2::from_fn(p.dim(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        sigma1 * f * delta
            + rr * r[i] * r[j]
            + f * d.fs * (sv[i] * r[j] + sv[j] * r[i])
            + sss * sv[i] * sv[j]
            + f * d.ft * (tv[i] * r[j] + tv[j] * r[i])
            + ttt * tv[i] * tv[j]
            + sst * (sv[i] * tv[j] + sv[j] * tv[i])
    }))
}

/// `g_ij = ½ ∂²F²/∂yⁱ∂yʲ` by Taylor propagation through `F = |y| φ`.
pub fn fundamental_tensor_oracle(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor2> {
    m.admit(p)?;
    let n = p.dim();
    let f2 = expansion::norm_sq(m, p, 2, 0);
    Ok(SymTensor2::from_fn(n, |i, j| 0.5 * f2.d2(n + i, n + j)))
}

/// Closed-form angular metric.
pub fn angular_metric(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor2> {
    let (inv, d) = Partials::at(m, p, 2)?;
    Ok(angular_from(&d, &inv))
}

pub(crate) fn angular_from(d: &Partials, inv: &Invariants) -> SymTensor2 {
    let sigma1 = d.sigma1(inv);
    let f = d.f;
    let (r, sv, tv) = (&inv.r_cov, &inv.s_cov, &inv.t_cov);
    SymTensor2::from_fn(inv.dim(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        sigma1 * f * (delta - r[i] * r[j])
            + f * d.fss * sv[i] * sv[j]
            + f * d.ftt * tv[i] * tv[j]
            + f * d.fst * (sv[i] * tv[j] + sv[j] * tv[i])
    })
}

/// `h_ij = g_ij − F_{yⁱ}F_{yʲ}` with both pieces differentiated exactly.
pub fn angular_metric_oracle(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor2> {
    m.admit(p)?;
    let n = p.dim();
    let f2 = expansion::norm_sq(m, p, 2, 0);
    let (_, dy) = expansion::norm_and_gradient(&f2, n);
    Ok(SymTensor2::from_fn(n, |i, j| 0.5 * f2.d2(n + i, n + j) - dy[i] * dy[j]))
}

/// Numeric inverse of a positive-definite metric.
pub fn inverse_metric(g: &SymTensor2) -> Result<SymTensor2> {
    let n = g.dim();
    let inv = spd_inverse(g.as_slice(), n, SINGULAR_FLOOR).ok_or(Error::SingularMetric)?;
    Ok(SymTensor2::from_fn(n, |i, j| inv[i * n + j]))
}

/// `‖𝔖‖² = g^{ij}sᵢsⱼ`, `‖𝔑‖² = g^{ij}sᵢtⱼ`, `‖𝔗‖² = g^{ij}tᵢtⱼ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForms {
    pub s2: f64,
    pub r2: f64,
    pub t2: f64,
}

pub fn quadratic_forms(ginv: &SymTensor2, inv: &Invariants) -> QuadraticForms {
    QuadraticForms {
        s2: ginv.bilinear(&inv.s_cov, &inv.s_cov),
        r2: ginv.bilinear(&inv.s_cov, &inv.t_cov),
        t2: ginv.bilinear(&inv.t_cov, &inv.t_cov),
    }
}

/// Whether `F` restricted to `p` reduces to a function of `(u, s)` alone.
pub(crate) fn require_spherical(m: &PhiModel, p: &EvalPoint) -> Result<()> {
    if m.uses_anchor() && p.has_anchor() {
        Err(Error::NotSphericallySymmetric)
    } else {
        Ok(())
    }
}

/// `g^{ij}sᵢsⱼ = c₀⁻¹[(u−s²) − 𝔄(u−s²)²]` with
/// `𝔄 = φ_ss / (φ − sφ_s + (u−s²)φ_ss)`, valid without an anchor.
pub fn spherical_s2(m: &PhiModel, p: &EvalPoint) -> Result<f64> {
    require_spherical(m, p)?;
    let (inv, d) = Partials::at(m, p, 2)?;
    let ss = inv.ss();
    let c0 = d.f * d.f - inv.s * d.f * d.fs;
    let frak_a = d.fss / (d.f - inv.s * d.fs + ss * d.fss);
    Ok((ss - frak_a * ss * ss) / c0)
}

/// Oracle-based quadratic forms: numeric inverse of the oracle metric.
pub fn quadratic_forms_oracle(m: &PhiModel, p: &EvalPoint) -> Result<QuadraticForms> {
    let g = fundamental_tensor_oracle(m, p)?;
    let ginv = inverse_metric(&g)?;
    let inv = crate::invariants::compute_invariants(p);
    Ok(quadratic_forms(&ginv, &inv))
}

/// `g·g⁻¹ − I` in relative Frobenius norm.
pub fn inverse_residual(g: &SymTensor2, ginv: &SymTensor2) -> f64 {
    let n = g.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v: f64 = (0..n).map(|k| g.get(i, k) * ginv.get(k, j)).sum();
            let e = v - if i == j { 1.0 } else { 0.0 };
            acc += e * e;
        }
    }
    (acc / n as f64).sqrt()
}

/// Rows of `g_ij yʲ` and `F F_{yⁱ}`, used by the Euler-identity check.
pub fn euler_identity_residual(m: &PhiModel, p: &EvalPoint) -> Result<f64> {
    let g = fundamental_tensor(m, p)?;
    let n = p.dim();
    let f2 = expansion::norm_sq(m, p, 1, 0);
    let lhs = g.apply(p.y());
    let rhs: Vec<f64> = (0..n).map(|i| 0.5 * f2.d1(n + i)).collect();
    Ok(crate::linalg::rel_diff(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::compute_invariants;
    use crate::linalg::min_eigenvalue;
    use approx::assert_relative_eq;

    fn pt(x: &[f64], y: &[f64], a: &[f64]) -> EvalPoint {
        EvalPoint::new(x.to_vec(), y.to_vec(), a.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let p = pt(&[0.2, -0.1, 0.4], &[1.0, 2.0, -0.5], &[0.3, 0.0, 0.0]);
        let m = PhiModel::euclidean();
        let id = SymTensor2::identity(3);
        assert_eq!(fundamental_tensor(&m, &p).unwrap(), id);
        assert!(fundamental_tensor_oracle(&m, &p).unwrap().rel_diff(&id) < 1e-15);
        let (inv, d) = Partials::at(&m, &p, 2).unwrap();
        assert_eq!(metric_coefficients(&d, &inv), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn funk_planar_metric_is_positive_definite() {
        let p = pt(&[0.3, 0.0], &[0.0, 1.0], &[0.0, 0.0]);
        let g = fundamental_tensor(&PhiModel::funk(), &p).unwrap();
        let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
        assert!(det > 0.0);
        let oracle = fundamental_tensor_oracle(&PhiModel::funk(), &p).unwrap();
        assert!(g.rel_diff(&oracle) < 1e-12);
    }

    #[test]
    fn funk_at_origin_is_euclidean() {
        let p = pt(&[0.0, 0.0, 0.0], &[0.3, -1.2, 0.7], &[0.0; 3]);
        let g = fundamental_tensor_oracle(&PhiModel::funk(), &p).unwrap();
        let (inv, _) = Partials::at(&PhiModel::funk(), &p, 0).unwrap();
        // φ(0, s) = 1 + s with s = 0 at x = 0
        assert!(g.rel_diff(&SymTensor2::identity(3)) < 1e-14, "{:?} {:?}", g, inv.s);
    }

    #[test]
    fn closed_forms_agree_with_oracle() {
        let a = [0.25, 0.1, 0.0, 0.0];
        let p = pt(&[0.2, -0.3, 0.1, 0.15], &[0.7, 0.2, -1.1, 0.4], &a);
        for m in crate::phi::catalog() {
            let oracle = fundamental_tensor_oracle(&m, &p).unwrap();
            assert!(
                fundamental_tensor(&m, &p).unwrap().rel_diff(&oracle) < 1e-12,
                "{}",
                m.name()
            );
            assert!(
                fundamental_tensor_frame(&m, &p).unwrap().rel_diff(&oracle) < 1e-12,
                "{}",
                m.name()
            );
            let h = angular_metric(&m, &p).unwrap();
            assert!(
                h.rel_diff(&angular_metric_oracle(&m, &p).unwrap()) < 1e-11,
                "{}",
                m.name()
            );
            let hy = h.apply(p.y());
            assert!(crate::linalg::norm(&hy) <= 1e-12 * h.frobenius() * crate::linalg::norm(p.y()));
            assert!(euler_identity_residual(&m, &p).unwrap() < 1e-12);
            assert!(min_eigenvalue(oracle.as_slice(), 4) > 0.0);
        }
    }

    #[test]
    fn euclidean_angular_metric() {
        let p = pt(&[0.1, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0; 3]);
        let h = angular_metric(&PhiModel::euclidean(), &p).unwrap();
        let want = SymTensor2::from_fn(3, |i, j| if i == j && i != 1 { 1.0 } else { 0.0 });
        assert_eq!(h, want);
    }

    #[test]
    fn inverse_examples() {
        let id = SymTensor2::identity(3);
        assert_eq!(inverse_metric(&id).unwrap(), id);
        let d = SymTensor2::from_fn(3, |i, j| {
            if i != j {
                0.0
            } else if i == 0 {
                2.0
            } else {
                1.0
            }
        });
        let inv = inverse_metric(&d).unwrap();
        assert_relative_eq!(inv.get(0, 0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(inv.get(1, 1), 1.0, epsilon = 1e-15);
        let bad = SymTensor2::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert_eq!(inverse_metric(&bad), Err(Error::SingularMetric));
    }

    #[test]
    fn quadratic_forms_euclidean() {
        let p = pt(&[0.3, 0.2, 0.1], &[1.0, -0.5, 0.2], &[0.2, 0.1, -0.3]);
        let inv = compute_invariants(&p);
        let q = quadratic_forms(&SymTensor2::identity(3), &inv);
        assert_relative_eq!(q.s2, inv.ss(), epsilon = 1e-15);
        assert_relative_eq!(q.r2, inv.st(), epsilon = 1e-15);
        assert_relative_eq!(q.t2, inv.tt(), epsilon = 1e-15);
    }

    #[test]
    fn spherical_s2_matches_contraction() {
        let p = pt(&[0.3, -0.2, 0.4], &[0.5, 1.0, -0.2], &[0.0; 3]);
        for m in [PhiModel::berwald(), PhiModel::funk()] {
            let q = quadratic_forms_oracle(&m, &p).unwrap();
            let s2 = spherical_s2(&m, &p).unwrap();
            assert!((q.s2 - s2).abs() <= 1e-12 * s2.abs(), "{} {} {}", m.name(), q.s2, s2);
        }
        let with_anchor = pt(&[0.3, -0.2, 0.4], &[0.5, 1.0, -0.2], &[0.3, 0.0, 0.0]);
        assert_eq!(
            spherical_s2(&PhiModel::shen(0.3).unwrap(), &with_anchor),
            Err(Error::NotSphericallySymmetric)
        );
    }

    #[test]
    fn metric_is_zero_homogeneous() {
        let p = pt(&[0.2, 0.1, -0.3], &[0.4, -1.0, 0.3], &[0.3, 0.0, 0.0]);
        let m = PhiModel::shen(0.3).unwrap();
        let g = fundamental_tensor(&m, &p).unwrap();
        for lambda in [0.5, 2.0] {
            let gl = fundamental_tensor(&m, &p.scaled(lambda).unwrap()).unwrap();
            assert!(gl.rel_diff(&g) < 1e-12);
        }
    }
}
