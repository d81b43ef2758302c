//! Cartan torsion, mean Cartan torsion, its norm and the semi-C-reducible
//! decomposition `C = 𝒫/(n+1)·(h⊗I)_sym + 𝒬/‖I‖²·I⊗I⊗I`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::expansion;
use crate::invariants::{EvalPoint, Invariants};
use crate::linalg::{dot, lstsq};
use crate::metric::{
    angular_from, angular_metric_oracle, fundamental_tensor, fundamental_tensor_oracle, inverse_metric,
    quadratic_forms, require_spherical, Partials, QuadraticForms,
};
use crate::phi::{ModelKind, PhiModel};
use crate::tensor::SymTensor3;

/// `‖I‖²F²` at or below this marks a Riemannian point.
pub const RIEMANNIAN_THRESHOLD: f64 = 1e-10;

/// Relative size of `HN + KM` below which the general `(𝒫, 𝒬)` formulas are
/// abandoned for a constrained fit.
pub const DENOMINATOR_THRESHOLD: f64 = 1e-8;

/// `|σ₁| / |φ|` below this is treated as a vanishing `σ₁`.
const SIGMA1_FLOOR: f64 = 1e-12;

/// The scalars `σ₁ … σ₁₂`; `sigma[k-1]` holds `σ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSet {
    pub sigma: [f64; 12],
}

impl SigmaSet {
    pub fn new(d: &Partials, inv: &Invariants) -> Result<Self> {
        let (s, t, f) = (inv.s, inv.t, d.f);
        let s1 = d.sigma1(inv);
        if !(s1.abs() > SIGMA1_FLOOR * f.abs()) {
            return Err(Error::DegenerateSigma1);
        }
        let s2 = s1 * d.fs - s * f * d.fss - t * f * d.fst;
        let s3 = s1 * d.ft - s * f * d.fst - t * f * d.ftt;
        let s4 = 3.0 * d.fs * d.fss + f * d.fsss;
        let s5 = 3.0 * d.ft * d.ftt + f * d.fttt;
        let s6 = 2.0 * d.fs * d.fst + d.ft * d.fss + f * d.fsst;
        let s7 = 2.0 * d.ft * d.fst + d.fs * d.ftt + f * d.fstt;
        let s8 = f * (s1 * s4 - 3.0 * s2 * d.fss);
        let s9 = f * (s1 * s5 - 3.0 * s3 * d.ftt);
        let s10 = f * (s1 * s6 - 2.0 * s2 * d.fst - s3 * d.fss);
        let s11 = f * (s1 * s7 - 2.0 * s3 * d.fst - s2 * d.ftt);
        let s12 = inv.r * f * s1;
        Ok(SigmaSet {
            sigma: [s1, s2, s3, s4, s5, s6, s7, s8, s9, s10, s11, s12],
        })
    }

    /// `σ_k` for `k` in `1..=12`.
    pub fn get(&self, k: usize) -> f64 {
        self.sigma[k - 1]
    }
}

pub fn sigma_set(m: &PhiModel, p: &EvalPoint) -> Result<SigmaSet> {
    let (inv, d) = Partials::at(m, p, 3)?;
    SigmaSet::new(&d, &inv)
}

/// Closed-form Cartan torsion in the frame `sᵢ, tᵢ` and the angular metric.
pub fn cartan_closed(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor3> {
    let (inv, d) = Partials::at(m, p, 3)?;
    let sg = SigmaSet::new(&d, &inv)?;
    let h = angular_from(&d, &inv);
    let (sv, tv) = (&inv.s_cov, &inv.t_cov);
    let w = 0.5 / sg.get(12);
    Ok(SymTensor3::linear_combination(
        p.dim(),
        &[
            (w * sg.get(2), &SymTensor3::sym_product(&h, sv)),
            (w * sg.get(3), &SymTensor3::sym_product(&h, tv)),
            (w * sg.get(8), &SymTensor3::cube(sv)),
            (w * sg.get(9), &SymTensor3::cube(tv)),
            (w * sg.get(10), &SymTensor3::cyclic(sv, sv, tv)),
            (w * sg.get(11), &SymTensor3::cyclic(tv, tv, sv)),
        ],
    ))
}

/// `C_ijk = ¼ ∂³F²/∂yⁱ∂yʲ∂yᵏ`.
pub fn cartan_oracle(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor3> {
    m.admit(p)?;
    let n = p.dim();
    let f2 = expansion::norm_sq(m, p, 3, 0);
    Ok(SymTensor3::from_fn(n, |i, j, k| 0.25 * f2.d3(n + i, n + j, n + k)))
}

/// Mean Cartan torsion `I_k = (H sₖ + K tₖ)/(2r)` with its legs.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCartan {
    pub covector: Vec<f64>,
    pub h_cartan: f64,
    pub k_cartan: f64,
    pub forms: QuadraticForms,
}

pub(crate) fn cartan_legs(d: &Partials, inv: &Invariants, q: &QuadraticForms) -> (f64, f64) {
    let (s, t, f) = (inv.s, inv.t, d.f);
    let n1 = inv.dim() as f64 + 1.0;
    let s1 = d.sigma1(inv);
    let s1s = -s * d.fss - t * d.fst;
    let s1t = -s * d.fst - t * d.ftt;
    let sss = d.fsss - 3.0 * s1s * d.fss / s1;
    let ttt = d.fttt - 3.0 * s1t * d.ftt / s1;
    let sst = d.fsst - (2.0 * s1s * d.fst + s1t * d.fss) / s1;
    let tts = d.fstt - (2.0 * s1t * d.fst + s1s * d.ftt) / s1;
    let h = n1 * (d.fs / f + s1s / s1) + q.s2 * sss * f + 2.0 * q.r2 * sst * f + q.t2 * tts * f;
    let k = n1 * (d.ft / f + s1t / s1) + q.t2 * ttt * f + q.s2 * sst * f + 2.0 * q.r2 * tts * f;
    (h, k)
}

/// Closed-form mean Cartan torsion; the quadratic forms use the numeric
/// inverse of the closed-form metric.
pub fn mean_cartan(m: &PhiModel, p: &EvalPoint) -> Result<MeanCartan> {
    let (inv, d) = Partials::at(m, p, 3)?;
    SigmaSet::new(&d, &inv)?;
    let ginv = inverse_metric(&fundamental_tensor(m, p)?)?;
    let forms = quadratic_forms(&ginv, &inv);
    let (h, k) = cartan_legs(&d, &inv, &forms);
    let covector = inv
        .s_cov
        .iter()
        .zip(&inv.t_cov)
        .map(|(si, ti)| (h * si + k * ti) / (2.0 * inv.r))
        .collect();
    Ok(MeanCartan {
        covector,
        h_cartan: h,
        k_cartan: k,
        forms,
    })
}

/// `I_k = g^{ij} C_ijk` from the oracle metric and torsion.
pub fn mean_cartan_oracle(m: &PhiModel, p: &EvalPoint) -> Result<Vec<f64>> {
    let ginv = inverse_metric(&fundamental_tensor_oracle(m, p)?)?;
    Ok(cartan_oracle(m, p)?.trace_with(&ginv))
}

/// `‖I‖ = (2r)⁻¹ √(‖𝔖‖²H² + 2‖𝔑‖²HK + ‖𝔗‖²K²)`.
pub fn cartan_norm(m: &PhiModel, p: &EvalPoint) -> Result<f64> {
    let mc = mean_cartan(m, p)?;
    let r = crate::linalg::norm(p.y());
    let q = &mc.forms;
    let (h, k) = (mc.h_cartan, mc.k_cartan);
    let sq = q.s2 * h * h + 2.0 * q.r2 * h * k + q.t2 * k * k;
    Ok(sq.max(0.0).sqrt() / (2.0 * r))
}

/// `‖I‖ = √(g^{ij} IᵢIⱼ)` by direct contraction of the oracle quantities.
pub fn cartan_norm_direct(m: &PhiModel, p: &EvalPoint) -> Result<f64> {
    let ginv = inverse_metric(&fundamental_tensor_oracle(m, p)?)?;
    let i = cartan_oracle(m, p)?.trace_with(&ginv);
    Ok(ginv.bilinear(&i, &i).max(0.0).sqrt())
}

/// Scalars of the anchor-free specialization: `A = σ₁φ_s − sφφ_ss`,
/// `B = σ₁ + (u−s²)φ_ss`, `C = σ₁φ_sss + 3sφ_ss²`.
struct SphericalScalars {
    a: f64,
    b: f64,
    c: f64,
    sigma1: f64,
}

fn spherical_scalars(d: &Partials, inv: &Invariants) -> SphericalScalars {
    let s = inv.s;
    let sigma1 = d.f - s * d.fs;
    SphericalScalars {
        a: sigma1 * d.fs - s * d.f * d.fss,
        b: sigma1 + inv.ss() * d.fss,
        c: sigma1 * d.fsss + 3.0 * s * d.fss * d.fss,
        sigma1,
    }
}

/// `‖I‖` for metrics without an anchor, in closed form:
/// `|((n+1)AB + (u−s²)Cφ) / (2rσ₁ρ)| √((u−s²)/ρ)` with `ρ = φB`.
pub fn spherical_norm_formula(m: &PhiModel, p: &EvalPoint) -> Result<f64> {
    require_spherical(m, p)?;
    let (inv, d) = Partials::at(m, p, 3)?;
    let sc = spherical_scalars(&d, &inv);
    if !(sc.sigma1.abs() > SIGMA1_FLOOR * d.f.abs()) {
        return Err(Error::DegenerateSigma1);
    }
    let n1 = inv.dim() as f64 + 1.0;
    let ss = inv.ss();
    let rho = d.f * sc.b;
    let num = n1 * sc.a * sc.b + ss * sc.c * d.f;
    Ok((num / (2.0 * inv.r * sc.sigma1 * rho)).abs() * (ss / rho).max(0.0).sqrt())
}

/// `‖I‖` of the planar Berwald metric in fully explicit form.
pub fn berwald_norm_formula(p: &EvalPoint) -> Result<f64> {
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            got: p.dim(),
        });
    }
    let m = PhiModel::berwald();
    let inv = m.admit(p)?;
    let (u, s) = (inv.u, inv.s);
    let ss = u - s * s;
    let f = m.norm_at(p);
    let q = (1.0 - u + s * s).sqrt();
    let inner = 1.0 - s * (s + q) / ((1.0 - u) * (1.0 + 2.0 * ss));
    Ok(3.0 / f * inner.abs() * (ss / (1.0 + 2.0 * ss)).sqrt())
}

/// Upper bound on `F·‖I‖` for the planar Berwald metric at `|x|`.
pub fn berwald_example_bound(x_norm: f64) -> f64 {
    let x2 = x_norm * x_norm;
    3.0 * (1.0 + (1.0 + x2) / (2.0 * (1.0 + (1.0 - x2).sqrt())))
}

/// Upper bound on `F·‖I‖` for a Randers metric with `‖β‖_α = beta` in
/// dimension `n`.
pub fn randers_bound(n: usize, beta: f64) -> f64 {
    (n as f64 + 1.0) / 2.0.sqrt() * (1.0 - (1.0 - beta * beta).sqrt()).sqrt()
}

/// How `(𝒫, 𝒬)` were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqMethod {
    /// Closed forms of the anchor-free specialization.
    Spherical,
    /// General formulas through the scalars `M`, `N`, `H`, `K`.
    General,
    /// Least-squares fit with `𝒫 + 𝒬 = 1`, used when `HN + KM` degenerates.
    ConstrainedFit,
}

impl PqMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PqMethod::Spherical => "spherical",
            PqMethod::General => "general",
            PqMethod::ConstrainedFit => "constrained-fit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CReducibilityReport {
    pub p: f64,
    pub q: f64,
    pub m: f64,
    pub n: f64,
    pub h_cartan: f64,
    pub k_cartan: f64,
    pub norm_i: f64,
    pub method: PqMethod,
    /// `|HN + KM| < 1e-8 (|HN| + |KM|)`.
    pub degenerate_denominator: bool,
    /// `‖C − C_rec‖ / ‖C‖` with the reported `(𝒫, 𝒬)`.
    pub residual: f64,
    /// Same residual for the unconstrained least-squares `(𝒫, 𝒬)`.
    pub best_fit_residual: f64,
    pub best_fit: [f64; 2],
}

/// The scalars `M`, `N` whose relation `M sₖ = N tₖ` the general formulas
/// rely on.
pub fn mn_scalars(sg: &SigmaSet, d: &Partials, inv: &Invariants) -> (f64, f64) {
    let f = d.f;
    let n2 = inv.dim() as f64 - 2.0;
    let (ss, st, tt) = (inv.ss(), inv.st(), inv.tt());
    let s1 = sg.get(1);
    let (s2, s3, s10, s11) = (sg.get(2), sg.get(3), sg.get(10), sg.get(11));
    let m = s2 * (s1 * n2 * f + tt * f * d.ftt + st * f * d.fst) - s3 * (st * f * d.fss + tt * f * d.fst) + s10 * st
        - s11 * tt;
    let n = s2 * (st * f * d.ftt + ss * f * d.fst) - s3 * (s1 * n2 * f + ss * f * d.fss + st * f * d.fst) + s10 * ss
        - s11 * st;
    (m, n)
}

/// Checks `C = 𝒫/(n+1)·(hI)_sym + 𝒬/‖I‖²·III` at `p` against the oracle
/// torsion.
pub fn semi_c_reducible(m: &PhiModel, p: &EvalPoint) -> Result<CReducibilityReport> {
    let (inv, d) = Partials::at(m, p, 3)?;
    let sg = SigmaSet::new(&d, &inv)?;
    let n = p.dim();
    let n1 = n as f64 + 1.0;

    let g = fundamental_tensor_oracle(m, p)?;
    let ginv = inverse_metric(&g)?;
    let c = cartan_oracle(m, p)?;
    let h = angular_metric_oracle(m, p)?;
    let i = c.trace_with(&ginv);
    let norm2 = ginv.bilinear(&i, &i);
    let f = m.norm_at(p);
    if !(norm2 * f * f > RIEMANNIAN_THRESHOLD) {
        return Err(Error::RiemannianPoint);
    }

    let forms = quadratic_forms(&inverse_metric(&fundamental_tensor(m, p)?)?, &inv);
    let (hc, kc) = cartan_legs(&d, &inv, &forms);
    let (mm, nn) = mn_scalars(&sg, &d, &inv);
    let denom = hc * nn + kc * mm;
    let degenerate = !(denom.abs() >= DENOMINATOR_THRESHOLD * ((hc * nn).abs() + (kc * mm).abs())) || denom == 0.0;

    let hi = SymTensor3::sym_product(&h, &i);
    let iii = SymTensor3::cube(&i);
    let basis_a = SymTensor3::linear_combination(n, &[(1.0 / n1, &hi)]);
    let basis_b = SymTensor3::linear_combination(n, &[(1.0 / norm2, &iii)]);

    let (pp, qq, method) = if !p.has_anchor() || !m.uses_anchor() {
        let sc = spherical_scalars(&d, &inv);
        let lead = n1 * sc.a * sc.b;
        let cubic = inv.ss() * sc.c * d.f;
        (lead / (lead + cubic), cubic / (lead + cubic), PqMethod::Spherical)
    } else if !degenerate {
        let r = inv.r;
        let s12 = sg.get(12);
        let pp = r * n1 * (sg.get(2) * nn + sg.get(3) * mm) / (s12 * denom);
        let qq = r.powi(3)
            * (4.0 * sg.get(8) * nn.powi(3)
                + 4.0 * sg.get(9) * mm.powi(3)
                + 12.0 * sg.get(10) * nn * nn * mm
                + 12.0 * sg.get(11) * nn * mm * mm)
            * norm2
            / (s12 * denom.powi(3));
        (pp, qq, PqMethod::General)
    } else {
        // minimize ‖C − B − 𝒫(A − B)‖
        let diff: Vec<f64> = basis_a
            .as_slice()
            .iter()
            .zip(basis_b.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let rhs: Vec<f64> = c
            .as_slice()
            .iter()
            .zip(basis_b.as_slice())
            .map(|(c, b)| c - b)
            .collect();
        let pp = dot(&rhs, &diff) / dot(&diff, &diff);
        (pp, 1.0 - pp, PqMethod::ConstrainedFit)
    };

    let rebuilt = SymTensor3::linear_combination(n, &[(pp, &basis_a), (qq, &basis_b)]);
    let residual = rebuilt.rel_diff(&c);
    let cols = [basis_a.as_slice().to_vec(), basis_b.as_slice().to_vec()];
    let (best_fit, best_fit_residual) = match lstsq(&cols, c.as_slice(), 1e-12) {
        Some(fit) => ([fit.coeffs[0], fit.coeffs[1]], fit.residual / c.frobenius()),
        // the two structures coincide (n = 2): any split with the right sum fits
        None => ([pp, qq], residual),
    };

    Ok(CReducibilityReport {
        p: pp,
        q: qq,
        m: mm,
        n: nn,
        h_cartan: hc,
        k_cartan: kc,
        norm_i: norm2.sqrt(),
        method,
        degenerate_denominator: degenerate,
        residual,
        best_fit_residual,
        best_fit,
    })
}

/// `‖β‖_α` of a Randers model at base point `x`, when the model is one.
pub fn randers_beta_norm(m: &PhiModel, x: &[f64]) -> Option<f64> {
    match m.kind() {
        ModelKind::Funk => Some(crate::linalg::norm(x)),
        ModelKind::Euclidean => Some(0.0),
        _ => None,
    }
}

/// `‖C·y‖ / (‖C‖ ‖y‖)`, reading `0/0` as zero.
pub fn y_contraction_residual(c: &SymTensor3, y: &[f64]) -> f64 {
    let cy = c.contract_last(y);
    let num = crate::linalg::norm(&cy);
    if num == 0.0 {
        return 0.0;
    }
    num / (c.frobenius() * crate::linalg::norm(y))
}

/// Residual of `I·y = 0` relative to `‖I‖ ‖y‖`.
pub fn covector_y_residual(i: &[f64], y: &[f64]) -> f64 {
    let num = dot(i, y).abs();
    if num == 0.0 {
        return 0.0;
    }
    num / (crate::linalg::norm(i) * crate::linalg::norm(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(x: &[f64], y: &[f64], a: &[f64]) -> EvalPoint {
        EvalPoint::new(x.to_vec(), y.to_vec(), a.to_vec()).unwrap()
    }

    fn points() -> Vec<EvalPoint> {
        vec![
            pt(&[0.2, -0.3, 0.1, 0.15], &[0.7, 0.2, -1.1, 0.4], &[0.25, 0.0, 0.0, 0.0]),
            pt(&[0.05, 0.4, -0.2], &[-0.3, 1.2, 0.5], &[0.3, 0.0, 0.0]),
            pt(&[0.3, -0.1], &[0.4, 0.9], &[0.0, 0.0]),
        ]
    }

    #[test]
    fn euclidean_torsion_vanishes() {
        let p = pt(&[0.2, -0.1, 0.4], &[1.0, 2.0, -0.5], &[0.0; 3]);
        let m = PhiModel::euclidean();
        assert_eq!(cartan_closed(&m, &p).unwrap().frobenius(), 0.0);
        assert!(cartan_oracle(&m, &p).unwrap().frobenius() < 1e-15);
        assert_eq!(cartan_norm(&m, &p).unwrap(), 0.0);
        assert_eq!(spherical_norm_formula(&m, &p).unwrap(), 0.0);
        assert_eq!(semi_c_reducible(&m, &p), Err(Error::RiemannianPoint));
    }

    #[test]
    fn closed_torsion_matches_oracle() {
        for p in points() {
            for m in crate::phi::catalog() {
                if m.kind() == ModelKind::Euclidean {
                    continue;
                }
                let a = m.anchor_norm();
                let mut av = vec![0.0; p.dim()];
                av[0] = a;
                let q = EvalPoint::new(p.x().to_vec(), p.y().to_vec(), av).unwrap();
                let oracle = cartan_oracle(&m, &q).unwrap();
                let closed = cartan_closed(&m, &q).unwrap();
                assert!(
                    closed.rel_diff(&oracle) < 1e-11,
                    "{} {}",
                    m.name(),
                    closed.rel_diff(&oracle)
                );
                assert!(oracle.asymmetry() < 1e-13);
                assert!(y_contraction_residual(&closed, q.y()) < 1e-12);

                let mc = mean_cartan(&m, &q).unwrap();
                let io = mean_cartan_oracle(&m, &q).unwrap();
                assert!(crate::linalg::rel_diff(&mc.covector, &io) < 1e-11, "{}", m.name());
                assert!(covector_y_residual(&mc.covector, q.y()) < 1e-12);
                let a = cartan_norm(&m, &q).unwrap();
                let b = cartan_norm_direct(&m, &q).unwrap();
                assert!((a - b).abs() <= 1e-11 * b, "{} {a} {b}", m.name());
            }
        }
    }

    #[test]
    fn trace_coefficients_agree_with_legs() {
        let p = &points()[0];
        let m = PhiModel::generic(0.2, 0.25).unwrap();
        let (inv, d) = Partials::at(&m, p, 3).unwrap();
        let sg = SigmaSet::new(&d, &inv).unwrap();
        let mc = mean_cartan(&m, p).unwrap();
        let q = mc.forms;
        let n1 = p.dim() as f64 + 1.0;
        let hs = (n1 * sg.get(2) + q.s2 * sg.get(8) + 2.0 * q.r2 * sg.get(10) + q.t2 * sg.get(11)) / sg.get(12) * inv.r;
        let kt = (n1 * sg.get(3) + q.t2 * sg.get(9) + q.s2 * sg.get(10) + 2.0 * q.r2 * sg.get(11)) / sg.get(12) * inv.r;
        assert!((hs - mc.h_cartan).abs() < 1e-12 * hs.abs());
        assert!((kt - mc.k_cartan).abs() < 1e-12 * kt.abs());
    }

    #[test]
    fn sigma12_definition() {
        let p = &points()[1];
        let m = PhiModel::shen(0.3).unwrap();
        let (inv, d) = Partials::at(&m, p, 3).unwrap();
        let sg = SigmaSet::new(&d, &inv).unwrap();
        assert!((sg.get(12) - inv.r * d.f * sg.get(1)).abs() < 1e-15);
    }

    #[test]
    fn berwald_has_single_leg() {
        let p = pt(&[0.3, -0.2, 0.4], &[0.5, 1.0, -0.2], &[0.0; 3]);
        let mc = mean_cartan(&PhiModel::berwald(), &p).unwrap();
        assert_eq!(mc.k_cartan, 0.0);
        let inv = crate::invariants::compute_invariants(&p);
        let ratio = mc.covector[0] / inv.s_cov[0];
        for k in 0..3 {
            assert!((mc.covector[k] - ratio * inv.s_cov[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn planar_berwald_formulas_agree() {
        let p = pt(&[0.3, -0.1], &[0.4, 0.9], &[0.0, 0.0]);
        let m = PhiModel::berwald();
        let a = spherical_norm_formula(&m, &p).unwrap();
        let b = berwald_norm_formula(&p).unwrap();
        let c = cartan_norm_direct(&m, &p).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        assert!((a - c).abs() < 1e-11 * a);
        let f = m.norm_at(&p);
        assert!(a * f < berwald_example_bound(crate::linalg::norm(p.x())));
    }

    #[test]
    fn funk_norm_bound_example() {
        let p = pt(&[0.3, 0.0], &[0.0, 1.0], &[0.0, 0.0]);
        let m = PhiModel::funk();
        let bound = randers_bound(2, 0.3);
        assert!((bound - 0.4553).abs() < 1e-4);
        let f = m.norm_at(&p);
        assert!(cartan_norm(&m, &p).unwrap() * f <= bound);
    }

    #[test]
    fn funk_is_c_reducible() {
        let p = pt(&[0.05, 0.4, -0.2], &[-0.3, 1.2, 0.5], &[0.0; 3]);
        let rep = semi_c_reducible(&PhiModel::funk(), &p).unwrap();
        assert_eq!(rep.method, PqMethod::Spherical);
        assert!(rep.q.abs() < 1e-12, "{rep:?}");
        assert!(rep.residual < 1e-12, "{rep:?}");
        assert!((rep.p + rep.q - 1.0).abs() < 1e-14);
    }

    #[test]
    fn berwald_decomposes() {
        let p = pt(&[0.2, -0.3, 0.1, 0.15], &[0.7, 0.2, -1.1, 0.4], &[0.0; 4]);
        let rep = semi_c_reducible(&PhiModel::berwald(), &p).unwrap();
        assert!(rep.residual < 1e-12, "{rep:?}");
        assert!((rep.p - rep.best_fit[0]).abs() < 1e-10);
        assert!((rep.q - rep.best_fit[1]).abs() < 1e-10);
    }

    #[test]
    fn dimension_guard_on_planar_formula() {
        let p = pt(&[0.3, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0; 3]);
        assert_eq!(
            berwald_norm_formula(&p),
            Err(Error::UnsupportedDimension { expected: 2, got: 3 })
        );
    }
}
