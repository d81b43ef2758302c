//! Landsberg curvature, mean Landsberg curvature with its leg split, the
//! mean stretch tensor and its bivector decomposition.

use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::expansion;
use crate::invariants::{EvalPoint, InvariantPoint};
use crate::linalg::{lstsq, min_eigenvalue, norm};
use crate::metric::{inverse_metric, Partials, SINGULAR_FLOOR};
use crate::phi::PhiModel;
use crate::spray::{pqr_jet, FRAME_MIN_ANGLE};
use crate::taylor::{invert, Space, Taylor};
use crate::tensor::{AntiSym2, SymTensor2, SymTensor3};

/// Floor for the local magnitude used to normalize stretch quantities.
pub const SCALE_FLOOR: f64 = 1e-300;

fn positive_values(g: &[Vec<Taylor>]) -> Result<SymTensor2> {
    let n = g.len();
    let vals: Vec<f64> = g.iter().flatten().map(|e| e.value()).collect();
    if min_eigenvalue(&vals, n) > SINGULAR_FLOOR * norm(&vals) {
        Ok(SymTensor2::from_fn(n, |i, j| vals[i * n + j]))
    } else {
        Err(Error::SingularMetric)
    }
}

/// Oracle data shared by the Landsberg and mean Landsberg paths.
struct LandsbergJet {
    l: SymTensor3,
    g: SymTensor2,
}

fn landsberg_jet(m: &PhiModel, p: &EvalPoint) -> Result<LandsbergJet> {
    m.admit(p)?;
    let n = p.dim();
    let f2 = expansion::norm_sq(m, p, 5, 1);
    let sp = expansion::spray_polys(&f2, n, p.y())?;
    let g = positive_values(&sp.g)?;
    let (f, fy) = expansion::norm_and_gradient(&f2, n);
    let l = SymTensor3::from_fn(n, |i, j, k| {
        let acc: f64 = (0..n).map(|q| fy[q] * sp.spray[q].d3(n + i, n + j, n + k)).sum();
        -0.5 * f * acc
    });
    Ok(LandsbergJet { l, g })
}

/// `L_ijk = −½ F F_{yˡ} ∂³Gˡ/∂yⁱ∂yʲ∂yᵏ` by Taylor propagation.
pub fn landsberg_oracle(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor3> {
    Ok(landsberg_jet(m, p)?.l)
}

/// The thirteen scalar coefficients of the closed-form Landsberg tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandsbergCoefficients {
    pub l: [f64; 13],
    pub phi: f64,
}

/// Coefficients `L₁…L₁₃` from `φ`, `φ_s`, `φ_t` and the `(s, t)` partials
/// of `(P, Q, R)` up to third order.
pub fn landsberg_coefficients(m: &PhiModel, p: &EvalPoint) -> Result<LandsbergCoefficients> {
    let (inv, d) = Partials::at(m, p, 1)?;
    let dv = pqr_jet(m, InvariantPoint::from(&inv), 3)?;
    let (u, s, v, t, a2) = (inv.u, inv.s, inv.v, inv.t, inv.a2);
    let (phi, ps, pt) = (d.f, d.fs, d.ft);
    let x_c = s * phi + (u - s * s) * ps + (v - s * t) * pt;
    let y_c = t * phi + (v - s * t) * ps + (a2 - t * t) * pt;
    let pp = |i, j| dv.get(i, j)[0];
    let qq = |i, j| dv.get(i, j)[1];
    let rr = |i, j| dv.get(i, j)[2];
    let base = pp(0, 0) - s * pp(1, 0) - t * pp(0, 1);
    let l1 = 3.0 * ps * pp(2, 0) + phi * pp(3, 0) + x_c * qq(3, 0) + y_c * rr(3, 0);
    let l2 = -phi * (s * pp(2, 0) + t * pp(1, 1))
        + ps * base
        + x_c * (qq(1, 0) - s * qq(2, 0) - t * qq(1, 1))
        + y_c * (rr(1, 0) - s * rr(2, 0) - t * rr(1, 1));
    let l3 = phi * pp(0, 3) + 3.0 * pt * pp(0, 2) + x_c * qq(0, 3) + y_c * rr(0, 3);
    let l4 = -phi * (t * pp(0, 2) + s * pp(1, 1))
        + pt * base
        + x_c * (qq(0, 1) - t * qq(0, 2) - s * qq(1, 1))
        + y_c * (rr(0, 1) - t * rr(0, 2) - s * rr(1, 1));
    let l5 = pt * pp(2, 0) + 2.0 * ps * pp(1, 1) + phi * pp(2, 1) + x_c * qq(2, 1) + y_c * rr(2, 1);
    let l6 = ps * pp(0, 2) + 2.0 * pt * pp(1, 1) + phi * pp(1, 2) + x_c * qq(1, 2) + y_c * rr(1, 2);
    let l7 =
        -s.powi(3) * l1 + 3.0 * s * l2 - t.powi(3) * l3 + 3.0 * t * l4 - 3.0 * s * s * t * l5 - 3.0 * s * t * t * l6;
    let l8 = -s * l2 - t * l4;
    let l9 = -s * l1 - t * l5;
    let l10 = s * s * l1 - l2 + 2.0 * s * t * l5 + t * t * l6;
    let l11 = -t * l3 - s * l6;
    let l12 = t * t * l3 - l4 + s * s * l5 + 2.0 * s * t * l6;
    let l13 = -s * l5 - t * l6;
    Ok(LandsbergCoefficients {
        l: [l1, l2, l3, l4, l5, l6, l7, l8, l9, l10, l11, l12, l13],
        phi,
    })
}

/// Landsberg tensor assembled from [`landsberg_coefficients`] on the
/// vectors `x`, `a`, `y/|y|` and the identity.
pub fn landsberg_closed(m: &PhiModel, p: &EvalPoint) -> Result<SymTensor3> {
    let c = landsberg_coefficients(m, p)?;
    let n = p.dim();
    let (x, a) = (p.x(), p.a());
    let r = norm(p.y());
    let yr: Vec<f64> = p.y().iter().map(|v| v / r).collect();
    let id = SymTensor2::identity(n);
    let terms = [
        SymTensor3::cube(x),
        SymTensor3::sym_product(&id, x),
        SymTensor3::cube(a),
        SymTensor3::sym_product(&id, a),
        SymTensor3::cyclic(x, x, a),
        SymTensor3::cyclic(x, a, a),
        SymTensor3::cube(&yr),
        SymTensor3::sym_product(&id, &yr),
        SymTensor3::cyclic(&yr, x, x),
        SymTensor3::cyclic(x, &yr, &yr),
        SymTensor3::cyclic(&yr, a, a),
        SymTensor3::cyclic(a, &yr, &yr),
        SymTensor3::linear_combination(
            n,
            &[
                (1.0, &SymTensor3::cyclic(x, a, &yr)),
                (1.0, &SymTensor3::cyclic(x, &yr, a)),
            ],
        ),
    ];
    let k = -c.phi / 2.0;
    let weighted: Vec<(f64, &SymTensor3)> = c.l.iter().map(|li| k * li).zip(terms.iter()).collect();
    Ok(SymTensor3::linear_combination(n, &weighted))
}

/// Mean Landsberg curvature and its coordinates on the legs
/// `x − s·y/r` and `a − t·y/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanLandsberg {
    pub j: Vec<f64>,
    pub h_land: f64,
    /// Absent when the anchor vanishes and only the `x` leg exists.
    pub k_land: Option<f64>,
    /// `‖J − H·leg_x − K·leg_a‖ / ‖J‖`, zero when `J = 0`.
    pub leg_residual: f64,
}

fn split_legs(j: &[f64], p: &EvalPoint) -> Result<MeanLandsberg> {
    let inv = crate::invariants::compute_invariants(p);
    let mut legs = vec![inv.s_cov.clone()];
    if p.has_anchor() {
        legs.push(inv.t_cov.clone());
    }
    let fit = lstsq(&legs, j, FRAME_MIN_ANGLE).ok_or(Error::RankDeficientFrame)?;
    let jn = norm(j);
    Ok(MeanLandsberg {
        j: j.to_vec(),
        h_land: fit.coeffs[0],
        k_land: fit.coeffs.get(1).copied(),
        leg_residual: if fit.residual == 0.0 { 0.0 } else { fit.residual / jn },
    })
}

/// `Jᵢ = gʲᵏ L_ijk` on the oracle path, split along the two legs.
pub fn mean_landsberg(m: &PhiModel, p: &EvalPoint) -> Result<MeanLandsberg> {
    let jet = landsberg_jet(m, p)?;
    let ginv = inverse_metric(&jet.g)?;
    split_legs(&jet.l.trace_with(&ginv), p)
}

/// Largest relative gap between `gʲᵏ L_ijk` and the same contraction
/// computed by raising all indices of `L` and lowering the free one again.
pub fn mean_landsberg_consistency(m: &PhiModel, p: &EvalPoint) -> Result<f64> {
    let jet = landsberg_jet(m, p)?;
    let n = p.dim();
    let ginv = inverse_metric(&jet.g)?;
    let direct = jet.l.trace_with(&ginv);
    let raised: Vec<f64> = (0..n)
        .map(|q| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        acc += ginv.get(q, i) * ginv.get(j, k) * jet.l.get(i, j, k);
                    }
                }
            }
            acc
        })
        .collect();
    let lowered = jet.g.apply(&raised);
    Ok(crate::linalg::rel_diff(&lowered, &direct))
}

/// Mean stretch tensor together with the magnitude used to normalize it.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchField {
    pub sigma: AntiSym2,
    pub j: Vec<f64>,
    /// `‖∂J/∂x‖ + ‖∂J/∂y‖·‖∂G/∂y‖`, floored at [`SCALE_FLOOR`].
    pub scale: f64,
}

/// `Σ̄ᵢⱼ = 2(∂ⱼJᵢ − ∂ᵢJⱼ) − 2(∂Jᵢ/∂yᵐ ∂Gᵐ/∂yʲ − ∂Jⱼ/∂yᵐ ∂Gᵐ/∂yⁱ)` with every
/// derivative propagated exactly.
pub fn stretch_field(m: &PhiModel, p: &EvalPoint) -> Result<StretchField> {
    m.admit(p)?;
    let n = p.dim();
    let f2 = expansion::norm_sq(m, p, 6, 2);
    let sp = expansion::spray_polys(&f2, n, p.y())?;
    positive_values(&sp.g)?;
    // third y-derivatives of G, leaving first-order polynomials
    let d3: Vec<Vec<Taylor>> = sp
        .spray
        .iter()
        .map(|gq| {
            let mut out = Vec::with_capacity(n * n * n);
            for i in 0..n {
                let di = gq.derivative(n + i);
                for j in 0..n {
                    let dij = di.derivative(n + j);
                    for k in 0..n {
                        out.push(dij.derivative(n + k));
                    }
                }
            }
            out
        })
        .collect();
    let t1: Rc<Space> = d3[0][0].space().clone();
    let f2_1 = f2.project(&t1);
    let f = f2_1.sqrt();
    let two_f = f.clone() * 2.0;
    let fy: Vec<Taylor> = (0..n).map(|q| f2.derivative(n + q).project(&t1) / &two_f).collect();
    let g1: Vec<Vec<Taylor>> =
        sp.g.iter()
            .map(|row| row.iter().map(|e| e.project(&t1)).collect())
            .collect();
    let ginv = invert(&g1).ok_or(Error::SingularMetric)?;
    let neg_half_f = f * -0.5;
    let lidx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut l = vec![Taylor::constant(&t1, 0.0); n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let mut acc = Taylor::constant(&t1, 0.0);
                for q in 0..n {
                    acc += &(&fy[q] * &d3[q][lidx(i, j, k)]);
                }
                let v = &neg_half_f * &acc;
                for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    l[lidx(a, b, c)] = v.clone();
                }
            }
        }
    }
    let jt: Vec<Taylor> = (0..n)
        .map(|i| {
            let mut acc = Taylor::constant(&t1, 0.0);
            for j in 0..n {
                for k in 0..n {
                    acc += &(&ginv[j][k] * &l[lidx(i, j, k)]);
                }
            }
            acc
        })
        .collect();
    let djx: Vec<Vec<f64>> = jt.iter().map(|ji| (0..n).map(|q| ji.d1(q)).collect()).collect();
    let djy: Vec<Vec<f64>> = jt.iter().map(|ji| (0..n).map(|q| ji.d1(n + q)).collect()).collect();
    let dgy: Vec<Vec<f64>> = sp
        .spray
        .iter()
        .map(|gq| (0..n).map(|q| gq.d1(n + q)).collect())
        .collect();
    let conn = |i: usize, j: usize| -> f64 { (0..n).map(|q| djy[i][q] * dgy[q][j]).sum() };
    let sigma = AntiSym2::from_fn(n, |i, j| {
        2.0 * (djx[i][j] - djx[j][i]) - 2.0 * (conn(i, j) - conn(j, i))
    });
    let fro = |mat: &[Vec<f64>]| mat.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let scale = (fro(&djx) + fro(&djy) * fro(&dgy)).max(SCALE_FLOOR);
    Ok(StretchField {
        sigma,
        j: jt.iter().map(|e| e.value()).collect(),
        scale,
    })
}

/// Mean stretch tensor `Σ̄`.
pub fn stretch_tensor(m: &PhiModel, p: &EvalPoint) -> Result<AntiSym2> {
    Ok(stretch_field(m, p)?.sigma)
}

/// Coordinates of `Σ̄` in `(2/r)[rT x∧a + (sT+Z) a∧y + (W−tT) x∧y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchDecomposition {
    pub sigma: AntiSym2,
    pub t: f64,
    /// Absent in the reduced `x∧y` basis used when `a = 0`.
    pub z: Option<f64>,
    pub w: f64,
    /// Reconstruction error relative to `‖Σ̄‖`, or to `scale` when `Σ̄`
    /// is negligible against it.
    pub residual: f64,
    pub scale: f64,
}

/// Least-squares fit of `Σ̄` onto `x∧a`, `a∧y`, `x∧y` (only `x∧y` when
/// `a = 0`), back-solved for `T`, `Z`, `W`.
pub fn stretch_decompose(m: &PhiModel, p: &EvalPoint) -> Result<StretchDecomposition> {
    let field = stretch_field(m, p)?;
    let inv = crate::invariants::compute_invariants(p);
    let (x, y, a) = (p.x(), p.y(), p.a());
    let target = field.sigma.as_slice();
    let mut basis = Vec::new();
    if p.has_anchor() {
        basis.push(AntiSym2::wedge(x, a).as_slice().to_vec());
        basis.push(AntiSym2::wedge(a, y).as_slice().to_vec());
    }
    basis.push(AntiSym2::wedge(x, y).as_slice().to_vec());
    let fit = lstsq(&basis, target, FRAME_MIN_ANGLE).ok_or(Error::RankDeficientFrame)?;
    let (t, z, w) = if p.has_anchor() {
        let t = fit.coeffs[0] / 2.0;
        let z = inv.r * fit.coeffs[1] / 2.0 - inv.s * t;
        let w = inv.r * fit.coeffs[2] / 2.0 + inv.t * t;
        (t, Some(z), w)
    } else {
        (0.0, None, inv.r * fit.coeffs[0] / 2.0)
    };
    let sn = norm(target);
    let residual = if fit.residual == 0.0 {
        0.0
    } else if sn > 1e-12 * field.scale {
        fit.residual / sn
    } else {
        fit.residual / field.scale
    };
    Ok(StretchDecomposition {
        sigma: field.sigma,
        t,
        z,
        w,
        residual,
        scale: field.scale,
    })
}

/// Point where `‖Σ̄‖/scale` is largest.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchWitness {
    pub index: usize,
    pub ratio: f64,
    pub t: f64,
    pub z: Option<f64>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StretchVerdict {
    pub weakly_stretch: bool,
    pub max_ratio: f64,
    /// Worst sampled point; `None` only when no point could be evaluated.
    pub witness: Option<StretchWitness>,
    /// Points skipped because they were inadmissible or degenerate.
    pub skipped: usize,
}

/// Declares the sample weakly stretch iff `max ‖Σ̄‖/scale ≤ tol`.
pub fn weakly_stretch_test(m: &PhiModel, sample: &[EvalPoint], tol: f64) -> StretchVerdict {
    let mut witness: Option<StretchWitness> = None;
    let mut skipped = 0;
    for (index, p) in sample.iter().enumerate() {
        let (ratio, t, z, w) = match stretch_decompose(m, p) {
            Ok(d) => (norm(d.sigma.as_slice()) / d.scale, d.t, d.z, d.w),
            Err(Error::RankDeficientFrame) => match stretch_field(m, p) {
                Ok(f) => (norm(f.sigma.as_slice()) / f.scale, f64::NAN, None, f64::NAN),
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            },
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if witness.as_ref().map_or(true, |wt| ratio > wt.ratio) {
            witness = Some(StretchWitness { index, ratio, t, z, w });
        }
    }
    let max_ratio = witness.as_ref().map_or(0.0, |w| w.ratio);
    StretchVerdict {
        weakly_stretch: witness.is_some() && max_ratio <= tol,
        max_ratio,
        witness,
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::catalog;

    fn pt(x: &[f64], y: &[f64], a: &[f64]) -> EvalPoint {
        EvalPoint::new(x.to_vec(), y.to_vec(), a.to_vec()).unwrap()
    }

    fn sample(m: &PhiModel) -> EvalPoint {
        let mut a = [0.0; 4];
        a[0] = m.anchor_norm();
        pt(&[0.12, -0.25, 0.18, 0.05], &[0.7, 0.3, -1.1, 0.4], &a)
    }

    #[test]
    fn euclidean_landsberg_vanishes() {
        let m = PhiModel::euclidean();
        let p = sample(&m);
        assert!(landsberg_oracle(&m, &p).unwrap().frobenius() < 1e-14);
        let ml = mean_landsberg(&m, &p).unwrap();
        assert!(norm(&ml.j) < 1e-14);
        let d = stretch_decompose(&m, &p).unwrap();
        assert!(norm(d.sigma.as_slice()) < 1e-13);
        assert!(d.t.abs() < 1e-13 && d.w.abs() < 1e-13);
        assert!(weakly_stretch_test(&m, &[p], 1e-10).weakly_stretch);
    }

    #[test]
    fn oracle_is_symmetric_and_annihilates_y() {
        for m in catalog() {
            let p = sample(&m);
            let l = landsberg_oracle(&m, &p).unwrap();
            let ly = l.contract_last(p.y());
            let scale = l.frobenius().max(1e-300);
            assert!(norm(&ly) <= 1e-9 * scale, "{} {}", m.name(), norm(&ly) / scale);
            assert!(l.asymmetry() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_oracle() {
        for m in catalog() {
            let p = sample(&m);
            let o = landsberg_oracle(&m, &p).unwrap();
            let c = landsberg_closed(&m, &p).unwrap();
            if o.frobenius() == 0.0 {
                assert!(c.frobenius() < 1e-12);
                continue;
            }
            let err = c.rel_diff(&o);
            assert!(err < 1e-10, "{} {err}", m.name());
        }
    }

    #[test]
    fn mean_landsberg_lies_on_legs() {
        for m in catalog() {
            let p = sample(&m);
            let ml = mean_landsberg(&m, &p).unwrap();
            let jy: f64 = ml.j.iter().zip(p.y()).map(|(a, b)| a * b).sum();
            assert!(jy.abs() <= 1e-10 * norm(&ml.j).max(1e-300));
            assert!(ml.leg_residual < 1e-8, "{} {}", m.name(), ml.leg_residual);
            assert_eq!(ml.k_land.is_some(), p.has_anchor());
            assert!(mean_landsberg_consistency(&m, &p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn stretch_agrees_with_mean_landsberg_and_decomposes() {
        for m in catalog() {
            let p = sample(&m);
            let f = stretch_field(&m, &p).unwrap();
            let ml = mean_landsberg(&m, &p).unwrap();
            assert!(crate::linalg::rel_diff(&f.j, &ml.j) < 1e-10, "{}", m.name());
            let s = f.sigma.as_slice();
            let n = p.dim();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(s[i * n + j], -s[j * n + i]);
                }
            }
            let d = stretch_decompose(&m, &p).unwrap();
            assert!(d.residual < 1e-6, "{} {}", m.name(), d.residual);
        }
    }

    #[test]
    fn berwald_uses_reduced_basis() {
        let m = PhiModel::berwald();
        let p = sample(&m);
        let d = stretch_decompose(&m, &p).unwrap();
        assert_eq!(d.z, None);
        assert_eq!(d.t, 0.0);
        let ml = mean_landsberg(&m, &p).unwrap();
        assert_eq!(ml.k_land, None);
    }

    #[test]
    fn planar_anchor_frame_is_rank_deficient() {
        let m = PhiModel::shen(0.3).unwrap();
        let p = pt(&[0.1, 0.2], &[1.0, 0.4], &[0.3, 0.0]);
        assert_eq!(stretch_decompose(&m, &p), Err(Error::RankDeficientFrame));
        let v = weakly_stretch_test(&m, &[p], 1e-8);
        assert!(v.witness.is_some());
    }
}
