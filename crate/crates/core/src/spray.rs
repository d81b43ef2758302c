//! Geodesic spray coefficients, their `(P, Q, R)` coordinates in the frame
//! `{r·y, r²·x, r²·a}`, and an RK4 geodesic integrator.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::expansion;
use crate::invariants::{realize_invariants, EvalPoint, InvariantPoint};
use crate::linalg::{lstsq, min_eigenvalue, norm, rel_diff};
use crate::metric::{fundamental_tensor, inverse_metric, Partials, SINGULAR_FLOOR};
use crate::phi::PhiModel;
use crate::taylor::{solve, Space, Taylor};

/// Smallest admissible angle (radians) between a frame vector and the span
/// of the others.
pub const FRAME_MIN_ANGLE: f64 = 1e-6;

/// Dimension of the canonical configurations behind [`pqr_field`].
pub const FIELD_DIM: usize = 4;

fn check_positive(g: &[f64], n: usize) -> Result<()> {
    let fro = norm(g);
    if min_eigenvalue(g, n) > SINGULAR_FLOOR * fro {
        Ok(())
    } else {
        Err(Error::SingularMetric)
    }
}

/// `Gⁱ = ¼ gⁱˡ [(F²)_{xᵏyˡ} yᵏ − (F²)_{xˡ}]` by Taylor propagation.
pub fn spray_oracle(m: &PhiModel, p: &EvalPoint) -> Result<Vec<f64>> {
    m.admit(p)?;
    let n = p.dim();
    let f2 = expansion::norm_sq(m, p, 2, 1);
    let sp = expansion::spray_polys(&f2, n, p.y())?;
    let g: Vec<f64> = sp.g.iter().flatten().map(|e| e.value()).collect();
    check_positive(&g, n)?;
    Ok(sp.spray.iter().map(|e| e.value()).collect())
}

/// Closed-form spray: a `y` term from `F_{xᵏ}yᵏ` plus the inverse metric
/// applied to the `sᵢ`, `tᵢ` legs of `F_{xᵏyˡ}yᵏ − F_{xˡ}`.
pub fn spray_closed(m: &PhiModel, p: &EvalPoint) -> Result<Vec<f64>> {
    let (inv, d) = Partials::at(m, p, 2)?;
    let ginv = inverse_metric(&fundamental_tensor(m, p)?)?;
    let (s, t, r, f) = (inv.s, inv.t, inv.r, d.f);
    let leg_s = 2.0 * s * d.fus + d.fss + t * d.fvs - 2.0 * d.fu;
    let leg_t = 2.0 * s * d.fut + d.fst + t * d.fvt - d.fv;
    let lead = r / (2.0 * f) * (2.0 * s * d.fu + d.fs + t * d.fv);
    let w: Vec<f64> = inv
        .s_cov
        .iter()
        .zip(&inv.t_cov)
        .map(|(si, ti)| leg_s * si + leg_t * ti)
        .collect();
    let gw = ginv.apply(&w);
    let k = r * r * f / 2.0;
    Ok(p.y().iter().zip(&gw).map(|(yi, gi)| lead * yi + k * gi).collect())
}

/// `‖G(x, 2y) − 4G(x, y)‖ / ‖4G(x, y)‖`, reading `0/0` as zero.
pub fn spray_homogeneity_residual(m: &PhiModel, p: &EvalPoint) -> Result<f64> {
    let g1: Vec<f64> = spray_oracle(m, p)?.iter().map(|v| 4.0 * v).collect();
    let g2 = spray_oracle(m, &p.scaled(2.0)?)?;
    Ok(rel_diff(&g2, &g1))
}

/// Coordinates of `G` in `{r·y, r²·x, r²·a}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqrFit {
    pub p: f64,
    pub q: f64,
    /// Absent when the anchor vanishes.
    pub r: Option<f64>,
    /// Out-of-span part of `G` relative to `‖G‖`.
    pub residual: f64,
}

impl PqrFit {
    pub fn values(&self) -> [f64; 3] {
        [self.p, self.q, self.r.unwrap_or(0.0)]
    }
}

/// Least-squares coordinates of `g` in the frame `{r·y, r²·x, r²·a}`
/// (`{r·y, r²·x}` when `a = 0`).
pub fn pqr_decompose(g: &[f64], p: &EvalPoint) -> Result<PqrFit> {
    let r = norm(p.y());
    let mut cols = vec![
        p.y().iter().map(|v| r * v).collect::<Vec<f64>>(),
        p.x().iter().map(|v| r * r * v).collect(),
    ];
    if p.has_anchor() {
        cols.push(p.a().iter().map(|v| r * r * v).collect());
    }
    let fit = lstsq(&cols, g, FRAME_MIN_ANGLE).ok_or(Error::RankDeficientFrame)?;
    let gn = norm(g);
    let residual = if fit.residual == 0.0 { 0.0 } else { fit.residual / gn };
    Ok(PqrFit {
        p: fit.coeffs[0],
        q: fit.coeffs[1],
        r: fit.coeffs.get(2).copied(),
        residual,
    })
}

/// `(P, Q, R)` as functions of the invariants, evaluated on the canonical
/// configuration with `|y| = 1` in dimension [`FIELD_DIM`].
pub fn pqr_field(m: &PhiModel, q: InvariantPoint) -> Result<PqrFit> {
    let p = realize_invariants(1.0, q, FIELD_DIM)?;
    let g = spray_oracle(m, &p)?;
    pqr_decompose(&g, &p)
}

/// Mixed `(s, t)` partials of `(P, Q, R)` at fixed `(u, v, |a|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PqrDerivatives {
    order: usize,
    values: BTreeMap<(u8, u8), [f64; 3]>,
}

impl PqrDerivatives {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `[∂^{ks+kt}P, ∂^{ks+kt}Q, ∂^{ks+kt}R] / ∂s^{ks} ∂t^{kt}`.
    pub fn get(&self, ks: u8, kt: u8) -> [f64; 3] {
        match self.values.get(&(ks, kt)) {
            Some(v) => *v,
            None => panic!("partial ({ks}, {kt}) beyond order {}", self.order),
        }
    }
}

/// Base central-difference step for a derivative of total order `k`, chosen
/// so that truncation after one Richardson step stays below roundoff
/// amplification.
pub fn pqr_fd_step(k: usize) -> f64 {
    match k {
        0 | 1 => 1e-4,
        2 => 1e-3,
        _ => 1e-2,
    }
}

fn stencil(k: u8) -> (&'static [i32], &'static [f64]) {
    match k {
        0 => (&[0], &[1.0]),
        1 => (&[-1, 1], &[-0.5, 0.5]),
        2 => (&[-1, 0, 1], &[1.0, -2.0, 1.0]),
        _ => (&[-2, -1, 1, 2], &[-0.5, 1.0, -1.0, 0.5]),
    }
}

fn central(
    f: &mut dyn FnMut(f64, f64) -> Result<[f64; 3]>,
    s: f64,
    t: f64,
    ks: u8,
    kt: u8,
    h: f64,
) -> Result<[f64; 3]> {
    let (os, ws) = stencil(ks);
    let (ot, wt) = stencil(kt);
    let mut acc = [0.0; 3];
    for (i, wi) in os.iter().zip(ws) {
        for (j, wj) in ot.iter().zip(wt) {
            let v = f(s + *i as f64 * h, t + *j as f64 * h)?;
            for c in 0..3 {
                acc[c] += wi * wj * v[c];
            }
        }
    }
    let scale = h.powi(ks as i32 + kt as i32);
    Ok(acc.map(|a| a / scale))
}

/// Central differences of [`pqr_field`] with one Richardson refinement.
///
/// Without an anchor `t` is pinned to zero, so all `t`-partials are zero.
/// Steps are halved (up to four times) when a stencil leaves the feasible
/// set of invariants.
pub fn pqr_partials(m: &PhiModel, q: InvariantPoint, order: usize) -> Result<PqrDerivatives> {
    let anchored = q.a2 != 0.0 || q.v != 0.0 || q.t != 0.0;
    let mut f = |s: f64, t: f64| -> Result<[f64; 3]> { Ok(pqr_field(m, InvariantPoint { s, t, ..q })?.values()) };
    let mut values = BTreeMap::new();
    for k in 0..=order {
        for kt in 0..=k {
            let ks = (k - kt) as u8;
            let kt = kt as u8;
            if kt > 0 && !anchored {
                values.insert((ks, kt), [0.0; 3]);
                continue;
            }
            if k == 0 {
                values.insert((0, 0), f(q.s, q.t)?);
                continue;
            }
            let mut h = pqr_fd_step(k);
            let mut attempt = 0;
            let v = loop {
                let r = central(&mut f, q.s, q.t, ks, kt, h).and_then(|coarse| {
                    let fine = central(&mut f, q.s, q.t, ks, kt, h / 2.0)?;
                    Ok(core::array::from_fn(|c| (4.0 * fine[c] - coarse[c]) / 3.0))
                });
                match r {
                    Err(Error::InfeasibleInvariants(_)) | Err(Error::OutOfDomain(_)) if attempt < 4 => {
                        h /= 2.0;
                        attempt += 1;
                    }
                    other => break other?,
                }
            };
            values.insert((ks, kt), v);
        }
    }
    Ok(PqrDerivatives { order, values })
}

/// Exact `(s, t)`-jets of `(P, Q, R)` to total order `order`, from their
/// expression in the invariants.
///
/// The closed-form spray only involves `g⁻¹` acting on `span{r, s_cov,
/// t_cov}`, where `g` reduces to a 3×3 system whose entries depend on the
/// frame through the inner products `1`, `u − s²`, `v − st`, `|a|² − t²`.
/// Evaluating that system in Taylor arithmetic over a jet of `φ` needs no
/// realization, so it stays well defined where `x` is nearly parallel to
/// `y`. Without an anchor the `t_cov` direction is dropped and all
/// `t`-partials are zero.
pub fn pqr_jet(m: &PhiModel, q: InvariantPoint, order: usize) -> Result<PqrDerivatives> {
    m.check_domain(q.u, q.s, q.v, q.t)?;
    let anchored = q.a2 != 0.0 || q.v != 0.0 || q.t != 0.0;
    // variables [u, v, s, t]; u and v are only needed to first order
    let sp = Space::with_cap(4, order + 2, 2, 1);
    let f0 = m.eval(
        &Taylor::variable(&sp, 0, q.u),
        &Taylor::variable(&sp, 2, q.s),
        &Taylor::variable(&sp, 1, q.v),
        &Taylor::variable(&sp, 3, q.t),
    );
    let (du, dv, ds, dt) = (f0.derivative(0), f0.derivative(1), f0.derivative(2), f0.derivative(3));
    let target = du.derivative(2).space().clone();
    let pr = |e: &Taylor| e.project(&target);
    let f = pr(&f0);
    let (fu, fv, fs, ft) = (pr(&du), pr(&dv), pr(&ds), pr(&dt));
    let (fus, fut) = (pr(&du.derivative(2)), pr(&du.derivative(3)));
    let (fvs, fvt) = (pr(&dv.derivative(2)), pr(&dv.derivative(3)));
    let (fss, fst, ftt) = (pr(&ds.derivative(2)), pr(&ds.derivative(3)), pr(&dt.derivative(3)));
    let s = Taylor::variable(&target, 2, q.s);
    let t = Taylor::variable(&target, 3, q.t);

    let sigma_f = (&f - &(&s * &fs) - &(&t * &ft)) * &f;
    let rr = &(&(&s * &f) * &fs) + &(&(&t * &f) * &ft);
    let ffs = &f * &fs;
    let ffts = &f * &ft;
    let sss = &(&fs * &fs) + &(&f * &fss);
    let ttt = &(&ft * &ft) + &(&f * &ftt);
    let sst = &(&fs * &ft) + &(&f * &fst);
    let s2 = (&s * &s) * -1.0 + q.u;
    let st = (&s * &t) * -1.0 + q.v;
    let t2 = (&t * &t) * -1.0 + q.a2;
    let leg_s = &(&((&s * &fus) * 2.0) + &fss) + &(&(&t * &fvs) - &(fu.clone() * 2.0));
    let leg_t = &(&((&s * &fut) * 2.0) + &fst) + &(&(&t * &fvt) - &fv);

    let coords = if anchored {
        // columns: images of r, s_cov, t_cov in those coordinates
        let m_rs = &(&ffs * &s2) + &(&ffts * &st);
        let m_rt = &(&ffs * &st) + &(&ffts * &t2);
        let m_ss = &(&sigma_f + &(&sss * &s2)) + &(&sst * &st);
        let m_ts = &(&ttt * &st) + &(&sst * &s2);
        let m_st = &(&sss * &st) + &(&sst * &t2);
        let m_tt = &(&sigma_f + &(&ttt * &t2)) + &(&sst * &st);
        let mat = vec![
            vec![&sigma_f + &rr, m_rs, m_rt],
            vec![ffs.clone(), m_ss, m_st],
            vec![ffts.clone(), m_ts, m_tt],
        ];
        let z = solve(mat, vec![Taylor::constant(&target, 0.0), leg_s, leg_t]).ok_or(Error::SingularMetric)?;
        [z[0].clone(), z[1].clone(), z[2].clone()]
    } else {
        let mat = vec![
            vec![&sigma_f + &rr, &ffs * &s2],
            vec![ffs.clone(), &sigma_f + &(&sss * &s2)],
        ];
        let z = solve(mat, vec![Taylor::constant(&target, 0.0), leg_s]).ok_or(Error::SingularMetric)?;
        [z[0].clone(), z[1].clone(), Taylor::constant(&target, 0.0)]
    };
    let half_f = f.clone() * 0.5;
    let [alpha, beta, gamma] = coords;
    let lead = (&(&((&s * &fu) * 2.0) + &fs) + &(&t * &fv)) / &(f.clone() * 2.0);
    let p_val = &lead + &(&half_f * &(&(&alpha - &(&beta * &s)) - &(&gamma * &t)));
    let q_val = &half_f * &beta;
    let r_val = &half_f * &gamma;

    let mut values = BTreeMap::new();
    for k in 0..=order {
        for kt in 0..=k {
            let ks = k - kt;
            let v = if kt > 0 && !anchored {
                [0.0; 3]
            } else {
                let e = [0u8, 0, ks as u8, kt as u8];
                [p_val.partial(&e), q_val.partial(&e), r_val.partial(&e)]
            };
            values.insert((ks as u8, kt as u8), v);
        }
    }
    Ok(PqrDerivatives { order, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub tau: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Set when a step left the model's domain; `points` stops before it.
    pub domain_exit: bool,
    /// `max |F(τ) − F(0)| / F(0)` over the recorded points.
    pub max_drift: f64,
}

/// Fixed-step RK4 for `ẍ = −2G(x, ẋ)` with anchor `a`.
pub fn geodesic_integrate(
    m: &PhiModel,
    x0: &[f64],
    y0: &[f64],
    a: &[f64],
    steps: usize,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep);
    }
    let start = EvalPoint::new(x0.to_vec(), y0.to_vec(), a.to_vec())?;
    m.admit(&start)?;
    let n = x0.len();
    let f0 = m.norm_at(&start);
    let mut points = vec![TrajectoryPoint {
        tau: 0.0,
        x: x0.to_vec(),
        y: y0.to_vec(),
        f: f0,
    }];
    let accel = |x: &[f64], y: &[f64]| -> Result<Vec<f64>> {
        let p = EvalPoint::new(x.to_vec(), y.to_vec(), a.to_vec())?;
        Ok(spray_oracle(m, &p)?.iter().map(|g| -2.0 * g).collect())
    };
    let axpy = |base: &[f64], k: &[f64], c: f64| -> Vec<f64> { base.iter().zip(k).map(|(b, v)| b + c * v).collect() };
    let mut x = x0.to_vec();
    let mut y = y0.to_vec();
    let mut max_drift = 0.0f64;
    let mut domain_exit = false;
    for step in 1..=steps {
        let stage = (|| -> Result<(Vec<f64>, Vec<f64>)> {
            let k1x = y.clone();
            let k1y = accel(&x, &y)?;
            let x2 = axpy(&x, &k1x, dt / 2.0);
            let y2 = axpy(&y, &k1y, dt / 2.0);
            let k2y = accel(&x2, &y2)?;
            let x3 = axpy(&x, &y2, dt / 2.0);
            let y3 = axpy(&y, &k2y, dt / 2.0);
            let k3y = accel(&x3, &y3)?;
            let x4 = axpy(&x, &y3, dt);
            let y4 = axpy(&y, &k3y, dt);
            let k4y = accel(&x4, &y4)?;
            let xn = (0..n)
                .map(|i| x[i] + dt / 6.0 * (k1x[i] + 2.0 * y2[i] + 2.0 * y3[i] + y4[i]))
                .collect();
            let yn = (0..n)
                .map(|i| y[i] + dt / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]))
                .collect();
            Ok((xn, yn))
        })();
        let (xn, yn) = match stage {
            Ok(v) => v,
            Err(Error::OutOfDomain(_)) | Err(Error::SingularMetric) => {
                domain_exit = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let p = EvalPoint::new(xn.clone(), yn.clone(), a.to_vec())?;
        if m.admit(&p).is_err() {
            domain_exit = true;
            break;
        }
        let f = m.norm_at(&p);
        max_drift = max_drift.max((f - f0).abs() / f0);
        x = xn;
        y = yn;
        points.push(TrajectoryPoint {
            tau: step as f64 * dt,
            x: x.clone(),
            y: y.clone(),
            f,
        });
    }
    Ok(Trajectory {
        points,
        domain_exit,
        max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::compute_invariants;

    fn pt(x: &[f64], y: &[f64], a: &[f64]) -> EvalPoint {
        EvalPoint::new(x.to_vec(), y.to_vec(), a.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_spray_vanishes() {
        let p = pt(&[0.2, -0.1, 0.4], &[1.0, 2.0, -0.5], &[0.3, 0.0, 0.0]);
        let m = PhiModel::euclidean();
        assert!(norm(&spray_oracle(&m, &p).unwrap()) < 1e-15);
        assert_eq!(norm(&spray_closed(&m, &p).unwrap()), 0.0);
        let fit = pqr_decompose(&spray_closed(&m, &p).unwrap(), &p).unwrap();
        assert_eq!(fit.values(), [0.0; 3]);
    }

    #[test]
    fn closed_spray_matches_oracle_and_spans() {
        let p = pt(&[0.2, -0.3, 0.1, 0.15], &[0.7, 0.2, -1.1, 0.4], &[0.2, 0.0, 0.0, 0.0]);
        for m in crate::phi::catalog() {
            let mut a = [0.0; 4];
            a[0] = m.anchor_norm();
            let q = pt(p.x(), p.y(), &a);
            let o = spray_oracle(&m, &q).unwrap();
            let c = spray_closed(&m, &q).unwrap();
            assert!(rel_diff(&c, &o) < 1e-12, "{} {}", m.name(), rel_diff(&c, &o));
            let fit = pqr_decompose(&o, &q).unwrap();
            assert!(fit.residual < 1e-12, "{} {fit:?}", m.name());
            assert_eq!(fit.r.is_some(), q.has_anchor());
            assert!(spray_homogeneity_residual(&m, &q).unwrap() < 1e-13);
        }
    }

    #[test]
    fn field_matches_direct_decomposition() {
        let m = PhiModel::shen(0.3).unwrap();
        let p = pt(&[0.2, -0.3, 0.1], &[0.7, 0.2, -1.1], &[0.3, 0.0, 0.0]);
        let inv = compute_invariants(&p);
        let direct = pqr_decompose(&spray_oracle(&m, &p).unwrap(), &p).unwrap();
        let field = pqr_field(&m, InvariantPoint::from(&inv)).unwrap();
        for (a, b) in direct.values().iter().zip(field.values()) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
        let berwald = pqr_field(
            &PhiModel::berwald(),
            InvariantPoint {
                u: 0.2,
                s: 0.1,
                v: 0.0,
                t: 0.0,
                a2: 0.0,
            },
        )
        .unwrap();
        assert_eq!(berwald.r, None);
    }

    #[test]
    fn collinear_frame_is_rejected() {
        let p = pt(&[0.2, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0; 3]);
        assert_eq!(pqr_decompose(&[1.0, 0.0, 0.0], &p), Err(Error::RankDeficientFrame));
    }

    #[test]
    fn partials_of_a_polynomial_field() {
        // the Euclidean field is identically zero, so every partial vanishes
        let d = pqr_partials(
            &PhiModel::euclidean(),
            InvariantPoint {
                u: 0.3,
                s: 0.1,
                v: 0.05,
                t: 0.1,
                a2: 0.2,
            },
            3,
        )
        .unwrap();
        assert_eq!(d.get(3, 0), [0.0; 3]);
        assert_eq!(d.get(1, 2), [0.0; 3]);
    }

    #[test]
    fn exact_jet_matches_realized_field_and_differences() {
        let points = [
            InvariantPoint {
                u: 0.3,
                s: 0.2,
                v: 0.05,
                t: 0.1,
                a2: 0.09,
            },
            InvariantPoint {
                u: 0.4,
                s: -0.3,
                v: -0.1,
                t: 0.12,
                a2: 0.09,
            },
            InvariantPoint {
                u: 0.25,
                s: 0.1,
                v: 0.0,
                t: 0.0,
                a2: 0.0,
            },
        ];
        for m in crate::phi::catalog() {
            for q in points {
                let q = if m.uses_anchor() || q.a2 == 0.0 {
                    q
                } else {
                    InvariantPoint {
                        v: 0.0,
                        t: 0.0,
                        a2: 0.0,
                        ..q
                    }
                };
                let exact = pqr_jet(&m, q, 3).unwrap();
                let direct = pqr_field(&m, q).unwrap().values();
                let v0 = exact.get(0, 0);
                for c in 0..3 {
                    assert!(
                        (v0[c] - direct[c]).abs() < 1e-12 * (1.0 + direct[c].abs()),
                        "{} {q:?}",
                        m.name()
                    );
                }
                let fd = pqr_partials(&m, q, 3).unwrap();
                for k in 1..=3u8 {
                    for kt in 0..=k {
                        let (e, d) = (exact.get(k - kt, kt), fd.get(k - kt, kt));
                        for c in 0..3 {
                            assert!(
                                (e[c] - d[c]).abs() < 1e-5 * (1.0 + e[c].abs()),
                                "{} {k} {kt} {e:?} {d:?}",
                                m.name()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exact_jet_survives_nearly_parallel_frames() {
        let m = PhiModel::funk();
        let q = InvariantPoint {
            u: 0.25,
            s: 0.5 - 1e-9,
            v: 0.0,
            t: 0.0,
            a2: 0.0,
        };
        assert!(pqr_jet(&m, q, 3).unwrap().get(3, 0).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn straight_lines_for_euclidean() {
        let tr = geodesic_integrate(&PhiModel::euclidean(), &[0.1, 0.2], &[1.0, -0.5], &[0.0; 2], 100, 0.01).unwrap();
        let last = tr.points.last().unwrap();
        assert!((last.x[0] - 1.1).abs() < 1e-12);
        assert!((last.x[1] - (0.2 - 0.5)).abs() < 1e-12);
        assert!(tr.max_drift < 1e-14);
    }

    #[test]
    fn funk_geodesic_conserves_norm() {
        let tr = geodesic_integrate(&PhiModel::funk(), &[0.0, 0.0], &[1.0, 0.0], &[0.0; 2], 1000, 1e-3).unwrap();
        assert!(!tr.domain_exit);
        assert!(tr.max_drift < 1e-6, "{}", tr.max_drift);
    }

    #[test]
    fn invalid_step_rejected() {
        let r = geodesic_integrate(&PhiModel::funk(), &[0.0, 0.0], &[1.0, 0.0], &[0.0; 2], 10, 0.0);
        assert_eq!(r, Err(Error::InvalidStep));
    }

    #[test]
    fn domain_exit_is_flagged() {
        let tr = geodesic_integrate(&PhiModel::funk(), &[0.9, 0.0], &[1.0, 0.0], &[0.0; 2], 10_000, 1e-2).unwrap();
        assert!(tr.domain_exit);
        assert!(tr.points.len() < 10_001);
    }
}
