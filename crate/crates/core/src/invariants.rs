//! Scalar invariants `(r, u, s, v, t)` of a point and the covector frame
//! `r_i = y_i / r`, `s_i = x_i − s r_i`, `t_i = a_i − t r_i`.
//!
//! Indices are raised and lowered with the Euclidean inner product, so vectors
//! and covectors share one coordinate array.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Margin applied to the strict Gram inequalities in [`realize_invariants`].
pub const FEASIBILITY_MARGIN: f64 = 1e-10;

/// A base point `x`, direction `y` and anchor covector `a` in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    x: Vec<f64>,
    y: Vec<f64>,
    a: Vec<f64>,
}

impl EvalPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 {
            return Err(Error::InvalidDimension { min: 2, got: n });
        }
        if y.len() != n || a.len() != n {
            return Err(Error::DimensionMismatch);
        }
        if x.iter().chain(&y).chain(&a).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        if y.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroDirection);
        }
        Ok(EvalPoint { x, y, a })
    }

    /// Point with a zero anchor covector.
    pub fn without_anchor(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        Self::new(x, y, vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn has_anchor(&self) -> bool {
        self.a.iter().any(|&c| c != 0.0)
    }

    /// Same base point and anchor with the direction replaced.
    pub fn with_direction(&self, y: Vec<f64>) -> Result<Self> {
        Self::new(self.x.clone(), y, self.a.clone())
    }

    /// Same point with `y` scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        self.with_direction(self.y.iter().map(|c| c * lambda).collect())
    }
}

/// The invariants `(r, u, s, v, t)` together with the covectors
/// `r_i`, `s_i`, `t_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariants {
    pub r: f64,
    pub u: f64,
    pub s: f64,
    pub v: f64,
    pub t: f64,
    /// `|a|²`
    pub a2: f64,
    pub r_cov: Vec<f64>,
    pub s_cov: Vec<f64>,
    pub t_cov: Vec<f64>,
}

impl Invariants {
    pub fn dim(&self) -> usize {
        self.r_cov.len()
    }

    /// `u − s²`
    pub fn ss(&self) -> f64 {
        self.u - self.s * self.s
    }

    /// `v − s t`
    pub fn st(&self) -> f64 {
        self.v - self.s * self.t
    }

    /// `|a|² − t²`
    pub fn tt(&self) -> f64 {
        self.a2 - self.t * self.t
    }
}

pub fn compute_invariants(p: &EvalPoint) -> Invariants {
    let (x, y, a) = (p.x(), p.y(), p.a());
    let r = dot(y, y).sqrt();
    let u = dot(x, x);
    let s = dot(x, y) / r;
    let v = dot(a, x);
    let t = dot(a, y) / r;
    let a2 = dot(a, a);
    let r_cov: Vec<f64> = y.iter().map(|c| c / r).collect();
    let s_cov = x.iter().zip(&r_cov).map(|(xi, ri)| xi - s * ri).collect();
    let t_cov = a.iter().zip(&r_cov).map(|(ai, ri)| ai - t * ri).collect();
    Invariants {
        r,
        u,
        s,
        v,
        t,
        a2,
        r_cov,
        s_cov,
        t_cov,
    }
}

/// Point in invariant space: everything [`realize_invariants`] needs apart
/// from `r` and the dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantPoint {
    pub u: f64,
    pub s: f64,
    pub v: f64,
    pub t: f64,
    pub a2: f64,
}

impl From<&Invariants> for InvariantPoint {
    fn from(inv: &Invariants) -> Self {
        InvariantPoint {
            u: inv.u,
            s: inv.s,
            v: inv.v,
            t: inv.t,
            a2: inv.a2,
        }
    }
}

/// Canonical configuration with prescribed invariants:
/// `y = r e₁`, `x = s e₁ + √(u−s²) e₂`, and `a` completed in `span{e₁,e₂,e₃}`.
///
/// A zero anchor (`a2 = v = t = 0`) is accepted; any other configuration
/// whose Gram matrix is not strictly positive is rejected.
pub fn realize_invariants(r: f64, q: InvariantPoint, n: usize) -> Result<EvalPoint> {
    let InvariantPoint { u, s, v, t, a2 } = q;
    if n < 3 {
        return Err(Error::InvalidDimension { min: 3, got: n });
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InfeasibleInvariants("r must be positive"));
    }
    let ss = u - s * s;
    if !(ss > FEASIBILITY_MARGIN) {
        return Err(Error::InfeasibleInvariants("requires u > s^2"));
    }
    let w = (v - s * t) / ss.sqrt();
    let rest = a2 - t * t - w * w;
    let zero_anchor = a2 == 0.0 && v == 0.0 && t == 0.0;
    let a3 = if zero_anchor {
        0.0
    } else if rest > FEASIBILITY_MARGIN {
        rest.sqrt()
    } else {
        return Err(Error::InfeasibleInvariants("requires |a|^2 > t^2 + (v-st)^2/(u-s^2)"));
    };
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut a = vec![0.0; n];
    y[0] = r;
    x[0] = s;
    x[1] = ss.sqrt();
    a[0] = t;
    a[1] = w;
    a[2] = a3;
    EvalPoint::new(x, y, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn orthogonal_configuration() {
        let p = EvalPoint::new(vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 0.5]).unwrap();
        let inv = compute_invariants(&p);
        assert_eq!((inv.r, inv.u, inv.s, inv.v, inv.t), (2.0, 1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn inner_product_arithmetic() {
        let p = EvalPoint::new(vec![0.3, 0.4, 0.0], vec![3.0, 4.0, 0.0], vec![0.1, 0.0, 0.0]).unwrap();
        let inv = compute_invariants(&p);
        assert_relative_eq!(inv.r, 5.0);
        assert_relative_eq!(inv.u, 0.25, epsilon = 1e-15);
        assert_relative_eq!(inv.s, 0.5, epsilon = 1e-15);
        assert_relative_eq!(inv.v, 0.03, epsilon = 1e-15);
        assert_relative_eq!(inv.t, 0.06, epsilon = 1e-15);
    }

    #[test]
    fn zero_direction_rejected() {
        let err = EvalPoint::new(vec![0.1, 0.2], vec![0.0, 0.0], vec![0.0, 0.0]);
        assert_eq!(err, Err(Error::ZeroDirection));
    }

    #[test]
    fn realize_orthogonal_case() {
        let q = InvariantPoint {
            u: 1.0,
            s: 0.0,
            v: 0.0,
            t: 0.0,
            a2: 0.25,
        };
        let p = realize_invariants(2.0, q, 3).unwrap();
        assert_eq!(p.y(), &[2.0, 0.0, 0.0]);
        assert_eq!(p.x(), &[0.0, 1.0, 0.0]);
        assert_eq!(p.a(), &[0.0, 0.0, 0.5]);
    }

    #[test]
    fn realize_round_trip_example() {
        let q = InvariantPoint {
            u: 0.25,
            s: 0.3,
            v: 0.0,
            t: 0.0,
            a2: 0.04,
        };
        let p = realize_invariants(1.0, q, 3).unwrap();
        let inv = compute_invariants(&p);
        assert_relative_eq!(inv.r, 1.0, max_relative = 1e-12);
        assert_relative_eq!(inv.u, 0.25, max_relative = 1e-12);
        assert_relative_eq!(inv.s, 0.3, max_relative = 1e-12);
        assert!(inv.v.abs() < 1e-12 && inv.t.abs() < 1e-12);
        assert_relative_eq!(inv.a2, 0.04, max_relative = 1e-12);
    }

    #[test]
    fn cauchy_schwarz_violation_is_infeasible() {
        let q = InvariantPoint {
            u: 0.25,
            s: 0.6,
            v: 0.0,
            t: 0.0,
            a2: 0.04,
        };
        assert!(matches!(
            realize_invariants(1.0, q, 3),
            Err(Error::InfeasibleInvariants(_))
        ));
    }

    #[test]
    fn zero_anchor_is_realizable() {
        let q = InvariantPoint {
            u: 0.3,
            s: 0.2,
            v: 0.0,
            t: 0.0,
            a2: 0.0,
        };
        let p = realize_invariants(1.5, q, 4).unwrap();
        assert!(!p.has_anchor());
    }

    fn point_strategy() -> impl Strategy<Value = EvalPoint> {
        (2usize..6)
            .prop_flat_map(|n| {
                (
                    prop::collection::vec(-1.0..1.0f64, n),
                    prop::collection::vec(-2.0..2.0f64, n),
                    prop::collection::vec(-1.0..1.0f64, n),
                )
            })
            .prop_filter_map("nonzero y", |(x, y, a)| EvalPoint::new(x, y, a).ok())
            .prop_filter("|y| bounded away from 0", |p| dot(p.y(), p.y()) > 1e-4)
    }

    proptest! {
        #[test]
        fn frame_contractions(p in point_strategy()) {
            let inv = compute_invariants(&p);
            let tol = 1e-12;
            prop_assert!((dot(&inv.r_cov, &inv.r_cov) - 1.0).abs() < tol);
            prop_assert!((dot(p.x(), &inv.r_cov) - inv.s).abs() < tol);
            prop_assert!((dot(p.a(), &inv.r_cov) - inv.t).abs() < tol);
            prop_assert!((dot(&inv.r_cov, p.y()) - inv.r).abs() < tol * inv.r);
            prop_assert!(dot(&inv.s_cov, p.y()).abs() < tol * inv.r);
            prop_assert!(dot(&inv.t_cov, p.y()).abs() < tol * inv.r);
            prop_assert!((dot(&inv.s_cov, &inv.s_cov) - inv.ss()).abs() < tol);
            prop_assert!((dot(&inv.t_cov, &inv.t_cov) - inv.tt()).abs() < tol);
            prop_assert!((dot(&inv.s_cov, &inv.t_cov) - inv.st()).abs() < tol);
            prop_assert!(inv.s * inv.s <= inv.u + tol);
            prop_assert!(inv.st().powi(2) <= inv.ss() * inv.tt() + tol);
        }

        #[test]
        fn scale_covariance(p in point_strategy(), lambda in 0.1..10.0f64) {
            let a = compute_invariants(&p);
            let b = compute_invariants(&p.scaled(lambda).unwrap());
            prop_assert!((b.r - lambda * a.r).abs() <= 1e-12 * b.r);
            for (x, y) in [(a.u, b.u), (a.s, b.s), (a.v, b.v), (a.t, b.t)] {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn realize_round_trip(
            u in 0.05..0.9f64, sf in -0.9..0.9f64, t in -0.5..0.5f64,
            wf in -0.9..0.9f64, extra in 0.01..0.5f64, r in 0.1..5.0f64, n in 3usize..6,
        ) {
            let s = sf * u.sqrt();
            let ss = u - s * s;
            let w = wf;
            let v = s * t + w * ss.sqrt();
            let a2 = t * t + w * w + extra;
            let q = InvariantPoint { u, s, v, t, a2 };
            let inv = compute_invariants(&realize_invariants(r, q, n).unwrap());
            for (want, got) in [(r, inv.r), (u, inv.u), (s, inv.s), (v, inv.v), (t, inv.t), (a2, inv.a2)] {
                prop_assert!((want - got).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }
}
