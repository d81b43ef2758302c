//! Metric generators `φ(u, s, v, t)` and their mixed partial derivatives.
//!
//! A general spherically symmetric metric is `F = r·φ(u, s, v, t)` with
//! `r = |y|`, `u = |x|²`, `s = ⟨x,y⟩/|y|`, `v = ⟨a,x⟩` and `t = ⟨a,y⟩/|y|`.
//! Every generator is written once against [`Scalar`], so the same code
//! evaluates plain values, φ-jets in `(u, s, v, t)` and Taylor expansions of
//! `F` in `(x, y)`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::invariants::{compute_invariants, EvalPoint, Invariants};
use crate::taylor::{Scalar, Space, Taylor};

/// Highest total derivative order a [`PhiJet`] can carry.
pub const MAX_JET_ORDER: usize = 5;

/// Distance kept from analytic domain boundaries (`u ≤ 1 − margin`, `φ ≥ margin`).
pub const DOMAIN_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `φ ≡ 1`
    Euclidean,
    /// `φ = (√(1−u+s²) + s)/(1−u)`
    Funk,
    /// `φ = (√(1−u+s²) + s)² / ((1−u)² √(1−u+s²))`
    Berwald,
    /// Berwald's generator multiplied by `1 + v + (1−u)t/(√(1−u+s²)+s)`;
    /// `anchor` is `|a|`.
    Shen { anchor: f64 },
    /// `(1 + u/4 + v/2)√(1 + s²/2 + t²/3) + ε(s + t/2 + s²t/4)`: not
    /// projectively flat, so every spray channel is exercised.
    Generic { eps: f64, anchor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Exact,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiModel {
    kind: ModelKind,
    mode: DerivativeMode,
}

pub const MODEL_NAMES: [&str; 5] = ["euclidean", "funk", "berwald", "shen", "generic"];

impl PhiModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        match kind {
            ModelKind::Shen { anchor } if !(0.0..1.0).contains(&anchor) => Err(Error::InvalidParameter {
                name: "a".to_string(),
                reason: "shen requires 0 <= |a| < 1",
            }),
            ModelKind::Generic { eps, anchor } if !(0.0..0.5).contains(&eps.abs()) || !(0.0..1.0).contains(&anchor) => {
                Err(Error::InvalidParameter {
                    name: "eps".to_string(),
                    reason: "generic requires |eps| < 0.5 and 0 <= |a| < 1",
                })
            }
            _ => Ok(PhiModel {
                kind,
                mode: DerivativeMode::Exact,
            }),
        }
    }

    pub fn euclidean() -> Self {
        PhiModel {
            kind: ModelKind::Euclidean,
            mode: DerivativeMode::Exact,
        }
    }

    pub fn funk() -> Self {
        PhiModel {
            kind: ModelKind::Funk,
            mode: DerivativeMode::Exact,
        }
    }

    pub fn berwald() -> Self {
        PhiModel {
            kind: ModelKind::Berwald,
            mode: DerivativeMode::Exact,
        }
    }

    pub fn shen(anchor: f64) -> Result<Self> {
        Self::new(ModelKind::Shen { anchor })
    }

    pub fn generic(eps: f64, anchor: f64) -> Result<Self> {
        Self::new(ModelKind::Generic { eps, anchor })
    }

    /// Looks a model up by catalog name. Unspecified parameters take their
    /// catalog defaults.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "euclidean" | "funk" | "berwald" => &[],
            "shen" => &["a"],
            "generic" => &["a", "eps"],
            _ => return Err(Error::UnknownModel(name.to_string())),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter {
                name: k.clone(),
                reason: "not a parameter of this model",
            });
        }
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        match name {
            "euclidean" => Ok(Self::euclidean()),
            "funk" => Ok(Self::funk()),
            "berwald" => Ok(Self::berwald()),
            "shen" => Self::shen(get("a", 0.3)),
            _ => Self::generic(get("eps", 0.2), get("a", 0.3)),
        }
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Euclidean => "euclidean",
            ModelKind::Funk => "funk",
            ModelKind::Berwald => "berwald",
            ModelKind::Shen { .. } => "shen",
            ModelKind::Generic { .. } => "generic",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            ModelKind::Shen { anchor } => vec![("a", anchor)],
            ModelKind::Generic { eps, anchor } => vec![("a", anchor), ("eps", eps)],
            _ => Vec::new(),
        }
    }

    pub fn domain_description(&self) -> &'static str {
        match self.kind {
            ModelKind::Euclidean => "all (u, s, v, t)",
            ModelKind::Funk | ModelKind::Berwald => "u <= 1 - 1e-6 (unit ball), phi > 0",
            ModelKind::Shen { .. } => "u <= 1 - 1e-6 (unit ball), |a| < 1, phi > 0",
            ModelKind::Generic { .. } => "u <= 1 - 1e-6 (unit ball), phi > 0",
        }
    }

    /// Whether φ depends on `(v, t)`.
    pub fn uses_anchor(&self) -> bool {
        matches!(self.kind, ModelKind::Shen { .. } | ModelKind::Generic { .. })
    }

    /// `|a|` used for sampled configurations (`a = |a|·e₁`).
    pub fn anchor_norm(&self) -> f64 {
        match self.kind {
            ModelKind::Shen { anchor } | ModelKind::Generic { anchor, .. } => anchor,
            _ => 0.0,
        }
    }

    /// Radius of the ball of base points the model is defined on.
    pub fn ball_radius(&self) -> f64 {
        1.0
    }

    /// `φ(u, s, v, t)` for any scalar type.
    pub fn eval<S: Scalar>(&self, u: &S, s: &S, v: &S, t: &S) -> S {
        match self.kind {
            ModelKind::Euclidean => u.lift(1.0),
            ModelKind::Funk => {
                let w = -u.clone() + 1.0;
                let q = (w.clone() + s.square()).sqrt();
                (q + s.clone()) / w
            }
            ModelKind::Berwald => {
                let w = -u.clone() + 1.0;
                let q = (w.clone() + s.square()).sqrt();
                let qs = q.clone() + s.clone();
                qs.square() / (w.square() * q)
            }
            ModelKind::Shen { .. } => {
                let w = -u.clone() + 1.0;
                let q = (w.clone() + s.square()).sqrt();
                let qs = q.clone() + s.clone();
                let lead = v.clone() + 1.0 + w.clone() * t.clone() / qs.clone();
                lead * qs.square() / (w.square() * q)
            }
            ModelKind::Generic { eps, .. } => {
                let conformal = u.clone() * 0.25 + v.clone() * 0.5 + 1.0;
                let quad = (s.square() * 0.5 + t.square() / 3.0 + 1.0).sqrt();
                let odd = s.clone() + t.clone() * 0.5 + s.square() * t.clone() * 0.25;
                conformal * quad + odd * eps
            }
        }
    }

    pub fn phi(&self, u: f64, s: f64, v: f64, t: f64) -> f64 {
        self.eval(&u, &s, &v, &t)
    }

    pub fn in_domain(&self, u: f64, s: f64, v: f64, t: f64) -> bool {
        if !(u.is_finite() && s.is_finite() && v.is_finite() && t.is_finite()) {
            return false;
        }
        if self.kind == ModelKind::Euclidean {
            return true;
        }
        if !(0.0..=1.0 - DOMAIN_MARGIN).contains(&u) {
            return false;
        }
        let phi = self.phi(u, s, v, t);
        phi.is_finite() && phi > DOMAIN_MARGIN
    }

    pub fn check_domain(&self, u: f64, s: f64, v: f64, t: f64) -> Result<()> {
        if self.in_domain(u, s, v, t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(self.name()))
        }
    }

    /// Invariants of `p`, after checking `p` lies in the model's domain.
    pub fn admit(&self, p: &EvalPoint) -> Result<Invariants> {
        let inv = compute_invariants(p);
        self.check_domain(inv.u, inv.s, inv.v, inv.t)?;
        Ok(inv)
    }

    /// `F(x, y) = |y| φ(u, s, v, t)` for any scalar type; `a` is constant.
    pub fn norm<S: Scalar>(&self, x: &[S], y: &[S], a: &[f64]) -> S {
        let (u, s, v, t, r) = invariants_of(x, y, a);
        r * self.eval(&u, &s, &v, &t)
    }

    /// `F²`, computed as `|y|² φ²` so the leading factor needs no square root.
    pub fn norm_sq<S: Scalar>(&self, x: &[S], y: &[S], a: &[f64]) -> S {
        let (u, s, v, t, r) = invariants_of(x, y, a);
        let phi = self.eval(&u, &s, &v, &t);
        r.square() * phi.square()
    }

    pub fn norm_at(&self, p: &EvalPoint) -> f64 {
        self.norm(p.x(), p.y(), p.a())
    }
}

fn invariants_of<S: Scalar>(x: &[S], y: &[S], a: &[f64]) -> (S, S, S, S, S) {
    let n = x.len();
    let mut yy = y[0].square();
    let mut xx = x[0].square();
    let mut xy = x[0].clone() * y[0].clone();
    let mut ax = x[0].clone() * a[0];
    let mut ay = y[0].clone() * a[0];
    for i in 1..n {
        yy = yy + y[i].square();
        xx = xx + x[i].square();
        xy = xy + x[i].clone() * y[i].clone();
        ax = ax + x[i].clone() * a[i];
        ay = ay + y[i].clone() * a[i];
    }
    let r = yy.sqrt();
    let rinv = r.recip();
    (xx, xy * rinv.clone(), ax, ay * rinv, r)
}

/// Multi-index `(k_u, k_s, k_v, k_t)`.
pub type MultiIndex = [u8; 4];

/// φ and its mixed partials in `(u, s, v, t)` up to a total order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiJet {
    order: usize,
    partials: BTreeMap<MultiIndex, f64>,
}

impl PhiJet {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `∂^{k_u+k_s+k_v+k_t} φ / ∂u^{k_u} ∂s^{k_s} ∂v^{k_v} ∂t^{k_t}`.
    ///
    /// Panics if the multi-index exceeds the jet order.
    pub fn get(&self, idx: MultiIndex) -> f64 {
        match self.partials.get(&idx) {
            Some(&v) => v,
            None => panic!("partial {idx:?} beyond jet order {}", self.order),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.partials.iter()
    }

    pub fn phi(&self) -> f64 {
        self.get([0, 0, 0, 0])
    }

    /// Partial with `ks` s-derivatives and `kt` t-derivatives.
    pub fn st(&self, ks: u8, kt: u8) -> f64 {
        self.get([0, ks, 0, kt])
    }
}

fn multi_indices(order: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for ku in 0..=order {
        for ks in 0..=order - ku {
            for kv in 0..=order - ku - ks {
                for kt in 0..=order - ku - ks - kv {
                    out.push([ku as u8, ks as u8, kv as u8, kt as u8]);
                }
            }
        }
    }
    out
}

/// Jet of φ at `(u, s, v, t)` to the requested total order.
pub fn phi_jet(m: &PhiModel, u: f64, s: f64, v: f64, t: f64, order: usize) -> Result<PhiJet> {
    if order > MAX_JET_ORDER {
        return Err(Error::OrderUnsupported {
            requested: order,
            max: MAX_JET_ORDER,
        });
    }
    m.check_domain(u, s, v, t)?;
    match m.mode {
        DerivativeMode::Exact => Ok(exact_jet(m, [u, s, v, t], order)),
        DerivativeMode::FiniteDifference => fd_jet(m, [u, s, v, t], order),
    }
}

/// Jet at the invariants of `p`.
pub fn phi_jet_at(m: &PhiModel, inv: &Invariants, order: usize) -> Result<PhiJet> {
    phi_jet(m, inv.u, inv.s, inv.v, inv.t, order)
}

fn exact_jet(m: &PhiModel, at: [f64; 4], order: usize) -> PhiJet {
    let sp = Space::new(4, order);
    let vars: Vec<Taylor> = (0..4).map(|k| Taylor::variable(&sp, k, at[k])).collect();
    let phi = m.eval(&vars[0], &vars[1], &vars[2], &vars[3]);
    let partials = multi_indices(order)
        .into_iter()
        .map(|idx| (idx, phi.partial(&idx)))
        .collect();
    PhiJet { order, partials }
}

/// Central stencil `(offsets, weights)` for a `k`-th derivative at unit step.
fn stencil(k: u8) -> (&'static [i32], &'static [f64]) {
    match k {
        0 => (&[0], &[1.0]),
        1 => (&[-1, 1], &[-0.5, 0.5]),
        2 => (&[-1, 0, 1], &[1.0, -2.0, 1.0]),
        3 => (&[-2, -1, 1, 2], &[-0.5, 1.0, -1.0, 0.5]),
        4 => (&[-2, -1, 0, 1, 2], &[1.0, -4.0, 6.0, -4.0, 1.0]),
        _ => (&[-3, -2, -1, 1, 2, 3], &[-0.5, 2.0, -2.5, 2.5, -2.0, 0.5]),
    }
}

/// Tensor-product central difference of `f` for multi-index `idx`.
fn central_difference(
    f: &mut dyn FnMut([f64; 4]) -> Result<f64>,
    at: [f64; 4],
    idx: MultiIndex,
    h: f64,
) -> Result<f64> {
    let mut acc = 0.0;
    let st: Vec<(&[i32], &[f64])> = idx.iter().map(|&k| stencil(k)).collect();
    for (iu, wu) in st[0].0.iter().zip(st[0].1) {
        for (is, ws) in st[1].0.iter().zip(st[1].1) {
            for (iv, wv) in st[2].0.iter().zip(st[2].1) {
                for (it, wt) in st[3].0.iter().zip(st[3].1) {
                    let p = [
                        at[0] + *iu as f64 * h,
                        at[1] + *is as f64 * h,
                        at[2] + *iv as f64 * h,
                        at[3] + *it as f64 * h,
                    ];
                    acc += wu * ws * wv * wt * f(p)?;
                }
            }
        }
    }
    let k: i32 = idx.iter().map(|&e| e as i32).sum();
    Ok(acc / h.powi(k))
}

fn fd_step(order: usize) -> f64 {
    // balances O(h²) truncation against O(ε/hᵏ) roundoff
    1e-16f64.powf(1.0 / (order as f64 + 2.0))
}

fn fd_jet(m: &PhiModel, at: [f64; 4], order: usize) -> Result<PhiJet> {
    let mut f = |p: [f64; 4]| -> Result<f64> {
        m.check_domain(p[0], p[1], p[2], p[3])?;
        Ok(m.phi(p[0], p[1], p[2], p[3]))
    };
    let mut partials = BTreeMap::new();
    for idx in multi_indices(order) {
        let k: usize = idx.iter().map(|&e| e as usize).sum();
        let val = if k == 0 {
            f(at)?
        } else {
            central_difference(&mut f, at, idx, fd_step(k))?
        };
        partials.insert(idx, val);
    }
    Ok(PhiJet { order, partials })
}

/// Outcome of comparing exact jets against finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct FdCheck {
    /// Largest `|exact − fd| / max(|exact|, 1)` over all partials of order 1–3.
    pub max_deviation: f64,
    pub worst: MultiIndex,
}

/// Step used for first-order differences of `φ` itself.
pub const FD_STEP_FIRST: f64 = 1e-5;
/// Step used when differencing exact jets of orders 1 and 2.
pub const FD_STEP_HIGHER: f64 = 1e-4;

/// Compares the exact jet (orders 1–3) against central differences: order 1
/// from values of φ, orders 2 and 3 from one central difference of the exact
/// jet one order below.
pub fn fd_self_check(m: &PhiModel, at: [f64; 4]) -> Result<FdCheck> {
    let margin = 10.0 * FD_STEP_HIGHER;
    for var in 0..4 {
        for sign in [-1.0, 1.0] {
            let mut p = at;
            p[var] += sign * margin;
            m.check_domain(p[0], p[1], p[2], p[3])?;
        }
    }
    let exact = exact_jet(m, at, 3);
    let mut worst = ([0u8; 4], 0.0f64);
    for idx in multi_indices(3) {
        let k: usize = idx.iter().map(|&e| e as usize).sum();
        if k == 0 {
            continue;
        }
        let var = idx.iter().position(|&e| e > 0).unwrap();
        let fd = if k == 1 {
            let h = FD_STEP_FIRST;
            let mut lo = at;
            let mut hi = at;
            lo[var] -= h;
            hi[var] += h;
            (m.phi(hi[0], hi[1], hi[2], hi[3]) - m.phi(lo[0], lo[1], lo[2], lo[3])) / (2.0 * h)
        } else {
            let h = FD_STEP_HIGHER;
            let mut lower = idx;
            lower[var] -= 1;
            let mut lo = at;
            let mut hi = at;
            lo[var] -= h;
            hi[var] += h;
            let jl = exact_jet(m, lo, k - 1).get(lower);
            let jh = exact_jet(m, hi, k - 1).get(lower);
            (jh - jl) / (2.0 * h)
        };
        let e = exact.get(idx);
        let dev = (e - fd).abs() / e.abs().max(1.0);
        if dev > worst.1 {
            worst = (idx, dev);
        }
    }
    Ok(FdCheck {
        max_deviation: worst.1,
        worst: worst.0,
    })
}

/// The compiled catalog with default parameters.
pub fn catalog() -> Vec<PhiModel> {
    vec![
        PhiModel::euclidean(),
        PhiModel::funk(),
        PhiModel::berwald(),
        PhiModel::shen(0.3).expect("valid default"),
        PhiModel::generic(0.2, 0.3).expect("valid default"),
    ]
}
