//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor`] value is a polynomial in a fixed set of perturbation variables,
//! truncated to a total degree. Arithmetic on it propagates every mixed partial
//! derivative up to that degree exactly (up to roundoff), which is what the
//! oracle paths use to differentiate `F(x, y)` without hand-derived formulas.
//!
//! Spaces may additionally cap the degree carried by a leading group of
//! variables. With the `2n` variables laid out as `[x.., y..]` and a cap on
//! the `x` group, a stretch-curvature evaluation needs about half the
//! monomials of the uncapped space. Any such monomial set is closed under
//! taking divisors, so truncated products stay consistent.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

#[allow(unused_imports)]
use num_traits::Float;

/// Monomial layout and multiplication table for one truncation pattern.
pub struct Space {
    nvars: usize,
    order: usize,
    group: usize,
    cap: usize,
    exps: Vec<u8>,
    index: BTreeMap<Vec<u8>, u32>,
    rows: Vec<u32>,
    pairs: Vec<(u32, u32)>,
    // [derivative in a capped variable, derivative in a free variable]
    children: [OnceCell<Rc<Space>>; 2],
    deriv_maps: Vec<OnceCell<Vec<u32>>>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("group", &self.group)
            .field("cap", &self.cap)
            .field("len", &self.len())
            .finish()
    }
}

impl Space {
    /// Full truncation: every monomial of total degree `<= order`.
    pub fn new(nvars: usize, order: usize) -> Rc<Space> {
        Self::with_cap(nvars, order, 0, order)
    }

    /// Monomials of total degree `<= order` whose degree in variables
    /// `0..group` is at most `cap`.
    pub fn with_cap(nvars: usize, order: usize, group: usize, cap: usize) -> Rc<Space> {
        assert!(group <= nvars, "capped group exceeds variable count");
        assert!(order < u8::MAX as usize);
        let cap = cap.min(order);

        let mut monos: Vec<Vec<u8>> = Vec::new();
        let mut cur = vec![0u8; nvars];
        enumerate(&mut cur, 0, order, group, cap, &mut monos);
        monos.sort_by(|a, b| {
            let da: u32 = a.iter().map(|&e| e as u32).sum();
            let db: u32 = b.iter().map(|&e| e as u32).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });

        let len = monos.len();
        let degree: Vec<usize> = monos.iter().map(|m| m.iter().map(|&e| e as usize).sum()).collect();
        // degree_end[d] = number of monomials of degree <= d
        let mut degree_end = vec![0usize; order + 1];
        for &d in &degree {
            degree_end[d] += 1;
        }
        for d in 1..=order {
            degree_end[d] += degree_end[d - 1];
        }

        let mut index = BTreeMap::new();
        for (i, m) in monos.iter().enumerate() {
            index.insert(m.clone(), i as u32);
        }

        let mut rows = Vec::with_capacity(len + 1);
        let mut pairs = Vec::new();
        let mut sum = vec![0u8; nvars];
        for i in 0..len {
            rows.push(pairs.len() as u32);
            let limit = degree_end[order - degree[i]];
            for j in 0..limit {
                let mut gdeg = 0usize;
                for v in 0..nvars {
                    sum[v] = monos[i][v] + monos[j][v];
                    if v < group {
                        gdeg += sum[v] as usize;
                    }
                }
                if gdeg > cap {
                    continue;
                }
                let k = index[&sum];
                pairs.push((j as u32, k));
            }
        }
        rows.push(pairs.len() as u32);

        let mut exps = Vec::with_capacity(len * nvars);
        for m in &monos {
            exps.extend_from_slice(m);
        }

        Rc::new(Space {
            nvars,
            order,
            group,
            cap,
            exps,
            index,
            rows,
            pairs,
            children: [OnceCell::new(), OnceCell::new()],
            deriv_maps: (0..nvars).map(|_| OnceCell::new()).collect(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exponent vector of monomial `i`.
    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exps[i * self.nvars..(i + 1) * self.nvars]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).map(|&i| i as usize)
    }

    fn allows_var(&self, var: usize) -> bool {
        self.order >= 1 && (var >= self.group || self.cap >= 1)
    }

    fn child(self: &Rc<Self>, var: usize) -> Rc<Space> {
        let slot = if var < self.group { 0 } else { 1 };
        self.children[slot]
            .get_or_init(|| {
                let order = self.order.saturating_sub(1);
                let cap = if var < self.group {
                    self.cap.saturating_sub(1)
                } else {
                    self.cap
                };
                Space::with_cap(self.nvars, order, self.group, cap)
            })
            .clone()
    }

    fn deriv_map(self: &Rc<Self>, var: usize, child: &Space) -> &[u32] {
        self.deriv_maps[var].get_or_init(|| {
            let mut buf = vec![0u8; self.nvars];
            (0..child.len())
                .map(|m| {
                    buf.copy_from_slice(child.exponents(m));
                    buf[var] += 1;
                    self.index[&buf]
                })
                .collect()
        })
    }
}

fn enumerate(cur: &mut Vec<u8>, var: usize, budget: usize, group: usize, gbudget: usize, out: &mut Vec<Vec<u8>>) {
    if var == cur.len() {
        out.push(cur.clone());
        return;
    }
    let max = if var < group { budget.min(gbudget) } else { budget };
    for e in 0..=max {
        cur[var] = e as u8;
        let g = if var < group { gbudget - e } else { gbudget };
        enumerate(cur, var + 1, budget - e, group, g, out);
    }
    cur[var] = 0;
}

/// A truncated Taylor polynomial about an expansion point.
#[derive(Clone)]
pub struct Taylor {
    space: Rc<Space>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Taylor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Taylor")
            .field("space", &self.space)
            .field("value", &self.value())
            .finish()
    }
}

impl Taylor {
    pub fn constant(space: &Rc<Space>, c: f64) -> Taylor {
        let mut coeffs = vec![0.0; space.len()];
        coeffs[0] = c;
        Taylor {
            space: space.clone(),
            coeffs,
        }
    }

    /// The independent variable `var` expanded about `value`. A variable whose
    /// degree is capped at zero is carried as a constant.
    pub fn variable(space: &Rc<Space>, var: usize, value: f64) -> Taylor {
        let mut t = Taylor::constant(space, value);
        if space.allows_var(var) {
            let mut e = vec![0u8; space.nvars];
            e[var] = 1;
            let i = space.index[&e] as usize;
            t.coeffs[i] = 1.0;
        }
        t
    }

    pub fn space(&self) -> &Rc<Space> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Raw Taylor coefficient of the monomial with the given exponents.
    pub fn coeff(&self, exps: &[u8]) -> f64 {
        self.space.index_of(exps).map_or(0.0, |i| self.coeffs[i])
    }

    /// Mixed partial derivative `∂^|α| f / ∂z^α` at the expansion point.
    pub fn partial(&self, exps: &[u8]) -> f64 {
        let fact: f64 = exps.iter().map(|&e| factorial(e as usize)).product();
        self.coeff(exps) * fact
    }

    /// First partial in one variable.
    pub fn d1(&self, var: usize) -> f64 {
        let mut e = vec![0u8; self.space.nvars];
        e[var] = 1;
        self.coeff(&e)
    }

    /// Second partial in two (possibly equal) variables.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut e = vec![0u8; self.space.nvars];
        e[i] += 1;
        e[j] += 1;
        self.partial(&e)
    }

    /// Third partial in three variables.
    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut e = vec![0u8; self.space.nvars];
        e[i] += 1;
        e[j] += 1;
        e[k] += 1;
        self.partial(&e)
    }

    /// Exact derivative with respect to `var`; the result lives in a space one
    /// degree lower.
    pub fn derivative(&self, var: usize) -> Taylor {
        let child = self.space.child(var);
        let map = self.space.deriv_map(var, &child);
        let coeffs = map
            .iter()
            .enumerate()
            .map(|(m, &src)| {
                let e = child.exponents(m)[var] as f64 + 1.0;
                e * self.coeffs[src as usize]
            })
            .collect();
        Taylor { space: child, coeffs }
    }

    /// Restriction to a smaller truncation pattern over the same variables.
    ///
    /// Panics if `target` contains a monomial that this space does not.
    pub fn project(&self, target: &Rc<Space>) -> Taylor {
        if Rc::ptr_eq(&self.space, target) {
            return self.clone();
        }
        assert_eq!(target.nvars, self.space.nvars);
        let coeffs = (0..target.len())
            .map(|m| {
                let src = self
                    .space
                    .index_of(target.exponents(m))
                    .expect("projection target is not a subspace");
                self.coeffs[src]
            })
            .collect();
        Taylor {
            space: target.clone(),
            coeffs,
        }
    }

    fn same_space(&self, other: &Taylor) {
        debug_assert!(
            Rc::ptr_eq(&self.space, &other.space),
            "Taylor operands from different spaces"
        );
    }

    fn mul_ref(&self, other: &Taylor) -> Taylor {
        self.same_space(other);
        let sp = &self.space;
        let mut out = vec![0.0; sp.len()];
        let b = &other.coeffs;
        for (i, &ai) in self.coeffs.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            let lo = sp.rows[i] as usize;
            let hi = sp.rows[i + 1] as usize;
            for &(j, k) in &sp.pairs[lo..hi] {
                out[k as usize] += ai * b[j as usize];
            }
        }
        Taylor {
            space: sp.clone(),
            coeffs: out,
        }
    }

    /// Evaluates `Σ series[k] h^k` where `h = self − self.value()`.
    fn compose(&self, series: &[f64]) -> Taylor {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let top = series.len() - 1;
        let mut acc = Taylor::constant(&self.space, series[top]);
        for k in (0..top).rev() {
            acc = acc.mul_ref(&h);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    pub fn recip(&self) -> Taylor {
        let a0 = self.value();
        let inv = 1.0 / a0;
        let mut series = Vec::with_capacity(self.space.order + 1);
        let mut c = inv;
        for _ in 0..=self.space.order {
            series.push(c);
            c *= -inv;
        }
        self.compose(&series)
    }

    /// Real power `self^p` about a positive expansion value.
    pub fn powf(&self, p: f64) -> Taylor {
        let a0 = self.value();
        let mut series = Vec::with_capacity(self.space.order + 1);
        // binom(p, k) a0^(p-k)
        let mut binom = 1.0;
        for k in 0..=self.space.order {
            series.push(binom * a0.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&series)
    }

    pub fn sqrt(&self) -> Taylor {
        self.powf(0.5)
    }

    pub fn square(&self) -> Taylor {
        self.mul_ref(self)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(mut self) -> Taylor {
        for c in &mut self.coeffs {
            *c = -*c;
        }
        self
    }
}

impl Neg for &Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        -self.clone()
    }
}

impl AddAssign<&Taylor> for Taylor {
    fn add_assign(&mut self, rhs: &Taylor) {
        self.same_space(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Taylor> for Taylor {
    fn sub_assign(&mut self, rhs: &Taylor) {
        self.same_space(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Taylor> for &Taylor {
            type Output = Taylor;
            fn $m(self, rhs: &Taylor) -> Taylor {
                let f: fn(&Taylor, &Taylor) -> Taylor = $body;
                f(self, rhs)
            }
        }
        impl $tr<Taylor> for Taylor {
            type Output = Taylor;
            fn $m(self, rhs: Taylor) -> Taylor {
                $tr::$m(&self, &rhs)
            }
        }
        impl $tr<&Taylor> for Taylor {
            type Output = Taylor;
            fn $m(self, rhs: &Taylor) -> Taylor {
                $tr::$m(&self, rhs)
            }
        }
        impl $tr<Taylor> for &Taylor {
            type Output = Taylor;
            fn $m(self, rhs: Taylor) -> Taylor {
                $tr::$m(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let mut out = a.clone();
    out += b;
    out
});
binop!(Sub, sub, |a, b| {
    let mut out = a.clone();
    out -= b;
    out
});
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.mul_ref(&b.recip()));

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: f64) -> Taylor {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: f64) -> Taylor {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(mut self, rhs: f64) -> Taylor {
        for c in &mut self.coeffs {
            *c *= rhs;
        }
        self
    }
}

impl Div<f64> for Taylor {
    type Output = Taylor;
    fn div(self, rhs: f64) -> Taylor {
        self * (1.0 / rhs)
    }
}

/// Scalar arithmetic shared by plain `f64` evaluation and Taylor propagation.
///
/// Metric generators are written once against this trait.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn value(&self) -> f64;
    /// A constant living alongside `self` (same Taylor space).
    fn lift(&self, c: f64) -> Self;
    fn sqrt(&self) -> Self;
    fn recip(&self) -> Self;
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> f64 {
        c
    }
    fn sqrt(&self) -> f64 {
        Float::sqrt(*self)
    }
    fn recip(&self) -> f64 {
        1.0 / *self
    }
}

impl Scalar for Taylor {
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn lift(&self, c: f64) -> Taylor {
        Taylor::constant(&self.space, c)
    }
    fn sqrt(&self) -> Taylor {
        Taylor::sqrt(self)
    }
    fn recip(&self) -> Taylor {
        Taylor::recip(self)
    }
    fn square(&self) -> Taylor {
        Taylor::square(self)
    }
}

/// Solves `A z = b` for a small dense system of Taylor polynomials by Gaussian
/// elimination with pivoting on the expansion-point values.
///
/// Returns `None` when the constant part of `A` is numerically singular.
pub fn solve(mut a: Vec<Vec<Taylor>>, mut b: Vec<Taylor>) -> Option<Vec<Taylor>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|e| e.value().abs()))
        .fold(0.0f64, f64::max);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col]
                .value()
                .abs()
                .partial_cmp(&a[j][col].value().abs())
                .unwrap_or(core::cmp::Ordering::Equal)
        })?;
        if a[piv][col].value().abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for row in col + 1..n {
            let factor = &a[row][col] * &inv;
            for k in col + 1..n {
                let t = &factor * &a[col][k];
                a[row][k] -= &t;
            }
            let t = &factor * &b[col];
            b[row] -= &t;
        }
    }
    let mut z: Vec<Option<Taylor>> = vec![None; n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            let t = &a[row][k] * z[k].as_ref().unwrap();
            acc -= &t;
        }
        z[row] = Some(acc / &a[row][row]);
    }
    Some(z.into_iter().map(Option::unwrap).collect())
}

/// Inverse of a small dense matrix of Taylor polynomials.
pub fn invert(a: &[Vec<Taylor>]) -> Option<Vec<Vec<Taylor>>> {
    let n = a.len();
    let space = a[0][0].space().clone();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Taylor> = (0..n)
            .map(|i| Taylor::constant(&space, if i == j { 1.0 } else { 0.0 }))
            .collect();
        cols.push(solve(a.to_vec(), e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}
