//! Dense symmetric and antisymmetric tensors over `ℝⁿ`.
//!
//! Storage is dense row-major; constructors only evaluate the generator on
//! sorted index tuples and mirror the result, so symmetry is exact.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{norm, rel_diff};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor2 {
    n: usize,
    data: Vec<f64>,
}

impl SymTensor2 {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymTensor2 { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        crate::linalg::mat_vec(&self.data, self.n, v)
    }

    /// `Tᵢⱼ vⁱ wʲ`
    pub fn bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        crate::linalg::dot(&self.apply(w), v)
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    pub fn rel_diff(&self, reference: &SymTensor2) -> f64 {
        rel_diff(&self.data, &reference.data)
    }

    pub fn sub(&self, other: &SymTensor2) -> SymTensor2 {
        SymTensor2::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor3 {
    n: usize,
    data: Vec<f64>,
}

impl SymTensor3 {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n * n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = f(i, j, k);
                    for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        data[(a * n + b) * n + c] = v;
                    }
                }
            }
        }
        SymTensor3 { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        SymTensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    pub fn rel_diff(&self, reference: &SymTensor3) -> f64 {
        rel_diff(&self.data, &reference.data)
    }

    /// `T_{ijk} vᵏ` as a matrix.
    pub fn contract_last(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| self.get(i, j, k) * v[k]).sum();
            }
        }
        out
    }

    /// `Mʲᵏ T_{ijk}` for a symmetric `M` (trace on the last two slots).
    pub fn trace_with(&self, m: &SymTensor2) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        acc += m.get(j, k) * self.get(i, j, k);
                    }
                }
                acc
            })
            .collect()
    }

    /// Least-squares `b ≈ Σ c_k basis_k` in the Frobenius sense.
    pub fn fit(&self, basis: &[&SymTensor3], min_angle: f64) -> Option<crate::linalg::LstsqFit> {
        let cols: Vec<Vec<f64>> = basis.iter().map(|t| t.data.clone()).collect();
        crate::linalg::lstsq(&cols, &self.data, min_angle)
    }

    pub fn linear_combination(n: usize, terms: &[(f64, &SymTensor3)]) -> SymTensor3 {
        let mut data = vec![0.0; n * n * n];
        for (c, t) in terms {
            for (d, v) in data.iter_mut().zip(&t.data) {
                *d += c * v;
            }
        }
        SymTensor3 { n, data }
    }

    /// `T_{ij} v_k + T_{jk} v_i + T_{ki} v_j`
    pub fn sym_product(h: &SymTensor2, v: &[f64]) -> SymTensor3 {
        SymTensor3::from_fn(h.dim(), |i, j, k| {
            h.get(i, j) * v[k] + h.get(j, k) * v[i] + h.get(k, i) * v[j]
        })
    }

    /// `aᵢ bⱼ cₖ` symmetrized over the three cyclic shifts, i.e.
    /// `aᵢbⱼcₖ + aⱼbₖcᵢ + aₖbᵢcⱼ` (a fully symmetric result when two of the
    /// factors coincide).
    pub fn cyclic(a: &[f64], b: &[f64], c: &[f64]) -> SymTensor3 {
        let n = a.len();
        let mut data = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data[(i * n + j) * n + k] = a[i] * b[j] * c[k] + a[j] * b[k] * c[i] + a[k] * b[i] * c[j];
                }
            }
        }
        SymTensor3 { n, data }
    }

    /// Symmetric cube `aᵢ aⱼ aₖ`.
    pub fn cube(a: &[f64]) -> SymTensor3 {
        SymTensor3::from_fn(a.len(), |i, j, k| a[i] * a[j] * a[k])
    }

    /// Largest deviation from total symmetry relative to the Frobenius norm.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for w in [self.get(j, i, k), self.get(i, k, j), self.get(k, j, i)] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        if worst == 0.0 {
            0.0
        } else {
            worst / self.frobenius()
        }
    }
}

/// Antisymmetric `n × n` matrix (a bivector).
#[derive(Debug, Clone, PartialEq)]
pub struct AntiSym2 {
    n: usize,
    data: Vec<f64>,
}

impl AntiSym2 {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = -v;
            }
        }
        AntiSym2 { n, data }
    }

    /// `aⁱbʲ − aʲbⁱ`
    pub fn wedge(a: &[f64], b: &[f64]) -> Self {
        Self::from_fn(a.len(), |i, j| a[i] * b[j] - a[j] * b[i])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym3_mirrors_sorted_entries() {
        let t = SymTensor3::from_fn(3, |i, j, k| (100 * i + 10 * j + k) as f64);
        assert_eq!(t.get(2, 0, 1), 12.0);
        assert_eq!(t.asymmetry(), 0.0);
    }

    #[test]
    fn cyclic_with_repeated_factor_is_symmetric() {
        let a = [1.0, 2.0, -1.0];
        let b = [0.5, 0.0, 3.0];
        assert!(SymTensor3::cyclic(&a, &a, &b).asymmetry() < 1e-15);
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let w = AntiSym2::wedge(&[1.0, 0.0, 2.0], &[0.0, 1.0, 1.0]);
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(1, 0), -1.0);
        assert_eq!(w.get(2, 2), 0.0);
    }
}
