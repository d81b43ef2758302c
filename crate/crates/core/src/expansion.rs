//! Taylor expansions of `F²` in the `2n` variables `[x.., y..]` and the
//! derived metric and spray polynomials used by every oracle path.

use alloc::rc::Rc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::invariants::EvalPoint;
use crate::phi::PhiModel;
use crate::taylor::{solve, Space, Taylor};

/// `F²` expanded about `p` to total degree `order`, carrying at most `xcap`
/// powers of the base-point variables.
pub(crate) fn norm_sq(m: &PhiModel, p: &EvalPoint, order: usize, xcap: usize) -> Taylor {
    let n = p.dim();
    let space = Space::with_cap(2 * n, order, n, xcap);
    let x: Vec<Taylor> = (0..n).map(|i| Taylor::variable(&space, i, p.x()[i])).collect();
    let y: Vec<Taylor> = (0..n).map(|i| Taylor::variable(&space, n + i, p.y()[i])).collect();
    m.norm_sq(&x, &y, p.a())
}

/// Value and `y`-gradient of `F` read off an expansion of `F²`.
pub(crate) fn norm_and_gradient(f2: &Taylor, n: usize) -> (f64, Vec<f64>) {
    let f = f2.value().sqrt();
    let grad = (0..n).map(|l| f2.d1(n + l) / (2.0 * f)).collect();
    (f, grad)
}

/// `g_ij = ½ ∂²F²/∂yⁱ∂yʲ` as polynomials two degrees below `f2`.
pub(crate) fn metric_polys(f2: &Taylor, n: usize) -> Vec<Vec<Taylor>> {
    let dy: Vec<Taylor> = (0..n).map(|i| f2.derivative(n + i)).collect();
    let mut g: Vec<Vec<Option<Taylor>>> = (0..n).map(|_| (0..n).map(|_| None).collect()).collect();
    for i in 0..n {
        for j in i..n {
            let gij = dy[i].derivative(n + j) * 0.5;
            g[j][i] = Some(gij.clone());
            g[i][j] = Some(gij);
        }
    }
    g.into_iter()
        .map(|row| row.into_iter().map(|e| e.expect("filled")).collect())
        .collect()
}

/// Geodesic spray polynomials together with the metric they were solved
/// against, both living in the same space.
pub(crate) struct SprayPolys {
    pub g: Vec<Vec<Taylor>>,
    pub spray: Vec<Taylor>,
}

/// `Gⁱ = ¼ gⁱˡ [(F²)_{xᵏyˡ} yᵏ − (F²)_{xˡ}]` as polynomials of degree
/// `order − 2` with `x`-degree at most `xcap − 1`. Needs `xcap >= 1`.
pub(crate) fn spray_polys(f2: &Taylor, n: usize, y0: &[f64]) -> Result<SprayPolys> {
    let dx: Vec<Taylor> = (0..n).map(|k| f2.derivative(k)).collect();
    let dxy: Vec<Vec<Taylor>> = dx
        .iter()
        .map(|d| (0..n).map(|l| d.derivative(n + l)).collect())
        .collect();
    let target: Rc<Space> = dxy[0][0].space().clone();
    let yv: Vec<Taylor> = (0..n).map(|k| Taylor::variable(&target, n + k, y0[k])).collect();
    let w: Vec<Taylor> = (0..n)
        .map(|l| {
            let mut acc = -dx[l].project(&target);
            for k in 0..n {
                acc += &(&dxy[k][l] * &yv[k]);
            }
            acc
        })
        .collect();
    let g: Vec<Vec<Taylor>> = metric_polys(f2, n)
        .into_iter()
        .map(|row| row.iter().map(|e| e.project(&target)).collect())
        .collect();
    let z = solve(g.clone(), w).ok_or(Error::SingularMetric)?;
    let spray = z.into_iter().map(|zi| zi * 0.25).collect();
    Ok(SprayPolys { g, spray })
}
