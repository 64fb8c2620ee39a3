//! Special functions and quadrature primitives.
//!
//! Everything here is a pure function of its arguments. The phase-space
//! measure used throughout the crate is `d²α = dα_r dα_i`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SMatrix, SVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::phase_space::WignerGrid;

/// Largest Gauss–Hermite order accepted by [`gauss_hermite`].
pub const MAX_HERMITE_ORDER: usize = 200;

/// A one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Applies the rule to `f`, i.e. `Σ w_k f(x_k)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Laguerre polynomial `L_m(x)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(m: u32, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => 1.0 - x,
        _ => {
            let mut prev = 1.0;
            let mut curr = 1.0 - x;
            for k in 1..m {
                let k = k as f64;
                let next = ((2.0 * k + 1.0 - x) * curr - k * prev) / (k + 1.0);
                prev = curr;
                curr = next;
            }
            curr
        }
    }
}

/// Legendre polynomial `P_m(z)` by Bonnet's recurrence. The argument is not
/// restricted to `[-1, 1]`.
pub fn legendre(m: u32, z: f64) -> f64 {
    legendre_pair(m, z).0
}

/// Returns `(P_m(z), P_{m-1}(z))`, with `P_{-1} = 0`.
fn legendre_pair(m: u32, z: f64) -> (f64, f64) {
    if m == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut curr = z;
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * z * curr - k * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    (curr, prev)
}

/// Binomial coefficient as a float. Exact for the small arguments used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Gauss–Hermite rule for the weight `exp(-x²)` on the real line.
///
/// Initial nodes come from the eigenvalues of the Jacobi matrix and are
/// polished by Newton steps on the orthonormal recurrence, which also yields
/// the weights without cancellation.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_HERMITE_ORDER {
        return Err(Error::Config(format!(
            "Gauss-Hermite order must be in 1..={MAX_HERMITE_ORDER}, got {order}"
        )));
    }
    if order == 1 {
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![PI.sqrt()],
            order,
        });
    }

    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for i in 1..order {
        let off = (i as f64 / 2.0).sqrt();
        jacobi[(i, i - 1)] = off;
        jacobi[(i - 1, i)] = off;
    }
    let mut guesses: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    guesses.sort_by(|a, b| a.total_cmp(b));

    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for mut z in guesses {
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = hermite_orthonormal(order, z);
            deriv = dp;
            let step = p / dp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                let (_, dp) = hermite_orthonormal(order, z);
                deriv = dp;
                break;
            }
        }
        nodes.push(z);
        weights.push(2.0 / (deriv * deriv));
    }
    // Symmetrize to remove the last ulp of asymmetry.
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights, order })
}

/// Orthonormal Hermite function value `p_n(z)` (normalized so that
/// `∫ p_n² e^{-z²} = 1`) and its derivative scaled as in the classic
/// Newton iteration: `dp = sqrt(2n) p_{n-1}`.
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > 1024 {
        return Err(Error::Config(format!(
            "Gauss-Legendre order must be in 1..=1024, got {order}"
        )));
    }
    let n = order as u32;
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, z);
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let step = p / dp;
            z -= step;
            if step.abs() < 1e-16 {
                let (p, pm1) = legendre_pair(n, z);
                dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    Ok(QuadratureRule { nodes, weights, order })
}

/// Trapezoidal integral of a grid over the plane: the 2D trapezoid sum
/// times the cell area.
pub fn grid_integrate(g: &WignerGrid) -> f64 {
    let h = g.spec().spacing();
    trapezoid_2d(g.values(), h)
}

pub(crate) fn trapezoid_2d(values: &ndarray::Array2<f64>, h: f64) -> f64 {
    let (nr, ni) = values.dim();
    let mut total = 0.0;
    for ((ir, ii), v) in values.indexed_iter() {
        total += trapezoid_weight(ir, nr) * trapezoid_weight(ii, ni) * v;
    }
    total * h * h
}

#[inline]
pub(crate) fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Integrates `f` over `R^D` when `f` is a Gaussian times a slowly varying
/// factor.
///
/// `log_envelope` must be an exact quadratic `-xᵀAx + bᵀx + c` with `A`
/// positive definite; its coefficients are recovered by finite differences
/// (exact for quadratics) and the integral is evaluated with a tensor
/// Gauss–Hermite rule in the coordinates that whiten `A`. The integrand
/// itself is evaluated literally at every node.
pub fn gaussian_factored_integral<const D: usize>(
    log_envelope: impl Fn(&SVector<f64, D>) -> f64,
    integrand: impl Fn(&SVector<f64, D>) -> f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let origin = SVector::<f64, D>::zeros();
    let q0 = log_envelope(&origin);
    let unit = |i: usize, s: f64| {
        let mut v = SVector::<f64, D>::zeros();
        v[i] = s;
        v
    };

    let mut a = SMatrix::<f64, D, D>::zeros();
    let mut b = SVector::<f64, D>::zeros();
    let mut q_plus = [0.0; D];
    for i in 0..D {
        q_plus[i] = log_envelope(&unit(i, 1.0));
        let q_minus = log_envelope(&unit(i, -1.0));
        a[(i, i)] = -(q_plus[i] + q_minus - 2.0 * q0) / 2.0;
        b[i] = (q_plus[i] - q_minus) / 2.0;
    }
    for i in 0..D {
        for j in (i + 1)..D {
            let mut e = unit(i, 1.0);
            e[j] = 1.0;
            let qij = log_envelope(&e);
            let aij = -(qij - q_plus[i] - q_plus[j] + q0) / 2.0;
            a[(i, j)] = aij;
            a[(j, i)] = aij;
        }
    }

    let chol = a.cholesky().ok_or_else(|| {
        Error::Accuracy("integrand envelope is not a normalizable Gaussian".into())
    })?;
    let mean = chol.solve(&b) * 0.5;
    let lower = chol.l();
    let det_l: f64 = (0..D).map(|i| lower[(i, i)]).product();
    // x = mean + L^{-T} z
    let map = lower
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::Accuracy("singular envelope".into()))?;

    let scaled: Vec<f64> = rule
        .iter()
        .map(|(z, w)| w * (z * z).exp())
        .collect();
    let columns: Vec<Vec<SVector<f64, D>>> = (0..D)
        .map(|d| rule.nodes().iter().map(|&z| map.column(d) * z).collect())
        .collect();

    let mut acc = 0.0;
    tensor_sum::<D>(0, mean, 1.0, &columns, &scaled, &integrand, &mut acc);
    Ok(acc / det_l)
}

fn tensor_sum<const D: usize>(
    level: usize,
    partial: SVector<f64, D>,
    weight: f64,
    columns: &[Vec<SVector<f64, D>>],
    scaled: &[f64],
    integrand: &impl Fn(&SVector<f64, D>) -> f64,
    acc: &mut f64,
) {
    if level + 1 == D {
        let mut local = 0.0;
        for (col, &w) in columns[level].iter().zip(scaled) {
            let x = partial + col;
            local += w * integrand(&x);
        }
        *acc += weight * local;
        return;
    }
    for (col, &w) in columns[level].iter().zip(scaled) {
        tensor_sum::<D>(level + 1, partial + col, weight * w, columns, scaled, integrand, acc);
    }
}
