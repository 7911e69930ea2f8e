use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

/// Probability-normalised Gauss-Hermite rule: `Σ w_k f(x_k) ≈ ∫ f(x) e^{−x²}/√π dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.order
    }

    pub fn is_empty(&self) -> bool {
        self.order == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Orthonormal Hermite values `q_{n−1}(x), q_n(x)` and `Σ_{k<n} q_k(x)²`.
fn orthonormal(n: usize, x: f64) -> (f64, f64, f64) {
    let mut q_prev = 0.0;
    let mut q = 1.0;
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += q * q;
        let kf = k as f64;
        let next = (x * q - (kf / 2.0).sqrt() * q_prev) / ((kf + 1.0) / 2.0).sqrt();
        q_prev = q;
        q = next;
    }
    (q_prev, q, sumsq)
}

/// N-point Gauss-Hermite rule from the Golub-Welsch eigenproblem, with nodes
/// polished by Newton's method and weights from the Christoffel function.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::invalid(format!("Gauss-Hermite order must be in 1..={MAX_ORDER}, got {n}")));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    let nf = n as f64;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (qm1, qn, _) = orthonormal(n, *x);
            let d = (2.0 * nf).sqrt() * qm1;
            if d == 0.0 {
                break;
            }
            *x -= qn / d;
        }
    }
    let mut weights: Vec<f64> = nodes.iter().map(|&x| 1.0 / orthonormal(n, x).2).collect();

    // Enforce exact mirror symmetry.
    for k in 0..n / 2 {
        let j = n - 1 - k;
        let x = 0.5 * (nodes[j] - nodes[k]);
        let w = 0.5 * (weights[j] + weights[k]);
        nodes[k] = -x;
        nodes[j] = x;
        weights[k] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(QuadratureRule { nodes, weights, order: n })
}

/// Shared, lazily built rule for order `n`.
pub fn gauss_hermite_cached(n: usize) -> Result<&'static QuadratureRule> {
    static RULES: [OnceLock<QuadratureRule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    if n == 0 || n > MAX_ORDER {
        return Err(Error::invalid(format!("Gauss-Hermite order must be in 1..={MAX_ORDER}, got {n}")));
    }
    if let Some(rule) = RULES[n].get() {
        return Ok(rule);
    }
    let rule = gauss_hermite(n)?;
    Ok(RULES[n].get_or_init(|| rule))
}
