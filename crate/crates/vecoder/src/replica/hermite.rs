//! Gauss-Hermite quadrature nodes via the Golub-Welsch eigenvalue method.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

/// A Gauss-Hermite rule rescaled for standard-normal expectations:
/// `E[f(Z)] ≈ Σ wᵢ f(zᵢ)` with `Z ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds (or fetches from a process-wide cache) the rule of the given
    /// order.
    pub fn new(order: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(order)
            .or_insert_with(|| Arc::new(Self::build(order)))
            .clone()
    }

    fn build(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        // Jacobi matrix of the (physicists') Hermite polynomials: zero
        // diagonal, off-diagonal beta_k = sqrt(k/2).
        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for k in 1..order {
            let beta = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = beta;
            jacobi[(k, k - 1)] = beta;
        }
        let eig = jacobi.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|i| {
                let x = eig.eigenvalues[i];
                let v0 = eig.eigenvectors[(0, i)];
                // Physicists' weight pi^(1/2) v0^2; the standard-normal
                // substitution z = sqrt(2) x turns the total mass into 1.
                (x, v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        // Symmetrize: nodes come in +/- pairs, so average the mirror images
        // to remove eigen-solver jitter.
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let j = n - 1 - i;
            nodes[i] = 0.5 * (pairs[i].0 - pairs[j].0);
            weights[i] = 0.5 * (pairs[i].1 + pairs[j].1);
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let total: f64 = weights.iter().sum();
        Self {
            nodes: nodes.iter().map(|x| std::f64::consts::SQRT_2 * x).collect(),
            weights: weights.iter().map(|w| w / total).collect(),
        }
    }

    /// Quadrature nodes in standard-normal coordinates.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights summing to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Standard-normal expectation of `f`.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}
