//! Exact ground-truth engine for desk-scale validation of the replica
//! predictions.
//!
//! Each sample draws a `k×n` channel with i.i.d. `CN(0, 1/n)` entries, forms
//! the inverted-channel Gramian `J = (HH^H)⁻¹`, draws a data vector, solves
//! the discrete program exactly and records `(1/k) x^H J x`. Sampling uses
//! counter-based ChaCha streams keyed by `(seed, sample index)`, so parallel
//! and sequential runs produce identical sample sets.

mod exact;

pub use exact::{
    precode_exact, precode_semidiscrete, precode_sphere, precode_sphere_counted, ENUMERATION_BUDGET,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, AlphabetKind, DataPrior, Symbol};
use crate::replica::ReplicaSolution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("channel Gramian is numerically singular (condition {condition:.3e})")]
    SingularChannel { condition: f64 },
    #[error("candidate set exceeds the enumeration budget of {budget} points")]
    BudgetExceeded { budget: u64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("unsupported alphabet: {0}")]
    UnsupportedAlphabet(String),
    #[error("{failed} of {samples} samples failed (> 10%); first failure: {first}")]
    TooManyFailures {
        failed: usize,
        samples: usize,
        first: String,
    },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

pub type Result<T> = std::result::Result<T, MonteCarloError>;

/// Exact-solver selection for [`run_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[value(name = "brute")]
    BruteForce,
    #[value(name = "sphere")]
    Sphere,
    #[value(name = "auto")]
    Auto,
}

/// Channel-ensemble and experiment dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Data-vector dimension (receive antennas); rows of `H`.
    pub k: usize,
    /// Transmit-antenna dimension; columns of `H`. Load `α = k/n`.
    pub n: usize,
    /// Channel realizations to draw.
    pub samples: usize,
    /// Master seed; sample `i` uses stream `i` of this seed.
    pub seed: u64,
    pub solver: SolverChoice,
}

impl ChannelConfig {
    pub fn alpha(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 || self.n < self.k {
            return Err(MonteCarloError::Dimension(format!(
                "need n >= k >= 1 for an invertible Gramian, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        if self.samples < 1 {
            return Err(MonteCarloError::Dimension(
                "need at least one sample".into(),
            ));
        }
        Ok(())
    }
}

/// Energy statistics of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub k: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub solver: SolverChoice,
    /// Sample mean of `(1/k) min x^H J x`.
    pub mean_es: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Per-sample energies in sample order (failed samples omitted).
    pub energies: Vec<f64>,
    /// Matching replica prediction, when one was supplied and converged.
    pub replica_es: Option<f64>,
    /// Ill-conditioned channel draws that were rejected and redrawn.
    pub resamples: usize,
    /// Indices of failed samples with the first error message.
    pub failed: Vec<usize>,
}

/// Counter-based stream RNG: `(seed, index)` fully determines the stream.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws a `k×n` channel with i.i.d. circularly-symmetric complex Gaussian
/// entries of per-entry variance `1/n` (real and imaginary parts each
/// `N(0, 1/(2n))`).
pub fn sample_channel(k: usize, n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let sigma = (0.5 / n as f64).sqrt();
    DMatrix::from_fn(k, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(sigma * re, sigma * im)
    })
}

/// Maximum Gramian condition number accepted before a redraw.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Inverts the channel Gramian: `J = (HH^H)⁻¹`, Hermitian positive definite,
/// symmetrized after inversion to remove roundoff asymmetry.
pub fn gramian_inverse(h: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let g = h * h.adjoint();
    let eig = g.symmetric_eigen();
    let max = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let min = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || max / min > CONDITION_LIMIT {
        return Err(MonteCarloError::SingularChannel {
            condition: if min > 0.0 { max / min } else { f64::INFINITY },
        });
    }
    let inv_diag = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::new(1.0 / l, 0.0)),
    );
    let v = &eig.eigenvectors;
    let j = v * DMatrix::from_diagonal(&inv_diag) * v.adjoint();
    Ok((&j + j.adjoint()).map(|z| 0.5 * z))
}

fn solve_instance(
    j: &DMatrix<Complex64>,
    s: &[Symbol],
    a: &Alphabet,
    solver: SolverChoice,
) -> Result<f64> {
    let energy = if a.kind() == AlphabetKind::SemiDiscrete {
        precode_semidiscrete(j, s, a)?.1
    } else {
        match solver {
            SolverChoice::BruteForce => precode_exact(j, s, a)?.1,
            SolverChoice::Sphere | SolverChoice::Auto => precode_sphere(j, s, a)?.1,
        }
    };
    Ok(energy)
}

/// Runs one experiment: per sample, draw a channel (redrawing the
/// ill-conditioned ones), draw data from `prior`, solve exactly, and
/// aggregate. Samples run in parallel on independent RNG streams.
///
/// Semi-discrete alphabets always use their dedicated solver regardless of
/// the configured [`SolverChoice`]; for finite alphabets `Auto` means the
/// sphere decoder.
pub fn run_experiment(
    cfg: &ChannelConfig,
    a: &Alphabet,
    prior: &DataPrior,
    replica_ref: Option<&ReplicaSolution>,
) -> Result<SimResult> {
    cfg.validate()?;
    if !prior.supports(a) {
        return Err(MonteCarloError::UnsupportedAlphabet(
            "prior assigns mass to symbols outside the alphabet".into(),
        ));
    }
    // Enumeration budgets are data-independent; fail fast before sampling.
    // Brute force enumerates |B|^k, the semi-discrete solver L^k real-part
    // assignments; only the sphere decoder on a finite alphabet is exempt.
    let per_symbol = if a.kind() == AlphabetKind::SemiDiscrete {
        Some(a.level_count() as u64)
    } else if cfg.solver == SolverChoice::BruteForce {
        Some(a.enumerate_points(0)?.len() as u64)
    } else {
        None
    };
    if let Some(per_symbol) = per_symbol {
        let mut total: u64 = 1;
        for _ in 0..cfg.k {
            total = total.saturating_mul(per_symbol);
        }
        if total > ENUMERATION_BUDGET {
            return Err(MonteCarloError::BudgetExceeded {
                budget: ENUMERATION_BUDGET,
            });
        }
    }

    let outcomes: Vec<(usize, std::result::Result<f64, String>)> = (0..cfg.samples)
        .into_par_iter()
        .map(|idx| {
            let mut rng = sample_rng(cfg.seed, idx as u64);
            let mut resamples = 0usize;
            let outcome = loop {
                let h = sample_channel(cfg.k, cfg.n, &mut rng);
                match gramian_inverse(&h) {
                    Ok(j) => {
                        let s: Vec<Symbol> =
                            (0..cfg.k).map(|_| prior.sample(rng.gen::<f64>())).collect();
                        break solve_instance(&j, &s, a, cfg.solver).map_err(|e| e.to_string());
                    }
                    Err(MonteCarloError::SingularChannel { .. }) if resamples < 1000 => {
                        resamples += 1;
                    }
                    Err(e) => break Err(e.to_string()),
                }
            };
            (resamples, outcome)
        })
        .collect();

    let total_resamples: usize = outcomes.iter().map(|(r, _)| r).sum();
    let mut energies = Vec::with_capacity(cfg.samples);
    let mut failed = Vec::new();
    let mut first_failure = None;
    for (idx, (_, outcome)) in outcomes.iter().enumerate() {
        match outcome {
            Ok(e) => energies.push(*e),
            Err(msg) => {
                failed.push(idx);
                if first_failure.is_none() {
                    first_failure = Some(msg.clone());
                }
            }
        }
    }
    if failed.len() * 10 > cfg.samples {
        return Err(MonteCarloError::TooManyFailures {
            failed: failed.len(),
            samples: cfg.samples,
            first: first_failure.unwrap_or_default(),
        });
    }

    finish_result(cfg, energies, replica_ref, total_resamples, failed)
}

fn finish_result(
    cfg: &ChannelConfig,
    energies: Vec<f64>,
    replica_ref: Option<&ReplicaSolution>,
    total_resamples: usize,
    failed: Vec<usize>,
) -> Result<SimResult> {
    let count = energies.len().max(1) as f64;
    let mean = energies.iter().sum::<f64>() / count;
    let var = if energies.len() > 1 {
        energies
            .iter()
            .map(|e| (e - mean) * (e - mean))
            .sum::<f64>()
            / (count - 1.0)
    } else {
        0.0
    };
    Ok(SimResult {
        k: cfg.k,
        n: cfg.n,
        samples: cfg.samples,
        seed: cfg.seed,
        solver: cfg.solver,
        mean_es: mean,
        stderr: (var / count).sqrt(),
        energies,
        replica_es: replica_ref.and_then(|r| r.es),
        resamples: total_resamples,
        failed,
    })
}

/// Worst absolute per-symbol energy gap between the sphere decoder and the
/// brute-force oracle over randomized instances (mixed dimensions, loads and
/// lattice kinds). Backs the solver-integrity checks.
pub fn sphere_brute_worst_gap(instances: usize, max_k: usize, max_l: usize, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let mut rng = sample_rng(seed, i as u64);
        let quadrature = i % 3 == 2;
        let l = 1 + i % max_l;
        // Keep the brute-force candidate count (L or L^2 per symbol) sane.
        let k_cap = if quadrature {
            match l {
                1 => max_k.min(10),
                2 => max_k.min(8),
                _ => max_k.min(5),
            }
        } else {
            max_k.min(10)
        };
        let k = 2 + i % (k_cap - 1).max(1);
        let n = k + 1 + i % (2 * k);
        let kind = if quadrature {
            AlphabetKind::QuadratureLattice
        } else {
            AlphabetKind::OneDimLattice
        };
        let a = Alphabet::new(kind, l).expect("valid alphabet");
        let prior = DataPrior::uniform(&a);

        let j = loop {
            let h = sample_channel(k, n, &mut rng);
            if let Ok(j) = gramian_inverse(&h) {
                break j;
            }
        };
        let s: Vec<Symbol> = (0..k).map(|_| prior.sample(rng.gen::<f64>())).collect();
        let (_, e_brute) = precode_exact(&j, &s, &a).expect("brute force");
        let (_, e_sphere) = precode_sphere(&j, &s, &a).expect("sphere");
        worst = worst.max((e_brute - e_sphere).abs());
    }
    worst
}
