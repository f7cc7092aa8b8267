//! Replica-symmetric fixed-point solvers for the transmit energy.
//!
//! In the large-system limit the minimum of the precoding quadratic form is
//! governed by two macroscopic parameters: `q`, the mean squared magnitude of
//! the chosen representation points, and `b`, the response parameter. They
//! solve a pair of coupled fixed-point equations driven by the channel's
//! R-transform, and the energy per symbol is
//!
//! ```text
//! E_s = q * d/db [ b R(-b) ] = q (R(-b) - b R'(-b)).
//! ```
//!
//! For the inverted i.i.d. channel it is convenient to substitute
//! `p = sqrt((1-α)² + 4αb)`, which collapses the energy to `E_s = q/p`.
//!
//! Two solver routes are implemented and cross-checked against each other:
//!
//! * the specialized closed forms for the inverted channel
//!   ([`solve_1d`], [`solve_square_1d`], [`solve_quadrature`],
//!   [`solve_semidiscrete`]), iterating `(q, p)` or `(q, b)` with damping;
//! * the general route [`solve_general`], which works for any
//!   [`RTransformSpec`] and [`crate::alphabet::Alphabet`] by integrating the
//!   argmin integrands over the scaled Voronoi decomposition of the signal
//!   sets (exact Gaussian cell integrals; plain Gauss-Hermite converges too
//!   slowly on these piecewise-constant integrands and is kept only as a
//!   secondary validation route, [`solve_general_gh`]).
//!
//! Beyond a lattice-dependent threshold load the fixed point disappears and
//! the predicted energy jumps to infinity; solvers report this through the
//! `diverged` flag, and [`find_threshold`] locates the transition by
//! bisection.

mod closed_form;
mod general;
mod hermite;
mod sweep;

pub use closed_form::{solve_1d, solve_quadrature, solve_semidiscrete, solve_square_1d};
pub use general::{solve_general, solve_general_gh};
pub use hermite::GaussHermite;
pub use sweep::{
    crossover_load, find_threshold, solve_kind, sweep, SolverKind, SweepMode, SweepPoint,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::AlphabetError;
use crate::rmt::{self, RTransformSpec, RmtError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplicaError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fixed point did not converge within {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error(
        "threshold bracket invalid: solver must converge at lo = {lo} and diverge at hi = {hi}"
    )]
    BadBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Rmt(#[from] RmtError),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

pub type Result<T> = std::result::Result<T, ReplicaError>;

/// Knobs for the damped Picard iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointConfig {
    /// Damping factor in (0, 1]; 1 is undamped.
    pub damping: f64,
    /// Relative residual tolerance for convergence.
    pub tol: f64,
    /// Iteration cap before giving up with `MaxIterations`.
    pub max_iter: usize,
    /// Nodes per real dimension for the Gauss-Hermite validation route.
    pub quad_order: usize,
    /// Initial `q` as a multiple of the lattice default (`m₁²`, or `2m₁²`
    /// for the quadrature kind).
    pub init_q: f64,
    /// Initial `b` for the `(q, b)` solvers.
    pub init_b: f64,
    /// Energy above which a run is declared divergent.
    pub divergence_cap: f64,
    /// Finite-difference step for the energy derivative when the spectrum
    /// has no analytic `R'`.
    pub fd_step: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-10,
            max_iter: 50_000,
            quad_order: 64,
            init_q: 1.0,
            init_b: 1.0,
            divergence_cap: 1e6,
            fd_step: 1e-6,
        }
    }
}

impl FixedPointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(ReplicaError::Config(format!(
                "damping must be in (0, 1], got {}",
                self.damping
            )));
        }
        if !(self.tol > 0.0) {
            return Err(ReplicaError::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(ReplicaError::Config("max_iter must be at least 1".into()));
        }
        if self.quad_order < 8 {
            return Err(ReplicaError::Config(format!(
                "quad_order must be at least 8, got {}",
                self.quad_order
            )));
        }
        if !(self.init_q > 0.0) || !(self.init_b > 0.0) {
            return Err(ReplicaError::Config(
                "init_q and init_b must be positive".into(),
            ));
        }
        if !(self.divergence_cap > 0.0) {
            return Err(ReplicaError::Config(format!(
                "divergence_cap must be positive, got {}",
                self.divergence_cap
            )));
        }
        if !(self.fd_step > 0.0) {
            return Err(ReplicaError::Config(format!(
                "fd_step must be positive, got {}",
                self.fd_step
            )));
        }
        Ok(())
    }
}

/// Converged (or provably divergent) macroscopic parameters and energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSolution {
    /// Load ratio, when the solve was for an analytic channel family.
    pub alpha: Option<f64>,
    /// Mean squared transmit-point magnitude.
    pub q: f64,
    /// Replica off-diagonal response parameter.
    pub b: f64,
    /// Substituted parameter `sqrt((1-α)² + 4αb)` (inverted-channel solves).
    pub p: Option<f64>,
    /// Energy per symbol; absent when divergent.
    pub es: Option<f64>,
    /// Energy per bit, `es / log2 |S|`; absent when divergent.
    pub eb: Option<f64>,
    /// `10 log10(es)`; absent when divergent.
    pub es_db: Option<f64>,
    pub converged: bool,
    pub diverged: bool,
    pub iterations: usize,
}

impl ReplicaSolution {
    pub(crate) fn converged(
        alpha: Option<f64>,
        q: f64,
        b: f64,
        p: Option<f64>,
        es: f64,
        bits_per_symbol: u32,
        iterations: usize,
    ) -> Self {
        let eb = es / f64::from(bits_per_symbol);
        Self {
            alpha,
            q,
            b,
            p,
            es: Some(es),
            eb: Some(eb),
            es_db: Some(10.0 * es.log10()),
            converged: true,
            diverged: false,
            iterations,
        }
    }

    pub(crate) fn diverged(alpha: Option<f64>, q: f64, b: f64, iterations: usize) -> Self {
        Self {
            alpha,
            q,
            b,
            p: None,
            es: None,
            eb: None,
            es_db: None,
            converged: false,
            diverged: true,
            iterations,
        }
    }
}

/// Standard normal tail probability `Q(x) = ∫ₓ^∞ φ(t) dt`, evaluated through
/// the complementary error function.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub(crate) fn gaussian_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Energy per symbol from converged parameters:
/// `q * d/db [b R(-b)] = q (R(-b) - b R'(-b))`.
///
/// Analytic `R'` is used for the built-in families; tabulated spectra fall
/// back to a central difference with step `fd_step`.
pub fn energy_from_qb(q: f64, b: f64, spec: &RTransformSpec, fd_step: f64) -> Result<f64> {
    if !(b >= 0.0) {
        return Err(ReplicaError::Config(format!(
            "b must be nonnegative, got {b}"
        )));
    }
    let r = rmt::r_transform(spec, -b)?;
    let rp = match spec {
        RTransformSpec::Tabulated { .. } => {
            let h = fd_step;
            (rmt::r_transform(spec, -b + h)? - rmt::r_transform(spec, -b - h)?) / (2.0 * h)
        }
        _ => rmt::r_prime(spec, -b)?,
    };
    Ok(q * (r - b * rp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_q_values() {
        assert!((gaussian_q(0.0) - 0.5).abs() < 1e-15);
        assert!(gaussian_q(40.0) < 1e-300);
        for x in [-3.0, -0.7, 0.0, 1.3, 5.0] {
            assert!((gaussian_q(x) + gaussian_q(-x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_point_mass_is_constant_slope() {
        let spec = RTransformSpec::tabulated(vec![2.0]).unwrap();
        for (q, b) in [(1.0, 0.5), (3.0, 2.0)] {
            let e = energy_from_qb(q, b, &spec, 1e-6).unwrap();
            assert!((e - 2.0 * q).abs() < 1e-5, "q={q} b={b}: {e}");
        }
    }

    #[test]
    fn energy_square_channel_closed_form() {
        // alpha = 1 gives E_s = q / (2 sqrt(b)).
        let spec = RTransformSpec::inverse_gramian(1.0).unwrap();
        let e = energy_from_qb(1.0, 1.0, &spec, 1e-6).unwrap();
        assert!((e - 0.5).abs() < 1e-14);
    }
}
