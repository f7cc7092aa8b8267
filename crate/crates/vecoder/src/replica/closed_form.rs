//! Specialized fixed-point solvers for the inverted i.i.d. channel.
//!
//! All solvers take the point *magnitudes* `m₁ < m₂ < … < m_L` and apply the
//! alternating-sign convention internally (`B₁ = {−m₁, +m₂, −m₃, …}`); the
//! iteration runs on the sorted signed list `c₁ < … < c_L`. With
//! `p = sqrt((1-α)² + 4αb)` the rectangular-channel equations read
//!
//! ```text
//! q = c₁² + Σᵢ (cᵢ² − cᵢ₋₁²) Q( sqrt(p/(2qα)) (cᵢ + cᵢ₋₁) )
//! p = 1 − α + sqrt(αp/(πq)) Σᵢ (cᵢ − cᵢ₋₁) exp( −p (cᵢ + cᵢ₋₁)² / (4qα) )
//! E_s = q / p
//! ```
//!
//! and the quadrature-lattice variant doubles the `q` sums and replaces
//! `αp` by `4αp` under the square root (both quadrature components
//! contribute). The square-channel solver iterates the single scalar
//! equation obtained by eliminating `q` and `b` at `α = 1`.

use crate::alphabet::sorted_signed_points;
use crate::rmt::{self, RTransformSpec};

use super::{energy_from_qb, gaussian_q, FixedPointConfig, ReplicaError, ReplicaSolution, Result};

const P_COLLAPSE: f64 = 1e-8;
const B_RANGE: (f64, f64) = (1e-12, 1e12);

fn validate_inputs(alpha: f64, magnitudes: &[f64], cfg: &FixedPointConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(ReplicaError::Config(format!(
            "load alpha must be positive and finite, got {alpha}"
        )));
    }
    if magnitudes.is_empty() {
        return Err(ReplicaError::Config("empty magnitude list".into()));
    }
    for w in magnitudes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(ReplicaError::Config(
                "magnitudes must be strictly increasing".into(),
            ));
        }
    }
    if !(magnitudes[0] > 0.0) {
        return Err(ReplicaError::Config("magnitudes must be positive".into()));
    }
    Ok(sorted_signed_points(magnitudes))
}

/// `Σᵢ (cᵢ² − cᵢ₋₁²) Q(scale · (cᵢ + cᵢ₋₁))` over consecutive pairs.
fn q_sum(c: &[f64], scale: f64) -> f64 {
    c.windows(2)
        .map(|w| (w[1] * w[1] - w[0] * w[0]) * gaussian_q(scale * (w[1] + w[0])))
        .sum()
}

/// `Σᵢ (cᵢ − cᵢ₋₁) exp(−decay · (cᵢ + cᵢ₋₁)²)` over consecutive pairs.
fn exp_sum(c: &[f64], decay: f64) -> f64 {
    c.windows(2)
        .map(|w| (w[1] - w[0]) * (-decay * (w[1] + w[0]) * (w[1] + w[0])).exp())
        .sum()
}

/// 1-D lattice over the inverted rectangular channel; iterates `(q, p)`.
///
/// `L = 1` is the no-precoding case and short-circuits to `q = m₁²`,
/// `p = 1 − α`, diverging for `α ≥ 1`.
pub fn solve_1d(alpha: f64, magnitudes: &[f64], cfg: &FixedPointConfig) -> Result<ReplicaSolution> {
    solve_1d_warm(alpha, magnitudes, cfg, None)
}

pub(crate) fn solve_1d_warm(
    alpha: f64,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
    warm: Option<(f64, f64)>,
) -> Result<ReplicaSolution> {
    let c = validate_inputs(alpha, magnitudes, cfg)?;
    rect_iteration(alpha, &c, cfg, warm, false, magnitudes[0])
}

/// Quadrature (QPSK) lattice over the inverted rectangular channel.
///
/// Identical structure to [`solve_1d`] with both quadrature components
/// contributing; `E_b = E_s / 2`.
pub fn solve_quadrature(
    alpha: f64,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
) -> Result<ReplicaSolution> {
    solve_quadrature_warm(alpha, magnitudes, cfg, None)
}

pub(crate) fn solve_quadrature_warm(
    alpha: f64,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
    warm: Option<(f64, f64)>,
) -> Result<ReplicaSolution> {
    let c = validate_inputs(alpha, magnitudes, cfg)?;
    rect_iteration(alpha, &c, cfg, warm, true, magnitudes[0])
}

/// Shared `(q, p)` iteration for the 1-D and quadrature closed forms.
fn rect_iteration(
    alpha: f64,
    c: &[f64],
    cfg: &FixedPointConfig,
    warm: Option<(f64, f64)>,
    quadrature: bool,
    m1: f64,
) -> Result<ReplicaSolution> {
    let bits = if quadrature { 2 } else { 1 };
    let dim_factor = if quadrature { 2.0 } else { 1.0 };

    if c.len() == 1 {
        // No precoding: the argmin is the single point, b = 0 exactly.
        let q = dim_factor * m1 * m1;
        if alpha >= 1.0 {
            return Ok(ReplicaSolution::diverged(Some(alpha), q, 0.0, 0));
        }
        let p = 1.0 - alpha;
        return Ok(ReplicaSolution::converged(
            Some(alpha),
            q,
            0.0,
            Some(p),
            q / p,
            bits,
            0,
        ));
    }

    // The telescoped q-sum is anchored by the square of the *sorted first*
    // point, which is the largest negative point for L >= 3.
    let c0_sq = c[0] * c[0];
    let (mut q, mut p) =
        warm.unwrap_or((cfg.init_q * dim_factor * m1 * m1, (1.0 - alpha).max(0.1)));
    let d = cfg.damping;
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        let scale = (p / (2.0 * q * alpha)).sqrt();
        let q_rhs = dim_factor * (c0_sq + q_sum(c, scale));
        let p_rhs = 1.0 - alpha
            + (dim_factor * dim_factor * alpha * p / (std::f64::consts::PI * q)).sqrt()
                * exp_sum(c, p / (4.0 * q * alpha));

        if !q_rhs.is_finite() || !p_rhs.is_finite() || p_rhs <= 0.0 {
            return Ok(ReplicaSolution::diverged(
                Some(alpha),
                q,
                rect_b(alpha, p),
                iter,
            ));
        }

        let dq = (q_rhs - q).abs();
        let dp = (p_rhs - p).abs();
        residual = (dq / q.abs().max(1.0)).max(dp / p.abs().max(1.0));
        if dq <= cfg.tol * q.abs().max(1.0) && dp <= cfg.tol * p.abs().max(1.0) {
            let b = rect_b(alpha, p_rhs);
            let es = q_rhs / p_rhs;
            if es > cfg.divergence_cap {
                return Ok(ReplicaSolution::diverged(Some(alpha), q_rhs, b, iter));
            }
            return Ok(ReplicaSolution::converged(
                Some(alpha),
                q_rhs,
                b,
                Some(p_rhs),
                es,
                bits,
                iter,
            ));
        }

        q = (1.0 - d) * q + d * q_rhs;
        p = (1.0 - d) * p + d * p_rhs;

        if p < P_COLLAPSE || q / p > cfg.divergence_cap {
            return Ok(ReplicaSolution::diverged(
                Some(alpha),
                q,
                rect_b(alpha, p),
                iter,
            ));
        }
    }
    Err(ReplicaError::MaxIterations {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Recovers `b` from the substitution `p² = (1-α)² + 4αb`, clamping the tiny
/// negative values rounding can produce.
fn rect_b(alpha: f64, p: f64) -> f64 {
    ((p * p - (1.0 - alpha) * (1.0 - alpha)) / (4.0 * alpha)).max(0.0)
}

/// Square channel (`α = 1`): scalar fixed point for `E_s` directly,
///
/// ```text
/// E_s = π [ (c₁² + Σ (cᵢ²−cᵢ₋₁²) Q((cᵢ+cᵢ₋₁)/sqrt(2E_s)))
///         / (Σ (cᵢ−cᵢ₋₁) exp(−(cᵢ+cᵢ₋₁)²/(4E_s))) ]²
/// ```
///
/// started from `E_s = 2`. `q` and `b` are back-filled through the
/// `α = 1` relations `E_s = q/(2√b)` once the scalar iteration settles.
/// `L = 1` has an empty denominator and is reported divergent.
pub fn solve_square_1d(magnitudes: &[f64], cfg: &FixedPointConfig) -> Result<ReplicaSolution> {
    let c = validate_inputs(1.0, magnitudes, cfg)?;
    let m1 = magnitudes[0];
    if c.len() == 1 {
        return Ok(ReplicaSolution::diverged(Some(1.0), m1 * m1, 0.0, 0));
    }

    let c0_sq = c[0] * c[0];
    let mut es: f64 = 2.0;
    let d = cfg.damping;
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        let num = c0_sq + q_sum(&c, (2.0 * es).sqrt().recip());
        let den = exp_sum(&c, 0.25 / es);
        if den <= 0.0 || !num.is_finite() {
            return Ok(ReplicaSolution::diverged(Some(1.0), num, 0.0, iter));
        }
        let rhs = std::f64::consts::PI * (num / den) * (num / den);
        if !rhs.is_finite() || rhs > cfg.divergence_cap {
            return Ok(ReplicaSolution::diverged(Some(1.0), num, 0.0, iter));
        }
        residual = (rhs - es).abs() / es.abs().max(1.0);
        if (rhs - es).abs() <= cfg.tol * es.abs().max(1.0) {
            let q = c0_sq + q_sum(&c, (2.0 * rhs).sqrt().recip());
            let p = q / rhs;
            let b = p * p / 4.0;
            return Ok(ReplicaSolution::converged(
                Some(1.0),
                q,
                b,
                Some(p),
                rhs,
                1,
                iter,
            ));
        }
        es = (1.0 - d) * es + d * rhs;
    }
    Err(ReplicaError::MaxIterations {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Semi-discrete lattice (discrete real parts, free imaginary parts) over
/// the inverted channel; iterates `(q, b)`.
///
/// The free imaginary component integrates out analytically and contributes
/// `qR'(-b)/(2R²(-b))` to `q` and `1/(2R(-b))` to `b`; the real component is
/// the usual 1-D lattice term at scale `γ = sqrt(qR'(-b)/(2R²(-b)))`.
pub fn solve_semidiscrete(
    alpha: f64,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
) -> Result<ReplicaSolution> {
    solve_semidiscrete_warm(alpha, magnitudes, cfg, None)
}

pub(crate) fn solve_semidiscrete_warm(
    alpha: f64,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
    warm: Option<(f64, f64)>,
) -> Result<ReplicaSolution> {
    let c = validate_inputs(alpha, magnitudes, cfg)?;
    let m1 = magnitudes[0];
    let c0_sq = c[0] * c[0];
    let spec = RTransformSpec::inverse_gramian(alpha)?;

    let (mut q, mut b) = warm.unwrap_or((cfg.init_q * m1 * m1, cfg.init_b));
    let d = cfg.damping;
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        let r = rmt::r_transform(&spec, -b)?;
        let rp = rmt::r_prime(&spec, -b)?;
        let gamma_sq = q * rp / (2.0 * r * r);
        let gamma = gamma_sq.sqrt();

        let q_rhs = gamma_sq + c0_sq + q_sum(&c, (2.0 * gamma).recip());
        let b_rhs = 0.5 / r
            + exp_sum(&c, 1.0 / (8.0 * gamma_sq)) / (4.0 * std::f64::consts::PI * q * rp).sqrt();

        if !q_rhs.is_finite() || !b_rhs.is_finite() {
            return Ok(ReplicaSolution::diverged(Some(alpha), q, b, iter));
        }

        let dq = (q_rhs - q).abs();
        let db = (b_rhs - b).abs();
        residual = (dq / q.abs().max(1.0)).max(db / b.abs().max(1.0));
        if dq <= cfg.tol * q.abs().max(1.0) && db <= cfg.tol * b.abs().max(1.0) {
            let es = energy_from_qb(q_rhs, b_rhs, &spec, cfg.fd_step)?;
            let p = ((1.0 - alpha) * (1.0 - alpha) + 4.0 * alpha * b_rhs).sqrt();
            if es > cfg.divergence_cap {
                return Ok(ReplicaSolution::diverged(Some(alpha), q_rhs, b_rhs, iter));
            }
            return Ok(ReplicaSolution::converged(
                Some(alpha),
                q_rhs,
                b_rhs,
                Some(p),
                es,
                1,
                iter,
            ));
        }

        q = (1.0 - d) * q + d * q_rhs;
        b = (1.0 - d) * b + d * b_rhs;

        // q/p is the running energy; a cap violation mid-iteration is a
        // cleaner divergence signal than waiting for q itself to overflow.
        let p = ((1.0 - alpha) * (1.0 - alpha) + 4.0 * alpha * b).sqrt();
        if b < B_RANGE.0 || b > B_RANGE.1 || q / p > cfg.divergence_cap {
            return Ok(ReplicaSolution::diverged(Some(alpha), q, b, iter));
        }
    }
    Err(ReplicaError::MaxIterations {
        iterations: cfg.max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::default_magnitudes;

    fn cfg() -> FixedPointConfig {
        FixedPointConfig::default()
    }

    #[test]
    fn square_channel_reference_energies() {
        // Frozen reference values for the inverted square channel.
        let cases = [(2usize, 2.6942), (3, 2.6656), (4, 2.6655)];
        for (l, expect) in cases {
            let sol = solve_square_1d(&default_magnitudes(l), &cfg()).unwrap();
            let es = sol.es.unwrap();
            assert!(
                (es - expect).abs() < 1e-3,
                "L={l}: es={es}, expect {expect}"
            );
        }
        let l1 = solve_square_1d(&default_magnitudes(1), &cfg()).unwrap();
        assert!(l1.diverged && !l1.converged);
    }

    #[test]
    fn square_db_convention() {
        let sol = solve_square_1d(&default_magnitudes(2), &cfg()).unwrap();
        assert!((sol.es_db.unwrap() - 4.3043).abs() < 1e-3);
    }

    #[test]
    fn rect_matches_square_at_unit_load() {
        for l in [2usize, 3] {
            let rect = solve_1d(1.0, &default_magnitudes(l), &cfg()).unwrap();
            let square = solve_square_1d(&default_magnitudes(l), &cfg()).unwrap();
            let (a, b) = (rect.es.unwrap(), square.es.unwrap());
            assert!((a - b).abs() / b < 1e-8, "L={l}: {a} vs {b}");
        }
    }

    #[test]
    fn no_precoding_closed_form() {
        for alpha in [0.25, 0.5, 0.75] {
            let sol = solve_1d(alpha, &default_magnitudes(1), &cfg()).unwrap();
            let expect = 1.0 / (1.0 - alpha);
            assert!((sol.es.unwrap() - expect).abs() < 1e-12);
            assert_eq!(sol.b, 0.0);
            assert_eq!(sol.q, 1.0);
        }
        let sol = solve_1d(1.0, &default_magnitudes(1), &cfg()).unwrap();
        assert!(sol.diverged);
    }

    #[test]
    fn p_substitution_identity_holds() {
        let sol = solve_1d(0.5, &default_magnitudes(2), &cfg()).unwrap();
        let (q, b, p, es) = (sol.q, sol.b, sol.p.unwrap(), sol.es.unwrap());
        let alpha = 0.5;
        assert!((p * p - ((1.0 - alpha) * (1.0 - alpha) + 4.0 * alpha * b)).abs() < 1e-8);
        assert!((es * p - q).abs() < 1e-8);
    }

    #[test]
    fn energy_route_agreement() {
        // E_s from the substitution (q/p) equals the generic derivative form.
        let alpha = 0.5;
        let sol = solve_1d(alpha, &default_magnitudes(2), &cfg()).unwrap();
        let spec = RTransformSpec::inverse_gramian(alpha).unwrap();
        let via_derivative = energy_from_qb(sol.q, sol.b, &spec, 1e-6).unwrap();
        assert!((via_derivative - sol.es.unwrap()).abs() < 1e-8);
    }

    #[test]
    fn quadrature_limits() {
        // Vanishing load: q -> 2, p -> 1, eb -> 1.
        let sol = solve_quadrature(1e-3, &default_magnitudes(2), &cfg()).unwrap();
        assert!((sol.q - 2.0).abs() < 1e-6);
        assert!((sol.p.unwrap() - 0.999).abs() < 1e-6);
        assert!((sol.eb.unwrap() - 1.0).abs() < 3e-3);

        // Large lattice, heavy load: eb approaches 4/3 for any load.
        let sol = solve_quadrature(4.0, &default_magnitudes(100), &cfg()).unwrap();
        let eb = sol.eb.unwrap();
        assert!((eb - 4.0 / 3.0).abs() / (4.0 / 3.0) < 0.05, "eb = {eb}");
    }

    #[test]
    fn semidiscrete_single_level_closed_form() {
        // L = 1: p = 1 exactly and es = 2/(2-alpha).
        for alpha in [0.05, 0.5, 1.2] {
            let sol = solve_semidiscrete(alpha, &default_magnitudes(1), &cfg()).unwrap();
            let expect = 2.0 / (2.0 - alpha);
            assert!(
                (sol.es.unwrap() - expect).abs() < 1e-8,
                "alpha={alpha}: {:?}",
                sol.es
            );
            assert!((sol.p.unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn semidiscrete_beats_quadrature_at_light_load() {
        let alpha = 0.05;
        let semi = solve_semidiscrete(alpha, &default_magnitudes(1), &cfg()).unwrap();
        let quad = solve_quadrature(alpha, &default_magnitudes(100), &cfg()).unwrap();
        assert!(semi.eb.unwrap() < quad.eb.unwrap());
    }

    #[test]
    fn semidiscrete_large_lattice_limit() {
        let sol = solve_semidiscrete(4.0, &default_magnitudes(100), &cfg()).unwrap();
        let eb = sol.eb.unwrap();
        assert!((eb - 4.0 / 3.0).abs() / (4.0 / 3.0) < 0.05, "eb = {eb}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(solve_1d(-0.5, &[1.0], &cfg()).is_err());
        assert!(solve_1d(0.5, &[], &cfg()).is_err());
        assert!(solve_1d(0.5, &[3.0, 1.0], &cfg()).is_err());
        let mut bad = cfg();
        bad.damping = 0.0;
        assert!(solve_1d(0.5, &[1.0], &bad).is_err());
    }
}
