//! Load sweeps and phase-transition threshold searches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, AlphabetKind, DataPrior};
use crate::rmt::RTransformSpec;

use super::closed_form::{solve_1d_warm, solve_quadrature_warm, solve_semidiscrete_warm};
use super::general::solve_general_warm;
use super::{FixedPointConfig, ReplicaError, ReplicaSolution, Result};

/// Which lattice family a sweep or threshold search solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverKind {
    OneDim,
    Quadrature,
    SemiDiscrete,
    Checkerboard,
}

impl SolverKind {
    pub fn alphabet_kind(self) -> AlphabetKind {
        match self {
            SolverKind::OneDim => AlphabetKind::OneDimLattice,
            SolverKind::Quadrature => AlphabetKind::QuadratureLattice,
            SolverKind::SemiDiscrete => AlphabetKind::SemiDiscrete,
            SolverKind::Checkerboard => AlphabetKind::CheckerboardLattice,
        }
    }
}

/// Sequential warm-started (default) or parallel cold-started execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    #[default]
    WarmStart,
    ParallelCold,
}

/// One grid point of a sweep; per-point failures are recorded, never raised.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub alpha: f64,
    pub result: std::result::Result<ReplicaSolution, ReplicaError>,
}

/// Solves one load for the given lattice family. The checkerboard has no
/// specialized closed form and routes through the general solver.
pub fn solve_kind(
    kind: SolverKind,
    alpha: f64,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
) -> Result<ReplicaSolution> {
    solve_kind_warm(kind, alpha, magnitudes, cfg, None)
}

fn solve_kind_warm(
    kind: SolverKind,
    alpha: f64,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
    warm: Option<(f64, f64)>,
) -> Result<ReplicaSolution> {
    match kind {
        SolverKind::OneDim => solve_1d_warm(alpha, magnitudes, cfg, warm),
        SolverKind::Quadrature => solve_quadrature_warm(alpha, magnitudes, cfg, warm),
        SolverKind::SemiDiscrete => solve_semidiscrete_warm(alpha, magnitudes, cfg, warm),
        SolverKind::Checkerboard => {
            let a =
                Alphabet::with_magnitudes(AlphabetKind::CheckerboardLattice, magnitudes.to_vec())?;
            let prior = DataPrior::uniform(&a);
            let spec = RTransformSpec::inverse_gramian(alpha)?;
            solve_general_warm(&spec, &a, &prior, cfg, warm)
        }
    }
}

/// Warm-start seed carried between grid points: `(q, p)` for the
/// rectangular forms, `(q, b)` for the `(q, b)` solvers.
fn warm_seed(kind: SolverKind, sol: &ReplicaSolution) -> Option<(f64, f64)> {
    if !sol.converged {
        return None;
    }
    match kind {
        SolverKind::OneDim | SolverKind::Quadrature => sol.p.map(|p| (sol.q, p)),
        SolverKind::SemiDiscrete | SolverKind::Checkerboard => {
            // b = 0 cannot seed the (q, b) iterations (the scale collapses).
            (sol.b > 0.0).then_some((sol.q, sol.b))
        }
    }
}

/// Solves every load in `alpha_grid` (nonempty, strictly increasing).
///
/// The default mode walks the grid sequentially, seeding each solve from the
/// previous converged point; `ParallelCold` solves every point independently
/// from the default initialization. Converged outputs agree within solver
/// tolerance; output order is by grid index either way.
pub fn sweep(
    kind: SolverKind,
    alpha_grid: &[f64],
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
    mode: SweepMode,
) -> Result<Vec<SweepPoint>> {
    if alpha_grid.is_empty() {
        return Err(ReplicaError::Config("empty alpha grid".into()));
    }
    for w in alpha_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(ReplicaError::Config(
                "alpha grid must be strictly increasing".into(),
            ));
        }
    }

    match mode {
        SweepMode::WarmStart => {
            let mut out = Vec::with_capacity(alpha_grid.len());
            let mut warm: Option<(f64, f64)> = None;
            for &alpha in alpha_grid {
                let result = solve_kind_warm(kind, alpha, magnitudes, cfg, warm);
                if let Ok(sol) = &result {
                    if let Some(seed) = warm_seed(kind, sol) {
                        warm = Some(seed);
                    }
                }
                out.push(SweepPoint { alpha, result });
            }
            Ok(out)
        }
        SweepMode::ParallelCold => Ok(alpha_grid
            .par_iter()
            .map(|&alpha| SweepPoint {
                alpha,
                result: solve_kind(kind, alpha, magnitudes, cfg),
            })
            .collect()),
    }
}

/// Locates the phase-transition load by bisection to 1e-3 absolute.
///
/// Requires a valid bracket: converged at `lo`, divergent at `hi`.
pub fn find_threshold(
    kind: SolverKind,
    magnitudes: &[f64],
    cfg: &FixedPointConfig,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(ReplicaError::BadBracket { lo, hi });
    }
    // An iteration cap at a bisection point means marginal (critical-slowing)
    // behavior right at the transition; classify it as not-converged rather
    // than aborting — the midpoint is within the bisection tolerance anyway.
    let converged_at = |alpha: f64| -> Result<bool> {
        match solve_kind(kind, alpha, magnitudes, cfg) {
            Ok(sol) => Ok(sol.converged),
            Err(ReplicaError::MaxIterations { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !converged_at(lo)? || converged_at(hi)? {
        return Err(ReplicaError::BadBracket { lo, hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if converged_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Crossing load at which the semi-discrete lattice's energy per bit meets
/// the quadrature lattice's: bisection on the sign of
/// `eb_semidiscrete(α) − eb_quadrature(α)` to 1e-3 absolute.
///
/// Requires the semi-discrete curve to lie below at `lo` and above at `hi`,
/// and both solvers to converge on the whole bracket.
pub fn crossover_load(
    semi_magnitudes: &[f64],
    quad_magnitudes: &[f64],
    cfg: &FixedPointConfig,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let gap = |alpha: f64| -> Result<f64> {
        let semi = solve_kind(SolverKind::SemiDiscrete, alpha, semi_magnitudes, cfg)?;
        let quad = solve_kind(SolverKind::Quadrature, alpha, quad_magnitudes, cfg)?;
        match (semi.eb, quad.eb) {
            (Some(a), Some(b)) => Ok(a - b),
            _ => Err(ReplicaError::BadBracket { lo, hi }),
        }
    };
    if !(lo < hi) || gap(lo)? >= 0.0 || gap(hi)? <= 0.0 {
        return Err(ReplicaError::BadBracket { lo, hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::default_magnitudes;

    fn cfg() -> FixedPointConfig {
        FixedPointConfig::default()
    }

    #[test]
    fn sweep_no_precoding_closed_form() {
        let points = sweep(
            SolverKind::OneDim,
            &[0.25, 0.5, 0.75],
            &default_magnitudes(1),
            &cfg(),
            SweepMode::WarmStart,
        )
        .unwrap();
        let expect = [4.0 / 3.0, 2.0, 4.0];
        for (pt, e) in points.iter().zip(expect) {
            let es = pt.result.as_ref().unwrap().es.unwrap();
            assert!((es - e).abs() < 1e-12, "alpha={}: {es}", pt.alpha);
        }
    }

    #[test]
    fn sweep_modes_agree() {
        let grid: Vec<f64> = (1..=8).map(|i| 0.15 * i as f64).collect();
        let warm = sweep(
            SolverKind::OneDim,
            &grid,
            &default_magnitudes(2),
            &cfg(),
            SweepMode::WarmStart,
        )
        .unwrap();
        let cold = sweep(
            SolverKind::OneDim,
            &grid,
            &default_magnitudes(2),
            &cfg(),
            SweepMode::ParallelCold,
        )
        .unwrap();
        for (w, c) in warm.iter().zip(&cold) {
            match (&w.result, &c.result) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a.converged, b.converged, "alpha={}", w.alpha);
                    if let (Some(x), Some(y)) = (a.es, b.es) {
                        assert!(((x - y) / y).abs() < 1e-7, "alpha={}: {x} vs {y}", w.alpha);
                    }
                }
                _ => panic!("solver error in sweep"),
            }
        }
    }

    #[test]
    fn sweep_transition_is_monotone() {
        let grid: Vec<f64> = (1..=30).map(|i| 1.0 + 0.025 * i as f64).collect();
        let points = sweep(
            SolverKind::OneDim,
            &grid,
            &default_magnitudes(2),
            &cfg(),
            SweepMode::WarmStart,
        )
        .unwrap();
        let flags: Vec<bool> = points
            .iter()
            .map(|p| p.result.as_ref().map(|s| s.converged).unwrap_or(false))
            .collect();
        // A maximal converged prefix followed only by divergent points.
        let first_div = flags.iter().position(|c| !c).unwrap_or(flags.len());
        assert!(flags[..first_div].iter().all(|&c| c));
        assert!(flags[first_div..].iter().all(|&c| !c));
        assert!(first_div > 0, "expected convergence just above alpha = 1");
    }

    #[test]
    fn single_point_grid_square_values() {
        let points = sweep(
            SolverKind::OneDim,
            &[1.0],
            &default_magnitudes(2),
            &cfg(),
            SweepMode::WarmStart,
        )
        .unwrap();
        let es = points[0].result.as_ref().unwrap().es.unwrap();
        assert!((es - 2.6942).abs() < 1e-3);
    }

    #[test]
    fn threshold_no_precoding_is_unit_load() {
        let thr =
            find_threshold(SolverKind::OneDim, &default_magnitudes(1), &cfg(), 0.5, 1.5).unwrap();
        assert!((thr - 1.0).abs() <= 1e-3, "thr = {thr}");
    }

    #[test]
    fn threshold_regression_and_monotonicity() {
        // Frozen self-regression value for the L = 2 transition.
        let t2 =
            find_threshold(SolverKind::OneDim, &default_magnitudes(2), &cfg(), 1.0, 3.0).unwrap();
        assert!((t2 - 1.4056).abs() < 2e-3, "t2 = {t2}");
        let t3 =
            find_threshold(SolverKind::OneDim, &default_magnitudes(3), &cfg(), 1.0, 3.0).unwrap();
        assert!(t3 >= t2 - 1e-3, "t3 = {t3} < t2 = {t2}");
    }

    #[test]
    fn semidiscrete_single_level_threshold_is_two() {
        // es = 2/(2 - alpha) for L = 1, so the transition sits at alpha = 2;
        // the bracket midpoint lands exactly on the critical load, which the
        // bisection must classify rather than abort on.
        let thr = find_threshold(
            SolverKind::SemiDiscrete,
            &default_magnitudes(1),
            &cfg(),
            1.5,
            2.5,
        )
        .unwrap();
        assert!((thr - 2.0).abs() < 5e-3, "thr = {thr}");
    }

    #[test]
    fn threshold_rejects_bad_bracket() {
        assert!(matches!(
            find_threshold(SolverKind::OneDim, &default_magnitudes(1), &cfg(), 0.2, 0.5),
            Err(ReplicaError::BadBracket { .. })
        ));
    }
}
