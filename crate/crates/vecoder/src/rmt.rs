//! R-transform algebra for the random-matrix ensembles behind the energy
//! prediction.
//!
//! The R-transform of a spectral distribution with Stieltjes transform
//! `m(s) = ∫ dP(x)/(x−s)` is `R(w) = m⁻¹(−w) − 1/w`. Two analytic families
//! are built in:
//!
//! * [`RTransformSpec::MarchenkoPastur`] — the Gramian `HH^H` of a `K×N`
//!   matrix with i.i.d. `CN(0, 1/N)` entries and load `α = K/N`, for which
//!   `R(w) = 1/(1−αw)`.
//! * [`RTransformSpec::InverseGramian`] — the inverted Gramian `(HH^H)⁻¹`,
//!   with `R(w) = (1−α−√((1−α)²−4αw))/(2αw)` on the real branch
//!   `(1−α)² − 4αw ≥ 0`.
//!
//! For the inverse Gramian the minus branch of the square root is the correct
//! one: for `α ≥ 1` the mean of the spectral measure diverges, so the
//! R-transform must have a pole at `w = 0`, which only the minus branch
//! produces. The implementation evaluates the algebraically equivalent form
//! `R(w) = 2/(1−α+√((1−α)²−4αw))`, which is free of the cancellation the
//! printed form suffers near `w = 0` and yields the analytic limit
//! `R(0) = 1/(1−α)` exactly.
//!
//! Arbitrary spectra are supported through [`RTransformSpec::Tabulated`],
//! which inverts the empirical Stieltjes transform numerically
//! ([`r_from_stieltjes`]).

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RmtError {
    /// Argument outside the real branch or otherwise not evaluable.
    #[error("R-transform domain error: {0}")]
    Domain(String),
    /// Mean eigenvalue diverges; R has a pole at w = 0 (inverse Gramian, α ≥ 1).
    #[error("divergent spectral moment: inverse Gramian with alpha = {alpha} has a pole at w = 0")]
    DivergentMoment { alpha: f64 },
    /// R'(w) = 0, so R²/R' is undefined.
    #[error("R'({w}) = 0; ratio undefined")]
    DivisionByZero { w: f64 },
    /// The bracketing search for the Stieltjes inverse failed.
    #[error("no bracket found for m(s) = {target} within the search bounds")]
    NoBracket { target: f64 },
}

pub type Result<T> = std::result::Result<T, RmtError>;

/// Analytic or tabulated description of a limiting eigenvalue distribution
/// via its R-transform.
#[derive(Debug, Clone, PartialEq)]
pub enum RTransformSpec {
    /// Gramian `HH^H`, entries `CN(0, 1/N)`, load `alpha = K/N > 0`.
    MarchenkoPastur { alpha: f64 },
    /// Inverse Gramian `(HH^H)⁻¹` of the same ensemble, `alpha > 0`.
    InverseGramian { alpha: f64 },
    /// Empirical spectrum; transforms are evaluated numerically.
    Tabulated { eigenvalues: Vec<f64> },
}

impl RTransformSpec {
    pub fn marchenko_pastur(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(RmtError::Domain(format!(
                "Marchenko-Pastur requires alpha > 0, got {alpha}"
            )));
        }
        Ok(Self::MarchenkoPastur { alpha })
    }

    pub fn inverse_gramian(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(RmtError::Domain(format!(
                "inverse Gramian requires alpha > 0, got {alpha}"
            )));
        }
        Ok(Self::InverseGramian { alpha })
    }

    pub fn tabulated(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(RmtError::Domain("empty eigenvalue list".into()));
        }
        if eigenvalues.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(RmtError::Domain(
                "tabulated eigenvalues must be finite and nonnegative".into(),
            ));
        }
        Ok(Self::Tabulated { eigenvalues })
    }

    /// Load ratio for the analytic families.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::MarchenkoPastur { alpha } | Self::InverseGramian { alpha } => Some(*alpha),
            Self::Tabulated { .. } => None,
        }
    }

    fn check_alpha(alpha: f64) -> Result<()> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(())
        } else {
            Err(RmtError::Domain(format!(
                "alpha must be positive, got {alpha}"
            )))
        }
    }
}

/// Discriminant of the inverse-Gramian square root; the real branch requires
/// it to be nonnegative.
fn ig_discriminant(alpha: f64, w: f64) -> Result<f64> {
    let disc = (1.0 - alpha) * (1.0 - alpha) - 4.0 * alpha * w;
    if disc < 0.0 {
        return Err(RmtError::Domain(format!(
            "w = {w} is outside the real branch of the inverse-Gramian R-transform (alpha = {alpha})"
        )));
    }
    Ok(disc)
}

/// Evaluates `R(w)` for the given spectrum description.
pub fn r_transform(spec: &RTransformSpec, w: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(RmtError::Domain(format!("w must be finite, got {w}")));
    }
    match spec {
        RTransformSpec::MarchenkoPastur { alpha } => {
            RTransformSpec::check_alpha(*alpha)?;
            let den = 1.0 - alpha * w;
            if den == 0.0 {
                return Err(RmtError::Domain(format!(
                    "Marchenko-Pastur R-transform has a pole at w = 1/alpha = {}",
                    1.0 / alpha
                )));
            }
            Ok(1.0 / den)
        }
        RTransformSpec::InverseGramian { alpha } => {
            RTransformSpec::check_alpha(*alpha)?;
            let disc = ig_discriminant(*alpha, w)?;
            let den = 1.0 - alpha + disc.sqrt();
            if den == 0.0 {
                // Only reachable at w = 0 with alpha >= 1.
                return Err(RmtError::DivergentMoment { alpha: *alpha });
            }
            Ok(2.0 / den)
        }
        RTransformSpec::Tabulated { eigenvalues } => r_from_stieltjes(eigenvalues, w),
    }
}

/// Evaluates `R'(w)`; analytic for the two built-in families, central finite
/// difference with step `h = max(1e-6, 1e-6 |w|)` for tabulated spectra.
pub fn r_prime(spec: &RTransformSpec, w: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(RmtError::Domain(format!("w must be finite, got {w}")));
    }
    match spec {
        RTransformSpec::MarchenkoPastur { alpha } => {
            RTransformSpec::check_alpha(*alpha)?;
            let den = 1.0 - alpha * w;
            if den == 0.0 {
                return Err(RmtError::Domain(format!(
                    "Marchenko-Pastur R' has a pole at w = 1/alpha = {}",
                    1.0 / alpha
                )));
            }
            Ok(alpha / (den * den))
        }
        RTransformSpec::InverseGramian { alpha } => {
            RTransformSpec::check_alpha(*alpha)?;
            // Stable rewrite of the printed derivative:
            //   R'(w) = (1-a-s)^2 / (4 a w^2 s)  with  s = sqrt((1-a)^2 - 4 a w)
            // equals 4a / (s (1-a+s)^2) after clearing the cancellation.
            let disc = ig_discriminant(*alpha, w)?;
            let s = disc.sqrt();
            let den = s * (1.0 - alpha + s) * (1.0 - alpha + s);
            if den == 0.0 {
                if w == 0.0 && *alpha >= 1.0 {
                    return Err(RmtError::DivergentMoment { alpha: *alpha });
                }
                return Err(RmtError::Domain(format!(
                    "w = {w} is on the branch point of the inverse-Gramian R' (alpha = {alpha})"
                )));
            }
            Ok(4.0 * alpha / den)
        }
        RTransformSpec::Tabulated { .. } => {
            let h = 1e-6f64.max(1e-6 * w.abs());
            let hi = r_transform(spec, w + h)?;
            let lo = r_transform(spec, w - h)?;
            Ok((hi - lo) / (2.0 * h))
        }
    }
}

/// Evaluates `R²(w)/R'(w)`.
///
/// For the inverse Gramian this simplifies to `√((1−α)² − 4αw)/α`, which
/// stays finite even where `R` and `R'` individually blow up; other families
/// form the quotient directly.
pub fn r_ratio(spec: &RTransformSpec, w: f64) -> Result<f64> {
    match spec {
        RTransformSpec::InverseGramian { alpha } => {
            RTransformSpec::check_alpha(*alpha)?;
            let disc = ig_discriminant(*alpha, w)?;
            Ok(disc.sqrt() / alpha)
        }
        _ => {
            let r = r_transform(spec, w)?;
            let rp = r_prime(spec, w)?;
            if rp == 0.0 {
                return Err(RmtError::DivisionByZero { w });
            }
            Ok(r * r / rp)
        }
    }
}

/// Empirical Stieltjes transform `m(s) = (1/n) Σ 1/(xᵢ − s)`.
pub fn stieltjes(eigenvalues: &[f64], s: Complex64) -> Result<Complex64> {
    if eigenvalues.is_empty() {
        return Err(RmtError::Domain("empty eigenvalue list".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &x in eigenvalues {
        let d = Complex64::new(x, 0.0) - s;
        if d.norm_sqr() == 0.0 {
            return Err(RmtError::Domain(format!(
                "s = {s} coincides with an eigenvalue"
            )));
        }
        acc += d.inv();
    }
    Ok(acc / eigenvalues.len() as f64)
}

fn stieltjes_real(eigenvalues: &[f64], s: f64) -> f64 {
    let n = eigenvalues.len() as f64;
    eigenvalues.iter().map(|&x| 1.0 / (x - s)).sum::<f64>() / n
}

/// Numeric R-transform of a tabulated spectrum: solves `m(s) = −w` for `s`
/// on the real axis outside the eigenvalue range and returns `s − 1/w`.
///
/// At `w = 0` the definition degenerates to the mean eigenvalue, which is
/// returned directly. The root is bracketed by doubling the distance from
/// the spectrum edge (expansion factor 2, at most 200 expansions) and then
/// refined by bisection.
pub fn r_from_stieltjes(eigenvalues: &[f64], w: f64) -> Result<f64> {
    if eigenvalues.is_empty() {
        return Err(RmtError::Domain("empty eigenvalue list".into()));
    }
    if !w.is_finite() {
        return Err(RmtError::Domain(format!("w must be finite, got {w}")));
    }
    if w == 0.0 {
        return Ok(eigenvalues.iter().sum::<f64>() / eigenvalues.len() as f64);
    }
    let lo_edge = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi_edge = eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi_edge - lo_edge).max(lo_edge.abs()).max(1.0);
    let target = -w;

    // m is increasing in s on both real-axis components outside the
    // spectrum: s < lo_edge gives m in (0, +inf), s > hi_edge in (-inf, 0).
    // Track the bracket as (below, above): m(below) < target <= m(above).
    let (mut below, mut above) = if w < 0.0 {
        // target > 0: search below the spectrum, where m(lo_edge-) = +inf.
        let above = lo_edge - 1e-12 * spread;
        if stieltjes_real(eigenvalues, above) < target {
            return Err(RmtError::NoBracket { target });
        }
        let mut step = spread;
        let mut below = lo_edge - step;
        let mut expansions = 0;
        while stieltjes_real(eigenvalues, below) > target {
            step *= 2.0;
            below = lo_edge - step;
            expansions += 1;
            if expansions > 200 {
                return Err(RmtError::NoBracket { target });
            }
        }
        (below, above)
    } else {
        // target < 0: search above the spectrum, where m(hi_edge+) = -inf.
        let below = hi_edge + 1e-12 * spread;
        if stieltjes_real(eigenvalues, below) > target {
            return Err(RmtError::NoBracket { target });
        }
        let mut step = spread;
        let mut above = hi_edge + step;
        let mut expansions = 0;
        while stieltjes_real(eigenvalues, above) < target {
            step *= 2.0;
            above = hi_edge + step;
            expansions += 1;
            if expansions > 200 {
                return Err(RmtError::NoBracket { target });
            }
        }
        (below, above)
    };

    for _ in 0..200 {
        let mid = 0.5 * (below + above);
        if mid == below || mid == above {
            break;
        }
        if stieltjes_real(eigenvalues, mid) < target {
            below = mid;
        } else {
            above = mid;
        }
    }
    Ok(0.5 * (below + above) - 1.0 / w)
}

/// Residual of the inversion identity linking the R-transforms of a spectrum
/// `X` and of its reciprocal `X⁻¹`:
///
/// `1/R_X(w) = R_{X⁻¹}(−R_X(w)·(1 + w·R_X(w)))`.
///
/// Returns `|lhs − rhs|`; zero (to rounding) when the two specs really are
/// reciprocal spectra and both sides are evaluable.
pub fn verify_inverse_lemma(
    spec_x: &RTransformSpec,
    spec_xinv: &RTransformSpec,
    w: f64,
) -> Result<f64> {
    let rx = r_transform(spec_x, w)?;
    if rx == 0.0 {
        return Err(RmtError::Domain("R_X(w) = 0; identity undefined".into()));
    }
    let arg = -rx * (1.0 + w * rx);
    let rinv = r_transform(spec_xinv, arg)?;
    Ok((1.0 / rx - rinv).abs())
}
