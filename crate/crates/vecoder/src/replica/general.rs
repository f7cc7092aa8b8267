//! General fixed-point solver for arbitrary spectra and alphabets.
//!
//! The macroscopic equations integrate the scaled argmin
//! `x̂ = argmin_{x ∈ B_s} |γz − x|`, `γ = sqrt(qR'(−b)/(2R²(−b)))`, against
//! the complex Gaussian measure (two independent unit-variance real
//! coordinates):
//!
//! ```text
//! q = E_s E_z |x̂|²            b = E_s E_z Re{x̂ z̄} / sqrt(2 q R'(-b))
//! ```
//!
//! Every supported alphabet factorizes per real dimension (the checkerboard
//! after a 45° change of frame, under which the Gaussian measure is
//! invariant), and within a dimension `x̂` is constant on each Voronoi cell
//! of the scaled point list. The default route therefore integrates each
//! cell in closed form — the cell mass `Q(a) − Q(a')` for the `q` integrand
//! and the density difference `φ(a) − φ(a')` for the `b` integrand — which
//! is exact to machine precision.
//!
//! [`solve_general_gh`] instead applies a plain tensor Gauss-Hermite rule of
//! order `cfg.quad_order` to the same integrands. On these piecewise-constant
//! integrands the rule converges too slowly to pin fixed points beyond about
//! three digits (the discontinuities defeat its polynomial exactness), so it
//! serves as an independent sanity route rather than the default.

use num_complex::Complex64;

use crate::alphabet::{self, Alphabet, AlphabetKind, DataPrior, Symbol};
use crate::rmt::{self, RTransformSpec};

use super::{
    energy_from_qb, gaussian_pdf, gaussian_q, FixedPointConfig, GaussHermite, ReplicaError,
    ReplicaSolution, Result,
};

/// First and second argmin moments of one real dimension:
/// `E[x̂(γz)²]` and `E[x̂(γz) z]` for a sorted signed point list.
fn cell_moments(points: &[f64], gamma: f64) -> (f64, f64) {
    if points.len() == 1 {
        return (points[0] * points[0], 0.0);
    }
    // Scaled Voronoi boundaries split the z-axis into cells on which the
    // argmin is constant; the Gaussian integrals over each cell are exact.
    let mut e_x2 = 0.0;
    let mut e_xz = 0.0;
    let mut upper_tail = 1.0; // Q(a_i) for the current lower boundary
    let mut density = 0.0; // φ(a_i)
    for (i, &c) in points.iter().enumerate() {
        let (next_tail, next_density) = if i + 1 < points.len() {
            let boundary = 0.5 * (c + points[i + 1]) / gamma;
            (gaussian_q(boundary), gaussian_pdf(boundary))
        } else {
            (0.0, 0.0)
        };
        e_x2 += c * c * (upper_tail - next_tail);
        e_xz += c * (density - next_density);
        upper_tail = next_tail;
        density = next_density;
    }
    (e_x2, e_xz)
}

/// Per-symbol integration layout: which real dimensions exist, their point
/// lists, and the frame factors mapping component moments back to the
/// complex-plane integrands.
enum SymbolFrame {
    /// Real alphabet: single dimension, imaginary coordinate integrates out.
    Real { points: Vec<f64> },
    /// Product alphabet, possibly in a rotated frame: `q` contributions are
    /// scaled by `q_scale`, `b` contributions by `b_scale`, and the argmin
    /// scale by `gamma_mult`.
    Product {
        re: Vec<f64>,
        im: Vec<f64>,
        q_scale: f64,
        b_scale: f64,
        gamma_mult: f64,
    },
    /// Discrete real parts plus a free imaginary part that contributes
    /// `γ²` to `q` and `γ` to the `b` numerator analytically.
    SemiDiscrete { points: Vec<f64> },
}

fn symbol_frame(a: &Alphabet, s: Symbol) -> Result<SymbolFrame> {
    Ok(match a.kind() {
        AlphabetKind::OneDimLattice => SymbolFrame::Real {
            points: a.real_points(s)?,
        },
        AlphabetKind::QuadratureLattice => SymbolFrame::Product {
            re: a.component_points_sorted(s >> 1),
            im: a.component_points_sorted(s & 1),
            q_scale: 1.0,
            b_scale: 1.0,
            gamma_mult: 1.0,
        },
        // Checkerboard points are a quadrature quadrant through the map
        // w ↦ w(1+j)/2. In the frame z' = z e^{-jπ/4} the argmin decouples
        // with scale γ√2, |x̂|² = |ŵ|²/2 and Re{x̂ z̄} = Re{ŵ z̄'}/√2.
        AlphabetKind::CheckerboardLattice => SymbolFrame::Product {
            re: a.component_points_sorted(s),
            im: a.component_points_sorted(0),
            q_scale: 0.5,
            b_scale: std::f64::consts::FRAC_1_SQRT_2,
            gamma_mult: std::f64::consts::SQRT_2,
        },
        AlphabetKind::SemiDiscrete => SymbolFrame::SemiDiscrete {
            points: a.real_points(s)?,
        },
    })
}

impl SymbolFrame {
    /// `(E|x̂|², E Re{x̂ z̄})` at argmin scale `gamma`.
    fn contributions(&self, gamma: f64) -> (f64, f64) {
        match self {
            SymbolFrame::Real { points } => cell_moments(points, gamma),
            SymbolFrame::Product {
                re,
                im,
                q_scale,
                b_scale,
                gamma_mult,
            } => {
                let g = gamma * gamma_mult;
                let (qr, br) = cell_moments(re, g);
                let (qi, bi) = cell_moments(im, g);
                (q_scale * (qr + qi), b_scale * (br + bi))
            }
            SymbolFrame::SemiDiscrete { points } => {
                let (q1, b1) = cell_moments(points, gamma);
                (gamma * gamma + q1, gamma + b1)
            }
        }
    }

    fn is_singleton(&self) -> bool {
        match self {
            SymbolFrame::Real { points } => points.len() == 1,
            SymbolFrame::Product { re, im, .. } => re.len() == 1 && im.len() == 1,
            SymbolFrame::SemiDiscrete { .. } => false,
        }
    }

    /// Squared magnitude of the single representation point.
    fn singleton_energy(&self) -> f64 {
        match self {
            SymbolFrame::Real { points } => points[0] * points[0],
            SymbolFrame::Product {
                re, im, q_scale, ..
            } => q_scale * (re[0] * re[0] + im[0] * im[0]),
            SymbolFrame::SemiDiscrete { .. } => unreachable!(),
        }
    }
}

/// Solves the coupled `(q, b)` equations for any spectrum and alphabet by
/// damped Picard iteration; the default exact-cell integration route.
pub fn solve_general(
    spec: &RTransformSpec,
    a: &Alphabet,
    prior: &DataPrior,
    cfg: &FixedPointConfig,
) -> Result<ReplicaSolution> {
    solve_general_warm(spec, a, prior, cfg, None)
}

pub(crate) fn solve_general_warm(
    spec: &RTransformSpec,
    a: &Alphabet,
    prior: &DataPrior,
    cfg: &FixedPointConfig,
    warm: Option<(f64, f64)>,
) -> Result<ReplicaSolution> {
    let weighted = weighted_frames(a, prior, cfg)?;
    iterate(spec, a, cfg, warm, &weighted, |_, frame, gamma| {
        frame.contributions(gamma)
    })
}

/// Same fixed point through a plain tensor Gauss-Hermite rule of order
/// `cfg.quad_order` per real dimension, with the argmin taken by
/// [`Alphabet::nearest_point`] at every node. Validation route; expect no
/// better than ~1e-3 relative accuracy on lattice alphabets.
pub fn solve_general_gh(
    spec: &RTransformSpec,
    a: &Alphabet,
    prior: &DataPrior,
    cfg: &FixedPointConfig,
) -> Result<ReplicaSolution> {
    let weighted = weighted_frames(a, prior, cfg)?;
    let rule = GaussHermite::new(cfg.quad_order);

    // Cache the per-symbol enumerations once, indexed like `weighted`; the
    // node loop only scans.
    let mut cached: Vec<Vec<Complex64>> = Vec::with_capacity(weighted.len());
    for &(s, _, ref frame) in &weighted {
        cached.push(match frame {
            SymbolFrame::Product { .. } => a.enumerate_points(s)?,
            _ => Vec::new(),
        });
    }

    iterate(spec, a, cfg, None, &weighted, move |idx, frame, gamma| {
        match frame {
            SymbolFrame::Real { points } => {
                // 1-D rule; the imaginary coordinate integrates out exactly.
                let mut q_acc = 0.0;
                let mut b_acc = 0.0;
                for (&z, &w) in rule.nodes().iter().zip(rule.weights()) {
                    let x = nearest_real(points, gamma * z);
                    q_acc += w * x * x;
                    b_acc += w * x * z;
                }
                (q_acc, b_acc)
            }
            SymbolFrame::SemiDiscrete { points } => {
                let mut q_acc = 0.0;
                let mut b_acc = 0.0;
                for (&z, &w) in rule.nodes().iter().zip(rule.weights()) {
                    let x = nearest_real(points, gamma * z);
                    q_acc += w * x * x;
                    b_acc += w * x * z;
                }
                (gamma * gamma + q_acc, gamma + b_acc)
            }
            SymbolFrame::Product { .. } => {
                // 2-D tensor rule over the full complex argmin.
                let pts = &cached[idx];
                let mut q_acc = 0.0;
                let mut b_acc = 0.0;
                for (&zr, &wr) in rule.nodes().iter().zip(rule.weights()) {
                    for (&zi, &wi) in rule.nodes().iter().zip(rule.weights()) {
                        let z = Complex64::new(zr, zi);
                        let x = alphabet::nearest_of(pts, gamma * z);
                        let w = wr * wi;
                        q_acc += w * x.norm_sqr();
                        b_acc += w * (x * z.conj()).re;
                    }
                }
                (q_acc, b_acc)
            }
        }
    })
}

fn nearest_real(points: &[f64], y: f64) -> f64 {
    let mut best = points[0];
    let mut best_d = (y - best).abs();
    for &p in &points[1..] {
        let d = (y - p).abs();
        let eps = 1e-12 * (1.0 + best_d);
        let tie_break = (d - best_d).abs() <= eps && p.abs() < best.abs();
        if d < best_d - eps || tie_break {
            best = p;
            best_d = d;
        }
    }
    best
}

fn weighted_frames(
    a: &Alphabet,
    prior: &DataPrior,
    cfg: &FixedPointConfig,
) -> Result<Vec<(Symbol, f64, SymbolFrame)>> {
    cfg.validate()?;
    if !prior.supports(a) {
        return Err(ReplicaError::Config(
            "prior assigns mass to symbols outside the alphabet".into(),
        ));
    }
    prior
        .entries()
        .iter()
        .filter(|&&(_, p)| p > 0.0)
        .map(|&(s, p)| Ok((s, p, symbol_frame(a, s)?)))
        .collect()
}

fn iterate(
    spec: &RTransformSpec,
    a: &Alphabet,
    cfg: &FixedPointConfig,
    warm: Option<(f64, f64)>,
    weighted: &[(Symbol, f64, SymbolFrame)],
    mut contribs: impl FnMut(usize, &SymbolFrame, f64) -> (f64, f64),
) -> Result<ReplicaSolution> {
    let alpha = spec.alpha();
    let bits = a.bits_per_symbol();

    // All-singleton alphabets have a constant argmin: b = 0 exactly and
    // E_s = q R(0), finite only when the mean eigenvalue exists.
    if weighted.iter().all(|(_, _, f)| f.is_singleton()) {
        let q: f64 = weighted
            .iter()
            .map(|(_, p, f)| p * f.singleton_energy())
            .sum();
        return Ok(match rmt::r_transform(spec, 0.0) {
            Ok(r0) => ReplicaSolution::converged(alpha, q, 0.0, p_of(spec, 0.0), q * r0, bits, 0),
            Err(_) => ReplicaSolution::diverged(alpha, q, 0.0, 0),
        });
    }

    let base_q = weighted
        .iter()
        .map(|(_, p, f)| {
            p * match f {
                SymbolFrame::Real { points } | SymbolFrame::SemiDiscrete { points } => {
                    points.iter().fold(f64::INFINITY, |m, c| m.min(c * c))
                }
                SymbolFrame::Product {
                    re, im, q_scale, ..
                } => {
                    let mr = re.iter().fold(f64::INFINITY, |m, c| m.min(c * c));
                    let mi = im.iter().fold(f64::INFINITY, |m, c| m.min(c * c));
                    q_scale * (mr + mi)
                }
            }
        })
        .sum::<f64>();
    let (mut q, mut b) = warm.unwrap_or((cfg.init_q * base_q, cfg.init_b));
    let d = cfg.damping;
    let mut residual = f64::INFINITY;

    for iter in 1..=cfg.max_iter {
        let r = rmt::r_transform(spec, -b)?;
        let rp = rmt::r_prime(spec, -b)?;
        let gamma = (q * rp / (2.0 * r * r)).sqrt();

        let mut q_rhs = 0.0;
        let mut b_num = 0.0;
        for (idx, (_, p, frame)) in weighted.iter().enumerate() {
            let (cq, cb) = contribs(idx, frame, gamma);
            q_rhs += p * cq;
            b_num += p * cb;
        }
        let b_rhs = b_num / (2.0 * q * rp).sqrt();

        if !q_rhs.is_finite() || !b_rhs.is_finite() {
            return Ok(ReplicaSolution::diverged(alpha, q, b, iter));
        }

        let dq = (q_rhs - q).abs();
        let db = (b_rhs - b).abs();
        residual = (dq / q.abs().max(1.0)).max(db / b.abs().max(1.0));
        if dq <= cfg.tol * q.abs().max(1.0) && db <= cfg.tol * b.abs().max(1.0) {
            // A collapsing b is a genuine solution only where the spectrum
            // has a finite mean; otherwise the fixed point has vanished.
            if b_rhs < 1e-9 && rmt::r_transform(spec, 0.0).is_err() {
                return Ok(ReplicaSolution::diverged(alpha, q_rhs, b_rhs, iter));
            }
            let es = energy_from_qb(q_rhs, b_rhs.max(0.0), spec, cfg.fd_step)?;
            if es > cfg.divergence_cap || !es.is_finite() {
                return Ok(ReplicaSolution::diverged(alpha, q_rhs, b_rhs, iter));
            }
            return Ok(ReplicaSolution::converged(
                alpha,
                q_rhs,
                b_rhs,
                p_of(spec, b_rhs),
                es,
                bits,
                iter,
            ));
        }

        q = (1.0 - d) * q + d * q_rhs;
        b = (1.0 - d) * b + d * b_rhs;

        if q > 1e12 || b > 1e12 {
            return Ok(ReplicaSolution::diverged(alpha, q, b, iter));
        }
        if b < 1e-12 && rmt::r_transform(spec, 0.0).is_err() {
            return Ok(ReplicaSolution::diverged(alpha, q, b, iter));
        }
        b = b.max(1e-300);
    }
    Err(ReplicaError::MaxIterations {
        iterations: cfg.max_iter,
        residual,
    })
}

/// The substituted parameter `p = sqrt((1-α)² + 4αb)` where it is defined
/// (inverse-Gramian channel).
fn p_of(spec: &RTransformSpec, b: f64) -> Option<f64> {
    match spec {
        RTransformSpec::InverseGramian { alpha } => {
            Some(((1.0 - alpha) * (1.0 - alpha) + 4.0 * alpha * b).sqrt())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::default_magnitudes;
    use crate::replica::{solve_1d, solve_quadrature, solve_semidiscrete, solve_square_1d};

    fn cfg() -> FixedPointConfig {
        FixedPointConfig::default()
    }

    fn uniform(a: &Alphabet) -> DataPrior {
        DataPrior::uniform(a)
    }

    fn ig(alpha: f64) -> RTransformSpec {
        RTransformSpec::inverse_gramian(alpha).unwrap()
    }

    #[test]
    fn cell_moments_match_quadrature_oracle() {
        // Brute-force Riemann integration as the oracle.
        let points = [-5.0, -1.0, 3.0];
        let gamma = 0.8;
        let (e_x2, e_xz) = cell_moments(&points, gamma);
        let n = 4_000_000;
        let (mut o_x2, mut o_xz) = (0.0, 0.0);
        for i in 0..n {
            let z = -12.0 + 24.0 * (i as f64 + 0.5) / n as f64;
            let x = nearest_real(&points, gamma * z);
            let w = gaussian_pdf(z) * 24.0 / n as f64;
            o_x2 += w * x * x;
            o_xz += w * x * z;
        }
        assert!((e_x2 - o_x2).abs() < 1e-5, "{e_x2} vs {o_x2}");
        assert!((e_xz - o_xz).abs() < 1e-5, "{e_xz} vs {o_xz}");
    }

    #[test]
    fn general_matches_one_dim_closed_form() {
        for &alpha in &[0.25, 0.5, 1.0] {
            for l in [2usize, 3] {
                let mags = default_magnitudes(l);
                let a = Alphabet::new(AlphabetKind::OneDimLattice, l).unwrap();
                let gen = solve_general(&ig(alpha), &a, &uniform(&a), &cfg()).unwrap();
                let closed = solve_1d(alpha, &mags, &cfg()).unwrap();
                let (g, c) = (gen.es.unwrap(), closed.es.unwrap());
                assert!(
                    ((g - c) / c).abs() < 1e-8,
                    "alpha={alpha} L={l}: {g} vs {c}"
                );
            }
        }
    }

    #[test]
    fn general_matches_square_channel() {
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let gen = solve_general(&ig(1.0), &a, &uniform(&a), &cfg()).unwrap();
        let sq = solve_square_1d(&default_magnitudes(2), &cfg()).unwrap();
        let rel = (gen.es.unwrap() - sq.es.unwrap()).abs() / sq.es.unwrap();
        assert!(rel < 1e-8, "rel = {rel}");
    }

    #[test]
    fn general_matches_quadrature_closed_form() {
        let a = Alphabet::new(AlphabetKind::QuadratureLattice, 2).unwrap();
        let gen = solve_general(&ig(1.0), &a, &uniform(&a), &cfg()).unwrap();
        let closed = solve_quadrature(1.0, &default_magnitudes(2), &cfg()).unwrap();
        let rel = (gen.es.unwrap() - closed.es.unwrap()).abs() / closed.es.unwrap();
        assert!(rel < 1e-8, "rel = {rel}");
    }

    #[test]
    fn general_matches_semidiscrete_closed_form() {
        let a = Alphabet::new(AlphabetKind::SemiDiscrete, 2).unwrap();
        let gen = solve_general(&ig(0.5), &a, &uniform(&a), &cfg()).unwrap();
        let closed = solve_semidiscrete(0.5, &default_magnitudes(2), &cfg()).unwrap();
        let rel = (gen.es.unwrap() - closed.es.unwrap()).abs() / closed.es.unwrap();
        assert!(rel < 1e-8, "rel = {rel}");
    }

    #[test]
    fn checkerboard_bit_energy_equals_quadrature() {
        // Rotation invariance of the Gaussian kernel: exact at every L.
        for &alpha in &[0.5, 1.5] {
            let l = 6;
            let a = Alphabet::new(AlphabetKind::CheckerboardLattice, l).unwrap();
            let cb = solve_general(&ig(alpha), &a, &uniform(&a), &cfg()).unwrap();
            let quad = solve_quadrature(alpha, &default_magnitudes(l), &cfg()).unwrap();
            let (ecb, eq) = (cb.eb.unwrap(), quad.eb.unwrap());
            assert!(
                ((ecb - eq) / eq).abs() < 1e-6,
                "alpha={alpha}: {ecb} vs {eq}"
            );
            let es_rel = (cb.es.unwrap() - quad.es.unwrap() / 2.0) / cb.es.unwrap();
            assert!(es_rel.abs() < 1e-6);
        }
    }

    #[test]
    fn singleton_alphabet_analytic_path() {
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 1).unwrap();
        let sol = solve_general(&ig(0.5), &a, &uniform(&a), &cfg()).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.q, 1.0);
        assert_eq!(sol.b, 0.0);
        assert!((sol.es.unwrap() - 2.0).abs() < 1e-12);

        let sol = solve_general(&ig(1.0), &a, &uniform(&a), &cfg()).unwrap();
        assert!(sol.diverged, "no-precoding square channel must diverge");
    }

    #[test]
    fn scaling_law_on_the_general_route() {
        let alpha = 0.5;
        let base = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let scaled =
            Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, vec![2.0, 6.0]).unwrap();
        let e1 = solve_general(&ig(alpha), &base, &uniform(&base), &cfg())
            .unwrap()
            .es
            .unwrap();
        let e4 = solve_general(&ig(alpha), &scaled, &uniform(&scaled), &cfg())
            .unwrap()
            .es
            .unwrap();
        assert!(((e4 - 4.0 * e1) / (4.0 * e1)).abs() < 1e-6);
    }

    #[test]
    fn gh_route_agrees_loosely() {
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let mut c = cfg();
        c.quad_order = 64;
        c.tol = 1e-9;
        let exact = solve_general(&ig(0.5), &a, &uniform(&a), &c).unwrap();
        let gh = solve_general_gh(&ig(0.5), &a, &uniform(&a), &c).unwrap();
        let rel = (exact.es.unwrap() - gh.es.unwrap()).abs() / exact.es.unwrap();
        assert!(rel < 2e-2, "rel = {rel}");
    }

    #[test]
    fn gh_route_2d_agrees_loosely() {
        let a = Alphabet::new(AlphabetKind::QuadratureLattice, 2).unwrap();
        let mut c = cfg();
        c.quad_order = 48;
        c.tol = 1e-8;
        let exact = solve_general(&ig(1.0), &a, &uniform(&a), &c).unwrap();
        let gh = solve_general_gh(&ig(1.0), &a, &uniform(&a), &c).unwrap();
        let rel = (exact.es.unwrap() - gh.es.unwrap()).abs() / exact.es.unwrap();
        assert!(rel < 5e-2, "rel = {rel}");
    }

    #[test]
    fn tabulated_point_mass_spectrum() {
        // Point mass at c: R ≡ c, R' ≡ 0... the argmin scale collapses, so
        // use a two-atom spectrum to keep R' positive.
        let spec = RTransformSpec::tabulated(vec![0.5, 1.5]).unwrap();
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let sol = solve_general(&spec, &a, &uniform(&a), &cfg()).unwrap();
        assert!(sol.converged);
        assert!(sol.es.unwrap() > 0.0);
        assert!(sol.p.is_none());
    }
}
