//! Relaxed signal-set families and their geometry.
//!
//! Every data symbol `s` is represented by a whole set `B_s` of constellation
//! points; the precoder is free to transmit any of them. The families here
//! share a single one-dimensional base construction: a list of point
//! magnitudes `m₁ < m₂ < …` (default `1, 3, 5, …`) with alternating signs,
//! giving `B₀ = {+m₁, −m₂, +m₃, …}` and `B₁ = −B₀`. Nested truncations keep
//! the smallest-magnitude points first, so enlarging `L` only adds points.
//!
//! * [`AlphabetKind::OneDimLattice`] — binary modulation on the real line,
//!   `L` points per symbol.
//! * [`AlphabetKind::QuadratureLattice`] — quaternary modulation, the 1-D
//!   construction applied independently per quadrature component (Gray
//!   mapping: first bit → real sign, second bit → imaginary sign), `L²`
//!   points per symbol.
//! * [`AlphabetKind::CheckerboardLattice`] — binary modulation in the complex
//!   plane with `B₁ = j·B₀`: the quadrature quadrant pair `(B_00, B_10)`
//!   rotated by 45° and scaled by `1/√2`, `L²` points per symbol.
//! * [`AlphabetKind::SemiDiscrete`] — real parts from the 1-D set, imaginary
//!   parts unconstrained (a continuum; convex per symbol when `L = 1`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlphabetError {
    #[error("invalid alphabet: {0}")]
    Invalid(String),
    #[error("symbol {symbol} is not a data symbol of this alphabet")]
    InvalidSymbol { symbol: Symbol },
    #[error("operation not supported for a semi-discrete alphabet: {0}")]
    UnsupportedKind(String),
    #[error("need at least two points to form Voronoi boundaries, got {got}")]
    TooFewPoints { got: usize },
}

pub type Result<T> = std::result::Result<T, AlphabetError>;

/// Data symbol, numbered `0..|S|`. Two-bit symbols are read as `re-bit,
/// im-bit`, so `0b10` is the symbol usually written "10".
pub type Symbol = u8;

/// Checkerboard points are quadrature points spun by 45° and shrunk by √2;
/// multiplying by `(1+j)/2` does both at once.
const CHECKERBOARD_ROTATION: Complex64 = Complex64::new(0.5, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum AlphabetKind {
    #[serde(rename = "1d")]
    #[value(name = "1d")]
    OneDimLattice,
    #[serde(rename = "quadrature")]
    #[value(name = "quadrature")]
    QuadratureLattice,
    #[serde(rename = "checkerboard")]
    #[value(name = "checkerboard")]
    CheckerboardLattice,
    #[serde(rename = "semidiscrete")]
    #[value(name = "semidiscrete")]
    SemiDiscrete,
}

impl AlphabetKind {
    /// Number of data symbols `|S|`.
    pub fn symbol_count(self) -> usize {
        match self {
            AlphabetKind::QuadratureLattice => 4,
            _ => 2,
        }
    }

    /// `log2 |S|`, the number of data bits per symbol.
    pub fn bits_per_symbol(self) -> u32 {
        match self {
            AlphabetKind::QuadratureLattice => 2,
            _ => 1,
        }
    }
}

/// A relaxed signal-set family: kind, truncation level and base magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphabetRepr", into = "AlphabetRepr")]
pub struct Alphabet {
    kind: AlphabetKind,
    /// Representation points per data symbol per real dimension.
    l: usize,
    /// Sorted magnitudes `m₁ < … < m_L`, all positive.
    magnitudes: Vec<f64>,
}

/// Converts magnitudes to the signed base points of `B₁` (unsorted,
/// magnitude order): the alternating construction `−m₁, +m₂, −m₃, …`.
pub fn signed_base_points(magnitudes: &[f64]) -> Vec<f64> {
    magnitudes
        .iter()
        .enumerate()
        .map(|(i, m)| if i % 2 == 0 { -m } else { *m })
        .collect()
}

/// Signed points of `B₁`, sorted increasing. This is the `c₁ < … < c_L` list
/// the fixed-point solvers consume.
pub fn sorted_signed_points(magnitudes: &[f64]) -> Vec<f64> {
    let mut pts = signed_base_points(magnitudes);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts
}

fn validate_magnitudes(magnitudes: &[f64]) -> Result<()> {
    if magnitudes.is_empty() {
        return Err(AlphabetError::Invalid("empty magnitude list".into()));
    }
    for w in magnitudes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(AlphabetError::Invalid(format!(
                "magnitudes must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if !(magnitudes[0] > 0.0) || magnitudes.iter().any(|m| !m.is_finite()) {
        return Err(AlphabetError::Invalid(
            "magnitudes must be finite and strictly positive".into(),
        ));
    }
    Ok(())
}

/// Default magnitude list `1, 3, …, 2L−1` of the truncated alternating
/// integer lattice.
pub fn default_magnitudes(l: usize) -> Vec<f64> {
    (1..=l).map(|i| (2 * i - 1) as f64).collect()
}

impl Alphabet {
    /// Alphabet with the default integer-lattice magnitudes `1, 3, …, 2L−1`.
    pub fn new(kind: AlphabetKind, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(AlphabetError::Invalid("L must be at least 1".into()));
        }
        Self::with_magnitudes(kind, default_magnitudes(l))
    }

    /// Alphabet with custom point magnitudes (strictly increasing, positive).
    pub fn with_magnitudes(kind: AlphabetKind, magnitudes: Vec<f64>) -> Result<Self> {
        validate_magnitudes(&magnitudes)?;
        Ok(Self {
            kind,
            l: magnitudes.len(),
            magnitudes,
        })
    }

    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    pub fn level_count(&self) -> usize {
        self.l
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// The data symbols `S` of this alphabet.
    pub fn symbols(&self) -> Vec<Symbol> {
        (0..self.kind.symbol_count() as Symbol).collect()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.kind.bits_per_symbol()
    }

    fn check_symbol(&self, s: Symbol) -> Result<()> {
        if (s as usize) < self.kind.symbol_count() {
            Ok(())
        } else {
            Err(AlphabetError::InvalidSymbol { symbol: s })
        }
    }

    /// Signed 1-D component points for sign bit `bit` (0 → `B₀` side,
    /// 1 → `B₁` side), in magnitude order.
    fn component_points(&self, bit: u8) -> Vec<f64> {
        let base = signed_base_points(&self.magnitudes);
        if bit == 0 {
            base.iter().map(|c| -c).collect()
        } else {
            base
        }
    }

    /// Same component points sorted increasing; used by the fixed-point
    /// solvers to decompose product alphabets per real dimension.
    pub(crate) fn component_points_sorted(&self, bit: u8) -> Vec<f64> {
        let mut pts = self.component_points(bit);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    /// All representation points of `B_s` for finite kinds, in a fixed
    /// deterministic order (component magnitude order).
    pub fn enumerate_points(&self, s: Symbol) -> Result<Vec<Complex64>> {
        self.check_symbol(s)?;
        match self.kind {
            AlphabetKind::OneDimLattice => Ok(self
                .component_points(s)
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect()),
            AlphabetKind::QuadratureLattice => {
                let re = self.component_points(s >> 1);
                let im = self.component_points(s & 1);
                let mut pts = Vec::with_capacity(re.len() * im.len());
                for &x in &re {
                    for &y in &im {
                        pts.push(Complex64::new(x, y));
                    }
                }
                Ok(pts)
            }
            AlphabetKind::CheckerboardLattice => {
                // Symbol 0 is the rotated quadrature quadrant B_00; symbol 1
                // is j times it, which is the rotated quadrant B_10.
                let re = self.component_points(s);
                let im = self.component_points(0);
                let mut pts = Vec::with_capacity(re.len() * im.len());
                for &x in &re {
                    for &y in &im {
                        pts.push(Complex64::new(x, y) * CHECKERBOARD_ROTATION);
                    }
                }
                Ok(pts)
            }
            AlphabetKind::SemiDiscrete => Err(AlphabetError::UnsupportedKind(
                "cannot enumerate a continuum; use the real-part projection".into(),
            )),
        }
    }

    /// Signed real-axis points of `B_s` for the kinds whose real parts are
    /// discrete (1-D and semi-discrete), sorted increasing.
    pub fn real_points(&self, s: Symbol) -> Result<Vec<f64>> {
        self.check_symbol(s)?;
        match self.kind {
            AlphabetKind::OneDimLattice | AlphabetKind::SemiDiscrete => {
                let mut pts = self.component_points(s);
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                Ok(pts)
            }
            _ => Err(AlphabetError::Invalid(
                "real_points applies to 1-D and semi-discrete kinds only".into(),
            )),
        }
    }

    /// The point of `B_s` closest to `y`.
    ///
    /// Boundary ties (a measure-zero event) resolve deterministically:
    /// smallest `|x|`, then positive real part, then positive imaginary part.
    /// For the semi-discrete kind the real part snaps to the nearest signed
    /// lattice point and the imaginary part of `y` is kept unchanged.
    pub fn nearest_point(&self, s: Symbol, y: Complex64) -> Result<Complex64> {
        self.check_symbol(s)?;
        if self.kind == AlphabetKind::SemiDiscrete {
            let re = nearest_in_list(&self.component_points(s), y.re);
            return Ok(Complex64::new(re, y.im));
        }
        let pts = self.enumerate_points(s)?;
        Ok(nearest_of(&pts, y))
    }
}

/// Nearest of an explicit point list under the same tie rule as
/// [`Alphabet::nearest_point`]; lets hot loops reuse a cached enumeration.
pub(crate) fn nearest_of(points: &[Complex64], y: Complex64) -> Complex64 {
    let mut best = points[0];
    let mut best_d2 = (y - best).norm_sqr();
    for &p in &points[1..] {
        let d2 = (y - p).norm_sqr();
        if prefer(p, d2, best, best_d2) {
            best = p;
            best_d2 = d2;
        }
    }
    best
}

/// Nearest point of a signed 1-D list with the same tie rule as
/// [`Alphabet::nearest_point`].
fn nearest_in_list(points: &[f64], y: f64) -> f64 {
    let mut best = points[0];
    let mut best_d2 = (y - best) * (y - best);
    for &p in &points[1..] {
        let d2 = (y - p) * (y - p);
        if prefer(
            Complex64::new(p, 0.0),
            d2,
            Complex64::new(best, 0.0),
            best_d2,
        ) {
            best = p;
            best_d2 = d2;
        }
    }
    best
}

/// Tie-aware "candidate beats incumbent" comparison on squared distance.
fn prefer(cand: Complex64, d2c: f64, best: Complex64, d2b: f64) -> bool {
    let eps = 1e-12 * (1.0 + d2b);
    if d2c < d2b - eps {
        return true;
    }
    if d2c > d2b + eps {
        return false;
    }
    let (nc, nb) = (cand.norm_sqr(), best.norm_sqr());
    let neps = 1e-12 * (1.0 + nb);
    if nc < nb - neps {
        return true;
    }
    if nc > nb + neps {
        return false;
    }
    if (cand.re > 0.0) != (best.re > 0.0) {
        return cand.re > 0.0;
    }
    if (cand.im > 0.0) != (best.im > 0.0) {
        return cand.im > 0.0;
    }
    false
}

/// Voronoi cell boundaries `vᵢ = (cᵢ + cᵢ₋₁)/2` of a sorted point list.
pub fn voronoi_boundaries(points: &[f64]) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(AlphabetError::TooFewPoints { got: points.len() });
    }
    for w in points.windows(2) {
        if !(w[0] < w[1]) {
            return Err(AlphabetError::Invalid(
                "points must be sorted strictly increasing".into(),
            ));
        }
    }
    Ok(points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
}

/// Prior over the data symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPrior {
    entries: Vec<(Symbol, f64)>,
}

impl DataPrior {
    pub fn new(entries: Vec<(Symbol, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(AlphabetError::Invalid("empty prior".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut total = 0.0;
        for &(s, p) in &entries {
            if !seen.insert(s) {
                return Err(AlphabetError::Invalid(format!(
                    "duplicate symbol {s} in prior"
                )));
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(AlphabetError::Invalid(format!(
                    "probability of symbol {s} must be nonnegative, got {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(AlphabetError::Invalid(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { entries })
    }

    /// Uniform prior over an alphabet's symbol set.
    pub fn uniform(alphabet: &Alphabet) -> Self {
        let symbols = alphabet.symbols();
        let p = 1.0 / symbols.len() as f64;
        Self {
            entries: symbols.into_iter().map(|s| (s, p)).collect(),
        }
    }

    pub fn entries(&self) -> &[(Symbol, f64)] {
        &self.entries
    }

    /// True when every symbol with positive mass belongs to `alphabet`.
    pub fn supports(&self, alphabet: &Alphabet) -> bool {
        let n = alphabet.kind().symbol_count();
        self.entries
            .iter()
            .all(|&(s, p)| p == 0.0 || (s as usize) < n)
    }

    /// Draws a symbol by inverse-CDF on a uniform variate in `[0, 1)`.
    pub fn sample(&self, u: f64) -> Symbol {
        let mut acc = 0.0;
        for &(s, p) in &self.entries {
            acc += p;
            if u < acc {
                return s;
            }
        }
        self.entries.last().unwrap().0
    }
}

/// JSON wire form: `{kind, L, points, symbols}` with `points` the sorted
/// signed base list of `B₁`.
#[derive(Serialize, Deserialize)]
struct AlphabetRepr {
    kind: AlphabetKind,
    #[serde(rename = "L")]
    l: usize,
    points: Vec<f64>,
    symbols: Vec<String>,
}

impl From<Alphabet> for AlphabetRepr {
    fn from(a: Alphabet) -> Self {
        let symbols = match a.kind {
            AlphabetKind::QuadratureLattice => {
                vec!["00".into(), "01".into(), "10".into(), "11".into()]
            }
            _ => vec!["0".into(), "1".into()],
        };
        AlphabetRepr {
            kind: a.kind,
            l: a.l,
            points: sorted_signed_points(&a.magnitudes),
            symbols,
        }
    }
}

impl TryFrom<AlphabetRepr> for Alphabet {
    type Error = AlphabetError;

    fn try_from(r: AlphabetRepr) -> Result<Self> {
        let mut magnitudes: Vec<f64> = r.points.iter().map(|p| p.abs()).collect();
        magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let a = Alphabet::with_magnitudes(r.kind, magnitudes)?;
        if a.l != r.l {
            return Err(AlphabetError::Invalid(format!(
                "L = {} does not match {} points",
                r.l, a.l
            )));
        }
        // The signed pattern must match the alternating convention.
        let canonical = sorted_signed_points(&a.magnitudes);
        let mut sorted_in = r.points.clone();
        sorted_in.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if canonical
            .iter()
            .zip(&sorted_in)
            .any(|(c, p)| (c - p).abs() > 1e-12 * (1.0 + c.abs()))
        {
            return Err(AlphabetError::Invalid(
                "points do not follow the alternating-sign convention".into(),
            ));
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn default_one_dim_sets() {
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let b0 = a.enumerate_points(0).unwrap();
        assert_eq!(b0, vec![c(1.0, 0.0), c(-3.0, 0.0)]);
        let b1 = a.enumerate_points(1).unwrap();
        assert_eq!(b1, vec![c(-1.0, 0.0), c(3.0, 0.0)]);

        let a1 = Alphabet::new(AlphabetKind::OneDimLattice, 1).unwrap();
        assert_eq!(a1.enumerate_points(1).unwrap(), vec![c(-1.0, 0.0)]);
    }

    #[test]
    fn quadrature_points_are_cartesian() {
        let a = Alphabet::new(AlphabetKind::QuadratureLattice, 2).unwrap();
        let pts = a.enumerate_points(0).unwrap();
        assert_eq!(pts.len(), 4);
        for (x, y) in [(1.0, 1.0), (1.0, -3.0), (-3.0, 1.0), (-3.0, -3.0)] {
            assert!(pts.contains(&c(x, y)));
        }
    }

    #[test]
    fn checkerboard_is_j_rotation_of_itself() {
        for l in [1, 2, 3] {
            let a = Alphabet::new(AlphabetKind::CheckerboardLattice, l).unwrap();
            let b0 = a.enumerate_points(0).unwrap();
            let b1 = a.enumerate_points(1).unwrap();
            let j = c(0.0, 1.0);
            for p in &b0 {
                let rotated = p * j;
                assert!(
                    b1.iter().any(|q| (q - rotated).norm() < 1e-12),
                    "j*{p} missing from B1 at L={l}"
                );
            }
        }
        // Hand values at L = 1: B0 = {j}, B1 = {-1}.
        let a = Alphabet::new(AlphabetKind::CheckerboardLattice, 1).unwrap();
        assert_eq!(a.enumerate_points(0).unwrap(), vec![c(0.0, 1.0)]);
        assert_eq!(a.enumerate_points(1).unwrap(), vec![c(-1.0, 0.0)]);
    }

    #[test]
    fn checkerboard_classes_are_rotated_quadrants() {
        // Spinning each checkerboard class back by 45 degrees and stretching
        // by sqrt(2) recovers the corresponding quadrature quadrant exactly.
        let l = 3;
        let cb = Alphabet::new(AlphabetKind::CheckerboardLattice, l).unwrap();
        let quad = Alphabet::new(AlphabetKind::QuadratureLattice, l).unwrap();
        let undo = CHECKERBOARD_ROTATION.inv();
        for (cb_sym, quad_sym) in [(0u8, 0b00u8), (1u8, 0b10u8)] {
            let back: Vec<Complex64> = cb
                .enumerate_points(cb_sym)
                .unwrap()
                .iter()
                .map(|p| p * undo)
                .collect();
            let target = quad.enumerate_points(quad_sym).unwrap();
            assert_eq!(back.len(), target.len());
            for p in &back {
                assert!(
                    target.iter().any(|q| (q - p).norm() < 1e-12),
                    "point {p} not in quadrant {quad_sym:02b}"
                );
            }
        }
    }

    #[test]
    fn sets_are_disjoint() {
        for kind in [
            AlphabetKind::OneDimLattice,
            AlphabetKind::QuadratureLattice,
            AlphabetKind::CheckerboardLattice,
        ] {
            for l in [1, 2, 3] {
                let a = Alphabet::new(kind, l).unwrap();
                let symbols = a.symbols();
                for (i, &s) in symbols.iter().enumerate() {
                    for &t in &symbols[i + 1..] {
                        let ps = a.enumerate_points(s).unwrap();
                        let pt = a.enumerate_points(t).unwrap();
                        for p in &ps {
                            assert!(
                                pt.iter().all(|q| (p - q).norm() > 1e-9),
                                "{kind:?} L={l}: symbol {s} and {t} share {p}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn voronoi_midpoints() {
        assert_eq!(voronoi_boundaries(&[-3.0, 1.0]).unwrap(), vec![-1.0]);
        assert_eq!(
            voronoi_boundaries(&[-7.0, -3.0, 1.0, 5.0]).unwrap(),
            vec![-5.0, -1.0, 3.0]
        );
        assert!(matches!(
            voronoi_boundaries(&[1.0]),
            Err(AlphabetError::TooFewPoints { got: 1 })
        ));
    }

    #[test]
    fn nearest_point_cases() {
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        // B0 = {1, -3}; interior of the cell of +1.
        assert_eq!(a.nearest_point(0, c(0.2, 0.0)).unwrap(), c(1.0, 0.0));
        // Exactly on the boundary: smallest-|x| rule picks +1.
        assert_eq!(a.nearest_point(0, c(-1.0, 0.0)).unwrap(), c(1.0, 0.0));

        let sd = Alphabet::new(AlphabetKind::SemiDiscrete, 1).unwrap();
        let got = sd.nearest_point(1, c(0.7, -2.0)).unwrap();
        assert_eq!(got, c(-1.0, -2.0));
    }

    #[test]
    fn semidiscrete_cannot_enumerate() {
        let sd = Alphabet::new(AlphabetKind::SemiDiscrete, 2).unwrap();
        assert!(matches!(
            sd.enumerate_points(0),
            Err(AlphabetError::UnsupportedKind(_))
        ));
    }

    #[test]
    fn prior_validation() {
        assert!(DataPrior::new(vec![(0, 0.5), (1, 0.5)]).is_ok());
        assert!(DataPrior::new(vec![(0, 0.5), (1, 0.6)]).is_err());
        assert!(DataPrior::new(vec![(0, -0.1), (1, 1.1)]).is_err());
        assert!(DataPrior::new(vec![(0, 0.5), (0, 0.5)]).is_err());
    }

    #[test]
    fn alphabet_json_roundtrip() {
        let a = Alphabet::new(AlphabetKind::QuadratureLattice, 3).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"quadrature\""));
        assert!(json.contains("\"L\":3"));
        let back: Alphabet = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn custom_magnitudes_validation() {
        assert!(Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, vec![1.0, 2.5]).is_ok());
        assert!(Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, vec![2.0, 1.0]).is_err());
        assert!(Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, vec![0.0, 1.0]).is_err());
        assert!(Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, vec![]).is_err());
    }
}
