//! Exact solvers for the discrete precoding program
//! `min_{x ∈ B_{s1} × … × B_{sK}} x^H J x`.
//!
//! [`precode_exact`] enumerates the full product set and is the oracle;
//! [`precode_sphere`] is a branch-and-bound accelerator that must return the
//! same minimum. [`precode_semidiscrete`] handles the semi-discrete alphabet,
//! where the free imaginary parts reduce to a real linear solve per discrete
//! real-part assignment (a single convex solve when `L = 1`).

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::alphabet::{Alphabet, AlphabetKind, Symbol};

use super::{MonteCarloError, Result};

/// Hard cap on exhaustive-enumeration size.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

fn quadratic_form(j: &DMatrix<Complex64>, x: &DVector<Complex64>) -> f64 {
    (x.adjoint() * j * x)[(0, 0)].re
}

fn candidate_lists(a: &Alphabet, s: &[Symbol]) -> Result<Vec<Vec<Complex64>>> {
    if a.kind() == AlphabetKind::SemiDiscrete {
        return Err(MonteCarloError::UnsupportedAlphabet(
            "enumeration needs a finite alphabet; use precode_semidiscrete".into(),
        ));
    }
    s.iter().map(|&si| Ok(a.enumerate_points(si)?)).collect()
}

fn check_budget(sizes: impl Iterator<Item = usize>) -> Result<()> {
    let mut total: u64 = 1;
    for len in sizes {
        total = total.saturating_mul(len as u64);
        if total > ENUMERATION_BUDGET {
            return Err(MonteCarloError::BudgetExceeded {
                budget: ENUMERATION_BUDGET,
            });
        }
    }
    Ok(())
}

/// Exhaustive minimization over the candidate product set.
///
/// Returns the minimizing vector and `(1/k) x^H J x`. Ties resolve to the
/// lexicographically first candidate index vector.
pub fn precode_exact(
    j: &DMatrix<Complex64>,
    s: &[Symbol],
    a: &Alphabet,
) -> Result<(DVector<Complex64>, f64)> {
    let k = check_dims(j, s)?;
    let lists = candidate_lists(a, s)?;
    check_budget(lists.iter().map(|l| l.len()))?;

    let mut index = vec![0usize; k];
    let mut x = DVector::from_fn(k, |i, _| lists[i][0]);
    let mut best_x = x.clone();
    let mut best_e = quadratic_form(j, &x);
    'outer: loop {
        // Advance the odometer (last coordinate fastest = lexicographic order).
        let mut pos = k;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < lists[pos].len() {
                x[pos] = lists[pos][index[pos]];
                break;
            }
            index[pos] = 0;
            x[pos] = lists[pos][0];
        }
        let e = quadratic_form(j, &x);
        if e < best_e {
            best_e = e;
            best_x.copy_from(&x);
        }
    }
    Ok((best_x, best_e / k as f64))
}

/// Sphere decoder: depth-first branch-and-bound on the Cholesky factor
/// `J = U^H U`, with best-first child ordering and partial-norm pruning.
///
/// Exact: returns the same minimum energy as [`precode_exact`].
pub fn precode_sphere(
    j: &DMatrix<Complex64>,
    s: &[Symbol],
    a: &Alphabet,
) -> Result<(DVector<Complex64>, f64)> {
    precode_sphere_counted(j, s, a).map(|(x, e, _)| (x, e))
}

/// [`precode_sphere`] plus the number of tree nodes expanded, for pruning
/// diagnostics (the count is bounded by the brute-force candidate count).
pub fn precode_sphere_counted(
    j: &DMatrix<Complex64>,
    s: &[Symbol],
    a: &Alphabet,
) -> Result<(DVector<Complex64>, f64, u64)> {
    let k = check_dims(j, s)?;
    let lists = candidate_lists(a, s)?;
    let chol = Cholesky::new(j.clone()).ok_or_else(|| {
        MonteCarloError::NumericalFailure(
            "Cholesky factorization failed; J not positive definite".into(),
        )
    })?;
    let u = chol.l().adjoint(); // upper triangular, J = U^H U

    struct Search<'a> {
        u: DMatrix<Complex64>,
        lists: &'a [Vec<Complex64>],
        x: DVector<Complex64>,
        best_x: DVector<Complex64>,
        best_e: f64,
        nodes: u64,
    }

    impl Search<'_> {
        fn descend(&mut self, level: usize, acc: f64) {
            let k = self.lists.len();
            // Partial residual of row `level` from the already-fixed tail.
            let mut tail = Complex64::new(0.0, 0.0);
            for jj in level + 1..k {
                tail += self.u[(level, jj)] * self.x[jj];
            }
            let pivot = self.u[(level, level)];
            // Order candidates by their cost increment, stable in index.
            let mut order: Vec<(f64, usize)> = self.lists[level]
                .iter()
                .enumerate()
                .map(|(i, &c)| ((pivot * c + tail).norm_sqr(), i))
                .collect();
            order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            for (inc, i) in order {
                let cost = acc + inc;
                if cost >= self.best_e {
                    // Children are sorted, so nothing further can improve.
                    break;
                }
                self.nodes += 1;
                self.x[level] = self.lists[level][i];
                if level == 0 {
                    self.best_e = cost;
                    self.best_x.copy_from(&self.x);
                } else {
                    self.descend(level - 1, cost);
                }
            }
        }
    }

    let mut search = Search {
        u,
        lists: &lists,
        x: DVector::from_element(k, Complex64::new(0.0, 0.0)),
        best_x: DVector::from_fn(k, |i, _| lists[i][0]),
        best_e: f64::INFINITY,
        nodes: 0,
    };
    search.descend(k - 1, 0.0);

    // Report the energy through the same quadratic form as the brute-force
    // oracle so the two routes are bit-comparable.
    let e = quadratic_form(j, &search.best_x);
    Ok((search.best_x, e / k as f64, search.nodes))
}

/// Semi-discrete exact solver: enumerates the discrete real-part
/// assignments; for each, the optimal imaginary vector solves the real
/// normal equations of the 2k-dimensional embedding
/// `x^H J x = [r; y]^T [[A, -B], [B, A]] [r; y]` with `A = Re J`, `B = Im J`
/// (minimizer `A y = -B r`).
pub fn precode_semidiscrete(
    j: &DMatrix<Complex64>,
    s: &[Symbol],
    a: &Alphabet,
) -> Result<(DVector<Complex64>, f64)> {
    let k = check_dims(j, s)?;
    if a.kind() != AlphabetKind::SemiDiscrete {
        return Err(MonteCarloError::UnsupportedAlphabet(
            "precode_semidiscrete needs a semi-discrete alphabet".into(),
        ));
    }
    let lists: Vec<Vec<f64>> = s
        .iter()
        .map(|&si| Ok(a.real_points(si)?))
        .collect::<Result<_>>()?;
    check_budget(lists.iter().map(|l| l.len()))?;

    let re_j = j.map(|z| z.re);
    let im_j = j.map(|z| z.im);
    let chol: Cholesky<f64, Dyn> = Cholesky::new(re_j.clone())
        .ok_or_else(|| MonteCarloError::NumericalFailure("Re(J) not positive definite".into()))?;

    let mut index = vec![0usize; k];
    let mut best: Option<(DVector<f64>, DVector<f64>, f64)> = None;
    loop {
        let r = DVector::from_fn(k, |i, _| lists[i][index[i]]);
        let br = &im_j * &r;
        let y = chol.solve(&(-&br));
        // Minimized energy r^T A r + y^T (B r).
        let e = (r.transpose() * &re_j * &r)[(0, 0)] + y.dot(&br);
        if best.as_ref().is_none_or(|(_, _, be)| e < *be) {
            best = Some((r, y, e));
        }
        // Odometer, last coordinate fastest.
        let mut pos = k;
        loop {
            if pos == 0 {
                let (r, y, e) = best.unwrap();
                let x = DVector::from_fn(k, |i, _| Complex64::new(r[i], y[i]));
                return Ok((x, e / k as f64));
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < lists[pos].len() {
                break;
            }
            index[pos] = 0;
        }
    }
}

fn check_dims(j: &DMatrix<Complex64>, s: &[Symbol]) -> Result<usize> {
    let k = s.len();
    if k == 0 || j.nrows() != k || j.ncols() != k {
        return Err(MonteCarloError::Dimension(format!(
            "J is {}x{} but the data vector has length {k}",
            j.nrows(),
            j.ncols()
        )));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(k: usize) -> DMatrix<Complex64> {
        DMatrix::from_diagonal_element(k, k, Complex64::new(1.0, 0.0))
    }

    #[test]
    fn identity_channel_picks_smallest_points() {
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let j = identity(3);
        let s = [0u8, 1, 0];
        let (x, e) = precode_exact(&j, &s, &a).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
        assert_eq!(x[0], Complex64::new(1.0, 0.0));
        assert_eq!(x[1], Complex64::new(-1.0, 0.0));
        assert_eq!(x[2], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_by_two_hand_enumeration() {
        // J = [[2,1],[1,2]], s = (0,0), B0 = {1, -3}: candidates
        // (1,1)->6, (1,-3)->14, (-3,1)->14, (-3,-3)->54; best (1,1), e = 3.
        let j = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let (x, e) = precode_exact(&j, &[0, 0], &a).unwrap();
        assert!((e - 3.0).abs() < 1e-14);
        assert_eq!(x[0], Complex64::new(1.0, 0.0));
        assert_eq!(x[1], Complex64::new(1.0, 0.0));

        let (xs, es) = precode_sphere(&j, &[0, 0], &a).unwrap();
        assert_eq!(xs, x);
        assert!((es - e).abs() < 1e-14);
    }

    #[test]
    fn scaling_j_scales_energy() {
        let j = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.5, 0.2),
                Complex64::new(0.5, -0.2),
                Complex64::new(3.0, 0.0),
            ],
        );
        let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let (x1, e1) = precode_exact(&j, &[0, 1], &a).unwrap();
        let scaled = j.map(|z| z * 3.0);
        let (x3, e3) = precode_exact(&scaled, &[0, 1], &a).unwrap();
        assert_eq!(x1, x3);
        assert!((e3 - 3.0 * e1).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let a = Alphabet::new(AlphabetKind::QuadratureLattice, 8).unwrap();
        // 64 points per symbol, 64^5 > 2^24.
        let j = identity(5);
        let s = [0u8; 5];
        assert!(matches!(
            precode_exact(&j, &s, &a),
            Err(MonteCarloError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn semidiscrete_identity_has_zero_imaginary() {
        let a = Alphabet::new(AlphabetKind::SemiDiscrete, 1).unwrap();
        let j = identity(4);
        let s = [0u8, 1, 1, 0];
        let (x, e) = precode_semidiscrete(&j, &s, &a).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
        for i in 0..4 {
            assert!(x[i].im.abs() < 1e-14);
        }
    }

    #[test]
    fn semidiscrete_relaxation_lowers_energy() {
        let j = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.7, 0.4),
                Complex64::new(0.7, -0.4),
                Complex64::new(1.5, 0.0),
            ],
        );
        let sd = Alphabet::new(AlphabetKind::SemiDiscrete, 2).unwrap();
        let od = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let (_, e_sd) = precode_semidiscrete(&j, &[0, 1], &sd).unwrap();
        let (_, e_od) = precode_exact(&j, &[0, 1], &od).unwrap();
        assert!(e_sd <= e_od + 1e-12);
    }
}
