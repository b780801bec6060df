//! Exact feasibility for `A x = b, x >= 0` by phase-one simplex over the
//! rationals with Bland's rule.

use num::{Signed, Zero};

use crate::linalg::Rational;

/// Returns a basic feasible point of `{x >= 0 : A x = b}` or `None` when the
/// polyhedron is empty.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let rows = a.len();
    if rows == 0 {
        return Some(vec![Rational::zero(); ncols]);
    }
    // Tableau columns: originals, one artificial per row, rhs.
    let width = ncols + rows + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r = vec![Rational::zero(); width];
        for j in 0..ncols {
            r[j] = if flip { -row[j].clone() } else { row[j].clone() };
        }
        r[ncols + i] = Rational::from_integer(1.into());
        r[rhs] = if flip { -bi.clone() } else { bi.clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (ncols..ncols + rows).collect();
    let is_art = |j: usize| j >= ncols && j < ncols + rows;

    loop {
        // Reduced costs for minimizing the sum of artificials.
        let entering = (0..rhs).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let cost = if is_art(j) { Rational::from_integer(1.into()) } else { Rational::zero() };
            let z = t
                .iter()
                .zip(&basis)
                .filter(|(_, &bj)| is_art(bj))
                .fold(Rational::zero(), |acc, (row, _)| acc + &row[j]);
            (cost - z).is_negative()
        });
        let Some(e) = entering else { break };

        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[e].is_positive() {
                let ratio = &row[rhs] / &row[e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else {
            // Unbounded direction cannot occur in phase one; objective is bounded below by 0.
            break;
        };
        pivot(&mut t, p, e);
        basis[p] = e;
    }

    let infeasibility = t
        .iter()
        .zip(&basis)
        .filter(|(_, &bj)| is_art(bj))
        .fold(Rational::zero(), |acc, (row, _)| acc + &row[rhs]);
    if !infeasibility.is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &bj) in t.iter().zip(&basis) {
        if bj < ncols {
            x[bj] = row[rhs].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], p: usize, e: usize) {
    let inv = Rational::from_integer(1.into()) / &t[p][e];
    for v in t[p].iter_mut() {
        *v *= &inv;
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != p && !row[e].is_zero() {
            let f = row[e].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
    }
}
