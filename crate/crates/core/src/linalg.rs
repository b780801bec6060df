//! Small dense linear algebra: exact elimination over the rationals, integer
//! null spaces, and a few floating-point helpers.

use std::ops::Neg;

use nalgebra::DMatrix;
use num::bigint::BigInt;
use num::{BigRational, Integer, Num, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `p/q` as a [`Rational`].
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Scalar field used by the generic elimination routines. Floating point
/// treats anything below `1e-12` as zero; rationals are exact.
pub trait Field: Clone + Num + Neg<Output = Self> {
    fn negligible(&self) -> bool;
    fn magnitude(&self) -> f64;
}

impl Field for f64 {
    fn negligible(&self) -> bool {
        self.abs() < 1e-12
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Field for Rational {
    fn negligible(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        rat_to_f64(&self.abs())
    }
}

/// Reduced row echelon form. Returns the reduced rows (zero rows dropped) and
/// the pivot column of each.
pub fn rref<T: Field>(rows: &[Vec<T>], ncols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len())
            .filter(|&i| !a[i][c].negligible())
            .max_by(|&x, &y| a[x][c].magnitude().total_cmp(&a[y][c].magnitude()))
        else {
            continue;
        };
        a.swap(r, p);
        let inv = T::one() / a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].negligible() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let sub = f.clone() * a[r][j].clone();
                    a[i][j] = a[i][j].clone() - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank<T: Field>(rows: &[Vec<T>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : A x = 0}`, one vector per free column.
pub fn nullspace<T: Field>(rows: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); ncols];
            v[f] = T::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Clears denominators and common factors; the first nonzero entry is made
/// positive.
pub fn primitive_integer(v: &[Rational]) -> Vec<i64> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -1,
        _ => 1,
    };
    ints.iter()
        .map(|x| {
            let y: BigInt = if gcd.is_zero() { x.clone() } else { x / &gcd };
            (y * BigInt::from(sign)).to_i64().expect("null-space entry exceeds i64")
        })
        .collect()
}

pub fn to_rational_matrix(a: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    a.iter()
        .map(|row| row.iter().map(|&x| rat_int(x)).collect())
        .collect()
}

/// Integer basis of the null space of an integer matrix.
pub fn integer_nullspace(a: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    nullspace(&to_rational_matrix(a), ncols)
        .iter()
        .map(|v| primitive_integer(v))
        .collect()
}

/// Solution set of `A x = b`: `None` if inconsistent, otherwise a particular
/// solution plus a basis of directions.
pub fn solve_affine<T: Field>(
    a: &[Vec<T>],
    b: &[T],
    ncols: usize,
) -> Option<(Vec<T>, Vec<Vec<T>>)> {
    let aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![T::zero(); ncols];
    for (row, &pc) in r.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some((x, nullspace(a, ncols)))
}

pub fn dmatrix(rows: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

/// Numerical rank via singular values with relative threshold.
pub fn rank_f64(rows: &[Vec<f64>], ncols: usize, rel_tol: f64) -> usize {
    if rows.is_empty() || ncols == 0 {
        return 0;
    }
    let sv = dmatrix(rows, ncols).singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Minimum-norm least-squares solution of `A x = b`; returns `x` and the
/// residual `||A x - b||_inf`.
pub fn min_norm_lstsq(rows: &[Vec<f64>], ncols: usize, b: &[f64]) -> (Vec<f64>, f64) {
    let a = dmatrix(rows, ncols);
    let rhs = nalgebra::DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let x = svd
        .solve(&rhs, 1e-12 * smax.max(1.0))
        .expect("SVD computed with both U and V");
    let res = (&a * &x - rhs).amax();
    (x.iter().copied().collect(), res)
}

pub fn mat_vec_i64(a: &[Vec<i64>], v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(&x, y)| x as f64 * y).sum())
        .collect()
}

pub fn mat_vec_rat(a: &[Vec<i64>], v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Rational::zero(), |acc, (&x, y)| acc + rat_int(x) * y)
        })
        .collect()
}

/// `v^T A` for an integer matrix `A`.
pub fn vec_mat_i64(v: &[f64], a: &[Vec<i64>], ncols: usize) -> Vec<f64> {
    let mut out = vec![0.0; ncols];
    for (vi, row) in v.iter().zip(a) {
        for (o, &x) in out.iter_mut().zip(row) {
            *o += vi * x as f64;
        }
    }
    out
}

pub fn vec_mat_rat(v: &[Rational], a: &[Vec<i64>], ncols: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); ncols];
    for (vi, row) in v.iter().zip(a) {
        for (o, &x) in out.iter_mut().zip(row) {
            *o += vi * rat_int(x);
        }
    }
    out
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}
