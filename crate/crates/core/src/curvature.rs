//! Ricci curvature of diagonal metrics, Ricci-diagonality, and the soliton
//! criterion `U a = -2 beta 1`.

use std::collections::BTreeMap;

use num::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{
    rescaled_constants, root_system, BracketSpec, DiagonalMetric, RootSystem, StructureVector,
    Triple,
};
use crate::error::{Error, Result};
use crate::linalg::{
    self, inf_norm, mat_vec_i64, mat_vec_rat, rat, rat_to_f64, vec_mat_i64, vec_mat_rat, Field,
    Rational,
};
use crate::lp;

pub const DEFAULT_SOLITON_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciData {
    /// Ricci form in the orthonormalized basis.
    pub ricci_form: Vec<Vec<f64>>,
    pub ricci_vector: Vec<f64>,
}

impl RicciData {
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.ricci_form.len();
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.ricci_form[i][j].abs());
                }
            }
        }
        m
    }
}

fn frobenius(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>())
        .sum()
}

/// Full Ricci form from `ric(x,y) = -1/2 <ad_x, ad_y> + 1/4 <J_x, J_y>` with
/// explicit operator matrices over the orthonormalized basis.
pub fn ricci_form_oracle(spec: &BracketSpec, metric: &DiagonalMetric) -> Result<RicciData> {
    let n = spec.dim();
    let consts = rescaled_constants(spec, metric)?;
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    for (e, v) in spec.entries().iter().zip(&consts) {
        let Triple { j, k, l } = e.triple;
        c[j][k][l] = *v;
        c[k][j][l] = -*v;
    }
    // ad_a: column i is [e_a, e_i]
    let ad: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|a| (0..n).map(|k| (0..n).map(|i| c[a][i][k]).collect()).collect())
        .collect();
    // J_a: <J_a y, z> = <e_a, [y, z]>
    let jm: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|a| (0..n).map(|z| (0..n).map(|y| c[y][z][a]).collect()).collect())
        .collect();
    let mut form = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let v = -0.5 * frobenius(&ad[a], &ad[b]) + 0.25 * frobenius(&jm[a], &jm[b]);
            form[a][b] = v;
            form[b][a] = v;
        }
    }
    let ricci_vector = (0..n).map(|i| form[i][i]).collect();
    Ok(RicciData { ricci_form: form, ricci_vector })
}

/// `-1/2 a^T Y`.
pub fn ricci_vector(roots: &RootSystem, a: &[f64]) -> Vec<f64> {
    vec_mat_i64(a, roots.root_matrix(), roots.n())
        .into_iter()
        .map(|v| -0.5 * v)
        .collect()
}

pub fn ricci_vector_exact(roots: &RootSystem, a: &[Rational]) -> Vec<Rational> {
    let half = rat(-1, 2);
    vec_mat_rat(a, roots.root_matrix(), roots.n())
        .into_iter()
        .map(|v| v * &half)
        .collect()
}

pub fn is_ricci_diagonal(spec: &BracketSpec, metric: &DiagonalMetric, tol: f64) -> Result<bool> {
    Ok(ricci_form_oracle(spec, metric)?.max_off_diagonal() < tol)
}

/// A monomial in the variables `sqrt(q_i)` with a nonvanishing coefficient in
/// an off-diagonal Ricci entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffDiagonalWitness {
    /// 0-based basis pair `a < b`.
    pub pair: (usize, usize),
    /// Exponents of `sqrt(q_i)`.
    pub exponents: Vec<i64>,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableDiagonality {
    pub stable: bool,
    pub witness: Option<OffDiagonalWitness>,
}

type MonomialTable<T> = BTreeMap<(usize, usize), BTreeMap<Vec<i64>, T>>;

fn off_diagonal_monomials<T: Field>(roots: &RootSystem, alphas: &[T]) -> MonomialTable<T> {
    let y = roots.root_matrix();
    let triples = roots.triples();
    let half = T::one() / (T::one() + T::one());
    let mut table: MonomialTable<T> = BTreeMap::new();
    let mut add = |pair: (usize, usize), p: usize, r: usize, coeff: T| {
        let exps: Vec<i64> = y[p].iter().zip(&y[r]).map(|(a, b)| -(a + b)).collect();
        let slot = table.entry(pair).or_default().entry(exps).or_insert_with(T::zero);
        *slot = slot.clone() + coeff;
    };
    for (p, tp) in triples.iter().enumerate() {
        for (r, tr) in triples.iter().enumerate() {
            if p == r {
                continue;
            }
            let prod = alphas[p].clone() * alphas[r].clone();
            // -1/2 <ad_a, ad_b>: both brackets land on the same l through a shared slot.
            if tp.l == tr.l {
                let roles_p = [(tp.j, tp.k, true), (tp.k, tp.j, false)];
                let roles_r = [(tr.j, tr.k, true), (tr.k, tr.j, false)];
                for &(ap, ip, sp) in &roles_p {
                    for &(ar, ir, sr) in &roles_r {
                        if ip == ir && ap < ar {
                            let v = -(half.clone() * prod.clone());
                            add((ap, ar), p, r, if sp == sr { v } else { -v });
                        }
                    }
                }
            }
            // 1/4 <J_a, J_b>: same pair (j,k) with two different targets.
            if tp.j == tr.j && tp.k == tr.k && tp.l < tr.l {
                add((tp.l, tr.l), p, r, half.clone() * prod.clone());
            }
        }
    }
    table
}

fn first_witness<T: Field>(table: MonomialTable<T>, to_f64: impl Fn(&T) -> f64) -> StableDiagonality {
    for (pair, monos) in table {
        for (exponents, c) in monos {
            if !c.negligible() {
                return StableDiagonality {
                    stable: false,
                    witness: Some(OffDiagonalWitness { pair, exponents, coefficient: to_f64(&c) }),
                };
            }
        }
    }
    StableDiagonality { stable: true, witness: None }
}

/// Decides whether every off-diagonal Ricci entry vanishes identically in the
/// diagonal metric, by grouping each entry into monomials in `sqrt(q_i)`.
pub fn is_stably_ricci_diagonal(spec: &BracketSpec) -> StableDiagonality {
    let roots = RootSystem::from_triples(spec.dim(), spec.triples());
    let exact: Option<Vec<Rational>> = spec.entries().iter().map(|e| e.exact.clone()).collect();
    match exact {
        Some(al) => first_witness(off_diagonal_monomials(&roots, &al), rat_to_f64),
        None => {
            let al: Vec<f64> = spec.entries().iter().map(|e| e.alpha).collect();
            first_witness(off_diagonal_monomials(&roots, &al), |v| *v)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonCertificate {
    pub beta: f64,
    pub a_star: Vec<f64>,
    /// `||U a_star + 2 beta 1||_inf`
    pub residual: f64,
    /// Diagonal of `D = Ric - beta Id`.
    pub derivation_diag: Vec<f64>,
}

impl SolitonCertificate {
    /// Ricci vector `derivation_diag + beta` of the certified state.
    pub fn ricci_vector(&self) -> Vec<f64> {
        self.derivation_diag.iter().map(|d| d + self.beta).collect()
    }

    /// Residual relative to `||U a_star||_inf = 2|beta|`.
    pub fn relative_residual(&self) -> f64 {
        self.residual / (2.0 * self.beta.abs())
    }

    pub fn derivation_is_positive(&self) -> bool {
        self.derivation_diag.iter().all(|&d| d > 0.0)
    }
}

/// Least-squares fit of `U a` against the all-ones vector.
pub fn soliton_test(roots: &RootSystem, a: &StructureVector, tol: f64) -> Option<SolitonCertificate> {
    let m = roots.m();
    if m == 0 || a.len() != m {
        return None;
    }
    let ua = mat_vec_i64(roots.gram(), a.as_slice());
    let lambda = ua.iter().sum::<f64>() / m as f64;
    let beta = -lambda / 2.0;
    let dev: Vec<f64> = ua.iter().map(|v| v - lambda).collect();
    let residual = inf_norm(&dev);
    let scale = inf_norm(&ua);
    if !(beta < 0.0) || residual / scale >= tol {
        return None;
    }
    let derivation_diag = ricci_vector(roots, a.as_slice())
        .into_iter()
        .map(|r| r - beta)
        .collect();
    Some(SolitonCertificate { beta, a_star: a.0.clone(), residual, derivation_diag })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolitonCertificate {
    pub beta: Rational,
    pub a_star: Vec<Rational>,
    pub ricci_vector: Vec<Rational>,
    pub derivation_diag: Vec<Rational>,
}

impl ExactSolitonCertificate {
    /// Exponents `r_j / beta` of the closed-form metric evolution.
    pub fn exponents(&self) -> Vec<Rational> {
        self.ricci_vector.iter().map(|r| r / &self.beta).collect()
    }

    pub fn to_float(&self) -> SolitonCertificate {
        SolitonCertificate {
            beta: rat_to_f64(&self.beta),
            a_star: self.a_star.iter().map(rat_to_f64).collect(),
            residual: 0.0,
            derivation_diag: self.derivation_diag.iter().map(rat_to_f64).collect(),
        }
    }
}

/// Exact soliton criterion: `U a` must be a positive multiple of `1`.
pub fn soliton_test_exact(roots: &RootSystem, a: &[Rational]) -> Option<ExactSolitonCertificate> {
    if roots.m() == 0 || a.len() != roots.m() {
        return None;
    }
    let ua = mat_vec_rat(roots.gram(), a);
    let lambda = ua[0].clone();
    if !lambda.is_positive() || ua.iter().any(|v| *v != lambda) {
        return None;
    }
    let beta = -lambda * rat(1, 2);
    let ricci = ricci_vector_exact(roots, a);
    let derivation_diag = ricci.iter().map(|r| r - &beta).collect();
    Some(ExactSolitonCertificate { beta, a_star: a.to_vec(), ricci_vector: ricci, derivation_diag })
}

/// `d_j + d_k = d_l` on every index triple, within `tol`.
pub fn verify_derivation(spec: &BracketSpec, diag: &[f64], tol: f64) -> bool {
    diag.len() == spec.dim()
        && spec.entries().iter().all(|e| {
            let Triple { j, k, l } = e.triple;
            (diag[j] + diag[k] - diag[l]).abs() <= tol
        })
}

pub fn verify_derivation_exact(spec: &BracketSpec, diag: &[Rational]) -> bool {
    diag.len() == spec.dim()
        && spec.entries().iter().all(|e| {
            let Triple { j, k, l } = e.triple;
            &diag[j] + &diag[k] == diag[l]
        })
}

/// Basis of `ker PU = {v : U v = lambda 1}` for any `m >= 1`, as primitive
/// integer vectors.
pub(crate) fn gram_soliton_kernel(u: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = u.len();
    let pu: Vec<Vec<i64>> = (0..m.saturating_sub(1))
        .map(|i| (0..m).map(|j| u[i][j] - u[m - 1][j]).collect())
        .collect();
    if pu.is_empty() {
        return vec![vec![1; m]];
    }
    linalg::integer_nullspace(&pu, m)
}

/// A positive `v` with `U v = lambda 1`, `lambda > 0`, scaled to a primitive
/// integer vector. Exact.
pub(crate) fn positive_gram_solution(u: &[Vec<i64>]) -> Option<Vec<i64>> {
    let m = u.len();
    let kernel = gram_soliton_kernel(u);
    let lambda = |v: &[i64]| -> i64 { u[m - 1].iter().zip(v).map(|(a, b)| a * b).sum() };
    if kernel.len() == 1 {
        let v = &kernel[0];
        let sign = if v.iter().all(|&x| x < 0) { -1 } else { 1 };
        let v: Vec<i64> = v.iter().map(|x| sign * x).collect();
        return (v.iter().all(|&x| x > 0) && lambda(&v) > 0).then_some(v);
    }
    // v = 1 + w, w >= 0; rows of PU give PU w = -PU 1, and u_m . w - s = 1 - u_m . 1.
    let ones = vec![1i64; m];
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for i in 0..m - 1 {
        let row: Vec<i64> = (0..m).map(|j| u[i][j] - u[m - 1][j]).collect();
        let b: i64 = -row.iter().zip(&ones).map(|(a, b)| a * b).sum::<i64>();
        let mut r: Vec<Rational> = row.iter().map(|&x| linalg::rat_int(x)).collect();
        r.push(Rational::zero());
        rows.push(r);
        rhs.push(linalg::rat_int(b));
    }
    let mut last: Vec<Rational> = u[m - 1].iter().map(|&x| linalg::rat_int(x)).collect();
    last.push(linalg::rat_int(-1));
    rows.push(last);
    rhs.push(linalg::rat_int(1 - lambda(&ones)));
    let w = lp::feasible_point(&rows, &rhs, m + 1)?;
    let v: Vec<Rational> = w[..m].iter().map(|x| x + linalg::rat_int(1)).collect();
    Some(linalg::primitive_integer(&v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonSearch {
    pub certificate: SolitonCertificate,
    /// A diagonal metric realizing `a_star` with the given structure
    /// constants, when one exists.
    pub metric: Option<Vec<f64>>,
    /// `||Y ln q - ln(alpha^2 / a_star)||_inf` of the log-metric solve.
    pub recovery_residual: f64,
}

/// Finds a positive solution of `U v = lambda 1` and, when possible, a
/// diagonal metric whose structure vector is that solution.
pub fn find_soliton_metric(spec: &BracketSpec, tol: f64) -> Result<SolitonSearch> {
    let roots = root_system(spec)?;
    let u = roots.gram();
    let v = positive_gram_solution(u).ok_or_else(|| Error::NoPositiveSolution {
        kernel: gram_soliton_kernel(u),
    })?;
    let a_star = StructureVector(v.iter().map(|&x| x as f64).collect());
    let certificate = soliton_test(&roots, &a_star, DEFAULT_SOLITON_TOL)
        .expect("exact positive kernel vector satisfies the criterion");
    let y: Vec<Vec<f64>> = roots
        .root_matrix()
        .iter()
        .map(|row| row.iter().map(|&x| x as f64).collect())
        .collect();
    // a_i = alpha_i^2 exp(-(Y ln q)_i)
    let b: Vec<f64> = spec
        .entries()
        .iter()
        .zip(&a_star.0)
        .map(|(e, a)| (e.alpha * e.alpha / a).ln())
        .collect();
    let (log_q, recovery_residual) = linalg::min_norm_lstsq(&y, roots.n(), &b);
    let metric = (recovery_residual < tol).then(|| log_q.iter().map(|x| x.exp()).collect());
    Ok(SolitonSearch { certificate, metric, recovery_residual })
}

/// Ricci vector and exact certificate for a rational spec and metric.
pub fn exact_certificate(spec: &BracketSpec, metric: &DiagonalMetric) -> Result<Option<ExactSolitonCertificate>> {
    let roots = root_system(spec)?;
    let a = crate::algebra::structure_vector_exact(spec, metric)?;
    Ok(soliton_test_exact(&roots, &a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{structure_vector, BracketEntry};
    use crate::linalg::rat_int;

    fn spec(dim: usize, b: &[(usize, usize, usize, i64)]) -> BracketSpec {
        BracketSpec::from_one_based(dim, b).unwrap()
    }

    fn h3() -> BracketSpec {
        spec(3, &[(1, 2, 3, 1)])
    }
    fn l4() -> BracketSpec {
        spec(4, &[(1, 2, 3, 1), (1, 3, 4, 1)])
    }
    fn h5() -> BracketSpec {
        spec(5, &[(1, 2, 5, 1), (3, 4, 5, 1)])
    }
    fn p5() -> BracketSpec {
        spec(5, &[(1, 3, 4, 1), (1, 4, 5, 1), (2, 3, 5, 1)])
    }
    fn shared_target() -> BracketSpec {
        spec(5, &[(1, 2, 5, 1), (1, 3, 5, 1)])
    }
    fn r6() -> BracketSpec {
        spec(
            7,
            &[
                (1, 2, 3, 1),
                (1, 3, 4, 1),
                (1, 4, 5, 1),
                (1, 5, 6, 1),
                (1, 6, 7, 1),
                (2, 3, 5, 1),
                (2, 4, 6, 1),
                (2, 5, 7, 1),
            ],
        )
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn oracle_on_h3() {
        let r = ricci_form_oracle(&h3(), &DiagonalMetric::ones(3)).unwrap();
        assert_close(&r.ricci_vector, &[-0.5, -0.5, 0.5], 1e-15);
        assert_eq!(r.max_off_diagonal(), 0.0);
    }

    #[test]
    fn oracle_on_abelian_is_zero() {
        let ab = BracketSpec::new(4, vec![]).unwrap();
        let r = ricci_form_oracle(&ab, &DiagonalMetric::ones(4)).unwrap();
        assert!(r.ricci_form.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn oracle_detects_off_diagonal_entry() {
        // Only the ad term couples x2 and x3: -1/2 * c_{21}^5 c_{31}^5 = -1/2.
        let r = ricci_form_oracle(&shared_target(), &DiagonalMetric::ones(5)).unwrap();
        assert!((r.ricci_form[1][2] + 0.5).abs() < 1e-15);
        assert!(!is_ricci_diagonal(&shared_target(), &DiagonalMetric::ones(5), 1e-10).unwrap());
    }

    #[test]
    fn ricci_vector_examples() {
        let h3r = root_system(&h3()).unwrap();
        assert_eq!(ricci_vector(&h3r, &[1.0]), vec![-0.5, -0.5, 0.5]);
        let l4r = root_system(&l4()).unwrap();
        assert_eq!(ricci_vector(&l4r, &[1.0, 1.0]), vec![-1.0, -0.5, 0.0, 0.5]);
        let p5r = root_system(&p5()).unwrap();
        assert_eq!(ricci_vector(&p5r, &[2.0, 2.0, 1.0]), vec![-2.0, -0.5, -1.5, 0.0, 1.5]);
    }

    #[test]
    fn diagonal_checks() {
        let q = DiagonalMetric::new(vec![1.0, 4.0, 1.0, 2.0, 4.0]).unwrap();
        assert!(is_ricci_diagonal(&p5(), &q, 1e-12).unwrap());
        let q = DiagonalMetric::new(vec![0.3, 7.0, 2.0]).unwrap();
        assert!(is_ricci_diagonal(&h3(), &q, 1e-12).unwrap());
    }

    #[test]
    fn stable_diagonality() {
        assert!(is_stably_ricci_diagonal(&h3()).stable);
        assert!(is_stably_ricci_diagonal(&p5()).stable);
        assert!(is_stably_ricci_diagonal(&r6()).stable);
        let res = is_stably_ricci_diagonal(&shared_target());
        assert!(!res.stable);
        let w = res.witness.unwrap();
        assert_eq!(w.pair, (1, 2));
        assert_eq!(w.coefficient, -0.5);
        // -(y_125 + y_135) = -(2,1,1,0,-2)
        assert_eq!(w.exponents, vec![-2, -1, -1, 0, 2]);
    }

    #[test]
    fn coincidental_cancellation_is_not_stable() {
        // [x1,x2] = x4 + x5 and [x1,x3] = x4 - x5: the ad term for (2,3) has
        // monomials from targets 4 and 5 with different exponents, so no cancellation.
        let s = BracketSpec::new(
            5,
            vec![
                BracketEntry::rational(0, 1, 3, rat_int(1)),
                BracketEntry::rational(0, 1, 4, rat_int(1)),
                BracketEntry::rational(0, 2, 3, rat_int(1)),
                BracketEntry::rational(0, 2, 4, rat_int(-1)),
            ],
        )
        .unwrap();
        assert!(!is_stably_ricci_diagonal(&s).stable);
        // At q = 1 the two contributions cancel, a coincidence a sampled check would accept.
        assert!(is_ricci_diagonal(&s, &DiagonalMetric::ones(5), 1e-12).unwrap());
    }

    #[test]
    fn soliton_constants() {
        let h3r = root_system(&h3()).unwrap();
        let c = soliton_test(&h3r, &StructureVector(vec![1.0]), 1e-9).unwrap();
        assert_eq!(c.beta, -1.5);

        let p5r = root_system(&p5()).unwrap();
        let c = soliton_test(&p5r, &StructureVector(vec![2.0, 2.0, 1.0]), 1e-9).unwrap();
        assert_eq!(c.beta, -3.5);
        assert_close(&c.derivation_diag, &[1.5, 3.0, 2.0, 3.5, 5.0], 1e-15);
        assert_eq!(c.residual, 0.0);

        let h5r = root_system(&h5()).unwrap();
        let c = soliton_test(&h5r, &StructureVector(vec![1.0, 1.0]), 1e-9).unwrap();
        assert_eq!(c.beta, -2.0);

        assert!(soliton_test(&p5r, &StructureVector(vec![1.0, 1.0, 1.0]), 1e-9).is_none());
    }

    #[test]
    fn single_root_is_always_soliton() {
        let h3r = root_system(&h3()).unwrap();
        let c = soliton_test(&h3r, &StructureVector(vec![0.37]), 1e-12).unwrap();
        assert!((c.beta + 3.0 * 0.37 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_soliton_constants() {
        let p5r = root_system(&p5()).unwrap();
        let c = soliton_test_exact(&p5r, &[rat_int(2), rat_int(2), rat_int(1)]).unwrap();
        assert_eq!(c.beta, rat(-7, 2));
        assert_eq!(
            c.derivation_diag,
            vec![rat(3, 2), rat(3, 1), rat(2, 1), rat(7, 2), rat(5, 1)]
        );
        assert!(verify_derivation_exact(&p5(), &c.derivation_diag));
        assert_eq!(
            c.exponents(),
            vec![rat(4, 7), rat(1, 7), rat(3, 7), rat(0, 1), rat(-3, 7)]
        );
    }

    #[test]
    fn derivation_checks() {
        assert!(verify_derivation(&h3(), &[1.0, 1.0, 2.0], 1e-12));
        assert!(verify_derivation(&l4(), &[0.5, 1.0, 1.5, 2.0], 1e-12));
        assert!(!verify_derivation(&h3(), &[1.0, 1.0, 3.0], 1e-12));
        assert!(!verify_derivation(&h3(), &[1.0, 1.0], 1e-12));
    }

    #[test]
    fn find_metric_for_prototype() {
        let res = find_soliton_metric(&p5(), 1e-9).unwrap();
        assert_eq!(res.certificate.a_star, vec![2.0, 2.0, 1.0]);
        assert_eq!(res.certificate.beta, -3.5);
        let q = DiagonalMetric::new(res.metric.unwrap()).unwrap();
        let a = structure_vector(&p5(), &q).unwrap();
        assert_close(&a.0, &[2.0, 2.0, 1.0], 1e-12);
    }

    #[test]
    fn find_metric_for_h3_any_alpha() {
        for alpha in [1, 3, -5] {
            let s = spec(3, &[(1, 2, 3, alpha)]);
            let res = find_soliton_metric(&s, 1e-9).unwrap();
            let q = DiagonalMetric::new(res.metric.unwrap()).unwrap();
            let a = structure_vector(&s, &q).unwrap();
            assert_close(&a.0, &[1.0], 1e-12);
        }
    }

    #[test]
    fn r6_has_no_positive_solution() {
        match find_soliton_metric(&r6(), 1e-9) {
            Err(Error::NoPositiveSolution { kernel }) => assert!(!kernel.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_gram_uses_lp() {
        // Y rows (1,1,-1,0), (1,1,-1,0) would repeat; use two roots sharing a
        // kernel direction: U = [[3,3],[3,3]] has ker PU = R^2.
        let u = vec![vec![3, 3], vec![3, 3]];
        let v = positive_gram_solution(&u).unwrap();
        assert!(v.iter().all(|&x| x > 0));
        // U = [[3,-3],[-3,3]]: U v = lambda 1 forces lambda = 0.
        assert!(positive_gram_solution(&[vec![3, -3], vec![-3, 3]]).is_none());
    }
}
