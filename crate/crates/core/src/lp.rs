//! Small linear programs over exact rationals.
//!
//! Programs are in inequality form, `minimize cᵀv subject to Av ≤ b`. They are
//! solved by enumerating every basis (a choice of `n` constraint rows for `n`
//! variables). Each nonsingular basis gives a vertex, computed with
//! fraction-free integer Cramer's rule. The result carries a dual vector
//! `λ ≥ 0`, `Aᵀλ + c = 0`, supported on the optimal basis, so the duality gap
//! `cᵀv + bᵀλ` is exactly zero.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Widest program the vertex enumerator accepts.
pub const MAX_VARIABLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearProgram {
    #[serde(with = "rational::pq_vec")]
    pub c: Vec<Rational>,
    #[serde(with = "rational::pq_matrix")]
    pub a: Vec<Vec<Rational>>,
    #[serde(with = "rational::pq_vec")]
    pub b: Vec<Rational>,
    pub variables: Vec<String>,
    pub constraints: Vec<String>,
}

impl LinearProgram {
    pub fn new(
        c: Vec<Rational>,
        a: Vec<Vec<Rational>>,
        b: Vec<Rational>,
        variables: Vec<String>,
        constraints: Vec<String>,
    ) -> Result<Self> {
        let n = c.len();
        if variables.len() != n {
            return Err(Error::DimensionMismatch(format!("{} variable labels for {n} variables", variables.len())));
        }
        if a.len() != b.len() || constraints.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows, b has {}, {} constraint labels",
                a.len(),
                b.len(),
                constraints.len()
            )));
        }
        if let Some((i, row)) = a.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::DimensionMismatch(format!("row {} of A has {} entries, expected {n}", i + 1, row.len())));
        }
        Ok(Self { c, a, b, variables, constraints })
    }

    pub fn num_variables(&self) -> usize {
        self.c.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self, v: &[Rational]) -> Rational {
        dot(&self.c, v)
    }

    /// 0-based indices of rows with `a_i v > b_i`.
    pub fn violated_rows(&self, v: &[Rational]) -> Vec<usize> {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .filter(|(_, (row, b))| dot(row, v) > **b)
            .map(|(i, _)| i)
            .collect()
    }

    /// 0-based indices of rows with `a_i v = b_i`.
    pub fn active_rows(&self, v: &[Rational]) -> Vec<usize> {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .filter(|(_, (row, b))| dot(row, v) == **b)
            .map(|(i, _)| i)
            .collect()
    }

    /// Optimal vertex with a dual certificate, or `None` if no vertex is
    /// feasible. Among optimal bases, one whose vertex equals `prefer` is
    /// chosen when it exists; otherwise the lexicographically first
    /// dual-feasible basis wins.
    ///
    /// The feasible region is assumed to be pointed (A of full column rank).
    /// An unbounded program surfaces as an error because no optimal basis is
    /// dual feasible.
    pub fn solve_by_vertices(&self, prefer: Option<&[Rational]>) -> Result<Option<LpOptimum>> {
        let n = self.num_variables();
        if n == 0 || n > MAX_VARIABLES {
            return Err(Error::InvalidInput(format!("vertex enumeration supports 1..={MAX_VARIABLES} variables, got {n}")));
        }
        let m = self.num_constraints();
        if m < n {
            return Ok(None);
        }
        let (c_int, _) = integerize(&self.c, None);
        let rows = IntegerRows::new(&self.a, &self.b, &c_int)?;

        // Objective values are compared as fractions `numer / det`, `det > 0`.
        let mut best: Option<(i128, i128)> = None;
        let mut best_bases: Vec<(Vec<usize>, IntVertex)> = Vec::new();
        let mut basis: Vec<usize> = (0..n).collect();
        loop {
            if let Some(x) = rows.vertex(&basis) {
                let numer: i64 = c_int.iter().zip(&x.num[..n]).map(|(c, v)| c * v).sum();
                let (numer, det) = (i128::from(numer), i128::from(x.det));
                let ord = best.map(|(bn, bd)| (numer * bd).cmp(&(bn * det)));
                match ord {
                    Some(std::cmp::Ordering::Greater) => {}
                    Some(std::cmp::Ordering::Equal) => best_bases.push((basis.clone(), x)),
                    _ => {
                        best = Some((numer, det));
                        best_bases.clear();
                        best_bases.push((basis.clone(), x));
                    }
                }
            }
            if !next_combination(&mut basis, m) {
                break;
            }
        }
        if best.is_none() {
            return Ok(None);
        }
        let mut best_bases: Vec<(Vec<usize>, Vec<Rational>)> =
            best_bases.into_iter().map(|(b, x)| (b, x.to_rationals(n))).collect();
        let value = self.objective(&best_bases[0].1);
        if let Some(p) = prefer {
            best_bases.sort_by_key(|(_, v)| v.as_slice() != p);
        }
        for (basis, v) in best_bases {
            if let Some(lambda) = self.dual_on_basis(&basis) {
                return Ok(Some(LpOptimum { value, v, basis, lambda }));
            }
        }
        Err(Error::Internal("optimal vertex has no dual-feasible basis (unbounded program?)".into()))
    }

    /// Solves `A_Bᵀ λ_B = −c` and scatters into a full-length `λ`; `None`
    /// unless every entry is nonnegative.
    fn dual_on_basis(&self, basis: &[usize]) -> Option<Vec<Rational>> {
        let n = self.num_variables();
        let at: Vec<Vec<Rational>> = (0..n).map(|j| basis.iter().map(|&i| self.a[i][j]).collect()).collect();
        let rhs: Vec<Rational> = self.c.iter().map(|x| -x).collect();
        let lambda_b = solve_rational(at, rhs)?;
        if lambda_b.iter().any(|x| x.is_negative()) {
            return None;
        }
        let mut lambda = vec![Rational::zero(); self.num_constraints()];
        for (&i, l) in basis.iter().zip(lambda_b) {
            lambda[i] = l;
        }
        Some(lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpOptimum {
    /// `cᵀv` at the optimum.
    #[serde(with = "rational::pq")]
    pub value: Rational,
    #[serde(with = "rational::pq_vec")]
    pub v: Vec<Rational>,
    /// 0-based rows defining the vertex.
    pub basis: Vec<usize>,
    #[serde(with = "rational::pq_vec")]
    pub lambda: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DualityStatus {
    Optimal,
    /// 1-based indices of violated rows.
    NotPrimalFeasible { violated: Vec<usize> },
    NotDualFeasible { reason: String },
    NonzeroGap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityCertificate {
    pub status: DualityStatus,
    /// `cᵀv + bᵀλ`.
    #[serde(with = "rational::pq")]
    pub gap: Rational,
    #[serde(with = "rational::pq")]
    pub primal_objective: Rational,
    /// `−bᵀλ`, the dual objective.
    #[serde(with = "rational::pq")]
    pub dual_objective: Rational,
}

impl DualityCertificate {
    pub fn is_optimal(&self) -> bool {
        self.status == DualityStatus::Optimal
    }
}

/// Checks `Av ≤ b`, `λ ≥ 0`, `Aᵀλ + c = 0` and reports the gap `cᵀv + bᵀλ`.
/// The pair is certified optimal iff all checks pass and the gap is exactly 0.
pub fn verify_duality(lp: &LinearProgram, v: &[Rational], lambda: &[Rational]) -> Result<DualityCertificate> {
    if v.len() != lp.num_variables() {
        return Err(Error::DimensionMismatch(format!("v has {} entries, program has {} variables", v.len(), lp.num_variables())));
    }
    if lambda.len() != lp.num_constraints() {
        return Err(Error::DimensionMismatch(format!(
            "λ has {} entries, program has {} constraints",
            lambda.len(),
            lp.num_constraints()
        )));
    }
    let primal_objective = lp.objective(v);
    let b_lambda = dot(&lp.b, lambda);
    let gap = primal_objective + b_lambda;
    let dual_objective = -b_lambda;

    let violated = lp.violated_rows(v);
    let status = if !violated.is_empty() {
        DualityStatus::NotPrimalFeasible { violated: violated.iter().map(|i| i + 1).collect() }
    } else if let Some(i) = lambda.iter().position(|x| x.is_negative()) {
        DualityStatus::NotDualFeasible { reason: format!("λ_{} = {} < 0", i + 1, lambda[i]) }
    } else if let Some(j) = (0..lp.num_variables()).find(|&j| {
        let col: Rational = lp.a.iter().zip(lambda).map(|(row, l)| row[j] * l).sum();
        col + lp.c[j] != Rational::zero()
    }) {
        DualityStatus::NotDualFeasible { reason: format!("(Aᵀλ + c) is nonzero at {}", lp.variables[j]) }
    } else if !gap.is_zero() {
        DualityStatus::NonzeroGap
    } else {
        DualityStatus::Optimal
    };
    Ok(DualityCertificate { status, gap, primal_objective, dual_objective })
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Advances `idx` to the next `k`-subset of `0..m` in lexicographic order.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Scales `values` (and `extra`) by the lcm of their denominators; the
/// factor is positive, so inequalities keep their direction.
fn integerize(values: &[Rational], extra: Option<&Rational>) -> (Vec<i64>, i64) {
    let scale = values.iter().chain(extra).fold(1i64, |acc, x| acc.lcm(x.denom()));
    let to_int = |x: &Rational| x.numer() * (scale / x.denom());
    let mut out: Vec<i64> = values.iter().map(to_int).collect();
    if let Some(e) = extra {
        out.push(to_int(e));
    }
    (out, scale)
}

/// Constraint rows scaled to integers: row `i` of `[A | b]` multiplied by the
/// lcm of its denominators. Scaling by a positive factor leaves the feasible
/// set and every vertex unchanged.
struct IntegerRows {
    n: usize,
    a: Vec<i64>,
    b: Vec<i64>,
}

/// Vertex `num / det` with `det > 0`.
struct IntVertex {
    num: [i64; MAX_VARIABLES],
    det: i64,
}

impl IntVertex {
    fn to_rationals(&self, n: usize) -> Vec<Rational> {
        self.num[..n]
            .iter()
            .map(|&x| {
                let g = x.gcd(&self.det);
                Rational::new_raw(x / g, self.det / g)
            })
            .collect()
    }
}

impl IntegerRows {
    /// Fails if some basis determinant or feasibility product could
    /// overflow `i64`, judged by the bound `n!·Eⁿ` on every minor.
    fn new(a: &[Vec<Rational>], b: &[Rational], c: &[i64]) -> Result<Self> {
        let n = c.len();
        let mut flat = Vec::with_capacity(a.len() * n);
        let mut rhs = Vec::with_capacity(b.len());
        for (row, bi) in a.iter().zip(b) {
            let (mut ints, _) = integerize(row, Some(bi));
            rhs.push(ints.pop().expect("rhs appended"));
            flat.extend(ints);
        }
        let e = flat.iter().chain(&rhs).chain(c).map(|x| x.unsigned_abs()).max().unwrap_or(0).max(1) as f64;
        let minor = (1..=n).map(|k| k as f64).product::<f64>() * e.powi(n as i32);
        if (n as f64 + 1.0) * e * minor >= 2f64.powi(62) {
            return Err(Error::InvalidInput("coefficients too large for exact vertex enumeration".into()));
        }
        Ok(Self { n, a: flat, b: rhs })
    }

    fn row(&self, i: usize) -> &[i64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    /// Feasible vertex defined by `basis`, if the basis is nonsingular.
    fn vertex(&self, basis: &[usize]) -> Option<IntVertex> {
        let n = self.n;
        let mut buf = [0i64; MAX_VARIABLES * MAX_VARIABLES];
        let load = |buf: &mut [i64], replace: Option<usize>| {
            for (r, &i) in basis.iter().enumerate() {
                let row = self.row(i);
                for c in 0..n {
                    buf[r * n + c] = if Some(c) == replace { self.b[i] } else { row[c] };
                }
            }
        };
        load(&mut buf, None);
        let mut det = determinant(&mut buf[..n * n], n);
        if det == 0 {
            return None;
        }
        let mut num = [0i64; MAX_VARIABLES];
        for (k, slot) in num.iter_mut().enumerate().take(n) {
            load(&mut buf, Some(k));
            *slot = determinant(&mut buf[..n * n], n);
        }
        if det < 0 {
            det = -det;
            num.iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..self.b.len() {
            let lhs: i64 = self.row(i).iter().zip(&num[..n]).map(|(a, x)| a * x).sum();
            if lhs > self.b[i] * det {
                return None;
            }
        }
        Some(IntVertex { num, det })
    }
}

/// Integer determinant; division-free expansion up to 4×4, Bareiss beyond.
/// May clobber `m`.
fn determinant(m: &mut [i64], n: usize) -> i64 {
    let det2 = |a: i64, b: i64, c: i64, d: i64| a * d - b * c;
    match n {
        1 => m[0],
        2 => det2(m[0], m[1], m[2], m[3]),
        3 => m[0] * det2(m[4], m[5], m[7], m[8]) - m[1] * det2(m[3], m[5], m[6], m[8]) + m[2] * det2(m[3], m[4], m[6], m[7]),
        4 => {
            // Laplace expansion along the first two rows.
            let top = |i: usize, j: usize| det2(m[i], m[j], m[4 + i], m[4 + j]);
            let bot = |i: usize, j: usize| det2(m[8 + i], m[8 + j], m[12 + i], m[12 + j]);
            top(0, 1) * bot(2, 3) - top(0, 2) * bot(1, 3) + top(0, 3) * bot(1, 2) + top(1, 2) * bot(0, 3)
                - top(1, 3) * bot(0, 2)
                + top(2, 3) * bot(0, 1)
        }
        _ => bareiss_det(m, n),
    }
}

/// Determinant by fraction-free Gaussian elimination; clobbers `m`.
fn bareiss_det(m: &mut [i64], n: usize) -> i64 {
    let mut sign = 1i64;
    let mut prev = 1i64;
    for k in 0..n {
        if m[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r * n + k] != 0) else { return 0 };
            for c in 0..n {
                m.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        let pivot = m[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                m[i * n + j] = (m[i * n + j] * pivot - m[i * n + k] * m[k * n + j]) / prev;
            }
        }
        prev = pivot;
    }
    sign * m[(n - 1) * n + (n - 1)]
}

/// Gaussian elimination over the rationals; `None` for a singular system.
pub fn solve_rational(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, p);
        b.swap(k, p);
        let inv = Rational::one() / a[k][k];
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k] * inv;
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
            let t = b[k];
            b[i] -= f * t;
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    /// max x + y  s.t.  x + 2y ≤ 4, 3x + y ≤ 6, x, y ≥ 0  → (8/5, 6/5), value 14/5.
    fn textbook() -> LinearProgram {
        LinearProgram::new(
            ints(&[-1, -1]),
            vec![ints(&[1, 2]), ints(&[3, 1]), ints(&[-1, 0]), ints(&[0, -1])],
            ints(&[4, 6, 0, 0]),
            labels("x", 2),
            labels("c", 4),
        )
        .unwrap()
    }

    #[test]
    fn solves_textbook_program_exactly() {
        let lp = textbook();
        let opt = lp.solve_by_vertices(None).unwrap().unwrap();
        assert_eq!(opt.v, vec![frac(8, 5), frac(6, 5)]);
        assert_eq!(opt.value, frac(-14, 5));
        assert_eq!(opt.basis, vec![0, 1]);
        let cert = verify_duality(&lp, &opt.v, &opt.lambda).unwrap();
        assert!(cert.is_optimal());
        assert_eq!(cert.gap, int(0));
        assert_eq!(cert.dual_objective, frac(-14, 5));
    }

    #[test]
    fn rational_coefficients_are_handled() {
        // max x  s.t. (1/3) x ≤ 1/2, x ≥ 0  → x = 3/2
        let lp = LinearProgram::new(
            ints(&[-1]),
            vec![vec![frac(1, 3)], ints(&[-1])],
            vec![frac(1, 2), int(0)],
            labels("x", 1),
            labels("c", 2),
        )
        .unwrap();
        let opt = lp.solve_by_vertices(None).unwrap().unwrap();
        assert_eq!(opt.v, vec![frac(3, 2)]);
        assert_eq!(opt.lambda, vec![int(3), int(0)]);
    }

    #[test]
    fn infeasible_program_has_no_vertex() {
        let lp = LinearProgram::new(ints(&[1]), vec![ints(&[1]), ints(&[-1])], ints(&[-1, -1]), labels("x", 1), labels("c", 2)).unwrap();
        assert_eq!(lp.solve_by_vertices(None).unwrap(), None);
    }

    #[test]
    fn unbounded_program_is_an_error() {
        // max x  s.t.  -x ≤ 0 : the only vertex x = 0 is not optimal.
        let lp = LinearProgram::new(ints(&[-1]), vec![ints(&[-1])], ints(&[0]), labels("x", 1), labels("c", 1)).unwrap();
        assert!(matches!(lp.solve_by_vertices(None), Err(Error::Internal(_))));
    }

    #[test]
    fn preferred_vertex_wins_ties() {
        // max x + y on the segment x + y ≤ 1 in the unit square: (1,0) and (0,1) tie.
        let lp = LinearProgram::new(
            ints(&[-1, -1]),
            vec![ints(&[1, 1]), ints(&[-1, 0]), ints(&[0, -1])],
            ints(&[1, 0, 0]),
            labels("x", 2),
            labels("c", 3),
        )
        .unwrap();
        let first = lp.solve_by_vertices(None).unwrap().unwrap();
        let other = if first.v == ints(&[1, 0]) { ints(&[0, 1]) } else { ints(&[1, 0]) };
        let pref = lp.solve_by_vertices(Some(&other)).unwrap().unwrap();
        assert_eq!(pref.v, other);
        assert_eq!(pref.value, first.value);
    }

    #[test]
    fn verify_duality_failure_modes() {
        let lp = textbook();
        let opt = lp.solve_by_vertices(None).unwrap().unwrap();

        let mut bad_v = opt.v.clone();
        bad_v[0] = int(5);
        let cert = verify_duality(&lp, &bad_v, &opt.lambda).unwrap();
        assert!(matches!(cert.status, DualityStatus::NotPrimalFeasible { ref violated } if violated.contains(&2)));

        let mut bad_l = opt.lambda.clone();
        bad_l[0] += int(1);
        let cert = verify_duality(&lp, &opt.v, &bad_l).unwrap();
        assert!(matches!(cert.status, DualityStatus::NotDualFeasible { .. }));

        // Feasible, dual feasible, but suboptimal primal: positive gap.
        let cert = verify_duality(&lp, &ints(&[0, 0]), &opt.lambda).unwrap();
        assert_eq!(cert.status, DualityStatus::NonzeroGap);
        assert_eq!(cert.gap, frac(14, 5));

        assert!(verify_duality(&lp, &ints(&[0]), &opt.lambda).is_err());
        assert!(verify_duality(&lp, &opt.v, &ints(&[0])).is_err());
    }

    #[test]
    fn huge_coefficients_are_rejected() {
        let lp = LinearProgram::new(
            ints(&[-1, -1]),
            vec![ints(&[1, 1 << 40]), ints(&[-1, 0]), ints(&[0, -1])],
            ints(&[1, 0, 0]),
            labels("x", 2),
            labels("c", 3),
        )
        .unwrap();
        assert!(matches!(lp.solve_by_vertices(None), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn new_checks_dimensions() {
        assert!(LinearProgram::new(ints(&[1, 1]), vec![ints(&[1])], ints(&[0]), labels("x", 2), labels("c", 1)).is_err());
        assert!(LinearProgram::new(ints(&[1]), vec![ints(&[1])], ints(&[0, 1]), labels("x", 1), labels("c", 1)).is_err());
        assert!(LinearProgram::new(ints(&[1]), vec![ints(&[1])], ints(&[0]), labels("x", 2), labels("c", 1)).is_err());
    }

    #[test]
    fn expansion_matches_bareiss() {
        let mut state = 12345u64;
        for n in 1..=4 {
            for _ in 0..200 {
                let m: Vec<i64> = (0..n * n)
                    .map(|_| {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        ((state >> 33) % 7) as i64 - 3
                    })
                    .collect();
                let mut a = m.clone();
                let mut b = m.clone();
                assert_eq!(determinant(&mut a, n), bareiss_det(&mut b, n), "{m:?}");
            }
        }
    }

    #[test]
    fn bareiss_matches_known_determinants() {
        let mut m = [2i64, 0, 1, 1, 3, 2, 1, 1, 2];
        assert_eq!(bareiss_det(&mut m, 3), 6);
        let mut m = [0i64, 1, 1, 0];
        assert_eq!(bareiss_det(&mut m, 2), -1);
        let mut m = [1i64, 2, 2, 4];
        assert_eq!(bareiss_det(&mut m, 2), 0);
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        let mut idx = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut idx, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
        assert_eq!(idx, vec![3, 4]);
    }
}
