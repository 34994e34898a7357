//! Exact linear feasibility.
//!
//! A dense phase-one simplex over rationals with Bland's rule. Every answer
//! carries a witness that can be checked independently: a solution when the
//! system is feasible, a Farkas (or Gordan) certificate when it is not.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimension mismatch: {0}")]
pub struct LpDimensionError(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A point satisfying the system.
    Feasible(Vec<Rational>),
    /// A dual vector refuting the system. Its meaning depends on the system
    /// solved; see the function that produced it.
    Infeasible(Vec<Rational>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides whether `target` lies in the cone spanned by `generators`, i.e.
/// whether `Σ x_j g_j = target` has a solution with `x ≥ 0`.
///
/// `Feasible(x)` carries the coefficients. `Infeasible(y)` carries a Farkas
/// certificate: `y·g_j ≥ 0` for every generator and `y·target < 0`.
pub fn nonneg_combination(
    generators: &[Vec<Rational>],
    target: &[Rational],
) -> Result<Feasibility, LpDimensionError> {
    let m = target.len();
    if let Some(g) = generators.iter().find(|g| g.len() != m) {
        return Err(LpDimensionError(format!(
            "generator of length {} for target of length {m}",
            g.len()
        )));
    }
    // Columns of the equality system are the generators.
    let columns: Vec<&[Rational]> = generators.iter().map(Vec::as_slice).collect();
    Ok(phase_one(&columns, target))
}

/// Decides strict feasibility of the homogeneous system `r·h > 0` for all
/// rows `r`. By homogeneity this is feasibility of `r·h ≥ 1`.
///
/// `Feasible(h)` satisfies every row with `r·h ≥ 1`. `Infeasible(g)` is a
/// Gordan certificate: `g ≥ 0`, `g ≠ 0` and `Σ g_i r_i = 0`.
pub fn strict_homogeneous(rows: &[Vec<Rational>]) -> Result<Feasibility, LpDimensionError> {
    let Some(first) = rows.first() else {
        return Ok(Feasibility::Feasible(Vec::new()));
    };
    let n = first.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(LpDimensionError(format!(
            "row of length {} among rows of length {n}",
            r.len()
        )));
    }
    // R h+ - R h- - s = 1 with h+, h-, s >= 0.
    let k = rows.len();
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(2 * n + k);
    for j in 0..n {
        columns.push(rows.iter().map(|r| r[j].clone()).collect());
    }
    for j in 0..n {
        columns.push(rows.iter().map(|r| -r[j].clone()).collect());
    }
    for i in 0..k {
        let mut col = vec![Rational::zero(); k];
        col[i] = -Rational::one();
        columns.push(col);
    }
    let refs: Vec<&[Rational]> = columns.iter().map(Vec::as_slice).collect();
    let ones = vec![Rational::one(); k];
    Ok(match phase_one(&refs, &ones) {
        Feasibility::Feasible(x) => {
            Feasibility::Feasible((0..n).map(|j| &x[j] - &x[n + j]).collect())
        }
        Feasibility::Infeasible(y) => Feasibility::Infeasible(y.into_iter().map(|v| -v).collect()),
    })
}

/// Checks a `nonneg_combination` answer in exact arithmetic.
pub fn verify_combination(
    generators: &[Vec<Rational>],
    target: &[Rational],
    answer: &Feasibility,
) -> bool {
    match answer {
        Feasibility::Feasible(x) => {
            x.len() == generators.len()
                && x.iter().all(|v| !v.is_negative())
                && (0..target.len()).all(|i| {
                    let s: Rational = generators.iter().zip(x).map(|(g, xj)| &g[i] * xj).sum();
                    s == target[i]
                })
        }
        Feasibility::Infeasible(y) => {
            y.len() == target.len()
                && generators.iter().all(|g| !dot(y, g).is_negative())
                && dot(y, target).is_negative()
        }
    }
}

/// Checks a `strict_homogeneous` answer in exact arithmetic.
pub fn verify_strict(rows: &[Vec<Rational>], answer: &Feasibility) -> bool {
    match answer {
        Feasibility::Feasible(h) => rows.iter().all(|r| dot(r, h) >= Rational::one()),
        Feasibility::Infeasible(g) => {
            let n = rows.first().map_or(0, Vec::len);
            g.len() == rows.len()
                && g.iter().all(|v| !v.is_negative())
                && g.iter().any(|v| !v.is_zero())
                && (0..n).all(|j| {
                    rows.iter()
                        .zip(g)
                        .map(|(r, gi)| &r[j] * gi)
                        .sum::<Rational>()
                        .is_zero()
                })
        }
    }
}

/// Phase-one simplex for `A x = b, x ≥ 0` where `columns` are the columns of
/// `A`. Returns `x`, or `y` with `yᵀA ≥ 0` and `yᵀb < 0`.
fn phase_one(columns: &[&[Rational]], b: &[Rational]) -> Feasibility {
    let m = b.len();
    let k = columns.len();
    if m == 0 {
        return Feasibility::Feasible(vec![Rational::zero(); k]);
    }
    // Row signs making the right-hand side nonnegative.
    let signs: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let width = k + m + 1;
    let rhs = k + m;
    let mut tab: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); width];
            for (j, col) in columns.iter().enumerate() {
                row[j] = if signs[i] { -col[i].clone() } else { col[i].clone() };
            }
            row[k + i] = Rational::one();
            row[rhs] = b[i].abs();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (k..k + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![Rational::zero(); width];
    for row in &tab {
        for j in 0..k {
            cost[j] -= &row[j];
        }
        cost[rhs] -= &row[rhs];
    }

    loop {
        let Some(enter) = (0..k).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &tab[i][rhs] / &tab[i][enter];
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below by zero, so a pivot row always exists.
        let (r, _) = leave.expect("phase-one objective is bounded");
        let inv = tab[r][enter].recip();
        for v in tab[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        let f = cost[enter].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        basis[r] = enter;
    }

    if cost[rhs].is_zero() {
        let mut x = vec![Rational::zero(); k];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < k {
                x[bv] = tab[i][rhs].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // Duals of the phase-one problem: y_i = 1 - (reduced cost of the
        // i-th artificial). The certificate is -y in the original row signs.
        let y: Vec<Rational> = (0..m)
            .map(|i| {
                let yi = Rational::one() - &cost[k + i];
                if signs[i] {
                    yi
                } else {
                    -yi
                }
            })
            .collect();
        Feasibility::Infeasible(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn combination_examples() {
        let gens = vec![v(&[1, 0]), v(&[0, 1])];
        let ans = nonneg_combination(&gens, &v(&[2, 3])).unwrap();
        assert_eq!(ans, Feasibility::Feasible(v(&[2, 3])));

        let ans = nonneg_combination(&gens, &v(&[-1, 0])).unwrap();
        assert!(!ans.is_feasible());
        assert!(verify_combination(&gens, &v(&[-1, 0]), &ans));

        let gens = vec![v(&[1, 0]), v(&[1, 1])];
        let ans = nonneg_combination(&gens, &v(&[0, 1])).unwrap();
        assert!(!ans.is_feasible());
        assert!(verify_combination(&gens, &v(&[0, 1]), &ans));
    }

    #[test]
    fn combination_edge_cases() {
        assert!(nonneg_combination(&[], &v(&[0, 0])).unwrap().is_feasible());
        let ans = nonneg_combination(&[], &v(&[1, 0])).unwrap();
        assert!(verify_combination(&[], &v(&[1, 0]), &ans) && !ans.is_feasible());
        assert!(nonneg_combination(&[v(&[1])], &v(&[1, 0])).is_err());
    }

    #[test]
    fn strict_examples() {
        let rows = vec![v(&[-1, 1, -1, 1])];
        let ans = strict_homogeneous(&rows).unwrap();
        assert!(ans.is_feasible());
        assert!(verify_strict(&rows, &ans));

        let rows = vec![v(&[1, 0]), v(&[-1, 0])];
        let ans = strict_homogeneous(&rows).unwrap();
        assert!(!ans.is_feasible());
        assert!(verify_strict(&rows, &ans));

        assert_eq!(strict_homogeneous(&[]).unwrap(), Feasibility::Feasible(vec![]));
    }

    #[test]
    fn deterministic() {
        let gens = vec![v(&[1, 2, 0]), v(&[0, 1, 1]), v(&[2, 1, 3]), v(&[1, 1, 1])];
        let t = v(&[4, 5, 5]);
        assert_eq!(
            nonneg_combination(&gens, &t).unwrap(),
            nonneg_combination(&gens, &t).unwrap()
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vecs(len: usize, count: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<i64>>> {
            prop::collection::vec(prop::collection::vec(-3i64..=3, len), count)
        }

        proptest! {
            #[test]
            fn combination_answers_verify(gens in vecs(3, 0..6), target in prop::collection::vec(-4i64..=4, 3)) {
                let gens: Vec<Vec<Rational>> = gens.iter().map(|g| v(g)).collect();
                let target = v(&target);
                let ans = nonneg_combination(&gens, &target).unwrap();
                prop_assert!(verify_combination(&gens, &target, &ans));
            }

            #[test]
            fn strict_answers_verify(rows in vecs(4, 1..7)) {
                let rows: Vec<Vec<Rational>> = rows.iter().map(|r| v(r)).collect();
                let ans = strict_homogeneous(&rows).unwrap();
                prop_assert!(verify_strict(&rows, &ans));
            }
        }
    }
}
