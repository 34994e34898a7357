//! Exact scalars and dense exact linear algebra.
//!
//! Every geometric decision in the crate (orientations, volumes, circuit
//! signs, cone membership) is made in exact arithmetic. Integer inputs go
//! through fraction-free Bareiss elimination; the hot integer determinant
//! first tries `i128` and only falls back to big integers on overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix has trivial kernel")]
    NoDependence,
    #[error("kernel has dimension {0}, expected exactly one")]
    NotCorankOne(usize),
}

/// Converts an integer into a rational.
pub fn rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ArithError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ArithError::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self, ArithError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Exact determinant by Bareiss elimination.
    pub fn determinant(&self) -> Result<Rational, ArithError> {
        if self.rows != self.cols {
            return Err(ArithError::Dimension(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut prev = Rational::one();
        let mut negate = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != k {
                a.swap_rows(p, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(k, k) * a.get(i, j) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        let det = if n == 0 { Rational::one() } else { prev };
        Ok(if negate { -det } else { det })
    }

    /// Reduced row echelon form; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j) - &f * self.get(r, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Primitive integer generator of a one-dimensional kernel, with its
    /// first nonzero entry positive.
    pub fn kernel_vector(&self) -> Result<Vec<BigInt>, ArithError> {
        let mut r = self.clone();
        let pivots = r.rref();
        let nullity = self.cols - pivots.len();
        match nullity {
            0 => return Err(ArithError::NoDependence),
            1 => {}
            k => return Err(ArithError::NotCorankOne(k)),
        }
        let free = (0..self.cols).find(|c| !pivots.contains(c)).unwrap();
        let mut v = vec![Rational::zero(); self.cols];
        v[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(i, free).clone();
        }
        let denom = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v
            .iter()
            .map(|x| x.numer() * (&denom / x.denom()))
            .collect();
        Ok(normalize_sign(primitive(ints)))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, ArithError> {
        if v.len() != self.cols {
            return Err(ArithError::Dimension(format!(
                "{} columns times vector of length {}",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect())
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

/// Negates `v` if its first nonzero entry is negative.
pub fn normalize_sign(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in &mut v {
            *x = -&*x;
        }
    }
    v
}

/// Determinant of a square integer matrix given as rows.
///
/// Runs Bareiss in `i128` with checked arithmetic and restarts in big
/// integers on the first overflow.
pub fn int_determinant(rows: &[&[i64]]) -> BigInt {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    match bareiss_i128(rows) {
        Some(d) => BigInt::from(d),
        None => bareiss_big(rows),
    }
}

fn bareiss_i128(rows: &[&[i64]]) -> Option<i128> {
    let n = rows.len();
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<i128> = rows.iter().flat_map(|r| r.iter().map(|&x| x as i128)).collect();
    let mut prev: i128 = 1;
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i * n + k] != 0) else {
            return Some(0);
        };
        if p != k {
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            negate = !negate;
        }
        let akk = a[k * n + k];
        for i in k + 1..n {
            let aik = a[i * n + k];
            for j in k + 1..n {
                let num = akk
                    .checked_mul(a[i * n + j])?
                    .checked_sub(aik.checked_mul(a[k * n + j])?)?;
                a[i * n + j] = num / prev;
            }
        }
        prev = akk;
    }
    Some(if negate { -prev } else { prev })
}

fn bareiss_big(rows: &[&[i64]]) -> BigInt {
    let n = rows.len();
    let mut a: Vec<BigInt> = rows
        .iter()
        .flat_map(|r| r.iter().map(|&x| BigInt::from(x)))
        .collect();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i * n + k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k * n + k] * &a[i * n + j] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = num / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    if negate {
        -prev
    } else {
        prev
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_int_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(Matrix::identity(2).determinant().unwrap(), rat(1));
        assert_eq!(m(&[&[3, 0], &[0, 3]]).determinant().unwrap(), rat(9));
        assert_eq!(m(&[&[1, 0], &[1, 1]]).determinant().unwrap(), rat(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant().unwrap(), rat(-1));
        assert!(matches!(
            m(&[&[1, 2, 3]]).determinant(),
            Err(ArithError::Dimension(_))
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::zeros(3, 3).rank(), 0);
        assert_eq!(Matrix::identity(3).rank(), 3);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    fn homogenized_columns(points: &[(i64, i64)]) -> Matrix {
        m(&[
            &points.iter().map(|_| 1).collect::<Vec<_>>(),
            &points.iter().map(|p| p.0).collect::<Vec<_>>(),
            &points.iter().map(|p| p.1).collect::<Vec<_>>(),
        ])
    }

    #[test]
    fn kernel_of_square() {
        let k = homogenized_columns(&[(0, 0), (1, 0), (1, 1), (0, 1)])
            .kernel_vector()
            .unwrap();
        assert_eq!(k, [1, -1, 1, -1].map(BigInt::from));
    }

    #[test]
    fn kernel_of_triangle_with_interior_point() {
        let k = homogenized_columns(&[(0, 0), (3, 0), (0, 3), (1, 1)])
            .kernel_vector()
            .unwrap();
        assert_eq!(k, [1, 1, 1, -3].map(BigInt::from));
    }

    #[test]
    fn kernel_errors() {
        assert_eq!(
            homogenized_columns(&[(0, 0), (1, 0), (2, 0), (3, 0)]).kernel_vector(),
            Err(ArithError::NotCorankOne(2))
        );
        assert_eq!(Matrix::identity(3).kernel_vector(), Err(ArithError::NoDependence));
    }

    #[test]
    fn int_determinant_overflow_falls_back() {
        let big = i64::MAX / 2;
        let rows: Vec<Vec<i64>> = vec![vec![big, 1, 0], vec![0, big, 1], vec![1, 0, big]];
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let expect = Matrix::from_int_rows(&rows).unwrap().determinant().unwrap();
        assert_eq!(rat(int_determinant(&refs)), expect);
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-5i64..=5, n), n)
    }

    proptest! {
        #[test]
        fn row_swap_negates(rows in (2usize..5).prop_flat_map(small_matrix), a in 0usize..5, b in 0usize..5) {
            let n = rows.len();
            let (a, b) = (a % n, b % n);
            prop_assume!(a != b);
            let mut swapped = rows.clone();
            swapped.swap(a, b);
            let d1 = Matrix::from_int_rows(&rows).unwrap().determinant().unwrap();
            let d2 = Matrix::from_int_rows(&swapped).unwrap().determinant().unwrap();
            prop_assert_eq!(d1, -d2);
        }

        #[test]
        fn fast_determinant_agrees(rows in (1usize..6).prop_flat_map(small_matrix)) {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            let expect = Matrix::from_int_rows(&rows).unwrap().determinant().unwrap();
            prop_assert_eq!(rat(int_determinant(&refs)), expect);
        }

        #[test]
        fn kernel_vector_is_primitive_and_annihilating(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 3)) {
            let mat = Matrix::from_int_rows(&rows).unwrap();
            if let Ok(v) = mat.kernel_vector() {
                let vr: Vec<Rational> = v.iter().cloned().map(rat).collect();
                prop_assert!(mat.mul_vec(&vr).unwrap().iter().all(Zero::is_zero));
                let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                prop_assert!(g.is_one());
                prop_assert!(v.iter().find(|x| !x.is_zero()).unwrap().is_positive());
            }
        }

        #[test]
        fn division_roundtrip(a in -1000i64..1000, b in 1i64..1000, c in 1i64..50) {
            let x = Rational::new(a.into(), c.into());
            let y = rat(b);
            prop_assert_eq!((&x / &y) * &y, x);
        }
    }
}
