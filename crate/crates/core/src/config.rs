//! Point configurations, volumes and corank-one subsets.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::arith::{self, int_determinant, ArithError, Matrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("a point configuration needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("point {index} has {found} coordinates, expected {expected}")]
    Ragged {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("points {first} and {second} coincide")]
    Duplicate { first: usize, second: usize },
    #[error("expected {expected} point indices, got {found}")]
    Cardinality { expected: usize, found: usize },
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("points {0:?} do not span the affine hull")]
    Degenerate(Vec<usize>),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A labeled set of distinct integer points.
///
/// Configurations that are not full-dimensional in their ambient space are
/// handled by projecting onto a subset of the ambient coordinates that is
/// injective on the affine hull. The projection is an integral affine
/// isomorphism onto `Z^d`, so affine dependences, orientations and volume
/// ratios are preserved and all volumes stay integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfiguration {
    points: Vec<Vec<i64>>,
    dim: usize,
    projection: Vec<usize>,
    homogenized: Vec<Vec<i64>>,
    basis: Vec<usize>,
}

impl PointConfiguration {
    pub fn new(points: Vec<Vec<i64>>) -> Result<Self, ConfigError> {
        if points.len() < 2 {
            return Err(ConfigError::TooFewPoints(points.len()));
        }
        let ambient = points[0].len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != ambient {
                return Err(ConfigError::Ragged {
                    index,
                    expected: ambient,
                    found: p.len(),
                });
            }
        }
        let mut seen: HashMap<&[i64], usize> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if let Some(&first) = seen.get(p.as_slice()) {
                return Err(ConfigError::Duplicate { first, second: i });
            }
            seen.insert(p, i);
        }

        // Greedily keep ambient coordinates that raise the rank of the
        // homogenized point matrix.
        let mut projection = Vec::new();
        let mut rank = 1;
        for c in 0..ambient {
            let mut trial = projection.clone();
            trial.push(c);
            let r = homogenized_rank(&points, &trial);
            if r > rank {
                rank = r;
                projection = trial;
            }
        }
        let dim = projection.len();
        let homogenized: Vec<Vec<i64>> = points
            .iter()
            .map(|p| {
                std::iter::once(1)
                    .chain(projection.iter().map(|&c| p[c]))
                    .collect()
            })
            .collect();

        let mut basis: Vec<usize> = Vec::with_capacity(dim + 1);
        for i in 0..points.len() {
            if basis.len() == dim + 1 {
                break;
            }
            let mut trial = basis.clone();
            trial.push(i);
            let rows: Vec<Vec<i64>> = trial.iter().map(|&j| homogenized[j].clone()).collect();
            if Matrix::from_int_rows(&rows)?.rank() == trial.len() {
                basis = trial;
            }
        }

        Ok(Self {
            points,
            dim,
            projection,
            homogenized,
            basis,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Affine dimension of the configuration.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[i64] {
        &self.points[i]
    }

    /// Ambient coordinates used as the internal affine chart.
    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    /// The first `d+1` affinely independent points in input order.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Point `i` as `(1, x_1, ..., x_d)` in internal coordinates.
    pub fn homogenized(&self, i: usize) -> &[i64] {
        &self.homogenized[i]
    }

    fn check_indices(&self, indices: &[usize], expected: usize) -> Result<(), ConfigError> {
        if indices.len() != expected {
            return Err(ConfigError::Cardinality {
                expected,
                found: indices.len(),
            });
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(ConfigError::IndexOutOfRange(i));
        }
        Ok(())
    }

    /// Signed determinant of the homogenized points, in the given order.
    pub fn orientation(&self, simplex: &[usize]) -> Result<BigInt, ConfigError> {
        self.check_indices(simplex, self.dim + 1)?;
        Ok(self.orientation_unchecked(simplex))
    }

    pub(crate) fn orientation_unchecked(&self, simplex: &[usize]) -> BigInt {
        let rows: Vec<&[i64]> = simplex.iter().map(|&i| self.homogenized(i)).collect();
        int_determinant(&rows)
    }

    /// Absolute determinant of the homogenized simplex; zero iff degenerate.
    pub fn normalized_volume(&self, simplex: &[usize]) -> Result<BigInt, ConfigError> {
        Ok(self.orientation(simplex)?.abs())
    }

    /// The unique affine dependence of `d+2` points spanning the affine hull.
    pub fn corank_one(&self, indices: &[usize]) -> Result<CorankOneConfig, ConfigError> {
        self.check_indices(indices, self.dim + 2)?;
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConfigError::Degenerate(sorted));
        }
        let lambda = self.dependence(&sorted);
        if lambda.iter().all(Zero::is_zero) {
            return Err(ConfigError::Degenerate(sorted));
        }
        Ok(CorankOneConfig::new(sorted, lambda))
    }

    /// Cramer-rule kernel of the homogenized columns of `indices`, made
    /// primitive with the first nonzero entry positive. All zero when the
    /// points do not span the affine hull.
    pub(crate) fn dependence(&self, indices: &[usize]) -> Vec<BigInt> {
        arith::normalize_sign(arith::primitive(self.dependence_raw(indices)))
    }

    /// Unreduced Cramer kernel: entry `k` is `±det` of the homogenized
    /// points `indices` without `indices[k]`, so its absolute value is the
    /// volume of that simplex.
    pub(crate) fn dependence_raw(&self, indices: &[usize]) -> Vec<BigInt> {
        let mut lambda = Vec::with_capacity(indices.len());
        let mut minor: Vec<&[i64]> = Vec::with_capacity(indices.len() - 1);
        for skip in 0..indices.len() {
            minor.clear();
            minor.extend(
                indices
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &i)| self.homogenized(i)),
            );
            let det = int_determinant(&minor);
            lambda.push(if skip % 2 == 0 { det } else { -det });
        }
        lambda
    }

    /// Barycentric coordinates of every point with respect to the affinely
    /// independent `frame`, or `None` if `frame` is not a basis.
    pub fn barycentric(&self, frame: &[usize]) -> Option<Vec<Vec<Rational>>> {
        if frame.len() != self.dim + 1 {
            return None;
        }
        // Columns are the homogenized frame points; solve M x = p for all p.
        let k = self.dim + 1;
        let mut aug = Matrix::zeros(k, k + self.len());
        for (col, &f) in frame.iter().enumerate() {
            for row in 0..k {
                aug.set(row, col, arith::rat(self.homogenized(f)[row]));
            }
        }
        for p in 0..self.len() {
            for row in 0..k {
                aug.set(row, k + p, arith::rat(self.homogenized(p)[row]));
            }
        }
        let left: Vec<Vec<Rational>> = (0..k).map(|r| aug.row(r)[..k].to_vec()).collect();
        if Matrix::from_rows(left).ok()?.rank() < k {
            return None;
        }
        let solved = solve_in_place(aug, k);
        Some(
            (0..self.len())
                .map(|p| (0..k).map(|r| solved.get(r, k + p).clone()).collect())
                .collect(),
        )
    }
}

fn solve_in_place(mut aug: Matrix, k: usize) -> Matrix {
    for c in 0..k {
        let p = (c..k).find(|&i| !aug.get(i, c).is_zero()).expect("nonsingular frame");
        if p != c {
            for j in 0..aug.cols() {
                let a = aug.get(p, j).clone();
                let b = aug.get(c, j).clone();
                aug.set(p, j, b);
                aug.set(c, j, a);
            }
        }
        let inv = aug.get(c, c).recip();
        for j in 0..aug.cols() {
            let v = aug.get(c, j) * &inv;
            aug.set(c, j, v);
        }
        for i in 0..k {
            if i != c && !aug.get(i, c).is_zero() {
                let f = aug.get(i, c).clone();
                for j in 0..aug.cols() {
                    let v = aug.get(i, j) - &f * aug.get(c, j);
                    aug.set(i, j, v);
                }
            }
        }
    }
    aug
}

fn homogenized_rank(points: &[Vec<i64>], coords: &[usize]) -> usize {
    let rows: Vec<Vec<i64>> = points
        .iter()
        .map(|p| std::iter::once(1).chain(coords.iter().map(|&c| p[c])).collect())
        .collect();
    Matrix::from_int_rows(&rows).map_or(0, |m| m.rank())
}

/// A full-dimensional set of `d+2` points together with its affine
/// dependence, split by sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorankOneConfig {
    /// Sorted point indices.
    pub indices: Vec<usize>,
    /// Primitive dependence coefficients, parallel to `indices`.
    pub lambda: Vec<BigInt>,
    pub plus: Vec<usize>,
    pub zero: Vec<usize>,
    pub minus: Vec<usize>,
}

impl CorankOneConfig {
    fn new(indices: Vec<usize>, lambda: Vec<BigInt>) -> Self {
        let mut plus = Vec::new();
        let mut zero = Vec::new();
        let mut minus = Vec::new();
        for (&i, l) in indices.iter().zip(&lambda) {
            if l.is_positive() {
                plus.push(i);
            } else if l.is_negative() {
                minus.push(i);
            } else {
                zero.push(i);
            }
        }
        Self {
            indices,
            lambda,
            plus,
            zero,
            minus,
        }
    }

    /// The same configuration with the dependence negated.
    pub fn reversed(&self) -> Self {
        Self {
            indices: self.indices.clone(),
            lambda: self.lambda.iter().map(|l| -l).collect(),
            plus: self.minus.clone(),
            zero: self.zero.clone(),
            minus: self.plus.clone(),
        }
    }

    /// Coefficient of point `i`, zero if `i` is not in the set.
    pub fn coefficient(&self, i: usize) -> BigInt {
        self.indices
            .binary_search(&i)
            .map_or_else(|_| BigInt::zero(), |k| self.lambda[k].clone())
    }

    /// The dependence scattered into a length-`n` vector.
    pub fn scattered(&self, n: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); n];
        for (&i, l) in self.indices.iter().zip(&self.lambda) {
            v[i] = l.clone();
        }
        v
    }
}
