//! Regularity of triangulations and of flips.
//!
//! A triangulation is regular iff some height function lifts it to the lower
//! hull of the lifted points. That is a strict homogeneous system with one
//! row per interior facet and per unused point. A flip out of a regular
//! triangulation leads to a regular one iff its GKZ-vector spans an
//! extremal ray of the edge cone generated by all flip GKZ-vectors.

mod rays;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::config::PointConfiguration;
use crate::flip::Flip;
use crate::lp::{self, Feasibility};
use crate::triangulation::Triangulation;

pub use rays::{
    extremal_rays, is_positive_multiple, screen_rays, Deferred, Extremality, RayError, RaySystem,
    RayVector, Rule, ScreeningOutcome, ScreeningStats, Step, Tag,
};

/// Heights `h` with `r·h ≥ 1` for every regularity row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightWitness {
    pub heights: Vec<Rational>,
}

impl HeightWitness {
    pub fn verify(&self, rows: &[Vec<BigInt>]) -> bool {
        rows.iter().all(|r| {
            r.len() == self.heights.len()
                && r.iter()
                    .zip(&self.heights)
                    .map(|(a, h)| h * a)
                    .sum::<Rational>()
                    >= Rational::one()
        })
    }
}

/// Nonnegative multipliers, not all zero, combining the regularity rows to
/// zero. No height function can satisfy all rows strictly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonRegularCertificate {
    pub multipliers: Vec<Rational>,
}

impl NonRegularCertificate {
    pub fn verify(&self, rows: &[Vec<BigInt>]) -> bool {
        let n = rows.first().map_or(0, Vec::len);
        self.multipliers.len() == rows.len()
            && self.multipliers.iter().all(|g| !g.is_negative())
            && self.multipliers.iter().any(|g| !g.is_zero())
            && (0..n).all(|j| {
                rows.iter()
                    .zip(&self.multipliers)
                    .map(|(r, g)| g * &r[j])
                    .sum::<Rational>()
                    .is_zero()
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regularity {
    Regular(HeightWitness),
    NonRegular(NonRegularCertificate),
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular(_))
    }

    pub fn verify(&self, rows: &[Vec<BigInt>]) -> bool {
        match self {
            Regularity::Regular(w) => w.verify(rows),
            Regularity::NonRegular(c) => c.verify(rows),
        }
    }
}

/// Rows `r` such that `t` is induced by the heights `h` iff `r·h > 0` for
/// every row.
///
/// Each interior facet shared by `S1` and `S2` contributes the dependence of
/// `S1 ∪ S2`, signed positive at the two vertices off the facet. Each unused
/// point `u` contributes, for every simplex containing it, the dependence of
/// the simplex and `u` signed positive at `u`.
pub fn regularity_rows(config: &PointConfiguration, t: &Triangulation) -> Vec<Vec<BigInt>> {
    let n = config.len();
    let scatter = |indices: &[usize], lambda: &[BigInt], positive_at: usize| {
        let mut row = vec![BigInt::zero(); n];
        let negate = lambda[indices.iter().position(|&i| i == positive_at).unwrap()].is_negative();
        for (&i, l) in indices.iter().zip(lambda) {
            row[i] = if negate { -l } else { l.clone() };
        }
        row
    };

    let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for s in t.simplices() {
        for (facet, opposite) in s.facets() {
            facets.entry(facet).or_default().push(opposite);
        }
    }
    let mut rows = Vec::new();
    for (facet, opposite) in &facets {
        if let [p, q] = opposite[..] {
            let mut j = facet.clone();
            j.push(p);
            j.push(q);
            j.sort_unstable();
            rows.push(scatter(&j, &config.dependence(&j), p));
        }
    }

    let used = t.used_points();
    for u in (0..n).filter(|u| used.binary_search(u).is_err()) {
        for s in t.simplices() {
            let mut j = s.vertices().to_vec();
            j.push(u);
            let row = scatter(&j, &config.dependence(&j), u);
            if s.vertices().iter().all(|&i| !row[i].is_positive()) {
                rows.push(row);
            }
        }
    }
    rows
}

/// Decides regularity of a valid triangulation with an exact witness.
pub fn is_regular(config: &PointConfiguration, t: &Triangulation) -> Regularity {
    let rows = regularity_rows(config, t);
    regularity_of_rows(config.len(), &rows)
}

pub(crate) fn regularity_of_rows(n: usize, rows: &[Vec<BigInt>]) -> Regularity {
    let rational: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().cloned().map(Rational::from_integer).collect())
        .collect();
    let answer = lp::strict_homogeneous(&rational).expect("rows share the configuration size");
    debug_assert!(lp::verify_strict(&rational, &answer));
    match answer {
        Feasibility::Feasible(h) if h.is_empty() => Regularity::Regular(HeightWitness {
            heights: vec![Rational::zero(); n],
        }),
        Feasibility::Feasible(heights) => Regularity::Regular(HeightWitness { heights }),
        Feasibility::Infeasible(multipliers) => {
            Regularity::NonRegular(NonRegularCertificate { multipliers })
        }
    }
}

/// Positions in `flips` of the flips of a regular triangulation whose
/// targets are regular.
pub fn regular_flips(flips: &[Flip]) -> Result<Extremality, RayError> {
    let deltas: Vec<Vec<BigInt>> = flips.iter().map(|f| f.delta.clone()).collect();
    extremal_rays(&deltas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::{apply_flip, find_flips};
    use crate::triangulation::validate;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn square() -> PointConfiguration {
        PointConfiguration::new(vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 1]]).unwrap()
    }

    #[test]
    fn rows_of_square() {
        let t = Triangulation::from_indices(&[&[0, 1, 2], &[0, 2, 3]]);
        assert_eq!(regularity_rows(&square(), &t), vec![ints(&[-1, 1, -1, 1])]);
    }

    #[test]
    fn rows_of_unused_interior_point() {
        let c = PointConfiguration::new(vec![vec![0, 0], vec![3, 0], vec![0, 3], vec![1, 1]])
            .unwrap();
        let t = Triangulation::from_indices(&[&[0, 1, 2]]);
        assert_eq!(regularity_rows(&c, &t), vec![ints(&[-1, -1, -1, 3])]);
    }

    #[test]
    fn rows_of_simplex() {
        let c = PointConfiguration::new(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let t = Triangulation::from_indices(&[&[0, 1, 2]]);
        assert!(regularity_rows(&c, &t).is_empty());
        let r = is_regular(&c, &t);
        assert!(r.is_regular());
        assert!(r.verify(&[]));
    }

    #[test]
    fn square_triangulations_are_regular() {
        let c = square();
        for t in [
            Triangulation::from_indices(&[&[0, 1, 2], &[0, 2, 3]]),
            Triangulation::from_indices(&[&[0, 1, 3], &[1, 2, 3]]),
        ] {
            let r = is_regular(&c, &t);
            assert!(r.is_regular());
            assert!(r.verify(&regularity_rows(&c, &t)));
        }
    }

    #[test]
    fn pinwheel_is_not_regular() {
        let c = PointConfiguration::new(vec![
            vec![0, 0],
            vec![4, 0],
            vec![0, 4],
            vec![1, 1],
            vec![2, 1],
            vec![1, 2],
        ])
        .unwrap();
        let t = Triangulation::from_indices(&[
            &[0, 1, 4],
            &[0, 3, 4],
            &[1, 2, 5],
            &[1, 4, 5],
            &[0, 2, 3],
            &[2, 3, 5],
            &[3, 4, 5],
        ]);
        validate(&c, &t).unwrap();
        let r = is_regular(&c, &t);
        assert!(matches!(r, Regularity::NonRegular(_)));
        assert!(r.verify(&regularity_rows(&c, &t)));
    }

    #[test]
    fn sole_flip_of_square_is_regular() {
        let c = square();
        let t = Triangulation::from_indices(&[&[0, 1, 2], &[0, 2, 3]]);
        let flips = find_flips(&c, &t);
        assert_eq!(flips.len(), 1);
        let e = regular_flips(&flips).unwrap();
        assert_eq!(e.extremal.into_iter().collect::<Vec<_>>(), vec![0]);
        assert!(is_regular(&c, &apply_flip(&t, &flips[0]).unwrap()).is_regular());
    }
}
