//! Point permutation groups and orbits of triangulations.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::config::PointConfiguration;
use crate::triangulation::Triangulation;

pub const DEFAULT_ORDER_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("generator {0} has length {1}, expected {2}")]
    Length(usize, usize, usize),
    #[error("generator {0} is not a permutation")]
    NotPermutation(usize),
    #[error("generator {0} is not an affine symmetry of the points")]
    NotSymmetry(usize),
    #[error("group order exceeds {0}")]
    OrderCap(usize),
    #[error("more than {0} orbits")]
    OrbitBudget(usize),
}

/// A permutation group on point labels, stored with all its elements.
/// Element `g` maps label `i` to `g[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryGroup {
    generators: Vec<Vec<usize>>,
    elements: Vec<Vec<usize>>,
}

impl SymmetryGroup {
    /// The trivial group on `n` labels.
    pub fn trivial(n: usize) -> Self {
        Self {
            generators: Vec::new(),
            elements: vec![(0..n).collect()],
        }
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Closes `generators` under composition after checking that each is a
/// permutation induced by an affine symmetry of `config`.
pub fn expand_group(
    config: &PointConfiguration,
    generators: &[Vec<usize>],
    cap: usize,
) -> Result<SymmetryGroup, SymmetryError> {
    let n = config.len();
    let frame = config.basis();
    let coords = config
        .barycentric(frame)
        .expect("the configuration basis is affinely independent");
    for (k, g) in generators.iter().enumerate() {
        if g.len() != n {
            return Err(SymmetryError::Length(k, g.len(), n));
        }
        let mut seen = vec![false; n];
        for &x in g {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(SymmetryError::NotPermutation(k));
            }
        }
        // An affine map sends the frame to its image and preserves
        // barycentric coordinates.
        let image: Vec<usize> = frame.iter().map(|&f| g[f]).collect();
        let Some(mapped) = config.barycentric(&image) else {
            return Err(SymmetryError::NotSymmetry(k));
        };
        if (0..n).any(|i| coords[i] != mapped[g[i]]) {
            return Err(SymmetryError::NotSymmetry(k));
        }
    }

    let identity: Vec<usize> = (0..n).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([identity.clone()]);
    let mut elements = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(e) = queue.pop_front() {
        for g in generators {
            let next: Vec<usize> = e.iter().map(|&i| g[i]).collect();
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(SymmetryError::OrderCap(cap));
                }
                elements.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    elements.sort_unstable();
    Ok(SymmetryGroup {
        generators: generators.to_vec(),
        elements,
    })
}

/// The smallest image of `t` under `group`, in the order of `Triangulation`.
pub fn canonical_form(t: &Triangulation, group: &SymmetryGroup) -> Triangulation {
    group
        .elements
        .iter()
        .map(|g| t.relabeled(g))
        .min()
        .expect("a group has an identity")
}

/// Number of group elements fixing `t`.
pub fn stabilizer_order(t: &Triangulation, group: &SymmetryGroup) -> usize {
    group.elements.iter().filter(|g| t.relabeled(g) == *t).count()
}

/// Counts distinct orbits among triangulations fed one at a time.
#[derive(Debug, Clone)]
pub struct OrbitCounter<'g> {
    group: &'g SymmetryGroup,
    seen: HashSet<Triangulation>,
    limit: usize,
}

impl<'g> OrbitCounter<'g> {
    pub fn new(group: &'g SymmetryGroup) -> Self {
        Self::with_limit(group, usize::MAX)
    }

    /// Fails once more than `limit` orbits are stored.
    pub fn with_limit(group: &'g SymmetryGroup, limit: usize) -> Self {
        Self {
            group,
            seen: HashSet::new(),
            limit,
        }
    }

    /// Records `t`; true if its orbit is new.
    pub fn insert(&mut self, t: &Triangulation) -> Result<bool, SymmetryError> {
        let fresh = self.seen.insert(canonical_form(t, self.group));
        if self.seen.len() > self.limit {
            return Err(SymmetryError::OrbitBudget(self.limit));
        }
        Ok(fresh)
    }

    pub fn count(&self) -> usize {
        self.seen.len()
    }
}

/// Number of orbits among `triangulations`.
pub fn orbit_count<'a>(
    triangulations: impl IntoIterator<Item = &'a Triangulation>,
    group: &SymmetryGroup,
) -> usize {
    let mut counter = OrbitCounter::new(group);
    for t in triangulations {
        counter.insert(t).expect("unlimited counter");
    }
    counter.count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::gkz;

    fn square() -> PointConfiguration {
        PointConfiguration::new(vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 1]]).unwrap()
    }

    #[test]
    fn cyclic_square() {
        let c = square();
        let g = expand_group(&c, &[vec![1, 2, 3, 0]], DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(expand_group(&c, &[], DEFAULT_ORDER_CAP).unwrap().order(), 1);
        assert_eq!(
            expand_group(&c, &[vec![1, 2, 3, 0]], 3),
            Err(SymmetryError::OrderCap(3))
        );
    }

    #[test]
    fn bad_generators() {
        let c = square();
        assert_eq!(
            expand_group(&c, &[vec![0, 1, 2]], 10),
            Err(SymmetryError::Length(0, 3, 4))
        );
        assert_eq!(
            expand_group(&c, &[vec![0, 1, 1, 2]], 10),
            Err(SymmetryError::NotPermutation(0))
        );
        // Swapping two adjacent corners is not affine.
        assert_eq!(
            expand_group(&c, &[vec![1, 0, 2, 3]], 10),
            Err(SymmetryError::NotSymmetry(0))
        );
        // Point 3 is the midpoint of 0 and 1.
        let c = PointConfiguration::new(vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 0]])
            .unwrap();
        assert!(expand_group(&c, &[vec![1, 0, 2, 3]], 10).is_ok());
        assert_eq!(
            expand_group(&c, &[vec![2, 1, 0, 3]], 10),
            Err(SymmetryError::NotSymmetry(0))
        );
    }

    #[test]
    fn square_orbits() {
        let c = square();
        let g = expand_group(&c, &[vec![1, 2, 3, 0]], DEFAULT_ORDER_CAP).unwrap();
        let a = Triangulation::from_indices(&[&[0, 1, 2], &[0, 2, 3]]);
        let b = Triangulation::from_indices(&[&[0, 1, 3], &[1, 2, 3]]);
        assert_eq!(canonical_form(&a, &g), canonical_form(&b, &g));
        assert_eq!(canonical_form(&a.relabeled(&[1, 2, 3, 0]), &g), canonical_form(&a, &g));
        assert_eq!(orbit_count([&a, &b], &g), 1);
        assert_eq!(stabilizer_order(&a, &g), 2);
        assert_eq!(canonical_form(&a, &SymmetryGroup::trivial(4)), a);
    }

    #[test]
    fn gkz_follows_relabeling() {
        let c = square();
        let g = expand_group(&c, &[vec![1, 2, 3, 0]], DEFAULT_ORDER_CAP).unwrap();
        let t = Triangulation::from_indices(&[&[0, 1, 2], &[0, 2, 3]]);
        for p in g.elements() {
            assert_eq!(gkz(&c, &t.relabeled(p)), gkz(&c, &t).permuted(p));
        }
    }

    #[test]
    fn orbit_budget() {
        let g = SymmetryGroup::trivial(4);
        let mut counter = OrbitCounter::with_limit(&g, 1);
        let a = Triangulation::from_indices(&[&[0, 1, 2], &[0, 2, 3]]);
        assert_eq!(counter.insert(&a), Ok(true));
        assert_eq!(counter.insert(&a), Ok(false));
        let b = Triangulation::from_indices(&[&[0, 1, 3], &[1, 2, 3]]);
        assert_eq!(counter.insert(&b), Err(SymmetryError::OrbitBudget(1)));
    }
}
