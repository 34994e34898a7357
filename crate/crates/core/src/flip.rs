//! Flips between triangulations.
//!
//! A flip is supported on a circuit `Z = Z+ ∪ Z-` together with a link `L`:
//! the triangulation contains every simplex `(Z \ {j}) ∪ τ` for `j ∈ Z+` and
//! `τ ∈ L`, and these are replaced by `(Z \ {j}) ∪ τ` for `j ∈ Z-`. Each
//! `Z ∪ τ` is a corank-one configuration whose zero set is `τ`. When the
//! circuit is full-dimensional the link is the single empty cell and the
//! flip is supported on exactly one corank-one configuration.

use std::collections::HashSet;
use std::fmt;
use std::num::NonZeroUsize;

use lru::LruCache;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::config::PointConfiguration;
use crate::triangulation::{write_int_tuple, GkzVector, Simplex, Triangulation};

/// Signed Radon partition of a circuit, oriented so that the simplices
/// `Z \ {j}` for `j ∈ plus` are the ones present before the flip.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Circuit {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

impl Circuit {
    /// Sorted support `Z`.
    pub fn support(&self) -> Vec<usize> {
        let mut z: Vec<usize> = self.plus.iter().chain(&self.minus).copied().collect();
        z.sort_unstable();
        z
    }

    pub fn reversed(&self) -> Self {
        Self {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flip {
    pub circuit: Circuit,
    /// Sorted link cells; `[[]]` for a full-dimensional circuit.
    pub link: Vec<Vec<usize>>,
    pub removed: Vec<Simplex>,
    pub inserted: Vec<Simplex>,
    /// `gkz(T') - gkz(T)`.
    pub delta: Vec<BigInt>,
}

impl Flip {
    /// Points of the link, i.e. the zero part of the supporting corank-one
    /// configurations.
    pub fn zero(&self) -> Vec<usize> {
        let mut z: Vec<usize> = self.link.iter().flatten().copied().collect();
        z.sort_unstable();
        z.dedup();
        z
    }

    /// The corank-one configurations `Z ∪ τ` supporting this flip.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let support = self.circuit.support();
        self.link
            .iter()
            .map(|tau| {
                let mut j: Vec<usize> = support.iter().chain(tau).copied().collect();
                j.sort_unstable();
                j
            })
            .collect()
    }

    /// The flip leading back.
    pub fn reversed(&self) -> Self {
        Self {
            circuit: self.circuit.reversed(),
            link: self.link.clone(),
            removed: self.inserted.clone(),
            inserted: self.removed.clone(),
            delta: self.delta.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for Flip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |v: &[usize]| {
            let inner: Vec<String> = v.iter().map(ToString::to_string).collect();
            format!("{{{}}}", inner.join(","))
        };
        write!(
            f,
            "{}|{}|{} ",
            set(&self.circuit.plus),
            set(&self.zero()),
            set(&self.circuit.minus)
        )?;
        write_int_tuple(f, &self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("flip removes {0}, which is not in the triangulation")]
    Stale(Simplex),
}

/// Flip detection with a memo of circuit computations shared across
/// triangulations of the same configuration.
pub struct FlipFinder<'a> {
    config: &'a PointConfiguration,
    dependences: LruCache<Vec<usize>, Vec<BigInt>>,
}

impl<'a> FlipFinder<'a> {
    pub const DEFAULT_MEMO: usize = 1 << 16;

    pub fn new(config: &'a PointConfiguration) -> Self {
        Self::with_memo(config, Self::DEFAULT_MEMO)
    }

    pub fn with_memo(config: &'a PointConfiguration, capacity: usize) -> Self {
        Self {
            config,
            dependences: LruCache::new(NonZeroUsize::new(capacity.max(1)).unwrap()),
        }
    }

    pub fn config(&self) -> &'a PointConfiguration {
        self.config
    }

    fn raw_dependence(&mut self, j: &[usize]) -> Vec<BigInt> {
        if let Some(v) = self.dependences.get(j) {
            return v.clone();
        }
        let v = self.config.dependence_raw(j);
        self.dependences.put(j.to_vec(), v.clone());
        v
    }

    /// All flips of `t`, sorted by circuit.
    ///
    /// Candidates are the sets `S ∪ {p}` for a simplex `S` of `t` and a
    /// point `p` outside it; each determines a circuit with `p` on the plus
    /// side. The circuit is flippable iff all of its plus-side faces have
    /// the same link in `t`.
    pub fn find(&mut self, t: &Triangulation) -> Vec<Flip> {
        let n = self.config.len();
        let mut seen: HashSet<Circuit> = HashSet::new();
        let mut flips = Vec::new();
        for s in t.simplices() {
            for p in (0..n).filter(|&p| !s.contains(p)) {
                let mut j = s.vertices().to_vec();
                let at = j.partition_point(|&x| x < p);
                j.insert(at, p);
                let raw = self.raw_dependence(&j);
                let flip_sign = raw[at].is_negative();
                let (mut plus, mut minus) = (Vec::new(), Vec::new());
                for (&i, l) in j.iter().zip(&raw) {
                    if l.is_zero() {
                        continue;
                    }
                    if l.is_positive() != flip_sign {
                        plus.push(i);
                    } else {
                        minus.push(i);
                    }
                }
                let circuit = Circuit { plus, minus };
                if !seen.insert(circuit.clone()) {
                    continue;
                }
                if let Some(flip) = self.build(t, circuit, p) {
                    flips.push(flip);
                }
            }
        }
        flips.sort_by(|a, b| a.circuit.cmp(&b.circuit));
        flips
    }

    fn build(&mut self, t: &Triangulation, circuit: Circuit, p: usize) -> Option<Flip> {
        let support = circuit.support();
        let face_without = |j: usize| -> Vec<usize> {
            support.iter().copied().filter(|&x| x != j).collect()
        };
        let link = link_of(t, &face_without(p));
        for &j in circuit.plus.iter().filter(|&&j| j != p) {
            if link_of(t, &face_without(j)) != link {
                return None;
            }
        }
        let join = |face: Vec<usize>, tau: &[usize]| {
            Simplex::new(face.into_iter().chain(tau.iter().copied()).collect())
        };
        let mut removed = Vec::new();
        let mut inserted = Vec::new();
        let mut delta = vec![BigInt::zero(); self.config.len()];
        for tau in &link {
            for &j in &circuit.plus {
                removed.push(join(face_without(j), tau));
            }
            for &j in &circuit.minus {
                inserted.push(join(face_without(j), tau));
            }
            let mut cell: Vec<usize> = support.iter().chain(tau).copied().collect();
            cell.sort_unstable();
            let raw = self.raw_dependence(&cell);
            let at = cell.binary_search(&p).unwrap();
            let negate = raw[at].is_negative();
            for (&i, l) in cell.iter().zip(&raw) {
                if negate {
                    delta[i] -= l;
                } else {
                    delta[i] += l;
                }
            }
        }
        removed.sort_unstable();
        inserted.sort_unstable();
        debug_assert!(delta.iter().any(|x| !x.is_zero()));
        Some(Flip {
            circuit,
            link,
            removed,
            inserted,
            delta,
        })
    }
}

/// Sorted link of `face` in `t`: the complements `S \ face` over all
/// simplices `S ⊇ face`.
fn link_of(t: &Triangulation, face: &[usize]) -> Vec<Vec<usize>> {
    let mut link: Vec<Vec<usize>> = t
        .simplices()
        .iter()
        .filter(|s| face.iter().all(|&v| s.contains(v)))
        .map(|s| {
            s.vertices()
                .iter()
                .copied()
                .filter(|v| !face.contains(v))
                .collect()
        })
        .collect();
    link.sort_unstable();
    link
}

pub fn find_flips(config: &PointConfiguration, t: &Triangulation) -> Vec<Flip> {
    FlipFinder::new(config).find(t)
}

/// Flip GKZ-vector from volumes: `+vol((Z \ {j}) ∪ τ)` for `j ∈ Z+`,
/// `-vol(...)` for `j ∈ Z-`, summed over link cells; zero elsewhere.
pub fn flip_gkz(config: &PointConfiguration, flip: &Flip) -> Vec<BigInt> {
    let mut delta = vec![BigInt::zero(); config.len()];
    let support = flip.circuit.support();
    for tau in &flip.link {
        let vol_without = |j: usize| {
            let s: Vec<usize> = support
                .iter()
                .copied()
                .filter(|&x| x != j)
                .chain(tau.iter().copied())
                .collect();
            config.orientation_unchecked(&s).abs()
        };
        for &j in &flip.circuit.plus {
            delta[j] += vol_without(j);
        }
        for &j in &flip.circuit.minus {
            delta[j] -= vol_without(j);
        }
    }
    delta
}

pub fn apply_flip(t: &Triangulation, flip: &Flip) -> Result<Triangulation, FlipError> {
    if let Some(missing) = flip.removed.iter().find(|s| !t.contains(s)) {
        return Err(FlipError::Stale(missing.clone()));
    }
    let kept = t
        .simplices()
        .iter()
        .filter(|s| flip.removed.binary_search(s).is_err())
        .cloned();
    Ok(Triangulation::new(kept.chain(flip.inserted.iter().cloned())))
}

/// `gkz + delta`, the incremental GKZ-vector of a flip target.
pub fn flipped_gkz(gkz: &GkzVector, flip: &Flip) -> GkzVector {
    gkz.add(&flip.delta)
}
