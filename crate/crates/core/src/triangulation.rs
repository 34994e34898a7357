//! Triangulations, GKZ-vectors, validation and the placing triangulation.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::config::PointConfiguration;

/// A maximal simplex, stored as its sorted vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Facets in order: the facet opposite `vertices()[k]` comes `k`-th.
    pub fn facets(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        (0..self.0.len()).map(move |k| {
            let mut f = self.0.clone();
            let opposite = f.remove(k);
            (f, opposite)
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// A set of maximal simplices, kept sorted. Its `Display` form is the
/// canonical text `{{i,j,...},{...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangulation {
    simplices: Vec<Simplex>,
}

impl Triangulation {
    pub fn new(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut simplices: Vec<Simplex> = simplices.into_iter().collect();
        simplices.sort_unstable();
        Self { simplices }
    }

    pub fn from_indices(simplices: &[&[usize]]) -> Self {
        Self::new(simplices.iter().map(|s| Simplex::new(s.to_vec())))
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.binary_search(s).is_ok()
    }

    /// Sorted indices of points that are vertices of some simplex.
    pub fn used_points(&self) -> Vec<usize> {
        let mut used: Vec<usize> = self
            .simplices
            .iter()
            .flat_map(|s| s.vertices().iter().copied())
            .collect();
        used.sort_unstable();
        used.dedup();
        used
    }

    /// The image under a relabeling of the points.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        Self::new(
            self.simplices
                .iter()
                .map(|s| Simplex::new(s.vertices().iter().map(|&v| perm[v]).collect())),
        )
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, s) in self.simplices.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed triangulation at byte {offset}: {message}")]
pub struct ParseTriangulationError {
    pub offset: usize,
    pub message: String,
}

impl FromStr for Triangulation {
    type Err = ParseTriangulationError;

    /// Parses `{{0,1,2},{0,2,3}}`. Whitespace is ignored; simplices and
    /// vertices may come in any order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let err = |offset: usize, message: &str| ParseTriangulationError {
            offset,
            message: message.to_string(),
        };
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let expect = |pos: &mut usize, c: u8| -> Result<(), ParseTriangulationError> {
            skip_ws(pos);
            if bytes.get(*pos) == Some(&c) {
                *pos += 1;
                Ok(())
            } else {
                Err(err(*pos, &format!("expected '{}'", c as char)))
            }
        };

        expect(&mut pos, b'{')?;
        let mut simplices = Vec::new();
        skip_ws(&mut pos);
        if bytes.get(pos) == Some(&b'}') {
            pos += 1;
        } else {
            loop {
                expect(&mut pos, b'{')?;
                let mut vertices = Vec::new();
                loop {
                    skip_ws(&mut pos);
                    let start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if start == pos {
                        return Err(err(pos, "expected a point index"));
                    }
                    let v = s[start..pos]
                        .parse::<usize>()
                        .map_err(|e| err(start, &e.to_string()))?;
                    vertices.push(v);
                    skip_ws(&mut pos);
                    match bytes.get(pos) {
                        Some(b',') => pos += 1,
                        Some(b'}') => {
                            pos += 1;
                            break;
                        }
                        _ => return Err(err(pos, "expected ',' or '}'")),
                    }
                }
                let mut sorted = vertices.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(err(pos, "repeated vertex in simplex"));
                }
                simplices.push(Simplex(sorted));
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b'}') => {
                        pos += 1;
                        break;
                    }
                    _ => return Err(err(pos, "expected ',' or '}'")),
                }
            }
        }
        skip_ws(&mut pos);
        if pos != bytes.len() {
            return Err(err(pos, "trailing input"));
        }
        Ok(Triangulation::new(simplices))
    }
}

/// Per-point sums of the volumes of incident simplices. Ordered
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GkzVector(pub Vec<BigInt>);

impl GkzVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![BigInt::zero(); n])
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self + delta`, entrywise.
    pub fn add(&self, delta: &[BigInt]) -> Self {
        debug_assert_eq!(self.0.len(), delta.len());
        Self(self.0.iter().zip(delta).map(|(a, b)| a + b).collect())
    }

    /// Image under a point relabeling: entry `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = vec![BigInt::zero(); self.0.len()];
        for (i, x) in self.0.iter().enumerate() {
            out[perm[i]] = x.clone();
        }
        Self(out)
    }
}

impl fmt::Display for GkzVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_int_tuple(f, &self.0)
    }
}

pub(crate) fn write_int_tuple(f: &mut fmt::Formatter<'_>, v: &[BigInt]) -> fmt::Result {
    f.write_str("(")?;
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot compare GKZ-vectors of lengths {0} and {1}")]
pub struct LengthMismatch(pub usize, pub usize);

pub fn lex_compare(a: &GkzVector, b: &GkzVector) -> Result<Ordering, LengthMismatch> {
    if a.len() != b.len() {
        return Err(LengthMismatch(a.len(), b.len()));
    }
    Ok(a.cmp(b))
}

pub fn gkz(config: &PointConfiguration, t: &Triangulation) -> GkzVector {
    let mut g = GkzVector::zeros(config.len());
    for s in t.simplices() {
        let vol = config.orientation_unchecked(s.vertices()).abs();
        for &v in s.vertices() {
            g.0[v] += &vol;
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("simplex {0} does not have d+1 vertices")]
    WrongSize(Simplex),
    #[error("simplex {0} refers to a missing point")]
    IndexOutOfRange(Simplex),
    #[error("simplex {0} is degenerate")]
    Degenerate(Simplex),
    #[error("simplex {0} appears twice")]
    Duplicate(Simplex),
    #[error("simplices cover volume {found}, the convex hull has volume {expected}")]
    TotalVolume { expected: BigInt, found: BigInt },
    #[error("facet {facet:?} lies in more than two simplices: {simplices:?}")]
    FacetOvershared {
        facet: Vec<usize>,
        simplices: Vec<Simplex>,
    },
    #[error("simplices {simplices:?} overlap across their common facet {facet:?}")]
    Overlap {
        facet: Vec<usize>,
        simplices: Vec<Simplex>,
    },
    #[error("facet {facet:?} of {simplex} is unmatched but not on the boundary")]
    OpenFacet { facet: Vec<usize>, simplex: Simplex },
}

/// Checks candidate triangulations of one configuration.
#[derive(Debug, Clone)]
pub struct Validator<'a> {
    config: &'a PointConfiguration,
    hull_volume: BigInt,
}

impl<'a> Validator<'a> {
    pub fn new(config: &'a PointConfiguration) -> Self {
        let placing = placing_triangulation(config);
        let hull_volume = placing
            .simplices()
            .iter()
            .map(|s| config.orientation_unchecked(s.vertices()).abs())
            .sum();
        Self {
            config,
            hull_volume,
        }
    }

    pub fn hull_volume(&self) -> &BigInt {
        &self.hull_volume
    }

    /// Volume, pseudo-manifold and boundary checks; reports the first
    /// violation found.
    pub fn validate(&self, t: &Triangulation) -> Result<(), Violation> {
        let cfg = self.config;
        let d = cfg.dim();
        let mut total = BigInt::zero();
        for (k, s) in t.simplices().iter().enumerate() {
            if s.vertices().len() != d + 1 {
                return Err(Violation::WrongSize(s.clone()));
            }
            if s.vertices().iter().any(|&v| v >= cfg.len()) {
                return Err(Violation::IndexOutOfRange(s.clone()));
            }
            if k > 0 && t.simplices()[k - 1] == *s {
                return Err(Violation::Duplicate(s.clone()));
            }
            let vol = cfg.orientation_unchecked(s.vertices()).abs();
            if vol.is_zero() {
                return Err(Violation::Degenerate(s.clone()));
            }
            total += vol;
        }
        if total != self.hull_volume {
            return Err(Violation::TotalVolume {
                expected: self.hull_volume.clone(),
                found: total,
            });
        }

        let mut incidence: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for (k, s) in t.simplices().iter().enumerate() {
            for (facet, opposite) in s.facets() {
                incidence.entry(facet).or_default().push((k, opposite));
            }
        }
        let mut facets: Vec<_> = incidence.into_iter().collect();
        facets.sort();
        for (facet, around) in facets {
            let side = |opposite: usize| {
                let mut v = facet.clone();
                v.push(opposite);
                cfg.orientation_unchecked(&v).sign()
            };
            let owners = || around.iter().map(|&(k, _)| t.simplices()[k].clone()).collect();
            match around.as_slice() {
                [(k, o)] => {
                    let inner = side(*o);
                    let escapes = (0..cfg.len()).any(|p| {
                        let s = side(p);
                        s != Sign::NoSign && s != inner
                    });
                    if escapes {
                        return Err(Violation::OpenFacet {
                            facet,
                            simplex: t.simplices()[*k].clone(),
                        });
                    }
                }
                [(_, o1), (_, o2)] => {
                    if side(*o1) == side(*o2) {
                        return Err(Violation::Overlap {
                            facet,
                            simplices: owners(),
                        });
                    }
                }
                _ => {
                    return Err(Violation::FacetOvershared {
                        facet,
                        simplices: owners(),
                    })
                }
            }
        }
        Ok(())
    }
}

pub fn validate(config: &PointConfiguration, t: &Triangulation) -> Result<(), Violation> {
    Validator::new(config).validate(t)
}

/// Placing triangulation for the input order: start from the first `d+1`
/// affinely independent points, then cone every later point that lies
/// strictly outside the current hull over the facets it strictly sees.
pub fn placing_triangulation(config: &PointConfiguration) -> Triangulation {
    let base: Vec<usize> = config.basis().to_vec();
    let mut simplices = vec![Simplex::new(base.clone())];
    let mut boundary: HashMap<Vec<usize>, usize> = Simplex::new(base.clone()).facets().collect();

    let side = |facet: &[usize], p: usize| {
        let mut v = facet.to_vec();
        v.push(p);
        config.orientation_unchecked(&v).sign()
    };

    for p in 0..config.len() {
        if base.contains(&p) {
            continue;
        }
        let mut visible: Vec<(Vec<usize>, usize)> = boundary
            .iter()
            .filter(|(facet, &o)| {
                let s = side(facet, p);
                s != Sign::NoSign && s != side(facet, o)
            })
            .map(|(f, &o)| (f.clone(), o))
            .collect();
        if visible.is_empty() {
            continue;
        }
        visible.sort();
        let mut new_faces: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (facet, _) in &visible {
            boundary.remove(facet);
            let mut cell = facet.clone();
            cell.push(p);
            simplices.push(Simplex::new(cell));
            for k in 0..facet.len() {
                let mut g = facet.clone();
                let opposite = g.remove(k);
                g.push(p);
                g.sort_unstable();
                new_faces.entry(g).or_default().push(opposite);
            }
        }
        for (g, opposites) in new_faces {
            if let [o] = opposites.as_slice() {
                boundary.insert(g, *o);
            }
        }
    }
    Triangulation::new(simplices)
}
