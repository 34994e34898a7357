//! Extremal rays of a sparse pointed cone with few linear programs.
//!
//! The cone is given by generators `v^1, ..., v^k`; a generator is extremal
//! iff it is not a nonnegative combination of the others. Most generators
//! are decided by sign patterns of single coordinates:
//!
//! * a coordinate where exactly one generator is nonzero, or where one
//!   generator is the only positive (negative) one, certifies that generator;
//! * a coordinate where all nonzero entries share a sign cuts out a face, so
//!   the zero-side generators can be decided inside the smaller face;
//! * a coordinate with a single positive generator `p` lets every negative
//!   generator `u` be replaced by `p[c]·u - u[c]·p`, which is zero at `c`
//!   and is already known not to be extremal.
//!
//! Generators that cannot be settled this way are deferred together with a
//! snapshot of the system they must be decided against. Deferred generators
//! are decided one at a time with the same reductions aimed at the single
//! target, then by a scalar-multiple test once a single other vector
//! remains, and only as a last resort by an exact LP.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::arith::Rational;
use crate::lp::{self, Feasibility, LpDimensionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RayError {
    #[error("zero vector in ray system; the cone is not pointed")]
    ZeroVector,
    #[error("vectors of lengths {0} and {1} in one system")]
    Dimension(usize, usize),
    #[error(transparent)]
    Lp(#[from] LpDimensionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    /// Original generator with the given id, not yet decided.
    Candidate(usize),
    /// Derived or already decided vector known not to be extremal in the
    /// original cone. It still spans part of the cone.
    KnownNonRay,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayVector {
    pub coords: Vec<BigInt>,
    pub tag: Tag,
}

/// A set of tagged generators under reduction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RaySystem {
    vectors: Vec<RayVector>,
}

impl RaySystem {
    /// Every vector becomes a candidate whose id is its position.
    pub fn from_candidates(vectors: &[Vec<BigInt>]) -> Result<Self, RayError> {
        Self::new(
            vectors
                .iter()
                .enumerate()
                .map(|(id, v)| RayVector {
                    coords: v.clone(),
                    tag: Tag::Candidate(id),
                })
                .collect(),
        )
    }

    pub fn new(vectors: Vec<RayVector>) -> Result<Self, RayError> {
        if let Some(first) = vectors.first() {
            let n = first.coords.len();
            if let Some(v) = vectors.iter().find(|v| v.coords.len() != n) {
                return Err(RayError::Dimension(n, v.coords.len()));
            }
        }
        if vectors.iter().any(|v| v.coords.iter().all(Zero::is_zero)) {
            return Err(RayError::ZeroVector);
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[RayVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.coords.len())
    }

    fn candidates(&self) -> impl Iterator<Item = usize> + '_ {
        self.vectors.iter().filter_map(|v| match v.tag {
            Tag::Candidate(id) => Some(id),
            Tag::KnownNonRay => None,
        })
    }

    fn position_of(&self, id: usize) -> Option<usize> {
        self.vectors.iter().position(|v| v.tag == Tag::Candidate(id))
    }

    /// Positions of vectors with positive and negative entries in `column`.
    fn signs(&self, column: usize) -> (Vec<usize>, Vec<usize>) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (k, v) in self.vectors.iter().enumerate() {
            if v.coords[column].is_positive() {
                pos.push(k);
            } else if v.coords[column].is_negative() {
                neg.push(k);
            }
        }
        (pos, neg)
    }
}

/// The single-coordinate reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Exactly one vector is nonzero in the column.
    Isolated,
    /// One positive and one negative vector.
    OppositePair,
    /// One vector against at least two of the opposite sign.
    OneAgainstMany,
    /// At least two nonzero vectors, all of one sign.
    OneSided,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Isolated => "isolated",
            Rule::OppositePair => "opposite_pair",
            Rule::OneAgainstMany => "one_against_many",
            Rule::OneSided => "one_sided",
        })
    }
}

/// One applied reduction, for tracing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub column: usize,
    pub confirmed: Vec<usize>,
    pub deferred: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScreeningStats {
    pub isolated: u64,
    pub opposite_pair: u64,
    pub one_against_many: u64,
    pub one_sided: u64,
    /// Candidates with a positive multiple elsewhere in their system.
    pub parallel: u64,
    /// Reductions applied while deciding a single deferred candidate.
    pub targeted: u64,
    /// Deferred candidates found extremal by a sign pattern.
    pub sign_verdicts: u64,
    /// Scalar-multiple tests against a single remaining vector.
    pub scalar_tests: u64,
    /// Simplex executions.
    pub lps_solved: u64,
}

impl ScreeningStats {
    pub fn reductions(&self) -> u64 {
        self.isolated + self.opposite_pair + self.one_against_many + self.one_sided
    }

    pub fn merge(&mut self, other: &ScreeningStats) {
        self.isolated += other.isolated;
        self.opposite_pair += other.opposite_pair;
        self.one_against_many += other.one_against_many;
        self.one_sided += other.one_sided;
        self.parallel += other.parallel;
        self.targeted += other.targeted;
        self.sign_verdicts += other.sign_verdicts;
        self.scalar_tests += other.scalar_tests;
        self.lps_solved += other.lps_solved;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deferred {
    pub system: RaySystem,
    pub candidate: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScreeningOutcome {
    pub confirmed_rays: BTreeSet<usize>,
    pub confirmed_non_rays: BTreeSet<usize>,
    pub deferred: Vec<Deferred>,
    pub steps: Vec<Step>,
    pub stats: ScreeningStats,
}

/// Applies the single-coordinate reductions until none applies. Each round
/// picks the applicable column that defers the fewest candidates, the
/// smallest such column on ties.
///
/// The generators must span a pointed cone and no two candidates may be
/// positive multiples of each other.
pub fn screen_rays(system: &RaySystem) -> Result<ScreeningOutcome, RayError> {
    let mut out = ScreeningOutcome::default();
    let mut sys = system.clone();
    let mut active: Vec<usize> = (0..sys.dim()).collect();

    while sys.candidates().next().is_some() {
        active.retain(|&c| sys.vectors.iter().any(|v| !v.coords[c].is_zero()));
        let Some((_, c, rule)) = active
            .iter()
            .filter_map(|&c| {
                let (pos, neg) = sys.signs(c);
                let (rule, deferring) = match (pos.len().min(neg.len()), pos.len().max(neg.len())) {
                    (0, 1) => (Rule::Isolated, Vec::new()),
                    (1, 1) => (Rule::OppositePair, Vec::new()),
                    (1, _) if pos.len() == 1 => (Rule::OneAgainstMany, neg),
                    (1, _) => (Rule::OneAgainstMany, pos),
                    (0, _) => (Rule::OneSided, [pos, neg].concat()),
                    _ => return None,
                };
                let deferred = deferring
                    .iter()
                    .filter(|&&k| sys.vectors[k].tag != Tag::KnownNonRay)
                    .count();
                Some((deferred, c, rule))
            })
            .min()
        else {
            break;
        };
        let (pos, neg) = sys.signs(c);
        let step = match rule {
            Rule::OneSided => reduce_one_sided(&mut sys, c, &[pos, neg].concat(), &mut out),
            _ if pos.len() == 1 => reduce_single(&mut sys, c, pos[0], &neg, &mut out)?,
            _ => reduce_single(&mut sys, c, neg[0], &pos, &mut out)?,
        };
        out.steps.push(step);
    }

    // Candidates that have a positive multiple elsewhere are not extremal.
    for k in 0..sys.vectors.len() {
        let Tag::Candidate(id) = sys.vectors[k].tag else {
            continue;
        };
        let parallel = sys
            .vectors
            .iter()
            .enumerate()
            .any(|(j, u)| j != k && is_positive_multiple(&u.coords, &sys.vectors[k].coords));
        if parallel {
            sys.vectors[k].tag = Tag::KnownNonRay;
            out.confirmed_non_rays.insert(id);
            out.stats.parallel += 1;
        }
    }
    for id in sys.candidates() {
        out.deferred.push(Deferred {
            system: sys.clone(),
            candidate: id,
        });
    }
    Ok(out)
}

/// All nonzero vectors in column `c` share a sign. Those vectors leave the
/// system; candidates among them are deferred against the current system.
fn reduce_one_sided(
    sys: &mut RaySystem,
    column: usize,
    nonzero: &[usize],
    out: &mut ScreeningOutcome,
) -> Step {
    let deferred: Vec<usize> = nonzero
        .iter()
        .filter_map(|&k| match sys.vectors[k].tag {
            Tag::Candidate(id) => Some(id),
            Tag::KnownNonRay => None,
        })
        .collect();
    if !deferred.is_empty() {
        let snapshot = sys.clone();
        for &id in &deferred {
            out.deferred.push(Deferred {
                system: snapshot.clone(),
                candidate: id,
            });
        }
    }
    out.stats.one_sided += 1;
    remove_positions(sys, nonzero);
    Step {
        rule: Rule::OneSided,
        column,
        confirmed: Vec::new(),
        deferred,
    }
}

/// `single` is the only vector of its sign in column `c`; `opposite` are
/// the vectors of the other sign (possibly none).
fn reduce_single(
    sys: &mut RaySystem,
    column: usize,
    single: usize,
    opposite: &[usize],
    out: &mut ScreeningOutcome,
) -> Result<Step, RayError> {
    let mut confirmed = Vec::new();
    let mut deferred = Vec::new();
    if let Tag::Candidate(id) = sys.vectors[single].tag {
        confirmed.push(id);
    }
    let rule = match opposite.len() {
        0 => Rule::Isolated,
        1 => {
            if let Tag::Candidate(id) = sys.vectors[opposite[0]].tag {
                confirmed.push(id);
            }
            Rule::OppositePair
        }
        _ => {
            deferred = opposite
                .iter()
                .filter_map(|&k| match sys.vectors[k].tag {
                    Tag::Candidate(id) => Some(id),
                    Tag::KnownNonRay => None,
                })
                .collect();
            if !deferred.is_empty() {
                let snapshot = sys.clone();
                for &id in &deferred {
                    out.deferred.push(Deferred {
                        system: snapshot.clone(),
                        candidate: id,
                    });
                }
            }
            Rule::OneAgainstMany
        }
    };
    match rule {
        Rule::Isolated => out.stats.isolated += 1,
        Rule::OppositePair => out.stats.opposite_pair += 1,
        _ => out.stats.one_against_many += 1,
    }
    out.confirmed_rays.extend(confirmed.iter().copied());

    let pivot = sys.vectors[single].coords.clone();
    for &k in opposite {
        let combo = eliminate(&pivot, &sys.vectors[k].coords, column);
        if combo.iter().all(Zero::is_zero) {
            return Err(RayError::ZeroVector);
        }
        sys.vectors[k] = RayVector {
            coords: combo,
            tag: Tag::KnownNonRay,
        };
    }
    remove_positions(sys, &[single]);
    Ok(Step {
        rule,
        column,
        confirmed,
        deferred,
    })
}

/// `|p[c]|·u + |u[c]|·p`, the positive combination of `p` and `u` that
/// vanishes at `c` when the two have opposite signs there.
fn eliminate(p: &[BigInt], u: &[BigInt], column: usize) -> Vec<BigInt> {
    let a = p[column].abs();
    let b = u[column].abs();
    p.iter().zip(u).map(|(pi, ui)| &a * ui + &b * pi).collect()
}

fn remove_positions(sys: &mut RaySystem, positions: &[usize]) {
    let mut k = 0;
    sys.vectors.retain(|_| {
        let keep = !positions.contains(&k);
        k += 1;
        keep
    });
}

/// Whether `u = t·v` for some `t > 0`.
pub fn is_positive_multiple(u: &[BigInt], v: &[BigInt]) -> bool {
    let Some(k) = v.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if u[k].is_zero() || u[k].sign() != v[k].sign() {
        return false;
    }
    u.iter().zip(v).all(|(ui, vi)| ui * &v[k] == vi * &u[k])
}

/// Verdict of `extremal_rays`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extremality {
    pub extremal: BTreeSet<usize>,
    pub stats: ScreeningStats,
}

/// Ids (positions) of the extremal generators of the pointed cone spanned
/// by `vectors`. No two vectors may be positive multiples of each other.
pub fn extremal_rays(vectors: &[Vec<BigInt>]) -> Result<Extremality, RayError> {
    let system = RaySystem::from_candidates(vectors)?;
    let outcome = screen_rays(&system)?;
    let mut stats = outcome.stats;
    let mut extremal = outcome.confirmed_rays;
    for d in &outcome.deferred {
        let Some(at) = d.system.position_of(d.candidate) else {
            continue;
        };
        let coords: Vec<Vec<BigInt>> = d.system.vectors.iter().map(|v| v.coords.clone()).collect();
        if decide(coords, at, &mut stats)? {
            extremal.insert(d.candidate);
        }
    }
    Ok(Extremality { extremal, stats })
}

/// Whether `vectors[target]` is outside the cone of the other vectors.
fn decide(
    mut vectors: Vec<Vec<BigInt>>,
    mut target: usize,
    stats: &mut ScreeningStats,
) -> Result<bool, RayError> {
    let n = vectors[target].len();
    loop {
        match vectors.len() {
            1 => {
                stats.sign_verdicts += 1;
                return Ok(true);
            }
            2 => {
                stats.scalar_tests += 1;
                let other = &vectors[1 - target];
                return Ok(!is_positive_multiple(other, &vectors[target]));
            }
            _ => {}
        }
        let t = &vectors[target];
        if vectors
            .iter()
            .enumerate()
            .any(|(k, u)| k != target && is_positive_multiple(u, t))
        {
            stats.parallel += 1;
            return Ok(false);
        }

        let mut restrict = None;
        let mut combine = None;
        for c in 0..n {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for (k, v) in vectors.iter().enumerate() {
                if k == target {
                    continue;
                }
                if v[c].is_positive() {
                    pos.push(k);
                } else if v[c].is_negative() {
                    neg.push(k);
                }
            }
            let tc = &t[c];
            if (tc.is_positive() && pos.is_empty()) || (tc.is_negative() && neg.is_empty()) {
                stats.sign_verdicts += 1;
                return Ok(true);
            }
            if !tc.is_zero() {
                continue;
            }
            match (pos.is_empty(), neg.is_empty()) {
                (true, true) => {}
                (true, false) | (false, true) => {
                    if restrict.is_none() {
                        restrict = Some([pos, neg].concat());
                    }
                }
                (false, false) => {
                    if combine.is_none() && (pos.len() == 1 || neg.len() == 1) {
                        combine = Some(if pos.len() == 1 {
                            (pos[0], neg, c)
                        } else {
                            (neg[0], pos, c)
                        });
                    }
                }
            }
        }

        if let Some(drop) = restrict {
            stats.targeted += 1;
            let mut k = 0;
            let before = target;
            vectors.retain(|_| {
                let keep = !drop.contains(&k);
                k += 1;
                keep
            });
            target = before - drop.iter().filter(|&&d| d < before).count();
            continue;
        }
        if let Some((single, opposite, column)) = combine {
            stats.targeted += 1;
            let pivot = vectors[single].clone();
            for &k in &opposite {
                let combo = eliminate(&pivot, &vectors[k], column);
                if combo.iter().all(Zero::is_zero) {
                    return Err(RayError::ZeroVector);
                }
                vectors[k] = combo;
            }
            vectors.remove(single);
            if single < target {
                target -= 1;
            }
            continue;
        }

        stats.lps_solved += 1;
        let to_rat = |v: &Vec<BigInt>| -> Vec<Rational> {
            v.iter().cloned().map(Rational::from_integer).collect()
        };
        let others: Vec<Vec<Rational>> = vectors
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != target)
            .map(|(_, v)| to_rat(v))
            .collect();
        let answer = lp::nonneg_combination(&others, &to_rat(&vectors[target]))?;
        debug_assert!(lp::verify_combination(&others, &to_rat(&vectors[target]), &answer));
        return Ok(matches!(answer, Feasibility::Infeasible(_)));
    }
}
