//! Transversals of two disjoint `k`-uniform collections.
//!
//! Both collections are padded to partitions `C`, `D` of one common ground
//! set. The matrix `a_ij = |C_i ∩ D_j| / k` is doubly stochastic, so by
//! Birkhoff's theorem its positive support contains a permutation `σ`; one
//! point from each `C_i ∩ D_σ(i)` is a set meeting every block exactly once.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::matching::perfect_matching;
use crate::scalar::Scalar;
use crate::Rational64;

/// Pairwise disjoint sets, all of size `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformCollection<L> {
    k: usize,
    sets: Vec<BTreeSet<L>>,
}

impl<L: Ord + Clone> UniformCollection<L> {
    pub fn new(k: usize, sets: Vec<BTreeSet<L>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        for (i, s) in sets.iter().enumerate() {
            if s.len() != k {
                return Err(Error::NotUniform {
                    index: i,
                    expected: k,
                    actual: s.len(),
                });
            }
        }
        check_disjoint(&sets)?;
        Ok(Self { k, sets })
    }

    pub fn from_vecs(k: usize, sets: Vec<Vec<L>>) -> Result<Self> {
        let mut out = Vec::with_capacity(sets.len());
        for (i, s) in sets.into_iter().enumerate() {
            let len = s.len();
            let set: BTreeSet<L> = s.into_iter().collect();
            if set.len() != len {
                return Err(Error::NotUniform {
                    index: i,
                    expected: len,
                    actual: set.len(),
                });
            }
            out.push(set);
        }
        Self::new(k, out)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sets(&self) -> &[BTreeSet<L>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn ground(&self) -> BTreeSet<L> {
        self.sets.iter().flatten().cloned().collect()
    }
}

fn check_disjoint<L: Ord>(sets: &[BTreeSet<L>]) -> Result<()> {
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].is_disjoint(&sets[j]) {
                return Err(Error::NotDisjoint(i, j));
            }
        }
    }
    Ok(())
}

/// A label of the padded ground set: an original label or a fresh one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Padded<L> {
    Original(L),
    Fresh(usize),
}

impl<L: fmt::Display> fmt::Display for Padded<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Padded::Original(l) => write!(f, "{l}"),
            Padded::Fresh(i) => write!(f, "#fresh{i}"),
        }
    }
}

pub type PaddedCollection<L> = UniformCollection<Padded<L>>;

/// Extends `A` and `B` to partitions `C ⊇ A`, `D ⊇ B` of a common ground set
/// with `|C| = |D|`. The ground set is `∪A ∪ ∪B` topped up with
/// `(-|ground|) mod k` fresh labels; each complement is cut into `k`-blocks in
/// sorted order. The original sets come first, in input order.
pub fn pad_collections<L: Ord + Clone>(
    a: &UniformCollection<L>,
    b: &UniformCollection<L>,
) -> Result<(PaddedCollection<L>, PaddedCollection<L>)> {
    if a.k != b.k {
        return Err(Error::MismatchedUniformity(a.k, b.k));
    }
    let k = a.k;
    let mut ground: BTreeSet<Padded<L>> = a
        .ground()
        .into_iter()
        .chain(b.ground())
        .map(Padded::Original)
        .collect();
    let fresh = (k - ground.len() % k) % k;
    ground.extend((0..fresh).map(Padded::Fresh));

    let complete = |coll: &UniformCollection<L>| -> Result<PaddedCollection<L>> {
        let mut sets: Vec<BTreeSet<Padded<L>>> = coll
            .sets
            .iter()
            .map(|s| s.iter().cloned().map(Padded::Original).collect())
            .collect();
        let covered: BTreeSet<Padded<L>> = sets.iter().flatten().cloned().collect();
        let rest: Vec<Padded<L>> = ground.difference(&covered).cloned().collect();
        debug_assert_eq!(rest.len() % k, 0);
        sets.extend(rest.chunks(k).map(|c| c.iter().cloned().collect()));
        UniformCollection::new(k, sets)
    };
    Ok((complete(a)?, complete(b)?))
}

/// Exact doubly stochastic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublyStochasticMatrix<S> {
    entries: Vec<Vec<S>>,
}

impl<S: Scalar> DoublyStochasticMatrix<S> {
    /// Checks squareness, nonnegativity and unit row and column sums exactly.
    pub fn new(entries: Vec<Vec<S>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotDoublyStochastic(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| x.is_negative()) {
                return Err(Error::NotDoublyStochastic(format!(
                    "entry ({i},{j}) is negative"
                )));
            }
            let s = crate::scalar::sum(row);
            if !s.is_one() {
                return Err(Error::NotDoublyStochastic(format!("row {i} sums to {s}")));
            }
        }
        for j in 0..n {
            let s = entries.iter().fold(S::zero(), |acc, r| acc + r[j].clone());
            if !s.is_one() {
                return Err(Error::NotDoublyStochastic(format!(
                    "column {j} sums to {s}"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        Self { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<S>] {
        &self.entries
    }

    pub fn positive_entries(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter(|x| x.is_positive())
            .count()
    }
}

/// `a_ij = |C_i ∩ D_j| / k`.
pub fn intersection_matrix<L: Ord + Clone, S: Scalar>(
    c: &UniformCollection<L>,
    d: &UniformCollection<L>,
) -> Result<DoublyStochasticMatrix<S>> {
    if c.k != d.k {
        return Err(Error::MismatchedUniformity(c.k, d.k));
    }
    if c.len() != d.len() {
        return Err(Error::PaddingMismatch(format!(
            "{} sets vs {} sets",
            c.len(),
            d.len()
        )));
    }
    if c.ground() != d.ground() {
        return Err(Error::PaddingMismatch("unions differ".into()));
    }
    let k = S::from_count(c.k);
    let entries = c
        .sets
        .iter()
        .map(|ci| {
            d.sets
                .iter()
                .map(|dj| S::from_count(ci.intersection(dj).count()) / k.clone())
                .collect()
        })
        .collect();
    DoublyStochasticMatrix::new(entries)
        .map_err(|e| Error::Internal(format!("intersection matrix: {e}")))
}

/// A permutation `σ` with `M[i][σ(i)] > 0` for every row.
pub fn positive_permutation<S: Scalar>(m: &DoublyStochasticMatrix<S>) -> Vec<usize> {
    support_permutation(&m.entries).expect("doubly stochastic support has a perfect matching")
}

fn support_permutation<S: Scalar>(entries: &[Vec<S>]) -> Option<Vec<usize>> {
    perfect_matching(entries.len(), |i, j| entries[i][j].is_positive())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffTerm<S> {
    pub weight: S,
    /// Row `i` carries a one in column `permutation[i]`.
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffDecomposition<S> {
    pub n: usize,
    pub terms: Vec<BirkhoffTerm<S>>,
}

impl<S: Scalar> BirkhoffDecomposition<S> {
    pub fn weight_sum(&self) -> S {
        self.terms
            .iter()
            .fold(S::zero(), |acc, t| acc + t.weight.clone())
    }

    /// `Σ weight · P_σ`.
    pub fn recompose(&self) -> Vec<Vec<S>> {
        let mut out = vec![vec![S::zero(); self.n]; self.n];
        for t in &self.terms {
            for (i, &j) in t.permutation.iter().enumerate() {
                out[i][j] = out[i][j].clone() + t.weight.clone();
            }
        }
        out
    }
}

/// Convex decomposition into permutation matrices. Each round subtracts
/// `λ P_σ` with `σ` on the positive support and `λ = min_i R[i][σ(i)]`, which
/// zeroes at least one entry, so there are at most as many terms as positive
/// entries.
pub fn birkhoff_decompose<S: Scalar>(m: &DoublyStochasticMatrix<S>) -> BirkhoffDecomposition<S> {
    let n = m.n();
    let mut residual = m.entries.clone();
    let mut terms = Vec::new();
    while residual.iter().flatten().any(|x| x.is_positive()) {
        // the residual is a positive multiple of a doubly stochastic matrix
        let sigma = support_permutation(&residual)
            .expect("residual of a doubly stochastic matrix has a support permutation");
        let weight = sigma
            .iter()
            .enumerate()
            .map(|(i, &j)| residual[i][j].clone())
            .reduce(S::min_of)
            .expect("n >= 1 while residual is nonzero");
        for (i, &j) in sigma.iter().enumerate() {
            residual[i][j] = residual[i][j].clone() - weight.clone();
        }
        terms.push(BirkhoffTerm {
            weight,
            permutation: sigma,
        });
    }
    BirkhoffDecomposition { n, terms }
}

/// Everything produced on the way to a transversal.
#[derive(Clone, Debug)]
pub struct TransversalWitness<L> {
    pub padded_a: PaddedCollection<L>,
    pub padded_b: PaddedCollection<L>,
    pub permutation: Vec<usize>,
    /// One pick per padded set of `A`, fresh labels included.
    pub picks: Vec<Padded<L>>,
    pub transversal: BTreeSet<L>,
}

/// A set `I` with `|I ∩ C| = 1` for every `C ∈ A ∪ B`.
pub fn transversal<L: Ord + Clone>(
    a: &UniformCollection<L>,
    b: &UniformCollection<L>,
) -> Result<BTreeSet<L>> {
    transversal_with_witness(a, b).map(|w| w.transversal)
}

pub fn transversal_with_witness<L: Ord + Clone>(
    a: &UniformCollection<L>,
    b: &UniformCollection<L>,
) -> Result<TransversalWitness<L>> {
    let (c, d) = pad_collections(a, b)?;
    let matrix: DoublyStochasticMatrix<Rational64> = intersection_matrix(&c, &d)?;
    let sigma = positive_permutation(&matrix);
    let picks: Vec<Padded<L>> = sigma
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            c.sets[i]
                .intersection(&d.sets[j])
                .next()
                .cloned()
                .expect("positive entry means nonempty intersection")
        })
        .collect();
    let transversal = picks
        .iter()
        .filter_map(|p| match p {
            Padded::Original(l) => Some(l.clone()),
            Padded::Fresh(_) => None,
        })
        .collect();
    Ok(TransversalWitness {
        padded_a: c,
        padded_b: d,
        permutation: sigma,
        picks,
        transversal,
    })
}

/// A set `I` with `|I ∩ C| = |C| / p` for every `C ∈ A ∪ B`, where each
/// collection is internally disjoint and every size is divisible by `p`.
/// Each set is cut into consecutive `p`-blocks (sorted order) and the blocks
/// are handed to [`transversal`] with `k = p`.
pub fn p_fractional_transversal<L: Ord + Clone>(
    a: &[BTreeSet<L>],
    b: &[BTreeSet<L>],
    p: usize,
) -> Result<BTreeSet<L>> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let blocks = |sets: &[BTreeSet<L>]| -> Result<UniformCollection<L>> {
        check_disjoint(sets)?;
        let mut out = Vec::new();
        for s in sets {
            if s.len() % p != 0 {
                return Err(Error::NotDivisible { size: s.len(), p });
            }
            let items: Vec<L> = s.iter().cloned().collect();
            out.extend(items.chunks(p).map(|c| c.iter().cloned().collect()));
        }
        UniformCollection::new(p, out)
    };
    transversal(&blocks(a)?, &blocks(b)?)
}
