//! Generated inputs for the invariant sweeps: every abelian group up to an
//! order bound, every subgroup, random pseudonorms, random collections and
//! random doubly stochastic matrices.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::group::{FiniteAbelianGroup, Subgroup};
use crate::pseudonorm::Pseudonorm;
use crate::scalar::Scalar;
use crate::transversal::DoublyStochasticMatrix;

/// One group per isomorphism class, in invariant factor form
/// `Z_{d_1} ⊕ … ⊕ Z_{d_r}` with `d_1 | d_2 | … | d_r`, ordered by order.
/// Order 1 is the trivial group `Z_1`.
pub fn abelian_groups_up_to(max_order: u64) -> Vec<FiniteAbelianGroup> {
    let mut out = vec![FiniteAbelianGroup::new(vec![1]).expect("trivial group")];
    for n in 2..=max_order {
        let mut factorizations = Vec::new();
        invariant_factors(n, 1, &mut Vec::new(), &mut factorizations);
        factorizations.sort();
        for f in factorizations {
            out.push(FiniteAbelianGroup::new(f).expect("small group"));
        }
    }
    out
}

fn invariant_factors(remaining: u64, prev: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if remaining == 1 {
        if !current.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    // next factor is a multiple of prev dividing remaining, and the largest
    // factor must be divisible by it, so it also divides remaining / itself
    let mut d = prev.max(2);
    while d <= remaining {
        if d.is_multiple_of(prev) && remaining.is_multiple_of(d) {
            let rest = remaining / d;
            if rest == 1 || rest.is_multiple_of(d) {
                current.push(d);
                invariant_factors(rest, d, current, out);
                current.pop();
            }
        }
        d += 1;
    }
}

/// Every subgroup, ordered by size then by element list.
pub fn all_subgroups(group: &FiniteAbelianGroup) -> Vec<Subgroup> {
    let trivial = Subgroup::trivial(group);
    let mut seen: HashSet<Vec<usize>> = HashSet::from([trivial.ids().to_vec()]);
    let mut out = vec![trivial.clone()];
    let mut frontier = vec![trivial];
    while let Some(s) = frontier.pop() {
        for e in group.elements() {
            if s.contains(&e) {
                continue;
            }
            let t = s.join(&e);
            if seen.insert(t.ids().to_vec()) {
                out.push(t.clone());
                frontier.push(t);
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.ids().cmp(b.ids())));
    out
}

/// Largest pseudonorm below random symmetric weights: `|x|` is the cheapest
/// way to write `x` as a sum of carrier elements. Weights are
/// `numerator / denominator` with numerator in `0..=max_numerator` and
/// denominator in `1..=max_denominator`; roughly one weight in eight is zero
/// so genuine pseudonorms (not norms) show up.
pub fn random_pseudonorm<S: Scalar, R: Rng>(
    carrier: &Subgroup,
    rng: &mut R,
    max_numerator: i64,
    max_denominator: i64,
) -> Pseudonorm<S> {
    let g = carrier.parent();
    let ids = carrier.ids();
    let n = ids.len();
    let mut dist: Vec<Option<S>> = vec![None; n];
    dist[0] = Some(S::zero());
    for i in 1..n {
        if dist[i].is_some() {
            continue;
        }
        let w = if rng.gen_ratio(1, 8) {
            S::zero()
        } else {
            S::from_i64(rng.gen_range(0..=max_numerator)).expect("small")
                / S::from_i64(rng.gen_range(1..=max_denominator)).expect("small")
        };
        let j = carrier
            .position_of_id(g.neg_id(ids[i]))
            .expect("closed under negation");
        dist[i] = Some(w.clone());
        dist[j] = Some(w);
    }
    let mut dist: Vec<S> = dist.into_iter().map(|d| d.expect("all set")).collect();
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                let c = carrier
                    .position_of_id(g.add_ids(ids[a], ids[b]))
                    .expect("closed under addition");
                let via = dist[a].clone() + dist[b].clone();
                if via < dist[c] {
                    dist[c] = via;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Pseudonorm::new(carrier.clone(), dist).expect("one value per element")
}

/// Two collections of pairwise disjoint `k`-sets drawn from `0..ground`.
pub fn random_uniform_pair<R: Rng>(
    rng: &mut R,
    k: usize,
    ground: usize,
) -> (Vec<BTreeSet<u32>>, Vec<BTreeSet<u32>>) {
    let draw = |rng: &mut R| {
        let mut labels: Vec<u32> = (0..ground as u32).collect();
        labels.shuffle(rng);
        let count = rng.gen_range(0..=ground / k);
        labels
            .chunks(k)
            .take(count)
            .filter(|c| c.len() == k)
            .map(|c| c.iter().copied().collect())
            .collect::<Vec<BTreeSet<u32>>>()
    };
    let a = draw(rng);
    let b = draw(rng);
    (a, b)
}

/// Two internally disjoint collections of sets from `0..ground` whose sizes
/// are positive multiples of `p`.
pub fn random_divisible_pair<R: Rng>(
    rng: &mut R,
    p: usize,
    ground: usize,
) -> (Vec<BTreeSet<u32>>, Vec<BTreeSet<u32>>) {
    let draw = |rng: &mut R| {
        let mut labels: Vec<u32> = (0..ground as u32).collect();
        labels.shuffle(rng);
        let mut sets = Vec::new();
        let mut rest = &labels[..];
        while rest.len() >= p && rng.gen_ratio(4, 5) {
            let blocks = rng.gen_range(1..=rest.len() / p);
            let (head, tail) = rest.split_at(blocks * p);
            sets.push(head.iter().copied().collect());
            rest = tail;
        }
        sets
    };
    let a = draw(rng);
    let b = draw(rng);
    (a, b)
}

/// A random convex combination of random permutation matrices, with small
/// integer weights normalised to sum to one.
pub fn random_doubly_stochastic<S: Scalar, R: Rng>(
    rng: &mut R,
    n: usize,
) -> DoublyStochasticMatrix<S> {
    let terms = rng.gen_range(1..=n.max(1) + 2);
    let mut entries = vec![vec![S::zero(); n]; n];
    let mut weights = Vec::with_capacity(terms);
    let mut total = 0i64;
    for _ in 0..terms {
        let w = rng.gen_range(1..=12i64);
        total += w;
        weights.push(w);
    }
    for w in weights {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let weight = S::from_i64(w).expect("small") / S::from_i64(total).expect("small");
        for (i, &j) in perm.iter().enumerate() {
            entries[i][j] = entries[i][j].clone() + weight.clone();
        }
    }
    DoublyStochasticMatrix::new(entries).expect("convex combination of permutations")
}
