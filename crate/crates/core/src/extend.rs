//! Extension of a pseudonorm across `H ≤ G` with `pG ⊆ H`, and chains of
//! such steps for an arbitrary finite quotient.
//!
//! Fix the `F_p` basis `g^α + H` of `G/H` and the sentinel `g^μ = 0`. A
//! representation of `x` is `(u, c)` with `u ∈ H` and `x = u + Σ c_α g^α`.
//! For representations `(u, c)` of `x` and `(v, d)` of `y`, list the basis
//! indices as two sequences padded with `μ` and pay
//! `|u - v|_H + Σ_i |p g^{α_i} - p g^{β_i}|_H`; `rho(x, y)` is the least
//! such payment. The best alignment of the two sequences is a min-cost
//! perfect matching.
//!
//! Counts are searched in `base_α + p·{0, …, cap}`. Pairs of representations
//! with the same difference `δ = c - d` share `u - v`, and since pair costs
//! form a pseudometric an optimal matching pairs equal indices with each
//! other, so the matching cost of such a pair is the matching cost of
//! `(δ⁺, δ⁻)`. Each difference class is therefore evaluated once.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::group::{is_prime, prime_factors, Element, QuotientStructure, Subgroup};
use crate::matching::min_cost_assignment;
use crate::pseudonorm::Pseudonorm;
use crate::scalar::Scalar;
use crate::transversal::p_fractional_transversal;

pub const DEFAULT_CAP: u32 = 1;

/// `x = u + Σ_α counts[α] · g^α`; `μ` copies are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Representation {
    pub u: Element,
    pub counts: Vec<u64>,
}

impl Representation {
    /// Basis indices with multiplicity, ascending.
    pub fn multiset(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(a, &c)| std::iter::repeat_n(a, c as usize))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionProblem<S> {
    quotient: QuotientStructure,
    base: Pseudonorm<S>,
    prime: u64,
    cap: u32,
    // |p g^α - p g^β|_H for α, β in 0..=μ
    costs: Vec<Vec<S>>,
}

impl<S: Scalar> ExtensionProblem<S> {
    /// `ambient` plays the role of `G`; the carrier of `base` is `H`.
    pub fn new(ambient: &Subgroup, base: Pseudonorm<S>, prime: u64, cap: u32) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        let sub = base.carrier().clone();
        if !sub.is_subset_of(ambient) {
            return Err(Error::NotASubgroup(
                "norm carrier is not contained in the ambient group".into(),
            ));
        }
        let g = ambient.parent();
        if ambient
            .ids()
            .iter()
            .any(|&x| !sub.contains_id(g.scale_id(prime as i64, x)))
        {
            return Err(Error::ScaleNotContained { p: prime });
        }
        let report = base.validate();
        if !report.is_ok() {
            return Err(Error::InvalidBaseNorm(report.summary()));
        }
        let quotient = QuotientStructure::with_prime(ambient, &sub, prime)?;
        let mu = quotient.mu_index();
        let scaled: Vec<usize> = (0..=mu)
            .map(|a| g.scale_id(prime as i64, quotient.basis_element_id(a)))
            .collect();
        let costs = scaled
            .iter()
            .map(|&pa| {
                scaled
                    .iter()
                    .map(|&pb| base.value_id(g.sub_ids(pa, pb)).expect("pG ⊆ H").clone())
                    .collect()
            })
            .collect();
        Ok(Self {
            quotient,
            base,
            prime,
            cap,
            costs,
        })
    }

    pub fn with_cap(&self, cap: u32) -> Self {
        Self {
            cap,
            ..self.clone()
        }
    }

    pub fn quotient(&self) -> &QuotientStructure {
        &self.quotient
    }

    pub fn base(&self) -> &Pseudonorm<S> {
        &self.base
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn basis_len(&self) -> usize {
        self.quotient.basis_len()
    }

    pub fn mu(&self) -> usize {
        self.quotient.mu_index()
    }

    /// `|p g^α - p g^β|_H`, with `μ` allowed on either side.
    pub fn pair_cost(&self, alpha: usize, beta: usize) -> &S {
        &self.costs[alpha][beta]
    }

    /// `Σ_α counts[α] g^α` as an element index; counts may be negative.
    fn combination_id(&self, counts: &[i64]) -> usize {
        let g = self.quotient.group();
        counts.iter().enumerate().fold(0, |acc, (a, &c)| {
            g.add_ids(acc, g.scale_id(c, self.quotient.basis_element_id(a)))
        })
    }

    fn check_member(&self, x: &Element) -> Result<usize> {
        if !self.quotient.ambient().contains(x) {
            return Err(Error::ElementOutOfRange {
                element: x.0.iter().map(|&c| c as i64).collect(),
                context: "ambient group of the extension".into(),
            });
        }
        Ok(self.quotient.group().index(x))
    }

    /// Representations of `x` with `counts[α] ∈ base_α + p·{0, …, cap}`.
    pub fn enumerate_representations(&self, x: &Element) -> Result<Vec<Representation>> {
        let xid = self.check_member(x)?;
        let g = self.quotient.group();
        let base = self.quotient.coordinates_of_id(xid)?.to_vec();
        let mut out = Vec::new();
        for offsets in grid(base.len(), 0, self.cap as i64) {
            let counts: Vec<u64> = base
                .iter()
                .zip(&offsets)
                .map(|(&b, &j)| b + j as u64 * self.prime)
                .collect();
            let signed: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
            let u = g.sub_ids(xid, self.combination_id(&signed));
            if !self.quotient.subgroup().contains_id(u) {
                return Err(Error::Internal(format!("representation of {x} leaves H")));
            }
            out.push(Representation {
                u: g.element(u),
                counts,
            });
        }
        Ok(out)
    }

    /// `Σ_i |p g^{α_i} - p g^{β_i}|_H` minimised over alignments of the two
    /// multisets, each padded with `μ` to a common length.
    pub fn min_matching_cost(&self, mx: &[usize], my: &[usize]) -> MatchingCost<S> {
        min_matching_cost(mx, my, self.mu(), |a, b| self.pair_cost(a, b).clone())
    }

    fn difference_cost(&self, delta: &[i64]) -> S {
        let (plus, minus) = split_difference(delta);
        self.min_matching_cost(&plus, &minus).cost
    }

    // Cheap lower bound on the matching cost of (δ⁺, δ⁻): every unit on one
    // side is matched to μ or to an index on the other side.
    fn difference_lower_bound(&self, delta: &[i64]) -> S {
        let mu = self.mu();
        let side = |sign: i64| -> S {
            delta
                .iter()
                .enumerate()
                .filter(|&(_, &d)| d * sign > 0)
                .fold(S::zero(), |acc, (a, &d)| {
                    let nearest = delta
                        .iter()
                        .enumerate()
                        .filter(|&(_, &e)| e * sign < 0)
                        .map(|(b, _)| self.pair_cost(a, b).clone())
                        .fold(self.pair_cost(a, mu).clone(), S::min_of);
                    acc + nearest * S::from_count(d.unsigned_abs() as usize)
                })
        };
        side(1).max_of(side(-1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingCost<S> {
    pub cost: S,
    /// Aligned pairs `(α_i, β_i)`, `μ` included.
    pub pairs: Vec<(usize, usize)>,
}

/// Pads both multisets with `mu` to the larger length and solves the
/// assignment problem. For costs forming a pseudometric with `mu` as a point
/// this equals the minimum over all paddings.
pub fn min_matching_cost<S: Scalar>(
    mx: &[usize],
    my: &[usize],
    mu: usize,
    cost: impl Fn(usize, usize) -> S,
) -> MatchingCost<S> {
    let n = mx.len().max(my.len());
    let pad = |m: &[usize]| -> Vec<usize> {
        let mut v = m.to_vec();
        v.resize(n, mu);
        v
    };
    let (xs, ys) = (pad(mx), pad(my));
    let matrix: Vec<Vec<S>> = xs
        .iter()
        .map(|&a| ys.iter().map(|&b| cost(a, b)).collect())
        .collect();
    let assignment = min_cost_assignment(&matrix);
    let pairs = assignment
        .row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| (xs[i], ys[j]))
        .collect();
    MatchingCost {
        cost: assignment.cost,
        pairs,
    }
}

fn split_difference(delta: &[i64]) -> (Vec<usize>, Vec<usize>) {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (a, &d) in delta.iter().enumerate() {
        let target = if d > 0 { &mut plus } else { &mut minus };
        target.extend(std::iter::repeat_n(a, d.unsigned_abs() as usize));
    }
    (plus, minus)
}

/// All vectors of length `len` with entries in `lo..=hi`, lexicographic.
fn grid(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |j| {
                    let mut w = v.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
    }
    out
}

/// The value of `rho(x, y)` together with a minimising pair of representations.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoValue<S> {
    pub value: S,
    pub x_rep: Representation,
    pub y_rep: Representation,
}

/// Evaluates `rho` for one problem, caching matching costs per difference class.
pub struct RhoEvaluator<'a, S> {
    problem: &'a ExtensionProblem<S>,
    cache: HashMap<Vec<i64>, S>,
}

impl<'a, S: Scalar> RhoEvaluator<'a, S> {
    pub fn new(problem: &'a ExtensionProblem<S>) -> Self {
        Self {
            problem,
            cache: HashMap::new(),
        }
    }

    fn difference_cost(&mut self, delta: &[i64]) -> S {
        if let Some(c) = self.cache.get(delta) {
            return c.clone();
        }
        let c = self.problem.difference_cost(delta);
        self.cache.insert(delta.to_vec(), c.clone());
        c
    }

    pub fn rho(&mut self, x: &Element, y: &Element) -> Result<RhoValue<S>> {
        let pb = self.problem;
        let q = pb.quotient();
        let g = q.group();
        let (xid, yid) = (pb.check_member(x)?, pb.check_member(y)?);
        let bx = q.coordinates_of_id(xid)?.to_vec();
        let by = q.coordinates_of_id(yid)?.to_vec();
        let p = pb.prime as i64;
        let cap = pb.cap as i64;
        let diff = g.sub_ids(xid, yid);
        let mut best: Option<(S, Vec<i64>)> = None;
        for j in grid(bx.len(), -cap, cap) {
            let delta: Vec<i64> = (0..bx.len())
                .map(|a| bx[a] as i64 - by[a] as i64 + j[a] * p)
                .collect();
            let u_minus_v = g.sub_ids(diff, pb.combination_id(&delta));
            let value = pb
                .base
                .value_id(u_minus_v)
                .expect("u - v lies in H")
                .clone()
                + self.difference_cost(&delta);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, j));
            }
        }
        let (value, j) = best.expect("grid is nonempty");
        let counts_x: Vec<u64> = bx
            .iter()
            .zip(&j)
            .map(|(&b, &o)| b + o.max(0) as u64 * pb.prime)
            .collect();
        let counts_y: Vec<u64> = by
            .iter()
            .zip(&j)
            .map(|(&b, &o)| b + (-o).max(0) as u64 * pb.prime)
            .collect();
        Ok(RhoValue {
            value,
            x_rep: pb.representation(xid, counts_x),
            y_rep: pb.representation(yid, counts_y),
        })
    }
}

impl<S: Scalar> ExtensionProblem<S> {
    fn representation(&self, xid: usize, counts: Vec<u64>) -> Representation {
        let g = self.quotient.group();
        let signed: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        Representation {
            u: g.element(g.sub_ids(xid, self.combination_id(&signed))),
            counts,
        }
    }

    /// Cost `|u - v|_H + min matching` of one specific pair of representations.
    pub fn representation_pair_cost(&self, rx: &Representation, ry: &Representation) -> S {
        let g = self.quotient.group();
        let uv = g.sub(&rx.u, &ry.u);
        self.base.value(&uv).expect("u, v in H").clone()
            + self.min_matching_cost(&rx.multiset(), &ry.multiset()).cost
    }
}

pub fn rho<S: Scalar>(x: &Element, y: &Element, problem: &ExtensionProblem<S>) -> Result<S> {
    RhoEvaluator::new(problem).rho(x, y).map(|r| r.value)
}

/// Minimising representation pair behind `|x|_G = rho(x, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoCertificate {
    pub x_rep: Representation,
    pub zero_rep: Representation,
}

#[derive(Clone, Debug)]
pub struct ExtendedNorm<S> {
    pub norm: Pseudonorm<S>,
    /// Indexed like `norm.values()`.
    pub certificates: Vec<RhoCertificate>,
}

impl<S: Scalar> ExtendedNorm<S> {
    pub fn certificate(&self, x: &Element) -> Option<&RhoCertificate> {
        let g = self.norm.group();
        if !g.contains(x) {
            return None;
        }
        self.norm
            .carrier()
            .position_of_id(g.index(x))
            .map(|p| &self.certificates[p])
    }
}

/// `|x|_G = rho(x, 0)` for every `x ∈ G`.
///
/// Works coset by coset: every element of a coset shares the difference grid,
/// which is visited in order of a lower bound on its matching cost and cut
/// off once the bound exceeds the largest value found so far in the coset.
pub fn prime_step_extend<S: Scalar>(problem: &ExtensionProblem<S>) -> Result<ExtendedNorm<S>> {
    let q = problem.quotient();
    let g = q.group();
    let ambient = q.ambient();
    let p = problem.prime as i64;
    let cap = problem.cap as i64;
    let b = problem.basis_len();
    let offsets = grid(b, -cap, cap);

    let mut values: Vec<Option<S>> = vec![None; ambient.len()];
    let mut chosen: Vec<usize> = vec![0; ambient.len()];

    for (c, members) in q.cosets().iter().enumerate() {
        let coords = q.coordinates_of_coset(c)?;
        let mut candidates: Vec<(S, usize, Vec<i64>)> = offsets
            .iter()
            .enumerate()
            .map(|(k, j)| {
                let delta: Vec<i64> = (0..b).map(|a| coords[a] as i64 + j[a] * p).collect();
                (problem.difference_lower_bound(&delta), k, delta)
            })
            .collect();
        candidates.sort_by(|l, r| {
            l.0.partial_cmp(&r.0)
                .expect("ordered scalar")
                .then(l.1.cmp(&r.1))
        });

        let mut best: Vec<Option<S>> = vec![None; members.len()];
        let mut arg: Vec<usize> = vec![0; members.len()];
        let mut threshold: Option<S> = None;
        for (bound, k, delta) in candidates {
            if threshold.as_ref().is_some_and(|t| bound >= *t) {
                break;
            }
            let shift = problem.combination_id(&delta);
            let cost = problem.difference_cost(&delta);
            for (i, &x) in members.iter().enumerate() {
                let u = g.sub_ids(x, shift);
                let value = problem.base.value_id(u).expect("u in H").clone() + cost.clone();
                if best[i].as_ref().is_none_or(|bv| value < *bv) {
                    best[i] = Some(value);
                    arg[i] = k;
                }
            }
            threshold = best
                .iter()
                .map(|v| v.clone().expect("every member set after one candidate"))
                .reduce(S::max_of);
        }
        for (i, &x) in members.iter().enumerate() {
            let pos = ambient.position_of_id(x).expect("coset inside ambient");
            values[pos] = best[i].take();
            chosen[pos] = arg[i];
        }
    }

    let mut certificates = Vec::with_capacity(ambient.len());
    for (pos, &x) in ambient.ids().iter().enumerate() {
        let j = &offsets[chosen[pos]];
        let coords = q.coordinates_of_id(x)?;
        let counts_x = (0..b)
            .map(|a| coords[a] + j[a].max(0) as u64 * problem.prime)
            .collect();
        let counts_0 = (0..b)
            .map(|a| (-j[a]).max(0) as u64 * problem.prime)
            .collect();
        certificates.push(RhoCertificate {
            x_rep: problem.representation(x, counts_x),
            zero_rep: problem.representation(0, counts_0),
        });
    }
    let values: Vec<S> = values
        .into_iter()
        .map(|v| v.expect("every coset visited"))
        .collect();
    let norm = Pseudonorm::new(ambient.clone(), values)?;
    if !norm.agrees_on(&problem.base, q.subgroup()) {
        return Err(Error::Internal(
            "extension does not restrict to the base pseudonorm".into(),
        ));
    }
    Ok(ExtendedNorm { norm, certificates })
}

/// The selection step behind `rho(x, y) >= |x - y|_H` for `x, y ∈ H`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionWitness<S> {
    /// The aligned sequences `(α_i, β_i)`.
    pub alignment: Vec<(usize, usize)>,
    /// Positions `I` with `|I ∩ A(α)| = |A(α)|/p` and `|I ∩ B(α)| = |B(α)|/p`.
    pub selected: BTreeSet<usize>,
    /// `|u - v|_H + Σ_i cost(α_i, β_i)`.
    pub pair_cost: S,
    /// `|u - v|_H + Σ_{i ∈ I} cost(α_i, β_i)`.
    pub selected_cost: S,
    /// `|x - y|_H`.
    pub target: S,
}

/// For representations of `x, y ∈ H`, picks the index set `I` from the
/// occurrence sets of each basis index and checks
/// `x = u + Σ_{i∈I} p g^{α_i}`, `y = v + Σ_{i∈I} p g^{β_i}`.
pub fn restriction_witness<S: Scalar>(
    problem: &ExtensionProblem<S>,
    rx: &Representation,
    ry: &Representation,
) -> Result<RestrictionWitness<S>> {
    let q = problem.quotient();
    let g = q.group();
    let mu = problem.mu();
    let p = problem.prime as usize;
    let matching = problem.min_matching_cost(&rx.multiset(), &ry.multiset());
    let alignment = matching.pairs;
    let occurrences = |pick: fn(&(usize, usize)) -> usize| -> Vec<BTreeSet<usize>> {
        (0..mu)
            .map(|a| {
                alignment
                    .iter()
                    .enumerate()
                    .filter(|(_, pair)| pick(pair) == a)
                    .map(|(i, _)| i)
                    .collect::<BTreeSet<usize>>()
            })
            .filter(|s| !s.is_empty())
            .collect()
    };
    let sets_a = occurrences(|pair| pair.0);
    let sets_b = occurrences(|pair| pair.1);
    let selected = p_fractional_transversal(&sets_a, &sets_b, p)?;

    let scaled_sum = |side: fn(&(usize, usize)) -> usize| -> usize {
        selected.iter().fold(0, |acc, &i| {
            g.add_ids(
                acc,
                g.scale_id(p as i64, q.basis_element_id(side(&alignment[i]))),
            )
        })
    };
    let x = g.add(&rx.u, &g.element(scaled_sum(|pair| pair.0)));
    let y = g.add(&ry.u, &g.element(scaled_sum(|pair| pair.1)));
    let x_direct = problem.representation_target(rx);
    let y_direct = problem.representation_target(ry);
    if x != x_direct || y != y_direct {
        return Err(Error::Internal(
            "selected positions do not reproduce x, y".into(),
        ));
    }
    let uv = problem
        .base
        .value(&g.sub(&rx.u, &ry.u))
        .ok_or_else(|| Error::InvalidArgument("representations must have u in H".into()))?
        .clone();
    let target = problem
        .base
        .value(&g.sub(&x, &y))
        .ok_or_else(|| Error::InvalidArgument("both represented elements must lie in H".into()))?
        .clone();
    let selected_cost = selected.iter().fold(uv.clone(), |acc, &i| {
        let (a, b) = alignment[i];
        acc + problem.pair_cost(a, b).clone()
    });
    Ok(RestrictionWitness {
        alignment,
        selected,
        pair_cost: uv + matching.cost,
        selected_cost,
        target,
    })
}

impl<S: Scalar> ExtensionProblem<S> {
    /// The element `u + Σ counts[α] g^α` a representation stands for.
    pub fn representation_target(&self, r: &Representation) -> Element {
        let g = self.quotient.group();
        let signed: Vec<i64> = r.counts.iter().map(|&c| c as i64).collect();
        g.element(g.add_ids(g.index(&r.u), self.combination_id(&signed)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub prime: u64,
    /// `H_{i+1} = {x : p x ∈ H_i}`.
    pub subgroup: Subgroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPlan {
    pub start: Subgroup,
    pub steps: Vec<ChainStep>,
}

impl ChainPlan {
    pub fn primes(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.prime).collect()
    }
}

/// Primes dividing `[G : H]` in increasing order, each repeated while it
/// still enlarges the current subgroup.
pub fn build_chain(ambient: &Subgroup, sub: &Subgroup) -> Result<ChainPlan> {
    if !sub.is_subset_of(ambient) {
        return Err(Error::NotASubgroup(
            "subgroup is not contained in the ambient group".into(),
        ));
    }
    let mut primes = prime_factors((ambient.len() / sub.len()) as u64);
    primes.dedup();
    let mut current = sub.clone();
    let mut steps = Vec::new();
    for p in primes {
        loop {
            let next = ambient.divide(&current, p);
            if next.len() == current.len() {
                break;
            }
            steps.push(ChainStep {
                prime: p,
                subgroup: next.clone(),
            });
            current = next;
        }
    }
    if current.len() != ambient.len() {
        return Err(Error::Internal(
            "chain did not reach the ambient group".into(),
        ));
    }
    Ok(ChainPlan {
        start: sub.clone(),
        steps,
    })
}

#[derive(Clone, Debug)]
pub struct ChainExtension<S> {
    pub plan: ChainPlan,
    /// One extension per chain step.
    pub steps: Vec<ExtendedNorm<S>>,
    pub norm: Pseudonorm<S>,
}

/// Folds [`prime_step_extend`] along [`build_chain`].
pub fn chain_extend<S: Scalar>(
    ambient: &Subgroup,
    base: &Pseudonorm<S>,
    cap: u32,
) -> Result<ChainExtension<S>> {
    let report = base.validate();
    if !report.is_ok() {
        return Err(Error::InvalidBaseNorm(report.summary()));
    }
    let plan = build_chain(ambient, base.carrier())?;
    let mut current = base.clone();
    let mut steps = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        let problem = ExtensionProblem::new(&step.subgroup, current.clone(), step.prime, cap)?;
        let extended = prime_step_extend(&problem)?;
        current = extended.norm.clone();
        steps.push(extended);
    }
    Ok(ChainExtension {
        plan,
        steps,
        norm: current,
    })
}
