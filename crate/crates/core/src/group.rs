//! Finite abelian groups `Z_{n_1} ⊕ … ⊕ Z_{n_r}` and the structures built on
//! them: subgroups as explicit element lists, quotients with an `F_p` basis,
//! and homomorphisms given by generator images.
//!
//! Elements are residue vectors. Internally every element also has an index
//! in `0..|G|` (mixed radix, first coordinate most significant), so sorting by
//! index is the same as sorting residue vectors lexicographically.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order accepted. Everything here enumerates elements.
pub const MAX_GROUP_ORDER: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub Vec<u64>);

impl Element {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    fn signed(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<u64>> for Element {
    fn from(v: Vec<u64>) -> Self {
        Element(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
    // stride of coordinate i in the mixed radix index
    strides: Vec<usize>,
    size: usize,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::NonPositiveOrder);
        }
        let total = orders
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .unwrap_or(u128::MAX);
        if total > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge(total));
        }
        let mut strides = vec![1usize; orders.len()];
        for i in (0..orders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1] as usize;
        }
        Ok(Self {
            orders,
            strides,
            size: total as usize,
        })
    }

    /// Accepts signed orders as they come from JSON.
    pub fn from_signed(orders: &[i64]) -> Result<Self> {
        if orders.iter().any(|&n| n < 1) {
            return Err(Error::NonPositiveOrder);
        }
        Self::new(orders.iter().map(|&n| n as u64).collect())
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    /// Standard generator `e_i`.
    pub fn generator(&self, i: usize) -> Element {
        let mut v = vec![0; self.rank()];
        if self.orders[i] > 1 {
            v[i] = 1;
        }
        Element(v)
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.orders).all(|(c, n)| c < n)
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                element: x.signed(),
                context: format!("Z{:?}", self.orders),
            })
        }
    }

    /// Reduces an arbitrary integer vector into the group.
    pub fn reduce(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::ElementOutOfRange {
                element: coords.to_vec(),
                context: format!("Z{:?}", self.orders),
            });
        }
        Ok(Element(
            coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    pub fn index(&self, x: &Element) -> usize {
        x.0.iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    pub fn element(&self, id: usize) -> Element {
        Element(
            self.strides
                .iter()
                .zip(&self.orders)
                .map(|(&s, &n)| ((id / s) as u64) % n)
                .collect(),
        )
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size).map(move |id| self.element(id))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.orders)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&self.orders)
                .map(|(x, n)| (n - x) % n)
                .collect(),
        )
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: i64, a: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&self.orders)
                .map(|(&x, &n)| ((k as i128 * x as i128).rem_euclid(n as i128)) as u64)
                .collect(),
        )
    }

    pub fn add_ids(&self, a: usize, b: usize) -> usize {
        self.combine_ids(a, b, |x, y, n| (x + y) % n)
    }

    pub fn sub_ids(&self, a: usize, b: usize) -> usize {
        self.combine_ids(a, b, |x, y, n| (x + n - y) % n)
    }

    pub fn neg_id(&self, a: usize) -> usize {
        self.sub_ids(0, a)
    }

    pub fn scale_id(&self, k: i64, a: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.orders) {
            let x = ((a / s) as u64 % n) as i128;
            out += ((k as i128 * x).rem_euclid(n as i128)) as usize * s;
        }
        out
    }

    fn combine_ids(&self, a: usize, b: usize, op: impl Fn(usize, usize, usize) -> usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.orders) {
            let n = n as usize;
            out += op((a / s) % n, (b / s) % n, n) * s;
        }
        out
    }

    /// Order of `x` as a group element.
    pub fn element_order(&self, x: &Element) -> u64 {
        x.0.iter()
            .zip(&self.orders)
            .fold(1u64, |acc, (&c, &n)| acc.lcm(&(n / c.gcd(&n))))
    }
}

/// A subgroup stored as its sorted list of element indices.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    ids: Vec<usize>,
    // position of each parent element in `ids`, u32::MAX when absent
    position: Vec<u32>,
    generators: Vec<Element>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.ids == other.ids
    }
}

impl Eq for Subgroup {}

const ABSENT: u32 = u32::MAX;

impl Subgroup {
    fn from_ids(parent: FiniteAbelianGroup, mut ids: Vec<usize>, generators: Vec<Element>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        let mut position = vec![ABSENT; parent.order()];
        for (i, &id) in ids.iter().enumerate() {
            position[id] = i as u32;
        }
        Self {
            parent,
            ids,
            position,
            generators,
        }
    }

    /// Smallest subgroup containing `gens`.
    pub fn closure(parent: &FiniteAbelianGroup, gens: &[Element]) -> Result<Self> {
        for g in gens {
            parent.check(g)?;
        }
        let gen_ids: Vec<usize> = gens.iter().map(|g| parent.index(g)).collect();
        let mut seen = vec![false; parent.order()];
        seen[0] = true;
        let mut ids = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for &g in &gen_ids {
                let b = parent.add_ids(a, g);
                if !seen[b] {
                    seen[b] = true;
                    ids.push(b);
                    queue.push_back(b);
                }
            }
        }
        Ok(Self::from_ids(parent.clone(), ids, gens.to_vec()))
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        let gens = (0..parent.rank()).map(|i| parent.generator(i)).collect();
        Self::from_ids(parent.clone(), (0..parent.order()).collect(), gens)
    }

    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        Self::from_ids(parent.clone(), vec![0], Vec::new())
    }

    /// `nG = {n x : x in G}`.
    pub fn scaled(parent: &FiniteAbelianGroup, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "scale factor must be at least 1".into(),
            ));
        }
        let ids = (0..parent.order())
            .map(|id| parent.scale_id(n as i64, id))
            .collect();
        let gens = (0..parent.rank())
            .map(|i| parent.scale(n as i64, &parent.generator(i)))
            .collect();
        Ok(Self::from_ids(parent.clone(), ids, gens))
    }

    /// Builds a subgroup from an explicit element list, checking closure.
    pub fn from_elements(parent: &FiniteAbelianGroup, elems: &[Element]) -> Result<Self> {
        for e in elems {
            parent.check(e)?;
        }
        let ids = elems.iter().map(|e| parent.index(e)).collect();
        let sub = Self::from_ids(parent.clone(), ids, elems.to_vec());
        if !sub.is_closed() {
            return Err(Error::NotASubgroup(format!("{} elements", elems.len())));
        }
        Ok(sub)
    }

    /// `{x in self : p x in inner}`; the preimage of `inner` under multiplication by `p`.
    pub fn divide(&self, inner: &Subgroup, p: u64) -> Subgroup {
        let ids = self
            .ids
            .iter()
            .copied()
            .filter(|&id| inner.contains_id(self.parent.scale_id(p as i64, id)))
            .collect();
        Self::from_ids(self.parent.clone(), ids, Vec::new())
    }

    /// Subgroup generated by `self` and `extra`.
    pub fn join(&self, extra: &Element) -> Subgroup {
        let g = &self.parent;
        let e = g.index(extra);
        let mut ids = self.ids.clone();
        let mut shift = e;
        while !self.contains_id(shift) {
            ids.extend(self.ids.iter().map(|&h| g.add_ids(h, shift)));
            shift = g.add_ids(shift, e);
        }
        let mut gens = self.generators.clone();
        gens.push(extra.clone());
        Self::from_ids(g.clone(), ids, gens)
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn elements(&self) -> Vec<Element> {
        self.ids.iter().map(|&id| self.parent.element(id)).collect()
    }

    pub fn contains_id(&self, id: usize) -> bool {
        self.position.get(id).is_some_and(|&p| p != ABSENT)
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.parent.contains(x) && self.contains_id(self.parent.index(x))
    }

    /// Position of a parent element in the sorted element list.
    pub fn position_of_id(&self, id: usize) -> Option<usize> {
        match self.position.get(id) {
            Some(&p) if p != ABSENT => Some(p as usize),
            _ => None,
        }
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.ids.iter().all(|&id| other.contains_id(id))
    }

    /// Exhaustive check: identity, closure under addition and negation.
    pub fn is_closed(&self) -> bool {
        let g = &self.parent;
        self.contains_id(0)
            && self.ids.iter().all(|&a| {
                self.contains_id(g.neg_id(a))
                    && self.ids.iter().all(|&b| self.contains_id(g.add_ids(a, b)))
            })
    }
}

/// An `F_p` basis of `G/H` together with the coordinates of every coset.
#[derive(Clone, Debug)]
pub struct PrimeBasis {
    pub prime: u64,
    /// Canonical coset representatives `g^α`, `α < μ`.
    pub generators: Vec<Element>,
    pub generator_ids: Vec<usize>,
    coords_of_coset: Vec<Vec<u64>>,
}

/// Cosets of `H` in an ambient subgroup `G` (often the whole group).
#[derive(Clone, Debug)]
pub struct QuotientStructure {
    ambient: Subgroup,
    sub: Subgroup,
    // parent element id -> coset index, usize::MAX outside the ambient group
    coset_of: Vec<usize>,
    cosets: Vec<Vec<usize>>,
    exponent: u64,
    basis: Option<PrimeBasis>,
}

impl QuotientStructure {
    /// Coset partition and exponent; an `F_p` basis when the exponent is a prime `p`.
    pub fn new(ambient: &Subgroup, sub: &Subgroup) -> Result<Self> {
        let mut q = Self::cosets_only(ambient, sub)?;
        if is_prime(q.exponent) {
            q.basis = Some(q.greedy_basis(q.exponent));
        }
        Ok(q)
    }

    /// Like [`QuotientStructure::new`] but always builds an `F_p` basis for the
    /// given prime; requires `pG ⊆ H`. With `H = G` the basis is empty.
    pub fn with_prime(ambient: &Subgroup, sub: &Subgroup, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut q = Self::cosets_only(ambient, sub)?;
        if q.exponent != 1 && q.exponent != p {
            return Err(Error::ScaleNotContained { p });
        }
        q.basis = Some(q.greedy_basis(p));
        Ok(q)
    }

    pub fn of_group(group: &FiniteAbelianGroup, sub: &Subgroup) -> Result<Self> {
        Self::new(&Subgroup::whole(group), sub)
    }

    fn cosets_only(ambient: &Subgroup, sub: &Subgroup) -> Result<Self> {
        if !sub.is_subset_of(ambient) {
            return Err(Error::NotASubgroup(
                "subgroup is not contained in the ambient group".into(),
            ));
        }
        let g = ambient.parent();
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut cosets = Vec::new();
        for &x in ambient.ids() {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let idx = cosets.len();
            let mut members: Vec<usize> = sub.ids().iter().map(|&h| g.add_ids(x, h)).collect();
            members.sort_unstable();
            for &m in &members {
                coset_of[m] = idx;
            }
            cosets.push(members);
        }
        let exponent = cosets.iter().fold(1u64, |acc, c| {
            let rep = c[0];
            let mut k = 1u64;
            let mut y = rep;
            while !sub.contains_id(y) {
                y = g.add_ids(y, rep);
                k += 1;
            }
            acc.lcm(&k)
        });
        Ok(Self {
            ambient: ambient.clone(),
            sub: sub.clone(),
            coset_of,
            cosets,
            exponent,
            basis: None,
        })
    }

    // Scan canonical representatives in lexicographic order and keep each one
    // that is independent of those already chosen.
    fn greedy_basis(&self, p: u64) -> PrimeBasis {
        let g = self.ambient.parent();
        let mut coords: Vec<Option<Vec<u64>>> = vec![None; self.cosets.len()];
        coords[self.coset_of[0]] = Some(Vec::new());
        let mut spanned = vec![self.coset_of[0]];
        let mut generators = Vec::new();
        let mut generator_ids = Vec::new();
        for c in 0..self.cosets.len() {
            if coords[c].is_some() {
                continue;
            }
            let rep = self.cosets[c][0];
            let k = generator_ids.len();
            generator_ids.push(rep);
            generators.push(g.element(rep));
            for s in spanned.clone() {
                let base = coords[s].clone().expect("spanned coset has coordinates");
                let mut shift = self.cosets[s][0];
                for mult in 1..p {
                    shift = g.add_ids(shift, rep);
                    let t = self.coset_of[shift];
                    let mut v = base.clone();
                    v.resize(k, 0);
                    v.push(mult);
                    coords[t] = Some(v);
                    spanned.push(t);
                }
            }
        }
        let b = generators.len();
        let coords_of_coset = coords
            .into_iter()
            .map(|c| {
                let mut v = c.expect("basis spans the quotient");
                v.resize(b, 0);
                v
            })
            .collect();
        PrimeBasis {
            prime: p,
            generators,
            generator_ids,
            coords_of_coset,
        }
    }

    pub fn ambient(&self) -> &Subgroup {
        &self.ambient
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.sub
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.ambient.parent()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    /// Cosets as sorted element indices; coset 0 is `H` itself.
    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn coset_of_id(&self, id: usize) -> usize {
        self.coset_of[id]
    }

    pub fn canonical_representative(&self, coset: usize) -> Element {
        self.group().element(self.cosets[coset][0])
    }

    pub fn basis(&self) -> Option<&PrimeBasis> {
        self.basis.as_ref()
    }

    pub fn basis_len(&self) -> usize {
        self.basis.as_ref().map_or(0, |b| b.generators.len())
    }

    /// Index of the sentinel `μ` with `g^μ = 0`.
    pub fn mu_index(&self) -> usize {
        self.basis_len()
    }

    /// `g^α` for `α <= μ`.
    pub fn basis_element_id(&self, alpha: usize) -> usize {
        let b = self.basis.as_ref().expect("prime basis");
        if alpha == b.generator_ids.len() {
            0
        } else {
            b.generator_ids[alpha]
        }
    }

    pub fn coordinates_of_coset(&self, coset: usize) -> Result<&[u64]> {
        match &self.basis {
            Some(b) => Ok(&b.coords_of_coset[coset]),
            None => Err(Error::NonPrimeExponent(self.exponent)),
        }
    }

    pub fn coordinates_of_id(&self, id: usize) -> Result<&[u64]> {
        self.coordinates_of_coset(self.coset_of[id])
    }

    /// Unique `c` with `x + H = Σ c_α (g^α + H)`, `0 <= c_α < p`.
    pub fn coordinates(&self, x: &Element) -> Result<Vec<u64>> {
        if !self.ambient.contains(x) {
            return Err(Error::ElementOutOfRange {
                element: x.signed(),
                context: "ambient group of the quotient".into(),
            });
        }
        Ok(self.coordinates_of_id(self.group().index(x))?.to_vec())
    }
}

/// A homomorphism `Z_{n_1} ⊕ … → target` given by the images of the `e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    images: Vec<Element>,
}

impl Homomorphism {
    pub fn new(
        source: FiniteAbelianGroup,
        target: FiniteAbelianGroup,
        images: Vec<Element>,
    ) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::ImageCount {
                expected: source.rank(),
                actual: images.len(),
            });
        }
        for (i, img) in images.iter().enumerate() {
            target.check(img)?;
            let order = source.orders()[i];
            if target.scale(order as i64, img) != target.identity() {
                return Err(Error::RelationViolation {
                    generator: i,
                    order,
                });
            }
        }
        Ok(Self {
            source,
            target,
            images,
        })
    }

    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        let images = (0..group.rank()).map(|i| group.generator(i)).collect();
        Self::new(group.clone(), group.clone(), images).expect("identity respects relations")
    }

    pub fn zero(source: &FiniteAbelianGroup, target: &FiniteAbelianGroup) -> Self {
        let images = vec![target.identity(); source.rank()];
        Self::new(source.clone(), target.clone(), images).expect("zero map respects relations")
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.source.check(x)?;
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &Element) -> Element {
        let t = &self.target;
        x.0.iter()
            .zip(&self.images)
            .fold(t.identity(), |acc, (&c, img)| {
                t.add(&acc, &t.scale(c as i64, img))
            })
    }

    pub fn apply_id(&self, id: usize) -> usize {
        self.target
            .index(&self.apply_unchecked(&self.source.element(id)))
    }

    /// Exhaustive additivity check over all pairs.
    pub fn is_additive(&self) -> bool {
        let s = &self.source;
        let t = &self.target;
        let img: Vec<usize> = (0..s.order()).map(|id| self.apply_id(id)).collect();
        (0..s.order())
            .all(|a| (0..s.order()).all(|b| img[s.add_ids(a, b)] == t.add_ids(img[a], img[b])))
    }

    /// True when source and target coincide and `h` fixes every element of `sub`.
    pub fn is_identity_on(&self, sub: &Subgroup) -> bool {
        self.source == self.target
            && sub.parent() == &self.source
            && sub.ids().iter().all(|&id| self.apply_id(id) == id)
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Prime factors with multiplicity, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
