//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use pnext::extend::ExtensionProblem;
use pnext::{Element, Rational64 as Q};

/// True infimum `|x|_G = rho(x, 0)` over representations with unbounded
/// counts, for every `x` in the ambient group, indexed like `ambient.ids()`.
///
/// An aligned pair of representations is a walk that adds `g^α - g^β` per
/// aligned pair (cost `|p g^α - p g^β|_H`) and `h ∈ H` once (cost `|h|_H`).
/// The `y = 0` side needs every basis count divisible by `p`, which the walk
/// tracks mod `p`; the `x` side is then forced. Shortest paths from
/// `(0, 0)` to `(x, 0)` give the infimum.
pub fn exact_extension(problem: &ExtensionProblem<Q>) -> Vec<Q> {
    let q = problem.quotient();
    let g = q.group();
    let ambient = q.ambient();
    let sub = q.subgroup();
    let base = problem.base();
    let p = problem.prime() as usize;
    let b = q.basis_len();
    let basis: Vec<usize> = (0..b)
        .map(|a| q.basis().unwrap().generator_ids[a])
        .chain(std::iter::once(0))
        .collect();
    let cost = |a: usize, c: usize| -> Q {
        let pa = g.scale_id(p as i64, basis[a]);
        let pc = g.scale_id(p as i64, basis[c]);
        *base.value_id(g.sub_ids(pa, pc)).unwrap()
    };
    let radix: usize = p.pow(b as u32);
    let n = ambient.len() * radix;
    let state = |z: usize, r: usize| ambient.position_of_id(z).unwrap() * radix + r;
    let bump = |r: usize, beta: usize| -> usize {
        if beta == b {
            return r;
        }
        let place = p.pow(beta as u32);
        let digit = (r / place) % p;
        r - digit * place + ((digit + 1) % p) * place
    };
    let mut steps: Vec<(usize, usize, Q)> = Vec::new();
    for a in 0..=b {
        for c in 0..=b {
            steps.push((a, c, cost(a, c)));
        }
    }
    let h_steps: Vec<(usize, Q)> = sub
        .ids()
        .iter()
        .map(|&h| (h, *base.value_id(h).unwrap()))
        .collect();

    let mut dist: Vec<Option<Q>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[state(0, 0)] = Some(Q::from_integer(0));
    heap.push(Reverse((Q::from_integer(0), 0usize, 0usize)));
    while let Some(Reverse((d, z, r))) = heap.pop() {
        if dist[state(z, r)].as_ref().is_some_and(|best| d > *best) {
            continue;
        }
        let mut relax = |z2: usize, r2: usize, w: &Q| {
            let nd = d + *w;
            let s = state(z2, r2);
            if dist[s].as_ref().is_none_or(|cur| nd < *cur) {
                dist[s] = Some(nd);
                heap.push(Reverse((nd, z2, r2)));
            }
        };
        for (a, c, w) in &steps {
            let z2 = g.sub_ids(g.add_ids(z, basis[*a]), basis[*c]);
            relax(z2, bump(r, *c), w);
        }
        for (h, w) in &h_steps {
            relax(g.add_ids(z, *h), r, w);
        }
    }
    ambient
        .ids()
        .iter()
        .map(|&x| dist[state(x, 0)].unwrap())
        .collect()
}

/// Count vectors `c` with every `c_α < p (cap + 1)` and `x - Σ c_α g^α ∈ H`,
/// paired with that `u`.
fn representations(
    problem: &ExtensionProblem<Q>,
    x: &Element,
    cap: u32,
) -> Vec<(usize, Vec<usize>)> {
    let q = problem.quotient();
    let g = q.group();
    let b = q.basis_len();
    let gens = &q.basis().unwrap().generator_ids;
    let limit = problem.prime() as usize * (cap as usize + 1);
    let mut out = Vec::new();
    let total = limit.pow(b as u32);
    for code in 0..total {
        let counts: Vec<usize> = (0..b)
            .map(|a| (code / limit.pow(a as u32)) % limit)
            .collect();
        let shift = counts.iter().enumerate().fold(0, |acc, (a, &c)| {
            g.add_ids(acc, g.scale_id(c as i64, gens[a]))
        });
        let u = g.sub_ids(g.index(x), shift);
        if q.subgroup().contains_id(u) {
            out.push((u, counts));
        }
    }
    out
}

/// Least cost over every way of pairing the items of `cx` with those of `cy`
/// after padding each side with `μ` up to `|cx| + |cy|` items. Items of the
/// same index are interchangeable, so the search runs over how many of each
/// index go to each index, exhaustively, with memoisation.
pub fn best_pairing(cx: &[usize], cy: &[usize], cost: &dyn Fn(usize, usize) -> Q) -> Q {
    let b = cx.len();
    let nx: usize = cx.iter().sum();
    let ny: usize = cy.iter().sum();
    let mut rows: Vec<usize> = Vec::new();
    for (a, &c) in cx.iter().enumerate() {
        rows.extend(std::iter::repeat_n(a, c));
    }
    rows.extend(std::iter::repeat_n(b, ny));
    let mut cols = cy.to_vec();
    cols.push(nx);
    let mut memo: HashMap<(usize, Vec<usize>), Q> = HashMap::new();
    fn go(
        i: usize,
        rows: &[usize],
        cols: &mut Vec<usize>,
        cost: &dyn Fn(usize, usize) -> Q,
        memo: &mut HashMap<(usize, Vec<usize>), Q>,
    ) -> Q {
        if i == rows.len() {
            return Q::from_integer(0);
        }
        let key = (i, cols.clone());
        if let Some(v) = memo.get(&key) {
            return *v;
        }
        let mut best: Option<Q> = None;
        for c in 0..cols.len() {
            if cols[c] == 0 {
                continue;
            }
            cols[c] -= 1;
            let v = cost(rows[i], c) + go(i + 1, rows, cols, cost, memo);
            cols[c] += 1;
            if best.is_none_or(|bv| v < bv) {
                best = Some(v);
            }
        }
        let v = best.expect("columns cover rows");
        memo.insert(key, v);
        v
    }
    go(0, &rows, &mut cols, cost, &mut memo)
}

/// `rho(x, y)` by enumerating every representation pair in the cap window
/// and every pairing of their basis multisets.
pub fn brute_rho(problem: &ExtensionProblem<Q>, x: &Element, y: &Element, cap: u32) -> Q {
    let q = problem.quotient();
    let g = q.group();
    let p = problem.prime() as i64;
    let base = problem.base();
    let gens: Vec<usize> = q
        .basis()
        .unwrap()
        .generator_ids
        .iter()
        .copied()
        .chain(std::iter::once(0))
        .collect();
    let cost = |a: usize, c: usize| -> Q {
        *base
            .value_id(g.sub_ids(g.scale_id(p, gens[a]), g.scale_id(p, gens[c])))
            .unwrap()
    };
    let rx = representations(problem, x, cap);
    let ry = representations(problem, y, cap);
    let mut pairings: HashMap<(Vec<usize>, Vec<usize>), Q> = HashMap::new();
    let mut best: Option<Q> = None;
    for (u, cx) in &rx {
        for (v, cy) in &ry {
            let m = *pairings
                .entry((cx.clone(), cy.clone()))
                .or_insert_with(|| best_pairing(cx, cy, &cost));
            let total = *base.value_id(g.sub_ids(*u, *v)).unwrap() + m;
            if best.is_none_or(|bv| total < bv) {
                best = Some(total);
            }
        }
    }
    best.expect("some representation exists")
}

/// Whether some `I ⊆ ground` meets every set exactly once.
pub fn transversal_exists(sets: &[BTreeSet<u32>], ground: usize) -> bool {
    (0u32..(1 << ground)).any(|mask| {
        sets.iter()
            .all(|s| s.iter().filter(|&&l| mask >> l & 1 == 1).count() == 1)
    })
}

/// `|x|` on `Z ⊂ (1/p)Z` with base `|n| = abs(n)`, by enumerating
/// `x = u + c/p`, `0 = v + d/p` with `c, d ∈ base + p·{0..=cap}` and every
/// pairing. Only `g = 1/p` and `μ` exist, so a pairing leaves `|c - d|`
/// copies of `g` against `μ` at cost `|1| = 1` each.
pub fn lattice_abs_oracle(numerator: i64, p: i64, cap: i64) -> Q {
    let base_x = numerator.rem_euclid(p);
    let mut best: Option<Q> = None;
    for i in 0..=cap {
        for j in 0..=cap {
            let c = base_x + p * i;
            let d = p * j;
            let u = (numerator - c) / p;
            let v = -d / p;
            let total = Q::from_integer((u - v).abs() + (c - d).abs());
            if best.is_none_or(|bv| total < bv) {
                best = Some(total);
            }
        }
    }
    best.unwrap()
}
