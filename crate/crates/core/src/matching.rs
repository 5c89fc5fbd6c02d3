//! Assignment and bipartite matching primitives.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<S> {
    /// `row_to_col[i]` is the column matched to row `i`.
    pub row_to_col: Vec<usize>,
    pub cost: S,
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, `O(n^3)`). Exact for rational scalars. Ties resolve toward
/// lower row and column indices.
pub fn min_cost_assignment<S: Scalar>(cost: &[Vec<S>]) -> Assignment<S> {
    let n = cost.len();
    assert!(
        cost.iter().all(|row| row.len() == n),
        "cost matrix must be square"
    );
    if n == 0 {
        return Assignment {
            row_to_col: Vec::new(),
            cost: S::zero(),
        };
    }

    // 1-based potentials; column 0 is a virtual column
    let mut u = vec![S::zero(); n + 1];
    let mut v = vec![S::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv: Vec<Option<S>> = vec![None; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = None);
        used.iter_mut().for_each(|f| *f = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<S> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1].clone() - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|m| cur < *m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = minv[j].as_mut() {
                    *m = m.clone() - delta.clone();
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    let total = row_to_col
        .iter()
        .enumerate()
        .fold(S::zero(), |acc, (i, &j)| acc + cost[i][j].clone());
    Assignment {
        row_to_col,
        cost: total,
    }
}

/// Perfect matching in the bipartite graph `rows × cols` with an edge where
/// `adjacent(i, j)` holds, by augmenting paths in index order. `None` if no
/// perfect matching exists.
pub fn perfect_matching(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| adjacent(i, j)).collect())
        .collect();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        col_owner: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            let free = match col_owner[j] {
                None => true,
                Some(other) => augment(other, adj, seen, col_owner),
            };
            if free {
                col_owner[j] = Some(i);
                return true;
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &adj, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut row_to_col = vec![0; n];
    for (j, owner) in col_owner.iter().enumerate() {
        row_to_col[owner.expect("perfect matching covers every column")] = j;
    }
    Some(row_to_col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational64 as Q;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_force(cost: &[Vec<Q>]) -> Q {
        permutations(cost.len())
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<Q>())
            .min()
            .unwrap()
    }

    #[test]
    fn empty_and_single() {
        let a = min_cost_assignment::<Q>(&[]);
        assert_eq!(a.cost, Q::from_integer(0));
        let a = min_cost_assignment(&[vec![Q::new(3, 2)]]);
        assert_eq!(a.row_to_col, vec![0]);
        assert_eq!(a.cost, Q::new(3, 2));
    }

    #[test]
    fn known_3x3() {
        let c: Vec<Vec<Q>> = [[4, 1, 3], [2, 0, 5], [3, 2, 2]]
            .iter()
            .map(|r| r.iter().map(|&x| Q::from_integer(x)).collect())
            .collect();
        let a = min_cost_assignment(&c);
        assert_eq!(a.cost, Q::from_integer(5));
        assert_eq!(a.row_to_col, vec![1, 0, 2]);
    }

    #[test]
    fn random_5x5_rationals_match_permutation_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let c: Vec<Vec<Q>> = (0..5)
                .map(|_| {
                    (0..5)
                        .map(|_| Q::new(rng.gen_range(-20..40), rng.gen_range(1..7)))
                        .collect()
                })
                .collect();
            assert_eq!(min_cost_assignment(&c).cost, brute_force(&c));
        }
    }

    #[test]
    fn perfect_matching_on_support() {
        let support = [
            [true, true, false],
            [true, false, false],
            [false, true, true],
        ];
        let m = perfect_matching(3, |i, j| support[i][j]).unwrap();
        assert_eq!(m, vec![1, 0, 2]);
        let blocked = [[true, false], [true, false]];
        assert!(perfect_matching(2, |i, j| blocked[i][j]).is_none());
    }
}
