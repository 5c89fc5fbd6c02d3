//! The extension construction on `Z^n ⊂ (1/m)Z^n`.
//!
//! The quotient `(1/m)Z^n / Z^n` is finite, so the chain
//! `Z^n = H_0 ⊂ H_1 ⊂ … ⊂ H_r = (1/m)Z^n` with `H_i = (1/a_i)Z^n`,
//! `a_i = p_1 ⋯ p_i` (prime factors of `m` ascending) reaches the whole group.
//! Level `i` uses the basis `g^α = e_α / a_i`, so `p_i g^α = e_α / a_{i-1}`
//! lies in the previous level. Values are computed lazily and memoised; the
//! infinite groups are never enumerated.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::extend::{min_matching_cost, DEFAULT_CAP};
use crate::group::prime_factors;
use crate::scalar::Scalar;
use crate::Rational64;

/// `(1/m)Z^n`, containing `Z^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeGroup {
    dim: usize,
    denominator: u64,
}

/// A point with reduced rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub Vec<Rational64>);

impl LatticePoint {
    pub fn integer(coords: &[i64]) -> Self {
        Self(
            coords
                .iter()
                .map(|&c| Rational64::from_integer(c))
                .collect(),
        )
    }

    /// `numerators / denominator`, reduced.
    pub fn from_numerators(numerators: &[i64], denominator: u64) -> Self {
        Self(
            numerators
                .iter()
                .map(|&k| Rational64::new(k, denominator as i64))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    /// Numerators over `denominator`, if every coordinate fits.
    pub fn numerators(&self, denominator: u64) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|c| {
                let scaled = c * Rational64::from_integer(denominator as i64);
                scaled.is_integer().then(|| scaled.to_integer())
            })
            .collect()
    }
}

impl fmt::Display for LatticePoint {
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

impl LatticeGroup {
    pub fn new(dim: usize, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidArgument(
                "denominator must be at least 1".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(Self { dim, denominator })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        x.dim() == self.dim && x.numerators(self.denominator).is_some()
    }

    /// `m x` has integer coordinates for every member `x`.
    pub fn scale_to_integers(&self, x: &LatticePoint) -> Option<Vec<i64>> {
        x.numerators(self.denominator)
    }

    /// All members with every coordinate in `[-window, window]`, lexicographic.
    pub fn window_points(&self, window: i64) -> Vec<LatticePoint> {
        let m = self.denominator as i64;
        let range: Vec<i64> = (-window * m..=window * m).collect();
        let mut out: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 0..self.dim {
            out = out
                .into_iter()
                .flat_map(|v| {
                    range.iter().map(move |&k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        out.iter()
            .map(|k| LatticePoint::from_numerators(k, self.denominator))
            .collect()
    }
}

/// Pseudonorm on `Z^n` that the extension starts from.
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeBase<S> {
    /// `Σ |x_i|`
    AbsSum,
    /// `max |x_i|`
    AbsMax,
    /// Explicit values on a finite set of integer points.
    Table(HashMap<Vec<i64>, S>),
}

impl<S: Scalar> LatticeBase<S> {
    pub fn value(&self, point: &[i64]) -> Result<S> {
        match self {
            LatticeBase::AbsSum => {
                Ok(S::from_i64(point.iter().map(|c| c.abs()).sum()).expect("integer fits scalar"))
            }
            LatticeBase::AbsMax => Ok(S::from_i64(
                point.iter().map(|c| c.abs()).max().unwrap_or(0),
            )
            .expect("integer fits scalar")),
            LatticeBase::Table(t) => t.get(point).cloned().ok_or(Error::WindowTooSmall {
                required: point.iter().map(|c| c.abs()).max().unwrap_or(0),
            }),
        }
    }
}

/// Minimising representation pair behind one lattice value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCertificate {
    /// Element of the previous level with `x = u + Σ counts_x[α] g^α`.
    pub u: LatticePoint,
    pub counts_x: Vec<u64>,
    pub v: LatticePoint,
    pub counts_y: Vec<u64>,
}

struct Level<S> {
    prime: u64,
    // a_i: points of this level are k / denominator
    denominator: u64,
    // |e_α/a_{i-1} - e_β/a_{i-1}|_{i-1}, index dim is μ
    costs: Vec<Vec<S>>,
    matching: HashMap<Vec<i64>, S>,
    values: HashMap<Vec<i64>, S>,
}

/// The chained extension of a base pseudonorm, evaluated on demand.
pub struct LatticeNorm<S> {
    group: LatticeGroup,
    base: LatticeBase<S>,
    cap: u32,
    levels: Vec<Level<S>>,
}

impl<S: Scalar> LatticeNorm<S> {
    pub fn new(group: LatticeGroup, base: LatticeBase<S>, cap: u32) -> Result<Self> {
        let mut norm = Self {
            group,
            base,
            cap,
            levels: Vec::new(),
        };
        let mut denominator = 1u64;
        for p in prime_factors(group.denominator) {
            denominator *= p;
            let n = group.dim;
            let mut costs = vec![vec![S::zero(); n + 1]; n + 1];
            let level = norm.levels.len();
            for a in 0..=n {
                for b in 0..=n {
                    let mut k = vec![0i64; n];
                    if a < n {
                        k[a] += 1;
                    }
                    if b < n {
                        k[b] -= 1;
                    }
                    costs[a][b] = norm.level_value(level, &k)?;
                }
            }
            norm.levels.push(Level {
                prime: p,
                denominator,
                costs,
                matching: HashMap::new(),
                values: HashMap::new(),
            });
        }
        Ok(norm)
    }

    pub fn group(&self) -> LatticeGroup {
        self.group
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// `|x|` on the top level.
    pub fn value(&mut self, x: &LatticePoint) -> Result<S> {
        let k = self.top_numerators(x)?;
        self.level_value(self.levels.len(), &k)
    }

    /// `rho(x, y)` on the top level.
    pub fn rho(
        &mut self,
        x: &LatticePoint,
        y: &LatticePoint,
    ) -> Result<(S, Option<LatticeCertificate>)> {
        let kx = self.top_numerators(x)?;
        let ky = self.top_numerators(y)?;
        self.level_rho(self.levels.len(), &kx, &ky)
    }

    fn top_numerators(&self, x: &LatticePoint) -> Result<Vec<i64>> {
        if x.dim() != self.group.dim {
            return Err(Error::InvalidArgument(format!(
                "point {x} has dimension {}, expected {}",
                x.dim(),
                self.group.dim
            )));
        }
        let d = self.levels.last().map_or(1, |l| l.denominator);
        x.numerators(d).ok_or_else(|| {
            Error::InvalidArgument(format!("{x} is not in (1/{d})Z^{}", self.group.dim))
        })
    }

    // value at level `i` of the point k / a_i
    fn level_value(&mut self, i: usize, k: &[i64]) -> Result<S> {
        if i == 0 {
            return self.base.value(k);
        }
        if let Some(v) = self.levels[i - 1].values.get(k) {
            return Ok(v.clone());
        }
        let zero = vec![0i64; k.len()];
        let (v, _) = self.level_rho(i, k, &zero)?;
        self.levels[i - 1].values.insert(k.to_vec(), v.clone());
        Ok(v)
    }

    fn level_rho(
        &mut self,
        i: usize,
        kx: &[i64],
        ky: &[i64],
    ) -> Result<(S, Option<LatticeCertificate>)> {
        if i == 0 {
            let diff: Vec<i64> = kx.iter().zip(ky).map(|(a, b)| a - b).collect();
            return Ok((self.base.value(&diff)?, None));
        }
        let p = self.levels[i - 1].prime as i64;
        let prev_den = self.levels[i - 1].denominator / self.levels[i - 1].prime;
        let n = kx.len();
        let cap = self.cap as i64;
        let bx: Vec<i64> = kx.iter().map(|k| k.mod_floor(&p)).collect();
        let by: Vec<i64> = ky.iter().map(|k| k.mod_floor(&p)).collect();
        let mut best: Option<(S, Vec<i64>)> = None;
        for j in offsets(n, cap) {
            let delta: Vec<i64> = (0..n).map(|a| bx[a] - by[a] + j[a] * p).collect();
            // u - v = (x - y - Σ δ_α e_α / a_i), as numerators over a_{i-1}
            let uv: Vec<i64> = (0..n).map(|a| (kx[a] - ky[a] - delta[a]) / p).collect();
            let value = self.level_value(i - 1, &uv)? + self.level_matching(i, &delta);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, j));
            }
        }
        let (value, j) = best.expect("offset grid is nonempty");
        let counts_x: Vec<u64> = (0..n).map(|a| (bx[a] + j[a].max(0) * p) as u64).collect();
        let counts_y: Vec<u64> = (0..n)
            .map(|a| (by[a] + (-j[a]).max(0) * p) as u64)
            .collect();
        let shift = |k: &[i64], counts: &[u64]| -> LatticePoint {
            let u: Vec<i64> = (0..n).map(|a| (k[a] - counts[a] as i64) / p).collect();
            LatticePoint::from_numerators(&u, prev_den)
        };
        let cert = LatticeCertificate {
            u: shift(kx, &counts_x),
            v: shift(ky, &counts_y),
            counts_x,
            counts_y,
        };
        Ok((value, Some(cert)))
    }

    fn level_matching(&mut self, i: usize, delta: &[i64]) -> S {
        let level = &mut self.levels[i - 1];
        if let Some(c) = level.matching.get(delta) {
            return c.clone();
        }
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (a, &d) in delta.iter().enumerate() {
            let side = if d > 0 { &mut plus } else { &mut minus };
            side.extend(std::iter::repeat_n(a, d.unsigned_abs() as usize));
        }
        let costs = &level.costs;
        let c = min_matching_cost(&plus, &minus, delta.len(), |a, b| costs[a][b].clone()).cost;
        level.matching.insert(delta.to_vec(), c.clone());
        c
    }
}

fn offsets(len: usize, cap: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-cap..=cap).map(move |j| {
                    let mut w = v.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug)]
pub struct LatticeExtension<S> {
    pub group: LatticeGroup,
    pub window: i64,
    /// `(point, value, certificate)` in lexicographic point order.
    pub values: Vec<(LatticePoint, S, Option<LatticeCertificate>)>,
}

impl<S: Scalar> LatticeExtension<S> {
    pub fn value(&self, x: &LatticePoint) -> Option<&S> {
        self.values
            .binary_search_by(|(p, _, _)| p.cmp(x))
            .ok()
            .map(|i| &self.values[i].1)
    }
}

/// Extended values on every window point of `(1/m)Z^n`.
pub fn lattice_extend<S: Scalar>(
    dim: usize,
    denominator: u64,
    base: LatticeBase<S>,
    window: i64,
    cap: Option<u32>,
) -> Result<LatticeExtension<S>> {
    if window < 0 {
        return Err(Error::InvalidArgument("window must be nonnegative".into()));
    }
    let group = LatticeGroup::new(dim, denominator)?;
    let mut norm = LatticeNorm::new(group, base, cap.unwrap_or(DEFAULT_CAP))?;
    let zero = LatticePoint::integer(&vec![0; dim]);
    let mut values = Vec::new();
    for x in group.window_points(window) {
        let (v, cert) = norm.rho(&x, &zero)?;
        values.push((x, v, cert));
    }
    values.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(LatticeExtension {
        group,
        window,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Rational64;

    fn pt(num: i64, den: i64) -> LatticePoint {
        LatticePoint(vec![Q::new(num, den)])
    }

    #[test]
    fn half_has_norm_one_and_integers_keep_abs() {
        let ext = lattice_extend::<Q>(1, 2, LatticeBase::AbsSum, 8, None).unwrap();
        assert_eq!(ext.value(&pt(1, 2)), Some(&Q::from_integer(1)));
        assert_eq!(ext.value(&pt(1, 1)), Some(&Q::from_integer(1)));
        for k in -8..=8 {
            assert_eq!(ext.value(&pt(k, 1)), Some(&Q::from_integer(k.abs())));
        }
        assert_eq!(ext.values.len(), 33);
    }

    #[test]
    fn invariance_spot_check() {
        let g = LatticeGroup::new(1, 2).unwrap();
        let mut norm = LatticeNorm::<Q>::new(g, LatticeBase::AbsSum, 1).unwrap();
        let one = pt(1, 1);
        for x in g.window_points(3) {
            let a = norm.rho(&x, &pt(0, 1)).unwrap().0;
            let b = norm.rho(&x.add(&one), &one).unwrap().0;
            assert_eq!(a, b, "x = {x}");
        }
    }

    #[test]
    fn composite_denominator_uses_two_levels() {
        let g = LatticeGroup::new(1, 6).unwrap();
        let norm = LatticeNorm::<Q>::new(g, LatticeBase::AbsSum, 1).unwrap();
        assert_eq!(norm.levels(), 2);
        let ext = lattice_extend::<Q>(1, 6, LatticeBase::AbsSum, 2, None).unwrap();
        for k in -2..=2 {
            assert_eq!(ext.value(&pt(k, 1)), Some(&Q::from_integer(k.abs())));
        }
    }

    #[test]
    fn table_base_reports_required_window() {
        let mut t = HashMap::new();
        for k in -1i64..=1 {
            t.insert(vec![k], Q::from_integer(k.abs()));
        }
        let err = lattice_extend::<Q>(1, 2, LatticeBase::Table(t), 4, None).unwrap_err();
        assert!(matches!(err, Error::WindowTooSmall { required } if required >= 2));
    }

    #[test]
    fn membership_and_window() {
        let g = LatticeGroup::new(2, 3).unwrap();
        assert!(g.contains(&LatticePoint(vec![Q::new(1, 3), Q::new(2, 1)])));
        assert!(!g.contains(&LatticePoint(vec![Q::new(1, 2), Q::new(0, 1)])));
        assert_eq!(g.window_points(1).len(), 49);
        assert_eq!(
            g.scale_to_integers(&LatticePoint(vec![Q::new(2, 3), Q::new(-1, 1)])),
            Some(vec![2, -3])
        );
    }
}
