//! Winding norms on `R` and the summed norm on finitely supported sequences.
//!
//! `|x|_k` is the Euclidean distance from the origin's image to the image of
//! `x` under `t ↦ (cos πt, sin πt, 2^{-(k+1)} t)`. The winding makes `2` land
//! next to `0`, so `|2 e_k| = 2^{-k} → 0` while `|e_k| > 2` for every `k`:
//! halving is not continuous on the direct sum.

use std::collections::BTreeMap;

use num_traits::{Float, FloatConst};
use rand::Rng;

/// The `k`-th summand norm, `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindingNorm<F> {
    pub k: u32,
    _scalar: std::marker::PhantomData<F>,
}

impl<F: Float + FloatConst> WindingNorm<F> {
    pub fn new(k: u32) -> Self {
        assert!(k >= 1, "winding index starts at 1");
        Self {
            k,
            _scalar: std::marker::PhantomData,
        }
    }

    fn pitch(&self) -> F {
        F::from(2.0).unwrap().powi(-(self.k as i32 + 1))
    }

    pub fn value(&self, x: F) -> F {
        winding_norm(self.k, x)
    }

    pub fn embed(&self, t: F) -> [F; 3] {
        let a = F::PI() * t;
        [a.cos(), a.sin(), self.pitch() * t]
    }
}

/// `sqrt((cos πx - 1)^2 + sin^2(πx) + (2^{-(k+1)} x)^2)`.
pub fn winding_norm<F: Float + FloatConst>(k: u32, x: F) -> F {
    let a = F::PI() * x;
    let pitch = F::from(2.0).unwrap().powi(-(k as i32 + 1));
    let c = a.cos() - F::one();
    let s = a.sin();
    let z = pitch * x;
    (c * c + s * s + z * z).sqrt()
}

/// Euclidean distance between the winding images of `t` and `s`.
pub fn pair_distance<F: Float + FloatConst>(k: u32, t: F, s: F) -> F {
    let w = WindingNorm::<F>::new(k);
    let (p, q) = (w.embed(t), w.embed(s));
    p.iter()
        .zip(&q)
        .fold(F::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b))
        .sqrt()
}

/// Finitely supported `(x_k)_{k >= 1}` in the direct sum of copies of `R`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FinSupportVector<F> {
    pub entries: BTreeMap<u32, F>,
}

impl<F: Float + FloatConst> FinSupportVector<F> {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// `c · e_k`.
    pub fn unit(k: u32, c: F) -> Self {
        let mut v = Self::new();
        v.entries.insert(k, c);
        v
    }

    pub fn with(mut self, k: u32, c: F) -> Self {
        let e = self.entries.entry(k).or_insert_with(F::zero);
        *e = *e + c;
        self
    }
}

/// `Σ_k |x_k|_k`.
pub fn sum_norm<F: Float + FloatConst>(v: &FinSupportVector<F>) -> F {
    v.entries
        .iter()
        .fold(F::zero(), |acc, (&k, &x)| acc + winding_norm(k, x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscontinuityRow<F> {
    pub k: u32,
    pub norm_e: F,
    pub norm_2e: F,
    /// `|e_k| / |2 e_k|`.
    pub ratio: F,
}

pub fn discontinuity_report<F: Float + FloatConst>(kmax: u32) -> Vec<DiscontinuityRow<F>> {
    let two = F::from(2.0).unwrap();
    (1..=kmax)
        .map(|k| {
            let norm_e = sum_norm(&FinSupportVector::unit(k, F::one()));
            let norm_2e = sum_norm(&FinSupportVector::unit(k, two));
            DiscontinuityRow {
                k,
                norm_e,
                norm_2e,
                ratio: norm_e / norm_2e,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleSample<F> {
    pub k: u32,
    pub samples: usize,
    /// Largest `|t - s|_k - |t|_k - |s|_k` seen (negative when never violated).
    pub max_excess: F,
    /// Largest `|pair_distance(t, s) - |t - s|_k|`.
    pub max_identity_error: F,
}

/// Samples `t, s` uniformly from `[-range, range]`.
pub fn sample_triangle<F: Float + FloatConst, R: Rng>(
    k: u32,
    samples: usize,
    range: f64,
    rng: &mut R,
) -> TriangleSample<F> {
    let mut max_excess = F::neg_infinity();
    let mut max_identity_error = F::zero();
    for _ in 0..samples {
        let t = F::from(rng.gen_range(-range..=range)).unwrap();
        let s = F::from(rng.gen_range(-range..=range)).unwrap();
        let lhs = winding_norm(k, t - s);
        let excess = lhs - winding_norm(k, t) - winding_norm(k, s);
        max_excess = max_excess.max(excess);
        max_identity_error = max_identity_error.max((pair_distance(k, t, s) - lhs).abs());
    }
    TriangleSample {
        k,
        samples,
        max_excess,
        max_identity_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_norm_values() {
        assert_eq!(winding_norm(3, 0.0f64), 0.0);
        let e1 = winding_norm(1, 1.0f64);
        assert!((e1 - (4.0f64 + 1.0 / 16.0).sqrt()).abs() < 1e-12);
        assert!((e1 - 2.015_564_437_074_637).abs() < 1e-12);
        for k in 1..=20 {
            assert!((winding_norm(k, 2.0f64) - 2f64.powi(-(k as i32))).abs() < 1e-12);
        }
    }

    #[test]
    fn works_for_f32() {
        let v = winding_norm(1, 2.0f32);
        assert!((v - 0.5).abs() < 1e-5);
    }

    #[test]
    fn sum_norm_examples() {
        assert_eq!(sum_norm(&FinSupportVector::<f64>::new()), 0.0);
        assert!((sum_norm(&FinSupportVector::unit(4, 2.0f64)) - 1.0 / 16.0).abs() < 1e-12);
        let v = FinSupportVector::unit(1, 1.0f64).with(2, 2.0);
        assert!((sum_norm(&v) - (winding_norm(1, 1.0) + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn pair_distance_matches_norm_of_difference() {
        assert_eq!(pair_distance(2, 0.7f64, 0.7), 0.0);
        assert!((pair_distance(1, 1.0f64, 0.0) - winding_norm(1, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn report_rows() {
        let rows = discontinuity_report::<f64>(10);
        assert!((rows[0].norm_e - 2.015_564_437_074_637).abs() < 1e-12);
        assert!((rows[0].norm_2e - 0.5).abs() < 1e-12);
        assert!((rows[9].norm_2e - 0.000_976_562_5).abs() < 1e-12);
        assert!(rows.windows(2).all(|w| w[1].norm_2e < w[0].norm_2e));
        assert!(rows.iter().all(|r| r.norm_e > 2.0));
    }
}
