//! Pseudonorms as exact value tables on a subgroup.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup, Homomorphism, Subgroup};
use crate::scalar::Scalar;

/// A total table `carrier -> S`. Construction only checks totality and
/// nonnegativity; the triangle inequality is checked by [`Pseudonorm::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pseudonorm<S> {
    carrier: Subgroup,
    // indexed by position in `carrier.ids()`
    values: Vec<S>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub nonzero_identity: bool,
    pub negative: Vec<Element>,
    /// Pairs `(x, y)` with `|x - y| > |x| + |y|`.
    pub triangle_violations: Vec<(Element, Element)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        !self.nonzero_identity && self.negative.is_empty() && self.triangle_violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.is_ok() {
            return "ok".into();
        }
        let mut parts = Vec::new();
        if self.nonzero_identity {
            parts.push("|0| != 0".to_string());
        }
        if let Some(x) = self.negative.first() {
            parts.push(format!(
                "{} negative values (first {x})",
                self.negative.len()
            ));
        }
        if let Some((x, y)) = self.triangle_violations.first() {
            parts.push(format!(
                "{} triangle violations (first x={x}, y={y})",
                self.triangle_violations.len()
            ));
        }
        parts.join("; ")
    }
}

impl<S: Scalar> Pseudonorm<S> {
    /// Values listed in the carrier's sorted element order.
    pub fn new(carrier: Subgroup, values: Vec<S>) -> Result<Self> {
        if values.len() != carrier.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                carrier.len(),
                values.len()
            )));
        }
        Ok(Self { carrier, values })
    }

    /// The carrier is the subgroup generated by the keys; every element of it needs a value.
    pub fn from_map(group: &FiniteAbelianGroup, map: &BTreeMap<Element, S>) -> Result<Self> {
        let keys: Vec<Element> = map.keys().cloned().collect();
        let carrier = Subgroup::closure(group, &keys)?;
        let mut values = Vec::with_capacity(carrier.len());
        for e in carrier.elements() {
            match map.get(&e) {
                Some(v) => values.push(v.clone()),
                None => return Err(Error::MissingValue(to_signed(&e))),
            }
        }
        Ok(Self { carrier, values })
    }

    pub fn from_fn(carrier: Subgroup, mut f: impl FnMut(&Element) -> S) -> Self {
        let values = carrier.elements().iter().map(&mut f).collect();
        Self { carrier, values }
    }

    pub fn zero(carrier: Subgroup) -> Self {
        let values = vec![S::zero(); carrier.len()];
        Self { carrier, values }
    }

    pub fn carrier(&self) -> &Subgroup {
        &self.carrier
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.carrier.parent()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, x: &Element) -> Option<&S> {
        if !self.group().contains(x) {
            return None;
        }
        self.value_id(self.group().index(x))
    }

    pub fn value_id(&self, id: usize) -> Option<&S> {
        self.carrier.position_of_id(id).map(|p| &self.values[p])
    }

    /// `(element, value)` in lexicographic element order.
    pub fn entries(&self) -> impl Iterator<Item = (Element, &S)> + '_ {
        self.carrier
            .ids()
            .iter()
            .zip(&self.values)
            .map(|(&id, v)| (self.group().element(id), v))
    }

    pub fn validate(&self) -> ValidationReport {
        let g = self.group();
        let mut report = ValidationReport {
            nonzero_identity: !self.values[0].is_zero(),
            ..Default::default()
        };
        for (&id, v) in self.carrier.ids().iter().zip(&self.values) {
            if v.is_negative() {
                report.negative.push(g.element(id));
            }
        }
        let ids = self.carrier.ids();
        for (i, &x) in ids.iter().enumerate() {
            for (j, &y) in ids.iter().enumerate() {
                let d = self
                    .carrier
                    .position_of_id(g.sub_ids(x, y))
                    .expect("closed carrier");
                if self.values[d] > self.values[i].clone() + self.values[j].clone() {
                    report
                        .triangle_violations
                        .push((g.element(x), g.element(y)));
                }
            }
        }
        report
    }

    pub fn is_norm(&self) -> bool {
        self.values.iter().skip(1).all(|v| v.is_positive())
    }

    /// `d(x, y) = |x - y|`.
    pub fn induced_metric(&self, x: &Element, y: &Element) -> Result<S> {
        for e in [x, y] {
            if !self.carrier.contains(e) {
                return Err(Error::ElementOutOfRange {
                    element: to_signed(e),
                    context: "pseudonorm carrier".into(),
                });
            }
        }
        let d = self.group().sub(x, y);
        Ok(self.value(&d).expect("closed carrier").clone())
    }

    pub fn restrict(&self, sub: &Subgroup) -> Result<Self> {
        if !sub.is_subset_of(&self.carrier) {
            return Err(Error::NotASubgroup(
                "restriction target outside carrier".into(),
            ));
        }
        let values = sub
            .ids()
            .iter()
            .map(|&id| self.value_id(id).expect("subset").clone())
            .collect();
        Ok(Self {
            carrier: sub.clone(),
            values,
        })
    }

    /// True when `self` and `other` agree on every element of `sub`.
    pub fn agrees_on(&self, other: &Self, sub: &Subgroup) -> bool {
        sub.ids()
            .iter()
            .all(|&id| match (self.value_id(id), other.value_id(id)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            })
    }
}

/// `|x|_G = |h(x)|_E` on the whole source group.
pub fn pullback_norm<S: Scalar>(h: &Homomorphism, norm: &Pseudonorm<S>) -> Result<Pseudonorm<S>> {
    if norm.group() != h.target() {
        return Err(Error::InvalidArgument(
            "pseudonorm lives on a different group than the homomorphism target".into(),
        ));
    }
    let source = h.source();
    let mut values = Vec::with_capacity(source.order());
    for id in 0..source.order() {
        let image = h.apply_id(id);
        match norm.value_id(image) {
            Some(v) => values.push(v.clone()),
            None => {
                return Err(Error::ElementOutOfRange {
                    element: to_signed(&h.target().element(image)),
                    context: "pseudonorm carrier".into(),
                })
            }
        }
    }
    Pseudonorm::new(Subgroup::whole(source), values)
}

fn to_signed(e: &Element) -> Vec<i64> {
    e.0.iter().map(|&c| c as i64).collect()
}
