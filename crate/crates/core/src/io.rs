//! JSON file formats. Rationals cross the boundary as strings (`"3/2"`),
//! elements as integer arrays, and norm tables are keyed by the compact JSON
//! form of the element (`"[1,0]"`).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup, Homomorphism, Subgroup};
use crate::lattice::LatticeBase;
use crate::pseudonorm::Pseudonorm;
use crate::scalar::{parse_scalar, Scalar};
use crate::transversal::{BirkhoffDecomposition, DoublyStochasticMatrix};

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn element_in(group: &FiniteAbelianGroup, coords: &[i64]) -> Result<Element> {
    let out_of_range = || Error::ElementOutOfRange {
        element: coords.to_vec(),
        context: format!("Z{:?}", group.orders()),
    };
    if coords.len() != group.rank() || coords.iter().any(|&c| c < 0) {
        return Err(out_of_range());
    }
    let x = Element(coords.iter().map(|&c| c as u64).collect());
    if !group.contains(&x) {
        return Err(out_of_range());
    }
    Ok(x)
}

fn parse_key(key: &str) -> Result<Vec<i64>> {
    serde_json::from_str(key).map_err(|_| Error::Parse(format!("bad element key {key:?}")))
}

/// Either one generator list or several; `--subgroup-index` picks from the
/// second form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubgroupGenerators {
    One(Vec<Vec<i64>>),
    Many(Vec<Vec<Vec<i64>>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFile {
    pub orders: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_generators: Option<SubgroupGenerators>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn of(group: &FiniteAbelianGroup) -> Self {
        Self {
            orders: group.orders().iter().map(|&n| n as i64).collect(),
            subgroup_generators: None,
        }
    }

    pub fn group(&self) -> Result<FiniteAbelianGroup> {
        FiniteAbelianGroup::from_signed(&self.orders)
    }

    pub fn subgroup_count(&self) -> usize {
        match &self.subgroup_generators {
            None => 0,
            Some(SubgroupGenerators::One(_)) => 1,
            Some(SubgroupGenerators::Many(lists)) => lists.len(),
        }
    }

    /// Subgroup generated by the selected list; the trivial subgroup when
    /// the file lists none.
    pub fn subgroup(&self, index: usize) -> Result<Subgroup> {
        let group = self.group()?;
        let gens = match &self.subgroup_generators {
            None if index == 0 => return Ok(Subgroup::trivial(&group)),
            Some(SubgroupGenerators::One(g)) if index == 0 => g,
            Some(SubgroupGenerators::Many(lists)) if index < lists.len() => &lists[index],
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "subgroup index {index} out of range ({} listed)",
                    self.subgroup_count()
                )))
            }
        };
        let elems = gens
            .iter()
            .map(|g| element_in(&group, g))
            .collect::<Result<Vec<_>>>()?;
        Subgroup::closure(&group, &elems)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismFile {
    pub source: GroupFile,
    pub target: GroupFile,
    pub images: Vec<Vec<i64>>,
}

impl HomomorphismFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn homomorphism(&self) -> Result<Homomorphism> {
        let source = self.source.group()?;
        let target = self.target.group()?;
        let images = self
            .images
            .iter()
            .map(|c| element_in(&target, c))
            .collect::<Result<Vec<_>>>()?;
        Homomorphism::new(source, target, images)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormFile {
    pub group: GroupFile,
    pub values: BTreeMap<String, String>,
}

impl NormFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    /// Keys are written in element id order so the output is deterministic.
    pub fn of<S: Scalar>(norm: &Pseudonorm<S>) -> Self {
        let group = GroupFile::of(norm.group());
        let values = norm
            .entries()
            .map(|(x, v)| (x.to_string(), v.to_string()))
            .collect();
        Self { group, values }
    }

    /// JSON text with keys in element order rather than string order.
    pub fn render<S: Scalar>(norm: &Pseudonorm<S>) -> String {
        let mut out = String::from("{\n  \"group\": ");
        let group = serde_json::to_string(&GroupFile::of(norm.group())).expect("serializes");
        out.push_str(&group);
        out.push_str(",\n  \"values\": {");
        let entries: Vec<String> = norm
            .entries()
            .map(|(x, v)| {
                format!(
                    "\n    {}: {}",
                    serde_json::to_string(&x.to_string()).expect("string"),
                    serde_json::to_string(&v.to_string()).expect("string")
                )
            })
            .collect();
        out.push_str(&entries.join(","));
        out.push_str("\n  }\n}\n");
        out
    }

    /// The carrier is the subgroup generated by the keys, which must cover
    /// it exactly.
    pub fn pseudonorm<S: Scalar>(&self) -> Result<Pseudonorm<S>> {
        let group = self.group.group()?;
        let mut map = BTreeMap::new();
        for (k, v) in &self.values {
            let x = element_in(&group, &parse_key(k)?)?;
            let value: S = parse_scalar(v)?;
            if map.insert(x.clone(), value).is_some() {
                return Err(Error::Parse(format!("duplicate key for element {x}")));
            }
        }
        let norm = Pseudonorm::from_map(&group, &map)?;
        if norm.carrier().len() != map.len() {
            return Err(Error::Parse(format!(
                "keys do not form a subgroup: {} keys, generated subgroup has {} elements",
                map.len(),
                norm.carrier().len()
            )));
        }
        Ok(norm)
    }
}

/// An integer or string label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollectionsFile {
    /// Absent for the `p`-fractional variant, where sets only need sizes
    /// divisible by `p`.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Label>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Label>>,
}

impl CollectionsFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    fn sets(lists: &[Vec<Label>]) -> Result<Vec<BTreeSet<Label>>> {
        lists
            .iter()
            .map(|l| {
                let s: BTreeSet<Label> = l.iter().cloned().collect();
                if s.len() != l.len() {
                    return Err(Error::Parse("repeated label inside a set".into()));
                }
                Ok(s)
            })
            .collect()
    }

    pub fn a_sets(&self) -> Result<Vec<BTreeSet<Label>>> {
        Self::sets(&self.a)
    }

    pub fn b_sets(&self) -> Result<Vec<BTreeSet<Label>>> {
        Self::sets(&self.b)
    }
}

/// Entries may be integers or rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    pub fn value<S: Scalar>(&self) -> Result<S> {
        match self {
            RationalText::Int(n) => {
                S::from_i64(*n).ok_or_else(|| Error::Parse(format!("{n} does not fit")))
            }
            RationalText::Text(s) => parse_scalar(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub matrix: Vec<Vec<RationalText>>,
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn matrix<S: Scalar>(&self) -> Result<DoublyStochasticMatrix<S>> {
        let entries = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|e| e.value()).collect::<Result<Vec<S>>>())
            .collect::<Result<Vec<_>>>()?;
        DoublyStochasticMatrix::new(entries)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffTermOut {
    pub weight: String,
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffOut {
    pub n: usize,
    pub terms: Vec<BirkhoffTermOut>,
    pub weight_sum: String,
    pub recomposes: bool,
}

impl BirkhoffOut {
    pub fn of<S: Scalar>(d: &BirkhoffDecomposition<S>, input: &DoublyStochasticMatrix<S>) -> Self {
        Self {
            n: d.n,
            terms: d
                .terms
                .iter()
                .map(|t| BirkhoffTermOut {
                    weight: t.weight.to_string(),
                    permutation: t.permutation.clone(),
                })
                .collect(),
            weight_sum: d.weight_sum().to_string(),
            recomposes: d.recompose() == input.entries(),
        }
    }
}

/// Explicit base values on integer points, e.g.
/// `{"dim":1, "values":{"[0]":"0","[1]":"1","[-1]":"1"}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeTableFile {
    pub dim: usize,
    pub values: BTreeMap<String, String>,
}

impl LatticeTableFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn base<S: Scalar>(&self) -> Result<LatticeBase<S>> {
        let mut table = HashMap::new();
        for (k, v) in &self.values {
            let point = parse_key(k)?;
            if point.len() != self.dim {
                return Err(Error::Parse(format!("point {k} has wrong dimension")));
            }
            table.insert(point, parse_scalar(v)?);
        }
        Ok(LatticeBase::Table(table))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational64 as Q;

    #[test]
    fn group_file_forms() {
        let g = GroupFile::parse(r#"{"orders":[4],"subgroup_generators":[[2]]}"#).unwrap();
        assert_eq!(g.subgroup(0).unwrap().len(), 2);
        assert!(g.subgroup(1).is_err());
        let g = GroupFile::parse(r#"{"orders":[2,2],"subgroup_generators":[[[1,0]],[[0,1]],[]]}"#)
            .unwrap();
        assert_eq!(g.subgroup_count(), 3);
        assert_eq!(g.subgroup(2).unwrap().len(), 1);
        assert!(g.subgroup(1).unwrap().contains(&Element(vec![0, 1])));
        let g = GroupFile::parse(r#"{"orders":[6]}"#).unwrap();
        assert_eq!(g.subgroup(0).unwrap().len(), 1);
        assert!(
            GroupFile::parse(r#"{"orders":[4],"subgroup_generators":[[5]]}"#)
                .unwrap()
                .subgroup(0)
                .is_err()
        );
    }

    #[test]
    fn norm_round_trip() {
        let text = r#"{"group":{"orders":[4]},"values":{"[0]":"0","[2]":"3/2"}}"#;
        let n: Pseudonorm<Q> = NormFile::parse(text).unwrap().pseudonorm().unwrap();
        assert_eq!(n.value(&Element(vec![2])), Some(&Q::new(3, 2)));
        let again: Pseudonorm<Q> = NormFile::parse(&NormFile::render(&n))
            .unwrap()
            .pseudonorm()
            .unwrap();
        assert_eq!(again, n);
        assert_eq!(
            NormFile::of(&n),
            NormFile::parse(&NormFile::render(&n)).unwrap()
        );
    }

    #[test]
    fn norm_file_errors() {
        let missing = r#"{"group":{"orders":[4]},"values":{"[0]":"0","[1]":"1"}}"#;
        assert!(NormFile::parse(missing).unwrap().pseudonorm::<Q>().is_err());
        let decimal = r#"{"group":{"orders":[2]},"values":{"[0]":"0","[1]":"0.5"}}"#;
        assert!(NormFile::parse(decimal).unwrap().pseudonorm::<Q>().is_err());
        let bad_key = r#"{"group":{"orders":[2]},"values":{"0":"0"}}"#;
        assert!(NormFile::parse(bad_key).unwrap().pseudonorm::<Q>().is_err());
    }

    #[test]
    fn collections_and_matrix() {
        let c = CollectionsFile::parse(r#"{"k":2,"A":[[1,2],[3,4]],"B":[["x",1]]}"#).unwrap();
        assert_eq!(c.k, Some(2));
        assert!(c.b_sets().unwrap()[0].contains(&Label::Text("x".into())));
        let m = MatrixFile::parse(r#"{"matrix":[["1/2","1/2"],["1/2","1/2"]]}"#).unwrap();
        assert_eq!(m.matrix::<Q>().unwrap().n(), 2);
        let m = MatrixFile::parse(r#"{"matrix":[[1,0],[0,1]]}"#).unwrap();
        assert!(m.matrix::<Q>().is_ok());
    }

    #[test]
    fn homomorphism_file() {
        let h = HomomorphismFile::parse(
            r#"{"source":{"orders":[4]},"target":{"orders":[2]},"images":[[1]]}"#,
        )
        .unwrap();
        assert!(h.homomorphism().is_ok());
        let bad = HomomorphismFile::parse(
            r#"{"source":{"orders":[3]},"target":{"orders":[2]},"images":[[1]]}"#,
        )
        .unwrap();
        assert!(bad.homomorphism().is_err());
    }
}
