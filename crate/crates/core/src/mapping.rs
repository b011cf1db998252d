//! Named point bijections between two spaces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::SemimetricSpace;

/// A map from point names of one space to point names of another. Serializes
/// as a JSON object with keys in name order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointMap(BTreeMap<String, String>);

impl PointMap {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        PointMap(pairs.into_iter().collect())
    }

    /// `perm[i]` is the index in `y` of the image of point `i` of `x`.
    pub fn from_indices(x: &SemimetricSpace, y: &SemimetricSpace, perm: &[usize]) -> Self {
        PointMap(
            perm.iter()
                .enumerate()
                .map(|(i, &j)| (x.point(i).to_string(), y.point(j).to_string()))
                .collect(),
        )
    }

    pub fn identity(x: &SemimetricSpace) -> Self {
        PointMap(x.points().iter().map(|p| (p.clone(), p.clone())).collect())
    }

    pub fn get(&self, point: &str) -> Option<&str> {
        self.0.get(point).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> PointMap {
        PointMap(self.0.iter().map(|(a, b)| (b.clone(), a.clone())).collect())
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &PointMap) -> Result<PointMap> {
        self.0
            .iter()
            .map(|(a, b)| {
                let c = other.get(b).ok_or_else(|| Error::UnknownPoint(b.clone()))?;
                Ok((a.clone(), c.to_string()))
            })
            .collect::<Result<_>>()
            .map(PointMap)
    }

    /// Index form of the map, checking that it is a bijection `x -> y`.
    pub fn to_indices(&self, x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Vec<usize>> {
        if self.0.len() != x.len() || x.len() != y.len() {
            return Err(Error::NotABijection(format!(
                "map has {} pairs between spaces of {} and {} points",
                self.0.len(),
                x.len(),
                y.len()
            )));
        }
        let mut perm = vec![usize::MAX; x.len()];
        let mut hit = vec![false; y.len()];
        for (a, b) in &self.0 {
            let i = x
                .index_of(a)
                .ok_or_else(|| Error::NotABijection(format!("{a:?} is not a point of the domain")))?;
            let j = y
                .index_of(b)
                .ok_or_else(|| Error::NotABijection(format!("{b:?} is not a point of the codomain")))?;
            if std::mem::replace(&mut hit[j], true) {
                return Err(Error::NotABijection(format!("{b:?} is hit twice")));
            }
            perm[i] = j;
        }
        Ok(perm)
    }
}
