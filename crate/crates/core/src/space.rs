//! Finite semimetric spaces with exact distances.
//!
//! A [`SemimetricSpace`] is validated once at construction (symmetry, zero
//! diagonal, positive off-diagonal entries) and is immutable afterwards. The
//! triangle inequality is deliberately not required; ultrametricity is a
//! separate query.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// The set of all distance values of a space, strictly increasing, starting
/// at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spectrum(Vec<Rational>);

impl Spectrum {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.first().is_none_or(|v| !v.is_zero()) {
            return Err(Error::TargetNotStartingAtZero);
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::SpectrumNotIncreasing);
        }
        Ok(Spectrum(values))
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of `value` in the spectrum, if present.
    pub fn rank_of(&self, value: &Rational) -> Option<usize> {
        self.0.binary_search(value).ok()
    }

    pub fn max(&self) -> &Rational {
        self.0.last().expect("spectrum always contains 0")
    }
}

/// A strong-triangle violation: `d(x,y) > max(d(x,z), d(z,y))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

/// A finite semimetric space on named points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemimetricSpace {
    points: Vec<String>,
    dist: Vec<Rational>,
    spectrum: Spectrum,
    // dist[i][j] as an index into `spectrum`
    ranks: Vec<u32>,
}

/// Validates `points` and `matrix` and builds a space. Same as
/// [`SemimetricSpace::new`].
pub fn validate_semimetric(points: Vec<String>, matrix: Vec<Vec<Rational>>) -> Result<SemimetricSpace> {
    SemimetricSpace::new(points, matrix)
}

impl SemimetricSpace {
    pub fn new(points: Vec<String>, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if matrix.len() != n {
            return Err(Error::MalformedMatrix(format!(
                "{} rows for {} points",
                matrix.len(),
                n
            )));
        }
        if let Some((i, row)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::MalformedMatrix(format!(
                "row {} has {} entries, expected {}",
                i,
                row.len(),
                n
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(Error::DuplicatePointName(p.clone()));
            }
        }
        for (i, row) in matrix.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(Error::NonZeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::NonSymmetric(i, j));
                }
                if matrix[i][j].is_negative() {
                    return Err(Error::NegativeDistance(i, j));
                }
                if matrix[i][j].is_zero() {
                    return Err(Error::ZeroOffDiagonal(i, j));
                }
            }
        }
        let dist: Vec<Rational> = matrix.into_iter().flatten().collect();
        Ok(Self::from_validated(points, dist))
    }

    /// Builds a space from a distance function on indices.
    pub fn from_fn(points: Vec<String>, f: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        let n = points.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(points, matrix)
    }

    fn from_validated(points: Vec<String>, dist: Vec<Rational>) -> Self {
        let mut values = dist.clone();
        values.sort();
        values.dedup();
        let spectrum = Spectrum(values);
        let ranks = dist
            .iter()
            .map(|d| spectrum.rank_of(d).expect("value is in spectrum") as u32)
            .collect();
        SemimetricSpace {
            points,
            dist,
            spectrum,
            ranks,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: spaces have at least one point.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i * self.len() + j]
    }

    pub fn dist_by_name(&self, x: &str, y: &str) -> Result<&Rational> {
        let i = self.index_of(x).ok_or_else(|| Error::UnknownPoint(x.to_string()))?;
        let j = self.index_of(y).ok_or_else(|| Error::UnknownPoint(y.to_string()))?;
        Ok(self.dist(i, j))
    }

    /// Rank of `d(i,j)` within the spectrum (0 for the diagonal).
    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.ranks[i * self.len() + j] as usize
    }

    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        self.dist.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn diameter(&self) -> &Rational {
        self.spectrum.max()
    }

    /// The first triple (in index order) violating the strong triangle
    /// inequality, or `None` if the space is ultrametric.
    pub fn ultrametric_violation(&self) -> Option<Violation> {
        let n = self.len();
        for x in 0..n {
            for y in (x + 1)..n {
                let dxy = self.rank(x, y);
                for z in 0..n {
                    if z != x && z != y && dxy > self.rank(x, z).max(self.rank(z, y)) {
                        return Some(Violation { x, y, z });
                    }
                }
            }
        }
        None
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric_violation().is_none()
    }

    pub(crate) fn require_ultrametric(&self) -> Result<()> {
        match self.ultrametric_violation() {
            None => Ok(()),
            Some(v) => Err(Error::NotUltrametric {
                x: self.points[v.x].clone(),
                y: self.points[v.y].clone(),
                z: self.points[v.z].clone(),
            }),
        }
    }

    /// Replaces every distance by its counterpart of equal rank in `target`,
    /// i.e. composes `d` with the unique strictly increasing bijection
    /// `Sp(X) -> target`.
    pub fn rank_relabel(&self, target: &Spectrum) -> Result<Self> {
        if target.values().first().is_none_or(|v| !v.is_zero()) {
            return Err(Error::TargetNotStartingAtZero);
        }
        if target.len() != self.spectrum.len() {
            return Err(Error::SpectrumSizeMismatch {
                source_len: self.spectrum.len(),
                target_len: target.len(),
            });
        }
        if target.values().windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::SpectrumNotIncreasing);
        }
        let dist = self
            .ranks
            .iter()
            .map(|&r| target.values()[r as usize].clone())
            .collect();
        Ok(SemimetricSpace {
            points: self.points.clone(),
            dist,
            spectrum: target.clone(),
            ranks: self.ranks.clone(),
        })
    }

    /// The subspace on `indices`, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let dist = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| self.dist(i, j).clone()))
            .collect();
        Self::from_validated(points, dist)
    }

    /// Same distances, new point names (positionally).
    pub fn with_points(&self, names: Vec<String>) -> Result<Self> {
        Self::new(names, self.matrix())
    }

    /// The same space with its points listed in `order`.
    pub fn reordered(&self, order: &[String]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::NotABijection(format!(
                "ordering lists {} points, space has {}",
                order.len(),
                self.len()
            )));
        }
        let indices = order
            .iter()
            .map(|name| self.index_of(name).ok_or_else(|| Error::UnknownPoint(name.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = vec![false; self.len()];
        for &i in &indices {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicatePointName(self.points[i].clone()));
            }
        }
        Ok(self.subspace(&indices))
    }

    /// Parses a JSON space document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpaceDoc = serde_json::from_str(text)?;
        doc.into_space()
    }

    /// Renders the JSON space document:
    /// `{"points": [...], "dist": [[...],...]}` with a trailing newline.
    pub fn to_json(&self) -> String {
        let points = serde_json::to_string(&self.points).expect("strings serialize");
        let mut out = String::new();
        write!(out, "{{\"points\": {points}, \"dist\": [").unwrap();
        for (i, row) in self.dist.chunks(self.len()).enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            for (j, d) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "\"{d}\"").unwrap();
            }
            out.push(']');
        }
        out.push_str("]}\n");
        out
    }
}

/// Wire form of a space: distances are strings `"a"` or `"a/b"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
}

impl SpaceDoc {
    pub fn into_space(self) -> Result<SemimetricSpace> {
        let matrix = self
            .dist
            .iter()
            .map(|row| row.iter().map(|s| s.parse()).collect::<Result<Vec<Rational>>>())
            .collect::<Result<Vec<_>>>()?;
        SemimetricSpace::new(self.points, matrix)
    }
}
