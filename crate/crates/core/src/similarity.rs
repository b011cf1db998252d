//! Isometry and weak similarity of finite semimetric spaces.
//!
//! A weak similarity needs a strictly increasing bijection `f: Sp(X) ->
//! Sp(Y)`. Both spectra are finite chains, so such an `f` exists iff they
//! have the same size, and then it is the rank map. Deciding `X ≀ Y`
//! therefore reduces to a single isometry test between `(X, f∘d)` and `Y`;
//! nothing is searched on the scaling side.

use serde::{Deserialize, Serialize};

use crate::canon::{canon_code_labeled, rooted_tree_iso_map};
use crate::error::{Error, Result};
use crate::mapping::PointMap;
use crate::rational::Rational;
use crate::space::SemimetricSpace;
use crate::tree::{build_tree, RepTree};

/// The graph of a scaling function, as `(value, image)` pairs in increasing
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scaling(Vec<(Rational, Rational)>);

impl Scaling {
    pub fn new(pairs: Vec<(Rational, Rational)>) -> Self {
        Scaling(pairs)
    }

    pub fn pairs(&self) -> &[(Rational, Rational)] {
        &self.0
    }

    pub fn apply(&self, value: &Rational) -> Option<&Rational> {
        self.0
            .binary_search_by(|(a, _)| a.cmp(value))
            .ok()
            .map(|k| &self.0[k].1)
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &Scaling) -> Option<Scaling> {
        self.0
            .iter()
            .map(|(a, b)| other.apply(b).map(|c| (a.clone(), c.clone())))
            .collect::<Option<Vec<_>>>()
            .map(Scaling)
    }
}

/// A realization `(f, Φ)` of `X ≀ Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakSimWitness {
    pub scaling: Scaling,
    pub phi: PointMap,
}

impl WeakSimWitness {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("witness serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryWitness {
    pub phi: PointMap,
}

impl IsometryWitness {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("witness serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The unique strictly increasing bijection `Sp(X) -> Sp(Y)`, if any.
pub fn forced_scaling(x: &SemimetricSpace, y: &SemimetricSpace) -> Option<Scaling> {
    let (sx, sy) = (x.spectrum().values(), y.spectrum().values());
    (sx.len() == sy.len()).then(|| Scaling(sx.iter().cloned().zip(sy.iter().cloned()).collect()))
}

pub(crate) fn preserves_distances(x: &SemimetricSpace, y: &SemimetricSpace, perm: &[usize]) -> bool {
    let n = x.len();
    (0..n).all(|i| ((i + 1)..n).all(|j| x.dist(i, j) == y.dist(perm[i], perm[j])))
}

/// Checks that `phi` is an isometry `x -> y`.
pub fn verify_isometry(x: &SemimetricSpace, y: &SemimetricSpace, phi: &PointMap) -> Result<bool> {
    let perm = phi.to_indices(x, y)?;
    Ok(preserves_distances(x, y, &perm))
}

/// Checks a weak-similarity witness against its definition: the scaling is a
/// strictly increasing bijection `Sp(X) -> Sp(Y)`, `phi` is a bijection, and
/// `f(d(x,y)) = ρ(φ(x), φ(y))` for every pair.
pub fn verify_weak_similarity(x: &SemimetricSpace, y: &SemimetricSpace, w: &WeakSimWitness) -> Result<bool> {
    let perm = w.phi.to_indices(x, y)?;
    let pairs = w.scaling.pairs();
    let domain_ok = pairs.iter().map(|(a, _)| a).eq(x.spectrum().values().iter());
    let range_ok = pairs.iter().map(|(_, b)| b).eq(y.spectrum().values().iter());
    if !domain_ok || !range_ok {
        return Ok(false);
    }
    let n = x.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if w.scaling.apply(x.dist(i, j)) != Some(y.dist(perm[i], perm[j])) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Backtracking isometry search for spaces with equal spectra.
///
/// Points are assigned rarest distance-multiset first; candidates are limited
/// to points with the same multiset, and each assignment is checked against
/// all earlier ones.
fn search_isometry(x: &SemimetricSpace, y: &SemimetricSpace) -> Option<Vec<usize>> {
    let n = x.len();
    let signature = |s: &SemimetricSpace, i: usize| {
        let mut row: Vec<usize> = (0..n).map(|j| s.rank(i, j)).collect();
        row.sort_unstable();
        row
    };
    let sig_x: Vec<Vec<usize>> = (0..n).map(|i| signature(x, i)).collect();
    let sig_y: Vec<Vec<usize>> = (0..n).map(|i| signature(y, i)).collect();
    {
        let (mut a, mut b) = (sig_x.clone(), sig_y.clone());
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
    }
    let candidates: Vec<Vec<usize>> = sig_x
        .iter()
        .map(|s| (0..n).filter(|&j| &sig_y[j] == s).collect())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (candidates[i].len(), i));

    struct Search<'a> {
        x: &'a SemimetricSpace,
        y: &'a SemimetricSpace,
        order: Vec<usize>,
        candidates: Vec<Vec<usize>>,
        phi: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn extend(&mut self, k: usize) -> bool {
            if k == self.order.len() {
                return true;
            }
            let xi = self.order[k];
            for c in 0..self.candidates[xi].len() {
                let yj = self.candidates[xi][c];
                if self.used[yj] {
                    continue;
                }
                let consistent = self.order[..k]
                    .iter()
                    .all(|&xp| self.x.rank(xi, xp) == self.y.rank(yj, self.phi[xp]));
                if !consistent {
                    continue;
                }
                self.phi[xi] = yj;
                self.used[yj] = true;
                if self.extend(k + 1) {
                    return true;
                }
                self.used[yj] = false;
            }
            false
        }
    }

    let mut search = Search {
        x,
        y,
        order,
        candidates,
        phi: vec![usize::MAX; n],
        used: vec![false; n],
    };
    search.extend(0).then_some(search.phi)
}

fn leaf_perm(x: &SemimetricSpace, y: &SemimetricSpace, pairs: &[(String, String)]) -> Result<Vec<usize>> {
    PointMap::new(pairs.iter().cloned()).to_indices(x, y)
}

fn tree_isometry(x: &SemimetricSpace, y: &SemimetricSpace, tx: &RepTree, ty: &RepTree) -> Result<Option<Vec<usize>>> {
    if canon_code_labeled(tx) != canon_code_labeled(ty) {
        return Ok(None);
    }
    let iso = rooted_tree_iso_map(tx, ty, true)
        .ok_or_else(|| Error::VerificationFailed("equal labeled codes but no tree isomorphism".into()))?;
    leaf_perm(x, y, &iso.leaf_pairs(tx, ty)).map(Some)
}

/// Decides whether `x` and `y` are isometric.
///
/// Ultrametric pairs go through labeled representing-tree canonization; any
/// other pair through backtracking. The witness is re-verified pairwise.
pub fn decide_isometry(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Option<IsometryWitness>> {
    if x.len() != y.len() || x.spectrum() != y.spectrum() {
        return Ok(None);
    }
    let perm = if x.is_ultrametric() && y.is_ultrametric() {
        tree_isometry(x, y, &build_tree(x)?, &build_tree(y)?)?
    } else {
        search_isometry(x, y)
    };
    let Some(perm) = perm else { return Ok(None) };
    if !preserves_distances(x, y, &perm) {
        return Err(Error::VerificationFailed(
            "isometry witness does not preserve distances".into(),
        ));
    }
    Ok(Some(IsometryWitness {
        phi: PointMap::from_indices(x, y, &perm),
    }))
}

/// Decides `X ≀ Y` by composing `d` with the forced scaling and testing
/// isometry.
pub fn decide_weak_similarity(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Option<WeakSimWitness>> {
    let Some(scaling) = forced_scaling(x, y) else {
        return Ok(None);
    };
    if x.len() != y.len() {
        return Ok(None);
    }
    let scaled = x.rank_relabel(y.spectrum())?;
    let Some(iso) = decide_isometry(&scaled, y)? else {
        return Ok(None);
    };
    finish(x, y, scaling, iso.phi).map(Some)
}

fn finish(x: &SemimetricSpace, y: &SemimetricSpace, scaling: Scaling, phi: PointMap) -> Result<WeakSimWitness> {
    let w = WeakSimWitness { scaling, phi };
    if !verify_weak_similarity(x, y, &w)? {
        return Err(Error::VerificationFailed(
            "weak similarity witness fails f(d(x,y)) = ρ(Φx,Φy)".into(),
        ));
    }
    Ok(w)
}

/// Weak similarity of ultrametric spaces entirely through trees: push the
/// labels of `T_X` through the forced scaling and compare with `T_Y` as
/// labeled rooted trees.
pub fn weak_sim_ultrametric_fast(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Option<WeakSimWitness>> {
    x.require_ultrametric()?;
    y.require_ultrametric()?;
    if x.len() != y.len() {
        return Ok(None);
    }
    let Some(scaling) = forced_scaling(x, y) else {
        return Ok(None);
    };
    let tx = build_tree(x)?;
    let ty = build_tree(y)?;
    let scaled = tx.map_labels(|l| scaling.apply(l).expect("tree labels lie in the spectrum").clone());
    let Some(perm) = tree_isometry(x, y, &scaled, &ty)? else {
        return Ok(None);
    };
    finish(x, y, scaling, PointMap::from_indices(x, y, &perm)).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures::*;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn scaling(pairs: &[(i64, i64)]) -> Scaling {
        Scaling(pairs.iter().map(|&(a, b)| (r(a), r(b))).collect())
    }

    fn renamed_x3() -> SemimetricSpace {
        x3().with_points(vec!["u".into(), "v".into(), "w".into()]).unwrap()
    }

    /// d(u,v) = 3, d(v,w) = 1, d(u,w) = 1.
    fn s3_prime() -> SemimetricSpace {
        space(&["u", "v", "w"], &[&[0, 3, 1], &[3, 0, 1], &[1, 1, 0]])
    }

    #[test]
    fn forced_scaling_examples() {
        assert_eq!(forced_scaling(&x3(), &y3()), Some(scaling(&[(0, 0), (1, 10), (2, 20)])));
        assert_eq!(forced_scaling(&x3(), &x4()), None);
        assert_eq!(forced_scaling(&x3(), &x3()), Some(scaling(&[(0, 0), (1, 1), (2, 2)])));
    }

    #[test]
    fn isometry_examples() {
        let w = decide_isometry(&x3(), &renamed_x3()).unwrap().unwrap();
        assert_eq!(w.phi.get("p"), Some("u"));
        assert!(w.phi.get("q").is_some());
        assert!(decide_isometry(&x3(), &y3()).unwrap().is_none());

        let w = decide_isometry(&s3(), &s3_prime()).unwrap().unwrap();
        assert_eq!(w.phi.get("b"), Some("w"));
        assert!(verify_isometry(&s3(), &s3_prime(), &w.phi).unwrap());
    }

    #[test]
    fn weak_similarity_examples() {
        let w = decide_weak_similarity(&x3(), &y3()).unwrap().unwrap();
        assert_eq!(w.scaling, scaling(&[(0, 0), (1, 10), (2, 20)]));
        assert_eq!(w.phi.get("p"), Some("p1"));
        assert_eq!(
            w.to_json(),
            "{\"scaling\":[[\"0\",\"0\"],[\"1\",\"10\"],[\"2\",\"20\"]],\"phi\":{\"p\":\"p1\",\"q\":\"q1\",\"r\":\"r1\"}}\n"
        );
        assert!(decide_weak_similarity(&x3(), &x4()).unwrap().is_none());

        for x in [x3(), x4(), s3(), one_point()] {
            let w = decide_weak_similarity(&x, &x).unwrap().unwrap();
            assert!(verify_weak_similarity(&x, &x, &w).unwrap());
        }
    }

    #[test]
    fn fast_path_examples() {
        let slow = decide_weak_similarity(&x3(), &y3()).unwrap().unwrap();
        let fast = weak_sim_ultrametric_fast(&x3(), &y3()).unwrap().unwrap();
        assert_eq!(slow.scaling, fast.scaling);
        assert!(verify_weak_similarity(&x3(), &y3(), &fast).unwrap());

        let w = weak_sim_ultrametric_fast(&x4(), &x4_swapped()).unwrap().unwrap();
        let a = w.phi.get("a").unwrap();
        let b = w.phi.get("b").unwrap();
        let mut ab = [a, b];
        ab.sort();
        assert_eq!(ab, ["c", "d"]);

        assert!(weak_sim_ultrametric_fast(&x3(), &x4()).unwrap().is_none());
        assert!(matches!(
            weak_sim_ultrametric_fast(&s3(), &s3()),
            Err(Error::NotUltrametric { .. })
        ));
    }

    #[test]
    fn witness_json_round_trip() {
        let w = decide_weak_similarity(&x4(), &x4_swapped()).unwrap().unwrap();
        assert_eq!(WeakSimWitness::from_json(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn verification_rejects_tampered_witness() {
        let mut w = decide_weak_similarity(&x3(), &y3()).unwrap().unwrap();
        w.phi = PointMap::new([("p", "q1"), ("q", "p1"), ("r", "r1")].map(|(a, b)| (a.into(), b.into())));
        assert!(!verify_weak_similarity(&x3(), &y3(), &w).unwrap());
        let w2 = WeakSimWitness {
            scaling: scaling(&[(0, 0), (1, 20), (2, 10)]),
            phi: PointMap::new([("p", "p1"), ("q", "q1"), ("r", "r1")].map(|(a, b)| (a.into(), b.into()))),
        };
        assert!(!verify_weak_similarity(&x3(), &y3(), &w2).unwrap());
    }
}
