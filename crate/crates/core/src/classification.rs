//! Structural classes of finite ultrametric spaces, read off the
//! representing tree, and the constructions that go with them.
//!
//! Levels are numbered from the root (level 0); a tree "with n levels" has
//! its deepest leaf at depth n. With that convention:
//!
//! * `R̃`: exactly one inner node on every level below n;
//! * `R`: `R̃` and every inner node has exactly two children;
//! * `D`: inner labels are pairwise distinct;
//! * `T`: (A) one inner node on every level k < n-1, and (B) all inner nodes
//!   on level n-1 have the same number of children.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::canon::{rooted_tree_iso_map, verify_tree_iso, TreeIso};
use crate::error::{Error, Result};
use crate::mapping::PointMap;
use crate::rational::Rational;
use crate::similarity::{verify_weak_similarity, Scaling, WeakSimWitness};
use crate::space::SemimetricSpace;
use crate::tree::{build_tree, space_from_tree, RepTree, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    #[serde(rename = "in_R")]
    pub in_r: bool,
    #[serde(rename = "in_R_tilde")]
    pub in_r_tilde: bool,
    #[serde(rename = "in_D")]
    pub in_d: bool,
    #[serde(rename = "in_T")]
    pub in_t: bool,
    /// Inner-node count on each level, root first, down to the deepest leaf
    /// level.
    pub levels: Vec<usize>,
    /// Inner labels in decreasing order, with repetition.
    pub label_multiset: Vec<Rational>,
}

impl ClassReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Class membership that depends only on the shape of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeClasses {
    pub r: bool,
    pub r_tilde: bool,
    pub t: bool,
}

/// Inner-node counts per level, `0..=depth`.
pub fn inner_levels<L>(tree: &Tree<L>) -> Vec<usize> {
    let flat = tree.flatten();
    let depth = flat.iter().map(|f| f.depth).max().unwrap_or(0);
    let mut levels = vec![0; depth + 1];
    for f in flat.iter().filter(|f| !f.node.is_leaf()) {
        levels[f.depth] += 1;
    }
    levels
}

pub fn shape_classes<L>(tree: &Tree<L>) -> ShapeClasses {
    let flat = tree.flatten();
    let levels = inner_levels(tree);
    let n = levels.len() - 1;
    let r_tilde = levels[..n].iter().all(|&c| c == 1);
    let binary = flat.iter().all(|f| f.node.is_leaf() || f.children.len() == 2);
    let cond_a = (0..n.saturating_sub(1)).all(|k| levels[k] == 1);
    let cond_b = n == 0 || {
        let mut counts = flat
            .iter()
            .filter(|f| f.depth == n - 1 && !f.node.is_leaf())
            .map(|f| f.children.len());
        let first = counts.next();
        counts.all(|c| Some(c) == first)
    };
    ShapeClasses {
        r: r_tilde && binary,
        r_tilde,
        t: cond_a && cond_b,
    }
}

fn inner_labels_desc(tree: &RepTree) -> Vec<Rational> {
    let mut labels: Vec<Rational> = tree
        .flatten()
        .iter()
        .filter(|f| !f.node.is_leaf())
        .map(|f| f.node.label.clone())
        .collect();
    labels.sort_by(|a, b| b.cmp(a));
    labels
}

pub fn classify_tree(tree: &RepTree) -> ClassReport {
    let shape = shape_classes(tree);
    let label_multiset = inner_labels_desc(tree);
    let in_d = label_multiset.windows(2).all(|w| w[0] != w[1]);
    ClassReport {
        in_r: shape.r,
        in_r_tilde: shape.r_tilde,
        in_d,
        in_t: shape.t,
        levels: inner_levels(tree),
        label_multiset,
    }
}

pub fn classify_space(x: &SemimetricSpace) -> Result<ClassReport> {
    Ok(classify_tree(&build_tree(x)?))
}

/// Outcome of [`witness_from_unlabeled_iso`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnlabeledIsoOutcome {
    Witness(WeakSimWitness),
    /// The shapes agree but neither `X ∈ R̃` nor `X, Y ∈ D ∩ T` holds.
    Inapplicable,
    NotIsomorphicShapes,
}

/// Builds a weak similarity from an isomorphism of the unlabeled
/// representing trees, for the classes where one is guaranteed to exist.
///
/// For `X ∈ R̃` the inner labels of both trees, taken in decreasing order,
/// are paired off to form the scaling, and the shape isomorphism restricted
/// to leaves gives the point map. For `X, Y ∈ D ∩ T` inner nodes are matched
/// by label rank and the match is extended to leaves child by child.
pub fn witness_from_unlabeled_iso(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<UnlabeledIsoOutcome> {
    let tx = build_tree(x)?;
    let ty = build_tree(y)?;
    let Some(shape_iso) = rooted_tree_iso_map(&tx, &ty, false) else {
        return Ok(UnlabeledIsoOutcome::NotIsomorphicShapes);
    };
    let (cx, cy) = (classify_tree(&tx), classify_tree(&ty));
    let iso = if cx.in_r_tilde {
        shape_iso
    } else if cx.in_d && cx.in_t && cy.in_d && cy.in_t {
        rank_matched_iso(&tx, &ty)?
    } else {
        return Ok(UnlabeledIsoOutcome::Inapplicable);
    };

    let scaling = paired_labels(&cx.label_multiset, &cy.label_multiset)?;
    let phi = PointMap::new(iso.leaf_pairs(&tx, &ty));
    let w = WeakSimWitness { scaling, phi };
    if !verify_weak_similarity(x, y, &w)? {
        return Err(Error::VerificationFailed(
            "constructed realization fails f(d(x,y)) = ρ(Φx,Φy)".into(),
        ));
    }
    Ok(UnlabeledIsoOutcome::Witness(w))
}

/// `f(0) = 0` and `f(l_i) = l̃_i` for decreasingly ordered distinct labels.
fn paired_labels(lx: &[Rational], ly: &[Rational]) -> Result<Scaling> {
    let distinct = |l: &[Rational]| l.windows(2).all(|w| w[0] > w[1]);
    if lx.len() != ly.len() || !distinct(lx) || !distinct(ly) {
        return Err(Error::VerificationFailed(
            "inner labels cannot be paired by rank".into(),
        ));
    }
    let mut pairs: Vec<(Rational, Rational)> = lx.iter().cloned().zip(ly.iter().cloned()).rev().collect();
    pairs.insert(0, (Rational::zero(), Rational::zero()));
    Ok(Scaling::new(pairs))
}

/// Maps the i-th largest inner label of `tx` to the i-th largest of `ty`,
/// then pairs the leaf children of matched nodes in child order.
fn rank_matched_iso(tx: &RepTree, ty: &RepTree) -> Result<TreeIso> {
    let (fx, fy) = (tx.flatten(), ty.flatten());
    let by_label = |flat: &[crate::tree::FlatNode<'_, Rational>]| {
        let mut ids: Vec<usize> = (0..flat.len()).filter(|&i| !flat[i].node.is_leaf()).collect();
        ids.sort_by(|&a, &b| flat[b].node.label.cmp(&flat[a].node.label));
        ids
    };
    let (ix, iy) = (by_label(&fx), by_label(&fy));
    if ix.len() != iy.len() || fx.len() != fy.len() {
        return Err(Error::VerificationFailed("trees differ in size".into()));
    }
    let mut map = vec![usize::MAX; fx.len()];
    for (&u, &v) in ix.iter().zip(&iy) {
        map[u] = v;
        let leaves = |flat: &[crate::tree::FlatNode<'_, Rational>], id: usize| -> Vec<usize> {
            flat[id]
                .children
                .iter()
                .copied()
                .filter(|&c| flat[c].node.is_leaf())
                .collect()
        };
        let (lu, lv) = (leaves(&fx, u), leaves(&fy, v));
        if lu.len() != lv.len() {
            return Err(Error::VerificationFailed(
                "label-rank match disagrees with the shape".into(),
            ));
        }
        for (a, b) in lu.into_iter().zip(lv) {
            map[a] = b;
        }
    }
    if fx.len() == 1 {
        map[0] = 0;
    }
    let iso = TreeIso { map };
    if !verify_tree_iso(tx, ty, &iso, false) {
        return Err(Error::VerificationFailed(
            "label-rank match is not a tree isomorphism".into(),
        ));
    }
    Ok(iso)
}

/// For `X ∉ R̃`, an ultrametric space `Y` with the same unlabeled tree whose
/// spectrum has a different size, so `X` and `Y` are not weakly similar.
///
/// Two inner nodes `x₁, x₂` on the shallowest level holding more than one
/// are chosen. If their labels differ, `x₂` takes the label of `x₁`; if they
/// agree, `x₂` takes the midpoint between its label and the next larger
/// spectrum value. Pairs are tried in order until one gives a valid tree with
/// a spectrum of different size; if none does, the tree is relabeled by depth
/// (or injectively, if `X` already has injective labels).
pub fn adversarial_relabeling(x: &SemimetricSpace) -> Result<SemimetricSpace> {
    let tx = build_tree(x)?;
    if shape_classes(&tx).r_tilde {
        return Err(Error::Inapplicable(
            "space is in R̃: no level has two inner nodes".into(),
        ));
    }
    let flat = tx.flatten();
    let levels = inner_levels(&tx);
    let level = levels
        .iter()
        .position(|&c| c >= 2)
        .expect("outside R̃ some level has two inner nodes");
    let nodes: Vec<usize> = (0..flat.len())
        .filter(|&i| flat[i].depth == level && !flat[i].node.is_leaf())
        .collect();
    let distinct = |t: &RepTree| inner_labels_desc(t).into_iter().collect::<BTreeSet<_>>().len();
    let target = distinct(&tx);

    for &x1 in &nodes {
        for &x2 in &nodes {
            if x1 == x2 {
                continue;
            }
            let (l1, l2) = (&flat[x1].node.label, &flat[x2].node.label);
            let new = if l1 != l2 {
                l1.clone()
            } else {
                let next = x
                    .spectrum()
                    .values()
                    .iter()
                    .find(|v| *v > l2)
                    .expect("parent label is larger");
                l2.midpoint(next)
            };
            let parent = &flat[flat[x2].parent.expect("level >= 1")].node.label;
            let child_max = flat[x2]
                .children
                .iter()
                .map(|&c| &flat[c].node.label)
                .max()
                .expect("inner node");
            if new >= *parent || new <= *child_max {
                continue;
            }
            let candidate = relabel(&tx, |id, l| if id == x2 { new.clone() } else { l.clone() });
            if distinct(&candidate) != target {
                return space_from_tree(&candidate);
            }
        }
    }

    let inner_count = flat.iter().filter(|f| !f.node.is_leaf()).count();
    let candidate = if target == inner_count {
        let depth = levels.len() - 1;
        relabel(&tx, |id, l| {
            if flat[id].node.is_leaf() {
                l.clone()
            } else {
                Rational::from((depth - flat[id].depth) as i64)
            }
        })
    } else {
        let mut post = vec![0i64; flat.len()];
        let mut next = 0;
        postorder(&flat, 0, &mut |id| {
            if !flat[id].node.is_leaf() {
                next += 1;
                post[id] = next;
            }
        });
        relabel(&tx, |id, l| {
            if flat[id].node.is_leaf() {
                l.clone()
            } else {
                Rational::from(post[id])
            }
        })
    };
    space_from_tree(&candidate)
}

fn postorder(flat: &[crate::tree::FlatNode<'_, Rational>], id: usize, visit: &mut impl FnMut(usize)) {
    for &c in &flat[id].children {
        postorder(flat, c, visit);
    }
    visit(id);
}

/// Relabels by preorder id.
fn relabel(tree: &RepTree, f: impl Fn(usize, &Rational) -> Rational) -> RepTree {
    let mut id = 0;
    tree.map_labels(|l| {
        let out = f(id, l);
        id += 1;
        out
    })
}
