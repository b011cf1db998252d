//! AHU-style canonical codes for rooted trees and explicit isomorphisms.
//!
//! A leaf encodes as `.`; an inner node as `[` + sorted child codes + `]`,
//! with `label:` inserted after the bracket in the labeled variant. Codes are
//! self-delimiting, so two trees have equal codes iff they are isomorphic as
//! rooted trees (label-preserving for the labeled variant).

use std::fmt;

use crate::rational::Rational;
use crate::tree::{FlatNode, Node, RepTree, Tree};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonCode(Vec<u8>);

impl CanonCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Debug for CanonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonCode({self})")
    }
}

fn encode<L>(node: &Node<L>, token: &impl Fn(&L) -> Option<String>) -> Vec<u8> {
    if node.is_leaf() {
        return vec![b'.'];
    }
    let mut kids: Vec<Vec<u8>> = node.children.iter().map(|c| encode(c, token)).collect();
    kids.sort();
    let mut out = vec![b'['];
    if let Some(t) = token(&node.label) {
        out.extend_from_slice(t.as_bytes());
        out.push(b':');
    }
    kids.into_iter().for_each(|k| out.extend(k));
    out.push(b']');
    out
}

fn label_token(label: &Rational) -> Option<String> {
    Some(label.to_string())
}

fn no_token<L>(_: &L) -> Option<String> {
    None
}

/// Code of the shape of `tree`; labels are ignored.
pub fn canon_code_unlabeled<L>(tree: &Tree<L>) -> CanonCode {
    CanonCode(encode(&tree.root, &no_token))
}

/// Code of `tree` with every inner label embedded exactly.
pub fn canon_code_labeled(tree: &RepTree) -> CanonCode {
    canon_code_labeled_node(&tree.root)
}

pub(crate) fn canon_code_labeled_node(node: &Node<Rational>) -> CanonCode {
    CanonCode(encode(node, &label_token))
}

/// Per-node codes in preorder, computed bottom-up in one pass.
fn all_codes<L>(flat: &[FlatNode<'_, L>], token: &impl Fn(&L) -> Option<String>) -> Vec<Vec<u8>> {
    let mut codes: Vec<Vec<u8>> = vec![Vec::new(); flat.len()];
    for id in (0..flat.len()).rev() {
        let f = &flat[id];
        if f.children.is_empty() {
            codes[id] = vec![b'.'];
            continue;
        }
        let mut kids: Vec<&[u8]> = f.children.iter().map(|&c| codes[c].as_slice()).collect();
        kids.sort();
        let mut out = vec![b'['];
        if let Some(t) = token(&f.node.label) {
            out.extend_from_slice(t.as_bytes());
            out.push(b':');
        }
        kids.into_iter().for_each(|k| out.extend_from_slice(k));
        out.push(b']');
        codes[id] = out;
    }
    codes
}

/// A root-preserving isomorphism between two trees, as a map from preorder
/// node ids of the first tree to preorder node ids of the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeIso {
    pub map: Vec<usize>,
}

impl TreeIso {
    /// The induced bijection between leaf points, in preorder of `t1`.
    pub fn leaf_pairs<L, M>(&self, t1: &Tree<L>, t2: &Tree<M>) -> Vec<(String, String)> {
        let (f1, f2) = (t1.flatten(), t2.flatten());
        f1.iter()
            .enumerate()
            .filter_map(|(id, f)| {
                let p = f.node.point.clone()?;
                let q = f2[self.map[id]].node.point.clone()?;
                Some((p, q))
            })
            .collect()
    }
}

fn iso_with<L, M>(
    t1: &Tree<L>,
    t2: &Tree<M>,
    token1: impl Fn(&L) -> Option<String>,
    token2: impl Fn(&M) -> Option<String>,
) -> Option<TreeIso> {
    let (f1, f2) = (t1.flatten(), t2.flatten());
    if f1.len() != f2.len() {
        return None;
    }
    let (c1, c2) = (all_codes(&f1, &token1), all_codes(&f2, &token2));
    if c1[0] != c2[0] {
        return None;
    }
    let mut map = vec![usize::MAX; f1.len()];
    let mut stack = vec![(0usize, 0usize)];
    while let Some((u, v)) = stack.pop() {
        map[u] = v;
        // stable sort: equal-code siblings pair up in child order
        let mut a = f1[u].children.clone();
        let mut b = f2[v].children.clone();
        a.sort_by(|&x, &y| c1[x].cmp(&c1[y]));
        b.sort_by(|&x, &y| c2[x].cmp(&c2[y]));
        stack.extend(a.into_iter().zip(b));
    }
    Some(TreeIso { map })
}

/// Explicit isomorphism `t1 -> t2` mapping root to root, or `None` when the
/// trees are not isomorphic. With `respect_labels`, labels must agree too.
pub fn rooted_tree_iso_map(t1: &RepTree, t2: &RepTree, respect_labels: bool) -> Option<TreeIso> {
    if respect_labels {
        iso_with(t1, t2, label_token, label_token)
    } else {
        iso_with(t1, t2, no_token, no_token)
    }
}

/// Isomorphism of the underlying shapes of two arbitrarily labeled trees.
pub fn shape_iso_map<L, M>(t1: &Tree<L>, t2: &Tree<M>) -> Option<TreeIso> {
    iso_with(t1, t2, no_token, no_token)
}

/// Checks that `iso` is a bijection taking root to root and parents to
/// parents, and (optionally) preserving labels.
pub fn verify_tree_iso<L: PartialEq>(t1: &Tree<L>, t2: &Tree<L>, iso: &TreeIso, respect_labels: bool) -> bool {
    let (f1, f2) = (t1.flatten(), t2.flatten());
    if f1.len() != f2.len() || iso.map.len() != f1.len() || iso.map.first() != Some(&0) {
        return false;
    }
    let mut hit = vec![false; f2.len()];
    for &v in &iso.map {
        if v >= f2.len() || std::mem::replace(&mut hit[v], true) {
            return false;
        }
    }
    f1.iter().enumerate().all(|(u, node)| {
        let v = iso.map[u];
        let parent_ok = node.parent.map(|p| iso.map[p]) == f2[v].parent;
        let label_ok = !respect_labels || node.node.label == f2[v].node.label;
        parent_ok && label_ok && node.node.is_leaf() == f2[v].node.is_leaf()
    })
}
