//! Representing trees of finite ultrametric spaces.
//!
//! The root is labeled by `diam X`; its children are the parts of the
//! diametrical graph's multipartite decomposition, each labeled by its own
//! diameter, recursively. Leaves carry the points and the label 0. Distances
//! are recovered as the label of the lowest common ancestor of two leaves.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::canon::canon_code_labeled_node;
use crate::diametrical::{diametrical_graph, dot_id, multipartite_parts};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::SemimetricSpace;

/// A rooted tree whose leaves carry point names and whose nodes carry a
/// label of type `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node<L> {
    pub label: L,
    pub children: Vec<Node<L>>,
    pub point: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree<L> {
    pub root: Node<L>,
}

pub type RepNode = Node<Rational>;
/// Labeled representing tree `T_X`.
pub type RepTree = Tree<Rational>;
/// Unlabeled rooted tree; leaves still carry their points.
pub type Shape = Tree<()>;

impl<L> Node<L> {
    pub fn leaf(point: impl Into<String>, label: L) -> Self {
        Node {
            label,
            children: Vec::new(),
            point: Some(point.into()),
        }
    }

    pub fn inner(label: L, children: Vec<Node<L>>) -> Self {
        Node {
            label,
            children,
            point: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn map_labels<M>(&self, f: &mut impl FnMut(&L) -> M) -> Node<M> {
        Node {
            label: f(&self.label),
            children: self.children.iter().map(|c| c.map_labels(f)).collect(),
            point: self.point.clone(),
        }
    }

    fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(Node::leaf_count).sum()
        }
    }

    fn first_point(&self) -> Option<&str> {
        let mut node = self;
        while let Some(c) = node.children.first() {
            node = c;
        }
        node.point.as_deref()
    }

    fn collect_points<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let Some(p) = &self.point {
            out.push(p);
        }
        for c in &self.children {
            c.collect_points(out);
        }
    }
}

/// A node seen in preorder, with its position in the tree.
#[derive(Debug)]
pub struct FlatNode<'a, L> {
    pub node: &'a Node<L>,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
}

impl<L> Tree<L> {
    pub fn new(root: Node<L>) -> Self {
        Tree { root }
    }

    /// All nodes in preorder; a node's id is its index here.
    pub fn flatten(&self) -> Vec<FlatNode<'_, L>> {
        let mut out = Vec::new();
        let mut stack = vec![(&self.root, None, 0usize)];
        while let Some((node, parent, depth)) = stack.pop() {
            let id = out.len();
            if let Some(p) = parent {
                let parent_node: &mut FlatNode<'_, L> = &mut out[p];
                parent_node.children.push(id);
            }
            out.push(FlatNode {
                node,
                parent,
                depth,
                children: Vec::new(),
            });
            for c in node.children.iter().rev() {
                stack.push((c, Some(id), depth + 1));
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.flatten().len()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    /// Leaf points in preorder.
    pub fn leaf_points(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.root.collect_points(&mut out);
        out
    }

    pub fn map_labels<M>(&self, mut f: impl FnMut(&L) -> M) -> Tree<M> {
        Tree {
            root: self.root.map_labels(&mut f),
        }
    }

    /// Bracket notation of the shape: `(·(·,(·,·)))` for a root with a leaf
    /// and an inner node over two leaves.
    pub fn shape_string(&self) -> String {
        fn inner<L>(node: &Node<L>, out: &mut String) {
            if node.is_leaf() {
                out.push('·');
                return;
            }
            out.push('(');
            for (i, c) in node.children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                inner(c, out);
            }
            out.push(')');
        }
        let mut out = String::from("(·");
        if !self.root.is_leaf() {
            inner(&self.root, &mut out);
        }
        out.push(')');
        out
    }
}

/// Erases the labels of a tree, keeping its shape and leaf points.
pub fn strip_labels<L>(tree: &Tree<L>) -> Shape {
    tree.map_labels(|_| ())
}

/// Builds the representing tree `T_X` of an ultrametric space.
///
/// Children are ordered by their labeled canonical code, then by their first
/// point, so equal spaces always give identical trees.
pub fn build_tree(space: &SemimetricSpace) -> Result<RepTree> {
    space.require_ultrametric()?;
    let all: Vec<usize> = (0..space.len()).collect();
    Ok(Tree::new(build_node(space, &all)?))
}

fn build_node(space: &SemimetricSpace, members: &[usize]) -> Result<RepNode> {
    if let [only] = members {
        return Ok(Node::leaf(space.point(*only), Rational::zero()));
    }
    let sub = space.subspace(members);
    let parts = multipartite_parts(&diametrical_graph(&sub)?)?;
    let mut children = parts
        .parts()
        .iter()
        .map(|part| {
            let global: Vec<usize> = part.iter().map(|&k| members[k]).collect();
            build_node(space, &global)
        })
        .collect::<Result<Vec<_>>>()?;
    sort_children(&mut children);
    Ok(Node::inner(sub.diameter().clone(), children))
}

pub(crate) fn sort_children(children: &mut [RepNode]) {
    children.sort_by_cached_key(|c| (canon_code_labeled_node(c), c.first_point().map(str::to_owned)));
}

/// Distance between two leaf points: the label of their lowest common
/// ancestor (0 for a point and itself).
pub fn tree_distance(tree: &RepTree, x: &str, y: &str) -> Result<Rational> {
    let flat = tree.flatten();
    let find = |p: &str| {
        flat.iter()
            .position(|f| f.node.point.as_deref() == Some(p))
            .ok_or_else(|| Error::UnknownPoint(p.to_string()))
    };
    let (mut a, mut b) = (find(x)?, find(y)?);
    if a == b {
        return Ok(Rational::zero());
    }
    let mut path_max = Rational::zero();
    while a != b {
        if flat[a].depth >= flat[b].depth {
            a = flat[a].parent.expect("non-root has a parent");
            path_max = path_max.max(flat[a].node.label.clone());
        } else {
            b = flat[b].parent.expect("non-root has a parent");
            path_max = path_max.max(flat[b].node.label.clone());
        }
    }
    let lca = flat[a].node.label.clone();
    debug_assert_eq!(lca, path_max, "labels must strictly decrease toward the leaves");
    Ok(lca)
}

/// Checks every structural invariant of a representing tree.
pub fn validate_tree(tree: &RepTree) -> Result<()> {
    let mut points = HashSet::new();
    validate_node(&tree.root, &mut points)
}

fn validate_node<'a>(node: &'a RepNode, points: &mut HashSet<&'a str>) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidTree(msg));
    if node.is_leaf() {
        let Some(p) = &node.point else {
            return bad("leaf without a point".into());
        };
        if !node.label.is_zero() {
            return bad(format!("leaf {p:?} has nonzero label {}", node.label));
        }
        if !points.insert(p) {
            return bad(format!("point {p:?} appears at more than one leaf"));
        }
        return Ok(());
    }
    if let Some(p) = &node.point {
        return bad(format!("inner node carries point {p:?}"));
    }
    if !node.label.is_positive() {
        return bad(format!("inner node has non-positive label {}", node.label));
    }
    if node.children.len() < 2 {
        return bad(format!("inner node labeled {} has fewer than 2 children", node.label));
    }
    for c in &node.children {
        if !c.is_leaf() && c.label >= node.label {
            return bad(format!(
                "child label {} is not below parent label {}",
                c.label, node.label
            ));
        }
        validate_node(c, points)?;
    }
    Ok(())
}

/// The ultrametric space represented by a tree. Points are listed in name
/// order, independent of child order.
pub fn space_from_tree(tree: &RepTree) -> Result<SemimetricSpace> {
    validate_tree(tree)?;
    let mut points: Vec<String> = tree.leaf_points().into_iter().map(str::to_owned).collect();
    points.sort();
    let n = points.len();
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    fill_distances(&tree.root, &points, &mut matrix);
    SemimetricSpace::new(points, matrix)
}

fn fill_distances(node: &RepNode, order: &[String], matrix: &mut [Vec<Rational>]) -> Vec<usize> {
    if let Some(p) = &node.point {
        return vec![order.binary_search(p).expect("leaf point is listed")];
    }
    let groups: Vec<Vec<usize>> = node.children.iter().map(|c| fill_distances(c, order, matrix)).collect();
    for (i, gi) in groups.iter().enumerate() {
        for gj in &groups[i + 1..] {
            for &a in gi {
                for &b in gj {
                    matrix[a][b] = node.label.clone();
                    matrix[b][a] = node.label.clone();
                }
            }
        }
    }
    groups.into_iter().flatten().collect()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum NodeDoc {
    Leaf { point: String },
    Inner { label: Rational, children: Vec<NodeDoc> },
}

impl NodeDoc {
    fn from_node(node: &RepNode) -> Self {
        match &node.point {
            Some(p) if node.is_leaf() => NodeDoc::Leaf { point: p.clone() },
            _ => NodeDoc::Inner {
                label: node.label.clone(),
                children: node.children.iter().map(NodeDoc::from_node).collect(),
            },
        }
    }

    fn into_node(self) -> RepNode {
        match self {
            NodeDoc::Leaf { point } => Node::leaf(point, Rational::zero()),
            NodeDoc::Inner { label, children } => {
                Node::inner(label, children.into_iter().map(NodeDoc::into_node).collect())
            }
        }
    }
}

impl RepTree {
    /// Parses and validates a JSON tree document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NodeDoc = serde_json::from_str(text)?;
        let tree = Tree::new(doc.into_node());
        validate_tree(&tree)?;
        Ok(tree)
    }

    /// `{"label":"2","children":[{"point":"p"},...]}` with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&NodeDoc::from_node(&self.root)).expect("tree serializes");
        s.push('\n');
        s
    }

    /// DOT rendering: inner nodes show labels, leaves show point names.
    pub fn to_dot(&self) -> String {
        let flat = self.flatten();
        let mut out = String::from("digraph tree {\n  node [shape=circle];\n");
        for (id, f) in flat.iter().enumerate() {
            match &f.node.point {
                Some(p) if f.node.is_leaf() => {
                    writeln!(out, "  n{id} [label={}, shape=plaintext];", dot_id(p)).unwrap()
                }
                _ => writeln!(out, "  n{id} [label={}];", dot_id(&f.node.label.to_string())).unwrap(),
            }
        }
        for (id, f) in flat.iter().enumerate() {
            for c in &f.children {
                writeln!(out, "  n{id} -> n{c};").unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures::*;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn leaf(p: &str) -> RepNode {
        Node::leaf(p, r(0))
    }

    #[test]
    fn build_tree_examples() {
        let expected = Tree::new(Node::inner(
            r(2),
            vec![leaf("p"), Node::inner(r(1), vec![leaf("q"), leaf("r")])],
        ));
        assert_eq!(build_tree(&x3()).unwrap(), expected);

        assert_eq!(build_tree(&one_point()).unwrap(), Tree::new(leaf("p")));

        let expected = Tree::new(Node::inner(
            r(3),
            vec![
                Node::inner(r(1), vec![leaf("a"), leaf("b")]),
                Node::inner(r(2), vec![leaf("c"), leaf("d")]),
            ],
        ));
        assert_eq!(build_tree(&x4()).unwrap(), expected);
    }

    #[test]
    fn build_tree_rejects_non_ultrametric() {
        assert_eq!(
            build_tree(&s3()),
            Err(Error::NotUltrametric {
                x: "a".into(),
                y: "c".into(),
                z: "b".into()
            })
        );
    }

    #[test]
    fn build_tree_ignores_point_order() {
        let x = x3();
        let shuffled = x.reordered(&["r".into(), "q".into(), "p".into()]).unwrap();
        assert_eq!(build_tree(&x).unwrap(), build_tree(&shuffled).unwrap());
    }

    #[test]
    fn tree_distance_examples() {
        let t = build_tree(&x3()).unwrap();
        assert_eq!(tree_distance(&t, "q", "r").unwrap(), r(1));
        assert_eq!(tree_distance(&t, "p", "p").unwrap(), r(0));
        assert_eq!(tree_distance(&t, "p", "z"), Err(Error::UnknownPoint("z".into())));
        let t = build_tree(&x4()).unwrap();
        assert_eq!(tree_distance(&t, "a", "c").unwrap(), r(3));
    }

    #[test]
    fn space_from_tree_examples() {
        assert_eq!(space_from_tree(&build_tree(&x3()).unwrap()).unwrap(), x3());
        assert_eq!(space_from_tree(&Tree::new(leaf("p"))).unwrap(), one_point());
        let t = Tree::new(Node::inner(r(5), vec![leaf("u"), leaf("v")]));
        assert_eq!(space_from_tree(&t).unwrap(), space(&["u", "v"], &[&[0, 5], &[5, 0]]));
    }

    #[test]
    fn space_from_tree_rejects_invalid() {
        let cases = vec![
            // non-decreasing labels
            Node::inner(r(1), vec![leaf("a"), Node::inner(r(1), vec![leaf("b"), leaf("c")])]),
            // unary inner node
            Node::inner(r(1), vec![leaf("a")]),
            // zero-labeled inner node
            Node::inner(r(0), vec![leaf("a"), leaf("b")]),
            // duplicate point
            Node::inner(r(1), vec![leaf("a"), leaf("a")]),
            // leaf with a label
            Node::inner(r(2), vec![leaf("a"), Node::leaf("b", r(1))]),
            // leaf without a point
            Node::inner(r(2), vec![leaf("a"), Node::inner(r(1), vec![])]),
        ];
        for root in cases {
            assert!(matches!(space_from_tree(&Tree::new(root)), Err(Error::InvalidTree(_))));
        }
    }

    #[test]
    fn strip_labels_shapes() {
        assert_eq!(strip_labels(&build_tree(&x3()).unwrap()).shape_string(), "(·(·,(·,·)))");
        assert_eq!(strip_labels(&build_tree(&one_point()).unwrap()).shape_string(), "(·)");
        assert_eq!(
            strip_labels(&build_tree(&x4()).unwrap()).shape_string(),
            "(·((·,·),(·,·)))"
        );
        let shape = strip_labels(&build_tree(&x3()).unwrap());
        assert_eq!(shape.leaf_points(), vec!["p", "q", "r"]);
    }

    #[test]
    fn json_round_trip() {
        let t = build_tree(&x3()).unwrap();
        let text = t.to_json();
        assert_eq!(
            text,
            "{\"label\":\"2\",\"children\":[{\"point\":\"p\"},{\"label\":\"1\",\"children\":[{\"point\":\"q\"},{\"point\":\"r\"}]}]}\n"
        );
        assert_eq!(RepTree::from_json(&text).unwrap(), t);
        assert!(RepTree::from_json(r#"{"label":"1","children":[{"point":"a"}]}"#).is_err());
    }

    #[test]
    fn dot_rendering() {
        let dot = build_tree(&x3()).unwrap().to_dot();
        assert!(dot.contains("n0 [label=\"2\"];"));
        assert!(dot.contains("n1 [label=\"p\", shape=plaintext];"));
        assert!(dot.contains("n2 -> n4;"));
    }
}
