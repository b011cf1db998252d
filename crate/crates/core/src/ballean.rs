//! Balleans, their Hasse diagrams, and ball-preserving bijections.
//!
//! A ball is `B_r(t) = {x : d(x,t) <= r}`. As `r` grows the ball only changes
//! when `r` crosses a spectrum value, so enumerating radii from `Sp(X)` finds
//! every ball. Balls are identified by their member sets.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::canon::shape_iso_map;
use crate::diametrical::dot_id;
use crate::error::{Error, Result};
use crate::mapping::PointMap;
use crate::rational::Rational;
use crate::space::SemimetricSpace;
use crate::tree::{Node, Tree};

#[derive(Debug, Clone)]
pub struct Ball {
    members: FixedBitSet,
    /// One `(center, radius)` realizing the ball; diagnostic only.
    pub center: usize,
    pub radius: Rational,
}

impl Ball {
    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }

    pub fn names(&self, space: &SemimetricSpace) -> Vec<String> {
        self.members.ones().map(|i| space.point(i).to_string()).collect()
    }
}

impl PartialEq for Ball {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Ball {}

/// All balls of a space, deduplicated, ordered by (size, member indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ballean {
    n: usize,
    balls: Vec<Ball>,
    index: HashMap<FixedBitSet, usize>,
}

#[derive(Serialize)]
struct BallDoc {
    members: Vec<String>,
    center: String,
    radius: Rational,
}

impl Ballean {
    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn position(&self, set: &FixedBitSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn to_json(&self, space: &SemimetricSpace) -> String {
        let docs: Vec<BallDoc> = self
            .balls
            .iter()
            .map(|b| BallDoc {
                members: b.names(space),
                center: space.point(b.center).to_string(),
                radius: b.radius.clone(),
            })
            .collect();
        let mut s = serde_json::to_string(&docs).expect("balls serialize");
        s.push('\n');
        s
    }
}

pub fn enumerate_balls(space: &SemimetricSpace) -> Ballean {
    let n = space.len();
    let spectrum = space.spectrum().values();
    let mut found: Vec<Ball> = Vec::new();
    let mut seen: HashMap<FixedBitSet, ()> = HashMap::new();
    for t in 0..n {
        for (k, radius) in spectrum.iter().enumerate() {
            let mut members = FixedBitSet::with_capacity(n);
            for x in 0..n {
                if space.rank(x, t) <= k {
                    members.insert(x);
                }
            }
            if seen.insert(members.clone(), ()).is_none() {
                found.push(Ball {
                    members,
                    center: t,
                    radius: radius.clone(),
                });
            }
        }
    }
    found.sort_by_cached_key(|b| (b.len(), b.indices()));
    let index = found.iter().enumerate().map(|(i, b)| (b.members.clone(), i)).collect();
    Ballean { n, balls: found, index }
}

/// Cover relation of `⊆` on a ballean, as a digraph with arcs from the
/// smaller ball to the larger.
#[derive(Debug, Clone)]
pub struct HasseDiagram {
    balls: Vec<Ball>,
    arcs: Vec<(usize, usize)>,
    adjacency: FixedBitSet,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

pub fn hasse_diagram(ballean: &Ballean) -> HasseDiagram {
    let balls = ballean.balls.clone();
    let m = balls.len();
    let below = |i: usize, j: usize| i != j && balls[i].members.is_subset(&balls[j].members);
    let mut strict = FixedBitSet::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            if below(i, j) {
                strict.insert(i * m + j);
            }
        }
    }
    let mut arcs = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if strict.contains(i * m + j) && !(0..m).any(|k| strict.contains(i * m + k) && strict.contains(k * m + j)) {
                arcs.push((i, j));
            }
        }
    }
    HasseDiagram::from_arcs(balls, arcs)
}

impl HasseDiagram {
    fn from_arcs(balls: Vec<Ball>, arcs: Vec<(usize, usize)>) -> Self {
        let m = balls.len();
        let mut adjacency = FixedBitSet::with_capacity(m * m);
        let mut out = vec![Vec::new(); m];
        let mut inn = vec![Vec::new(); m];
        for &(a, b) in &arcs {
            adjacency.insert(a * m + b);
            out[a].push(b);
            inn[b].push(a);
        }
        HasseDiagram {
            balls,
            arcs,
            adjacency,
            out,
            inn,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.balls.len()
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.adjacency.contains(a * self.balls.len() + b)
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn zero_indegree(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.inn[v].is_empty()).collect()
    }

    /// Longest path from a zero-indegree vertex to each vertex.
    pub fn levels(&self) -> Vec<usize> {
        let m = self.vertex_count();
        let mut level = vec![usize::MAX; m];
        fn visit(h: &HasseDiagram, v: usize, level: &mut [usize]) -> usize {
            if level[v] == usize::MAX {
                let l = h.inn[v].iter().map(|&u| visit(h, u, level) + 1).max().unwrap_or(0);
                level[v] = l;
            }
            level[v]
        }
        for v in 0..m {
            visit(self, v, &mut level);
        }
        level
    }

    /// The root if the diagram, with arcs reversed, is a rooted tree: one
    /// vertex of outdegree 0, every other of outdegree 1, and connected.
    pub fn reversed_tree_root(&self) -> Option<usize> {
        let m = self.vertex_count();
        let roots: Vec<usize> = (0..m).filter(|&v| self.out[v].is_empty()).collect();
        let [root] = roots[..] else { return None };
        if (0..m).any(|v| v != root && self.out[v].len() != 1) {
            return None;
        }
        let mut seen = vec![false; m];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.inn[v] {
                if !std::mem::replace(&mut seen[u], true) {
                    count += 1;
                    stack.push(u);
                }
            }
        }
        (count == m).then_some(root)
    }

    /// The reversed diagram as a rooted tree, with the preorder-id to vertex
    /// correspondence.
    fn as_tree(&self, root: usize) -> (Tree<()>, Vec<usize>) {
        fn build(h: &HasseDiagram, v: usize, order: &mut Vec<usize>) -> Node<()> {
            order.push(v);
            if h.inn[v].is_empty() {
                return Node::leaf(v.to_string(), ());
            }
            let children = h.inn[v].iter().map(|&u| build(h, u, order)).collect();
            Node::inner((), children)
        }
        let mut order = Vec::new();
        let root = build(self, root, &mut order);
        (Tree::new(root), order)
    }

    /// DOT rendering; vertices are labeled by member sets and listed in
    /// ballean order, arcs point from the smaller ball to the larger.
    pub fn to_dot(&self, space: &SemimetricSpace) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for (i, b) in self.balls.iter().enumerate() {
            let label = format!("{{{}}}", b.names(space).join(","));
            writeln!(out, "  b{i} [label={}];", dot_id(&label)).unwrap();
        }
        for &(a, b) in &self.arcs {
            writeln!(out, "  b{a} -> b{b};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// A vertex bijection between two Hasse diagrams preserving arcs both ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigraphIso {
    pub map: Vec<usize>,
}

pub fn verify_digraph_iso(h1: &HasseDiagram, h2: &HasseDiagram, iso: &DigraphIso) -> bool {
    let m = h1.vertex_count();
    if m != h2.vertex_count() || iso.map.len() != m || h1.arcs.len() != h2.arcs.len() {
        return false;
    }
    let mut hit = vec![false; m];
    if iso.map.iter().any(|&v| v >= m || std::mem::replace(&mut hit[v], true)) {
        return false;
    }
    h1.arcs.iter().all(|&(a, b)| h2.has_arc(iso.map[a], iso.map[b]))
}

/// Joint color refinement of two digraphs starting from (indegree,
/// outdegree, level). Colors are comparable across the two graphs.
fn refine(h1: &HasseDiagram, h2: &HasseDiagram) -> (Vec<usize>, Vec<usize>) {
    let initial = |h: &HasseDiagram| {
        let levels = h.levels();
        (0..h.vertex_count())
            .map(|v| vec![h.indegree(v), h.outdegree(v), levels[v]])
            .collect::<Vec<_>>()
    };
    let compress = |a: Vec<Vec<usize>>, b: Vec<Vec<usize>>| {
        let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for s in a.iter().chain(&b) {
            let next = ids.len();
            ids.entry(s.clone()).or_insert(next);
        }
        // renumber in key order so colors do not depend on vertex order
        for (k, v) in ids.values_mut().enumerate() {
            *v = k;
        }
        let classes = ids.len();
        let map = |s: &Vec<Vec<usize>>| s.iter().map(|k| ids[k]).collect::<Vec<_>>();
        (map(&a), map(&b), classes)
    };
    let (mut c1, mut c2, mut classes) = compress(initial(h1), initial(h2));
    loop {
        let signature = |h: &HasseDiagram, c: &[usize]| {
            (0..h.vertex_count())
                .map(|v| {
                    let mut outs: Vec<usize> = h.out[v].iter().map(|&u| c[u]).collect();
                    let mut ins: Vec<usize> = h.inn[v].iter().map(|&u| c[u]).collect();
                    outs.sort_unstable();
                    ins.sort_unstable();
                    let mut s = vec![c[v], outs.len()];
                    s.extend(outs);
                    s.push(usize::MAX);
                    s.extend(ins);
                    s
                })
                .collect::<Vec<_>>()
        };
        let (n1, n2, next) = compress(signature(h1, &c1), signature(h2, &c2));
        c1 = n1;
        c2 = n2;
        if next == classes {
            return (c1, c2);
        }
        classes = next;
    }
}

/// Decides whether two Hasse diagrams are isomorphic as directed graphs.
///
/// When both are rooted trees under arc reversal (the ultrametric case) the
/// rooted-tree canonization decides; otherwise color refinement narrows the
/// candidates and a backtracking search extends partial maps arc by arc.
pub fn hasse_digraph_iso(h1: &HasseDiagram, h2: &HasseDiagram) -> Option<DigraphIso> {
    let m = h1.vertex_count();
    if m != h2.vertex_count() || h1.arcs.len() != h2.arcs.len() {
        return None;
    }
    match (h1.reversed_tree_root(), h2.reversed_tree_root()) {
        (Some(r1), Some(r2)) => {
            let (t1, order1) = h1.as_tree(r1);
            let (t2, order2) = h2.as_tree(r2);
            let iso = shape_iso_map(&t1, &t2)?;
            let mut map = vec![0; m];
            for (id, &v) in order1.iter().enumerate() {
                map[v] = order2[iso.map[id]];
            }
            return Some(DigraphIso { map });
        }
        (None, None) => {}
        _ => return None,
    }

    let (c1, c2) = refine(h1, h2);
    let histogram = |c: &[usize]| {
        let mut h = c.to_vec();
        h.sort_unstable();
        h
    };
    if histogram(&c1) != histogram(&c2) {
        return None;
    }
    let class_size = |c: usize| c1.iter().filter(|&&x| x == c).count();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| (class_size(c1[v]), c1[v], v));

    struct Search<'a> {
        h1: &'a HasseDiagram,
        h2: &'a HasseDiagram,
        c1: &'a [usize],
        c2: &'a [usize],
        order: Vec<usize>,
        map: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn extend(&mut self, k: usize) -> bool {
            if k == self.order.len() {
                return true;
            }
            let v = self.order[k];
            for w in 0..self.h2.vertex_count() {
                if self.used[w] || self.c2[w] != self.c1[v] {
                    continue;
                }
                let ok = self.order[..k].iter().all(|&u| {
                    let fu = self.map[u];
                    self.h1.has_arc(u, v) == self.h2.has_arc(fu, w) && self.h1.has_arc(v, u) == self.h2.has_arc(w, fu)
                });
                if !ok {
                    continue;
                }
                self.map[v] = w;
                self.used[w] = true;
                if self.extend(k + 1) {
                    return true;
                }
                self.used[w] = false;
            }
            false
        }
    }

    let mut search = Search {
        h1,
        h2,
        c1: &c1,
        c2: &c2,
        order,
        map: vec![usize::MAX; m],
        used: vec![false; m],
    };
    search.extend(0).then_some(DigraphIso { map: search.map })
}

/// First ball whose image (or preimage) under the map is not a ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BallViolation {
    ImageNotBall { ball: Vec<String>, image: Vec<String> },
    PreimageNotBall { ball: Vec<String>, preimage: Vec<String> },
}

pub(crate) fn ball_violation(
    x: &SemimetricSpace,
    y: &SemimetricSpace,
    bx: &Ballean,
    by: &Ballean,
    perm: &[usize],
) -> Option<BallViolation> {
    let n = perm.len();
    let mut inverse = vec![0; n];
    for (i, &j) in perm.iter().enumerate() {
        inverse[j] = i;
    }
    let push = |ball: &Ball, f: &[usize]| {
        let mut image = FixedBitSet::with_capacity(n);
        for i in ball.members.ones() {
            image.insert(f[i]);
        }
        image
    };
    let names = |space: &SemimetricSpace, set: &FixedBitSet| set.ones().map(|i| space.point(i).to_string()).collect();
    for b in &bx.balls {
        let image = push(b, perm);
        if by.position(&image).is_none() {
            return Some(BallViolation::ImageNotBall {
                ball: b.names(x),
                image: names(y, &image),
            });
        }
    }
    for b in &by.balls {
        let pre = push(b, &inverse);
        if bx.position(&pre).is_none() {
            return Some(BallViolation::PreimageNotBall {
                ball: b.names(y),
                preimage: names(x, &pre),
            });
        }
    }
    None
}

/// Checks that `f` maps every ball of `x` onto a ball of `y` and pulls every
/// ball of `y` back to a ball of `x`. Returns the first violation, or `None`
/// when `f` is ball-preserving.
pub fn verify_ball_preserving(x: &SemimetricSpace, y: &SemimetricSpace, f: &PointMap) -> Result<Option<BallViolation>> {
    let perm = f.to_indices(x, y)?;
    Ok(ball_violation(x, y, &enumerate_balls(x), &enumerate_balls(y), &perm))
}

/// A ball-preserving bijection read off an isomorphism of the Hasse
/// diagrams: the zero-indegree vertices are exactly the one-point balls, and
/// `f(x) = y` whenever `{x}` maps to `{y}`.
pub fn ball_preserving_bijection(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Option<PointMap>> {
    if x.len() != y.len() {
        return Ok(None);
    }
    let (bx, by) = (enumerate_balls(x), enumerate_balls(y));
    let (hx, hy) = (hasse_diagram(&bx), hasse_diagram(&by));
    let Some(iso) = hasse_digraph_iso(&hx, &hy) else {
        return Ok(None);
    };
    if !verify_digraph_iso(&hx, &hy, &iso) {
        return Err(Error::VerificationFailed(
            "Hasse diagram isomorphism does not preserve arcs".into(),
        ));
    }
    let mut perm = vec![usize::MAX; x.len()];
    for v in hx.zero_indegree() {
        let (from, to) = (&hx.balls[v], &hy.balls[iso.map[v]]);
        if from.len() != 1 || to.len() != 1 {
            return Err(Error::VerificationFailed(
                "zero-indegree vertex is not a one-point ball".into(),
            ));
        }
        perm[from.indices()[0]] = to.indices()[0];
    }
    if perm.contains(&usize::MAX) {
        return Err(Error::VerificationFailed(
            "one-point balls do not cover the space".into(),
        ));
    }
    if let Some(v) = ball_violation(x, y, &bx, &by, &perm) {
        return Err(Error::VerificationFailed(format!(
            "extracted bijection is not ball-preserving: {v:?}"
        )));
    }
    Ok(Some(PointMap::from_indices(x, y, &perm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::decide_weak_similarity;
    use crate::space::fixtures::*;

    fn ball_names(space: &SemimetricSpace) -> Vec<Vec<String>> {
        enumerate_balls(space).balls().iter().map(|b| b.names(space)).collect()
    }

    fn sets(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter().map(|b| b.iter().map(|s| s.to_string()).collect()).collect()
    }

    fn named_arcs(space: &SemimetricSpace, h: &HasseDiagram) -> Vec<(String, String)> {
        let mut arcs: Vec<(String, String)> = h
            .arcs()
            .iter()
            .map(|&(a, b)| (h.balls()[a].names(space).concat(), h.balls()[b].names(space).concat()))
            .collect();
        arcs.sort();
        arcs
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            ball_names(&x3()),
            sets(&[&["p"], &["q"], &["r"], &["q", "r"], &["p", "q", "r"]])
        );
        assert_eq!(
            ball_names(&s3()),
            sets(&[&["a"], &["b"], &["c"], &["a", "b"], &["b", "c"], &["a", "b", "c"]])
        );
        assert_eq!(ball_names(&one_point()), sets(&[&["p"]]));
    }

    #[test]
    fn hasse_examples() {
        let h = hasse_diagram(&enumerate_balls(&x3()));
        let expected: Vec<(String, String)> = [("p", "pqr"), ("q", "qr"), ("qr", "pqr"), ("r", "qr")]
            .iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(named_arcs(&x3(), &h), expected);
        assert!(h.reversed_tree_root().is_some());

        let h = hasse_diagram(&enumerate_balls(&s3()));
        let expected: Vec<(String, String)> = [
            ("a", "ab"),
            ("ab", "abc"),
            ("b", "ab"),
            ("b", "bc"),
            ("bc", "abc"),
            ("c", "bc"),
        ]
        .iter()
        .map(|&(a, b)| (a.to_string(), b.to_string()))
        .collect();
        assert_eq!(named_arcs(&s3(), &h), expected);
        assert_eq!(h.reversed_tree_root(), None);
        let b = h.balls().iter().position(|ball| ball.names(&s3()) == ["b"]).unwrap();
        assert_eq!(h.outdegree(b), 2);

        let h = hasse_diagram(&enumerate_balls(&one_point()));
        assert_eq!((h.vertex_count(), h.arcs().len()), (1, 0));
    }

    #[test]
    fn zero_indegree_are_singletons() {
        for x in [x3(), s3(), x4(), one_point()] {
            let h = hasse_diagram(&enumerate_balls(&x));
            for v in h.zero_indegree() {
                assert_eq!(h.balls()[v].len(), 1);
            }
            assert_eq!(h.zero_indegree().len(), x.len());
        }
    }

    #[test]
    fn digraph_iso_examples() {
        let h = |x: &SemimetricSpace| hasse_diagram(&enumerate_balls(x));
        let renamed = x3().with_points(vec!["u".into(), "v".into(), "w".into()]).unwrap();
        let iso = hasse_digraph_iso(&h(&x3()), &h(&renamed)).unwrap();
        assert!(verify_digraph_iso(&h(&x3()), &h(&renamed), &iso));
        let iso = hasse_digraph_iso(&h(&x3()), &h(&y3())).unwrap();
        assert!(verify_digraph_iso(&h(&x3()), &h(&y3()), &iso));
        assert!(hasse_digraph_iso(&h(&x3()), &h(&s3())).is_none());

        // non-tree path: S3 against a renamed copy of itself
        let s3r = s3().with_points(vec!["x".into(), "y".into(), "z".into()]).unwrap();
        let iso = hasse_digraph_iso(&h(&s3()), &h(&s3r)).unwrap();
        assert!(verify_digraph_iso(&h(&s3()), &h(&s3r), &iso));
    }

    #[test]
    fn verify_ball_preserving_examples() {
        assert_eq!(
            verify_ball_preserving(&x3(), &x3(), &PointMap::identity(&x3())).unwrap(),
            None
        );

        let w = decide_weak_similarity(&x3(), &y3()).unwrap().unwrap();
        assert_eq!(verify_ball_preserving(&x3(), &y3(), &w.phi).unwrap(), None);

        let swap = PointMap::new([("p", "q"), ("q", "p"), ("r", "r")].map(|(a, b)| (a.into(), b.into())));
        assert_eq!(
            verify_ball_preserving(&x3(), &x3(), &swap).unwrap(),
            Some(BallViolation::ImageNotBall {
                ball: vec!["q".into(), "r".into()],
                image: vec!["p".into(), "r".into()],
            })
        );

        let partial = PointMap::new([("p", "q")].map(|(a, b)| (a.into(), b.into())));
        assert!(matches!(
            verify_ball_preserving(&x3(), &x3(), &partial),
            Err(Error::NotABijection(_))
        ));
    }

    #[test]
    fn ball_preserving_bijection_examples() {
        let f = ball_preserving_bijection(&x3(), &y3()).unwrap().unwrap();
        assert_eq!(verify_ball_preserving(&x3(), &y3(), &f).unwrap(), None);
        let s3_pad = space(&["a", "b", "c"], &[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]);
        assert!(ball_preserving_bijection(&x3(), &s3_pad).unwrap().is_none());
        for x in [x3(), x4(), s3(), one_point()] {
            let f = ball_preserving_bijection(&x, &x).unwrap().unwrap();
            assert_eq!(verify_ball_preserving(&x, &x, &f).unwrap(), None);
        }
    }

    #[test]
    fn ballean_json() {
        let json = enumerate_balls(&x3()).to_json(&x3());
        assert!(json.starts_with("[{\"members\":[\"p\"],\"center\":\"p\",\"radius\":\"0\"}"));
        assert!(json.contains("{\"members\":[\"q\",\"r\"],\"center\":\"q\",\"radius\":\"1\"}"));
    }
}
