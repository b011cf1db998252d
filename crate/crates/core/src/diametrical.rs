//! Diametrical graphs and their complete multipartite decomposition.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::space::SemimetricSpace;

/// Graph on the points of a space joining exactly the pairs at distance
/// `diam X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiametricalGraph {
    vertices: Vec<String>,
    adjacent: Vec<bool>,
}

impl DiametricalGraph {
    /// Builds a graph directly from an edge list over `vertices` (indices).
    pub fn from_edges(vertices: Vec<String>, edges: &[(usize, usize)]) -> Self {
        let n = vertices.len();
        let mut adjacent = vec![false; n * n];
        for &(u, v) in edges {
            if u != v {
                adjacent[u * n + v] = true;
                adjacent[v * n + u] = true;
            }
        }
        DiametricalGraph { vertices, adjacent }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacent[u * self.vertices.len() + v]
    }

    /// Edges as index pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.has_edge(u, v))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph diametrical {\n");
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]));
        for &v in &order {
            writeln!(out, "  {};", dot_id(&self.vertices[v])).unwrap();
        }
        let mut edges: Vec<(&str, &str)> = self
            .edges()
            .into_iter()
            .map(|(u, v)| {
                let (a, b) = (self.vertices[u].as_str(), self.vertices[v].as_str());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort();
        for (a, b) in edges {
            writeln!(out, "  {} -- {};", dot_id(a), dot_id(b)).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn dot_id(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Parts of a complete multipartite graph, as vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipartitePartition {
    parts: Vec<Vec<usize>>,
}

impl MultipartitePartition {
    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Vec<usize>> {
        self.parts
    }

    /// Parts with vertex names substituted.
    pub fn named_parts(&self, vertices: &[String]) -> Vec<Vec<String>> {
        self.parts
            .iter()
            .map(|p| p.iter().map(|&v| vertices[v].clone()).collect())
            .collect()
    }

    /// Edges of the complete multipartite graph on these parts (`u < v`).
    pub fn rebuild_edges(&self) -> Vec<(usize, usize)> {
        let n: usize = self.parts.iter().map(Vec::len).sum();
        let mut part_of = vec![0; n];
        for (k, p) in self.parts.iter().enumerate() {
            for &v in p {
                part_of[v] = k;
            }
        }
        (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| part_of[u] != part_of[v])
            .collect()
    }

    /// `{"parts": [["p"],["q","r"]]}` with a trailing newline.
    pub fn to_json(&self, vertices: &[String]) -> String {
        let parts = serde_json::to_string(&self.named_parts(vertices)).expect("strings serialize");
        format!("{{\"parts\": {parts}}}\n")
    }
}

pub fn diametrical_graph(space: &SemimetricSpace) -> Result<DiametricalGraph> {
    let n = space.len();
    if n < 2 {
        return Err(Error::SpaceTooSmall(n));
    }
    let top = space.spectrum().len() - 1;
    let adjacent = (0..n * n).map(|k| space.rank(k / n, k % n) == top).collect();
    Ok(DiametricalGraph {
        vertices: space.points().to_vec(),
        adjacent,
    })
}

/// Decomposes a graph into the parts of a complete multipartite structure.
///
/// Parts are the connected components of the complement graph; the result is
/// then checked edge by edge, so arbitrary graphs are handled. Members are
/// listed by name and parts are sorted by (size, smallest name).
pub fn multipartite_parts(graph: &DiametricalGraph) -> Result<MultipartitePartition> {
    let n = graph.vertices.len();
    if n < 2 {
        return Err(Error::SpaceTooSmall(n));
    }
    let mut component = vec![usize::MAX; n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = parts.len();
        component[start] = id;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for v in 0..n {
                if v != u && component[v] == usize::MAX && !graph.has_edge(u, v) {
                    component[v] = id;
                    stack.push(v);
                }
            }
        }
        parts.push(members);
    }
    if parts.len() < 2 {
        return Err(Error::NotMultipartite);
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if graph.has_edge(u, v) != (component[u] != component[v]) {
                return Err(Error::NotMultipartite);
            }
        }
    }
    let name = |v: &usize| &graph.vertices[*v];
    for p in &mut parts {
        p.sort_by(|a, b| name(a).cmp(name(b)));
    }
    parts.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| name(&a[0]).cmp(name(&b[0]))));
    Ok(MultipartitePartition { parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures::*;

    fn named(space: &SemimetricSpace, pairs: &[(usize, usize)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|&(u, v)| (space.point(u).to_string(), space.point(v).to_string()))
            .collect()
    }

    fn s(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter().map(|p| p.iter().map(|x| x.to_string()).collect()).collect()
    }

    #[test]
    fn diametrical_graph_examples() {
        let x = x3();
        let g = diametrical_graph(&x).unwrap();
        assert_eq!(
            named(&x, &g.edges()),
            vec![("p".into(), "q".into()), ("p".into(), "r".into())]
        );

        let two = space(&["u", "v"], &[&[0, 5], &[5, 0]]);
        assert_eq!(diametrical_graph(&two).unwrap().edges(), vec![(0, 1)]);

        let x = x4();
        let g = diametrical_graph(&x).unwrap();
        assert_eq!(g.edges(), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);

        assert_eq!(diametrical_graph(&one_point()), Err(Error::SpaceTooSmall(1)));
    }

    #[test]
    fn multipartite_examples() {
        let x = x3();
        let parts = multipartite_parts(&diametrical_graph(&x).unwrap()).unwrap();
        assert_eq!(parts.named_parts(x.points()), s(&[&["p"], &["q", "r"]]));
        assert_eq!(parts.to_json(x.points()), "{\"parts\": [[\"p\"],[\"q\",\"r\"]]}\n");

        let x = x4();
        let parts = multipartite_parts(&diametrical_graph(&x).unwrap()).unwrap();
        assert_eq!(parts.named_parts(x.points()), s(&[&["a", "b"], &["c", "d"]]));

        assert_eq!(
            multipartite_parts(&diametrical_graph(&s3()).unwrap()),
            Err(Error::NotMultipartite)
        );
    }

    #[test]
    fn arbitrary_graphs() {
        let v = |n: usize| (0..n).map(|i| format!("v{i}")).collect::<Vec<_>>();
        // a path on 4 vertices is not complete multipartite
        let path = DiametricalGraph::from_edges(v(4), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(multipartite_parts(&path), Err(Error::NotMultipartite));
        // K_{1,1,2}
        let g = DiametricalGraph::from_edges(v(4), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        let parts = multipartite_parts(&g).unwrap();
        assert_eq!(parts.parts(), &[vec![0], vec![1], vec![2, 3]]);
        assert_eq!(parts.rebuild_edges(), g.edges());
        // edgeless graph: complement is connected
        let empty = DiametricalGraph::from_edges(v(3), &[]);
        assert_eq!(multipartite_parts(&empty), Err(Error::NotMultipartite));
    }

    #[test]
    fn dot_lists_sorted_edges() {
        let dot = diametrical_graph(&x3()).unwrap().to_dot();
        assert_eq!(
            dot,
            "graph diametrical {\n  \"p\";\n  \"q\";\n  \"r\";\n  \"p\" -- \"q\";\n  \"p\" -- \"r\";\n}\n"
        );
    }
}
