//! Undirected weighted graphs with unique node labels.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub label: String,
    /// Factor or cluster index used for coloring.
    pub group: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeStyle {
    #[default]
    Solid,
    Dotted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub style: EdgeStyle,
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = Graph::new();
        for l in labels {
            g.add_node(l)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> Result<usize> {
        self.add_node_in_group(label, None)
    }

    pub fn add_node_in_group(&mut self, label: impl Into<String>, group: Option<usize>) -> Result<usize> {
        let label = label.into();
        if self.index.contains_key(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        let id = self.nodes.len();
        self.index.insert(label.clone(), id);
        self.nodes.push(Node { label, group });
        Ok(id)
    }

    pub fn add_edge(&mut self, source: usize, target: usize, weight: f64, style: EdgeStyle) -> Result<()> {
        let n = self.nodes.len();
        if source >= n || target >= n {
            return Err(Error::InvalidArgument(format!(
                "edge {source}-{target} references a node outside 0..{n}"
            )));
        }
        if source == target {
            return Err(Error::InvalidArgument(format!(
                "self-loop on '{}'",
                self.nodes[source].label
            )));
        }
        if !weight.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite edge weight {weight}")));
        }
        self.edges.push(Edge {
            source,
            target,
            weight,
            style,
        });
        Ok(())
    }

    pub fn set_group(&mut self, node: usize, group: Option<usize>) {
        self.nodes[node].group = group;
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.label.as_str())
    }

    /// Neighbour lists, each in edge insertion order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        adj
    }

    /// Connected components as sorted node lists, ordered by their smallest
    /// node.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut components = Vec::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut members = Vec::new();
            while let Some(v) = queue.pop_front() {
                members.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Subgraph induced by `members`, with nodes renumbered in the given order.
    pub fn induced(&self, members: &[usize]) -> Graph {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut g = Graph::new();
        for (new, &old) in members.iter().enumerate() {
            remap[old] = new;
            let node = &self.nodes[old];
            g.index.insert(node.label.clone(), new);
            g.nodes.push(node.clone());
        }
        for e in &self.edges {
            let (s, t) = (remap[e.source], remap[e.target]);
            if s != usize::MAX && t != usize::MAX {
                g.edges.push(Edge {
                    source: s,
                    target: t,
                    ..e.clone()
                });
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges_and_duplicates() {
        let mut g = Graph::with_nodes(["a", "b"]).unwrap();
        assert!(g.add_node("a").is_err());
        assert!(g.add_edge(0, 0, 1.0, EdgeStyle::Solid).is_err());
        assert!(g.add_edge(0, 2, 1.0, EdgeStyle::Solid).is_err());
        assert!(g.add_edge(0, 1, f64::NAN, EdgeStyle::Solid).is_err());
        g.add_edge(0, 1, 0.5, EdgeStyle::Dotted).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn components_and_induced_subgraph() {
        let mut g = Graph::with_nodes(["a", "b", "c", "d", "e"]).unwrap();
        g.add_edge(0, 2, 1.0, EdgeStyle::Solid).unwrap();
        g.add_edge(3, 4, 2.0, EdgeStyle::Solid).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 2], vec![1], vec![3, 4]]);
        let sub = g.induced(&[3, 4]);
        assert_eq!(sub.labels().collect::<Vec<_>>(), ["d", "e"]);
        assert_eq!(sub.edges()[0].source, 0);
        assert_eq!(sub.find("e"), Some(1));
    }
}
