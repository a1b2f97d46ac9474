use std::collections::BTreeSet;

use super::causal::CausalModel;
use super::value::Value;
use crate::error::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    /// Edge `X -> Y` when `X` occurs in `Y`'s equation.
    Syntactic,
    /// Edge `X -> Y` when some setting of the other inputs of `Y`'s equation
    /// makes its value depend on `X`.
    Semantic,
}

/// Directed graph over a list of named nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    pub fn new(nodes: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        DependencyGraph {
            nodes,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Edges as `(from, to)` node indices, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn named_edges(&self) -> Vec<(&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(a), Some(b)) => self.edges.contains(&(a, b)),
            _ => false,
        }
    }

    pub fn parents(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| e.1 == node)
            .map(|e| e.0)
            .collect()
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| e.0 == node)
            .map(|e| e.1)
            .collect()
    }

    /// Induced subgraph on `keep`, in the order given.
    pub fn restrict(&self, keep: &[String]) -> DependencyGraph {
        let map: Vec<Option<usize>> = self
            .nodes
            .iter()
            .map(|n| keep.iter().position(|k| k == n))
            .collect();
        DependencyGraph {
            nodes: keep.to_vec(),
            edges: self
                .edges
                .iter()
                .filter_map(|&(a, b)| Some((map[a]?, map[b]?)))
                .collect(),
        }
    }

    /// Every edge of `self` is an edge of `other` (compared by name).
    pub fn is_subgraph_of(&self, other: &DependencyGraph) -> bool {
        self.named_edges()
            .into_iter()
            .all(|(a, b)| other.has_edge(a, b))
    }
}

impl CausalModel {
    /// Dependency graph over the endogenous variables of the current
    /// signature. Semantic mode enumerates, per edge, every setting of the
    /// other inputs of the target equation.
    pub fn dependency_graph(
        &self,
        mode: GraphMode,
        limit: u64,
    ) -> Result<DependencyGraph, EngineError> {
        let k = self.num_exogenous();
        let live: Vec<usize> = (0..self.num_endogenous())
            .filter(|&j| self.node(j).is_some())
            .collect();
        let pos = |j: usize| live.iter().position(|&l| l == j);
        let mut edges = Vec::new();
        for (to, &j) in live.iter().enumerate() {
            let support = self.support(j);
            for &i in &support {
                let Some(from) = i.checked_sub(k).and_then(pos) else {
                    continue;
                };
                if mode == GraphMode::Syntactic || self.depends_on(j, i, &support, limit)? {
                    edges.push((from, to));
                }
            }
        }
        let nodes = live.iter().map(|&j| self.endo_name(j).to_string()).collect();
        Ok(DependencyGraph::new(nodes, edges))
    }

    fn depends_on(
        &self,
        j: usize,
        x: usize,
        support: &[usize],
        limit: u64,
    ) -> Result<bool, EngineError> {
        let sig = self.full_signature();
        let others: Vec<usize> = support.iter().copied().filter(|&i| i != x).collect();
        let ranges: Vec<&[Value]> = others.iter().map(|&i| sig.range(i).values()).collect();
        let size = ranges.iter().map(|r| r.len() as u128).product::<u128>()
            * sig.range(x).len() as u128;
        if size > limit as u128 {
            return Err(EngineError::SearchSpaceExceeded {
                what: format!(
                    "dependency of `{}` on `{}`",
                    self.endo_name(j),
                    sig.name(x)
                ),
                size,
                limit,
            });
        }
        let node = self.node(j).expect("live variable has an equation");
        let mut env = vec![Value::Bot; sig.len()];
        let mut found = false;
        crate::engines::for_each_product(&ranges, |vals| {
            for (&i, v) in others.iter().zip(vals) {
                env[i] = (*v).clone();
            }
            let mut first = None;
            for v in sig.range(x).values() {
                env[x] = v.clone();
                let out = node.value(&env);
                match &first {
                    None => first = Some(out),
                    Some(f) if *f != out => {
                        found = true;
                        return false;
                    }
                    Some(_) => {}
                }
            }
            true
        });
        Ok(found)
    }
}
