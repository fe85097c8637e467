//! Finite digraphs, strongly connected components, and sink equilibria.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{BinaryMatrix, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigraphError {
    #[error("edge ({from}, {to}) references a node outside 0..{node_count}")]
    EdgeOutOfRange {
        from: usize,
        to: usize,
        node_count: usize,
    },
    #[error("expected {expected} node names, got {actual}")]
    NameCountMismatch { expected: usize, actual: usize },
    #[error("adjacency matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("adjacency entry ({row}, {col}) = {value} is not 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },
}

/// Directed graph on nodes `0..node_count` with set-semantics edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    /// Sorted, deduplicated successor lists.
    successors: Vec<Vec<usize>>,
    names: Vec<String>,
}

/// SCCs in reverse topological order of the condensation: every edge between
/// two different components goes from a later component to an earlier one,
/// so sink components come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
}

/// The sink SCCs of a digraph, each as a sorted node list, ordered by their
/// smallest node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinkEquilibriumSet {
    pub components: Vec<Vec<usize>>,
}

impl SinkEquilibriumSet {
    /// Sorted union of all components.
    pub fn nodes(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.components.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    pub fn contains(&self, node: usize) -> bool {
        self.components.iter().any(|c| c.binary_search(&node).is_ok())
    }

    /// Index of the component holding `node`, if any.
    pub fn component_containing(&self, node: usize) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.binary_search(&node).is_ok())
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

impl Digraph {
    /// Edgeless digraph with names `s1..sn`.
    pub fn new(node_count: usize) -> Self {
        Digraph {
            successors: vec![Vec::new(); node_count],
            names: crate::game::default_labels(node_count),
        }
    }

    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, DigraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Digraph::new(node_count);
        for (from, to) in edges {
            if from >= node_count || to >= node_count {
                return Err(DigraphError::EdgeOutOfRange {
                    from,
                    to,
                    node_count,
                });
            }
            g.successors[from].push(to);
        }
        g.normalize();
        Ok(g)
    }

    /// Builds from pre-validated successor lists; used by the response-graph constructors.
    pub(crate) fn from_successors(successors: Vec<Vec<usize>>, names: Vec<String>) -> Self {
        debug_assert_eq!(successors.len(), names.len());
        let mut g = Digraph { successors, names };
        g.normalize();
        g
    }

    fn normalize(&mut self) {
        for list in &mut self.successors {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, DigraphError> {
        if names.len() != self.node_count() {
            return Err(DigraphError::NameCountMismatch {
                expected: self.node_count(),
                actual: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.successors.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.successors[node]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors[from].binary_search(&to).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// All edges in `(from, to)` lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |&v| (u, v)))
    }

    /// Iterative Tarjan; components come out sinks-first.
    pub fn scc_decompose(&self) -> Condensation {
        const UNVISITED: usize = usize::MAX;
        let n = self.node_count();
        let mut index = vec![UNVISITED; n];
        let mut lowlink = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut component_of = vec![UNVISITED; n];
        let mut components: Vec<Vec<usize>> = Vec::new();
        let mut next_index = 0usize;
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            index[root] = next_index;
            lowlink[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if let Some(&w) = self.successors[v].get(*pos) {
                    *pos += 1;
                    if index[w] == UNVISITED {
                        index[w] = next_index;
                        lowlink[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        lowlink[v] = lowlink[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let id = components.len();
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component_of[w] = id;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }

        Condensation {
            components,
            component_of,
        }
    }

    /// Sink SCCs (no edge leaving the component).
    pub fn sink_equilibria(&self) -> SinkEquilibriumSet {
        let cond = self.scc_decompose();
        let mut components: Vec<Vec<usize>> = cond
            .components
            .iter()
            .enumerate()
            .filter(|(id, comp)| {
                comp.iter().all(|&u| {
                    self.successors[u]
                        .iter()
                        .all(|&v| cond.component_of[v] == *id)
                })
            })
            .map(|(_, comp)| comp.clone())
            .collect();
        components.sort_unstable_by_key(|c| c[0]);
        SinkEquilibriumSet { components }
    }

    pub fn adjacency_matrix(&self) -> BinaryMatrix {
        BinaryMatrix::from_fn(self.node_count(), self.node_count(), |i, j| {
            self.has_edge(i, j)
        })
    }

    pub fn from_adjacency(m: &Matrix) -> Result<Self, DigraphError> {
        if !m.is_square() {
            return Err(DigraphError::NonSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let mut successors = vec![Vec::new(); n];
        for (i, succ) in successors.iter_mut().enumerate() {
            for j in 0..n {
                match m.get(i, j) {
                    0 => {}
                    1 => succ.push(j),
                    value => {
                        return Err(DigraphError::NonBinaryEntry {
                            row: i,
                            col: j,
                            value,
                        })
                    }
                }
            }
        }
        Ok(Digraph {
            successors,
            names: crate::game::default_labels(n),
        })
    }

    /// Graphviz DOT text. Nodes of `highlight` are filled; output depends
    /// only on the inputs.
    pub fn to_dot(&self, highlight: Option<&SinkEquilibriumSet>, options: &DotOptions) -> String {
        let mut out = String::new();
        out.push_str("digraph G {\n");
        out.push_str("  node [shape=circle];\n");
        for (i, name) in self.names.iter().enumerate() {
            let quoted = quote(name);
            if highlight.is_some_and(|h| h.contains(i)) {
                let _ = writeln!(
                    out,
                    "  {quoted} [style=filled, fillcolor=\"{}\"];",
                    options.highlight_color
                );
            } else {
                let _ = writeln!(out, "  {quoted};");
            }
        }
        for (u, v) in self.edges() {
            if options.omit_self_loops && u == v {
                continue;
            }
            let _ = writeln!(out, "  {} -> {};", quote(&self.names[u]), quote(&self.names[v]));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone)]
pub struct DotOptions {
    pub omit_self_loops: bool,
    pub highlight_color: String,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            omit_self_loops: false,
            highlight_color: "palegreen".to_string(),
        }
    }
}

fn quote(name: &str) -> String {
    let mut s = String::with_capacity(name.len() + 2);
    s.push('"');
    for c in name.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}
