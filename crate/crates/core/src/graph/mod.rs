//! Communication graphs, edge sampling and Laplacian spectra.
//!
//! Edges are stored canonically as `(i, j)` with `i < j`, sorted
//! lexicographically. Every per-edge array in the crate is indexed in this
//! order, and per-(edge, endpoint) arrays use slot `2 * e + side` where
//! `side` is 0 for `i` and 1 for `j`.

mod sampling;
mod spectral;
mod topology;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sampling::{sample_edge, EdgeDistribution, EdgeSampler};
pub use spectral::{spectral_summary, unweighted_laplacian, weighted_laplacian, SpectralSummary};
pub use topology::{build_topology, build_topology_with, realised_radius, Topology, GEOMETRIC_RETRY_CAP};

/// One end of an edge as seen from a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: usize,
    /// 0 when the node is the smaller endpoint, 1 otherwise.
    pub side: usize,
    pub neighbor: usize,
}

impl Incidence {
    /// Slot of this (edge, endpoint) pair in per-endpoint arrays.
    pub fn slot(&self) -> usize {
        2 * self.edge + self.side
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    positions: Option<Vec<[f64; 2]>>,
    incident: Vec<Vec<Incidence>>,
}

/// JSON dump format: `{n, edges: [[i, j], ...], positions?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDump {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Builds a connected simple graph from an arbitrary edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Self::from_edges_unchecked(n, edges)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Like [`Graph::from_edges`] but accepts disconnected graphs.
    pub fn from_edges_unchecked(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("empty graph".into()));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge {:?}", w[0])));
        }
        let mut degrees = vec![0; n];
        let mut incident = vec![Vec::new(); n];
        for (e, &(i, j)) in canon.iter().enumerate() {
            degrees[i] += 1;
            degrees[j] += 1;
            incident[i].push(Incidence { edge: e, side: 0, neighbor: j });
            incident[j].push(Incidence { edge: e, side: 1, neighbor: i });
        }
        Ok(Self { n, edges: canon, degrees, positions: None, incident })
    }

    pub fn with_positions(mut self, positions: Vec<[f64; 2]>) -> Self {
        assert_eq!(positions.len(), self.n);
        self.positions = Some(positions);
        self
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("cycle needs n >= 3"));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("complete graph needs n >= 2"));
        }
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("path needs n >= 2"));
        }
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Self::from_edges(n, &edges)
    }

    /// Star centred on node 0.
    pub fn star(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("star needs n >= 2"));
        }
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges)
    }

    /// Every connected simple graph on `n` labelled nodes (`n <= 6`).
    pub fn all_connected(n: usize) -> Result<Vec<Self>> {
        if !(2..=6).contains(&n) {
            return Err(Error::invalid("enumeration supports 2 <= n <= 6"));
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut out = Vec::new();
        for mask in 1u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
            let g = Self::from_edges_unchecked(n, &edges)?;
            if g.is_connected() {
                out.push(g);
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, k: usize) -> usize {
        self.degrees[k]
    }

    pub fn incident(&self, k: usize) -> &[Incidence] {
        &self.incident[k]
    }

    pub fn neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[k].iter().map(|inc| inc.neighbor)
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    /// Index of edge `{a, b}` if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(k) = stack.pop() {
            for l in self.neighbors(k) {
                if !seen[l] {
                    seen[l] = true;
                    count += 1;
                    stack.push(l);
                }
            }
        }
        count == self.n
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for start in 0..self.n {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            let mut stack = vec![start];
            while let Some(k) = stack.pop() {
                let ck = color[k].unwrap();
                for l in self.neighbors(k) {
                    match color[l] {
                        None => {
                            color[l] = Some(!ck);
                            stack.push(l);
                        }
                        Some(cl) if cl == ck => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Breadth-first spanning tree: `(order, parent)` where `parent[k]` is
    /// `Some((parent node, edge index))` for every non-root node.
    pub fn bfs_tree(&self, root: usize) -> (Vec<usize>, Vec<Option<(usize, usize)>>) {
        let mut parent = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = std::collections::VecDeque::from([root]);
        seen[root] = true;
        while let Some(k) = queue.pop_front() {
            order.push(k);
            for inc in self.incident(k) {
                if !seen[inc.neighbor] {
                    seen[inc.neighbor] = true;
                    parent[inc.neighbor] = Some((k, inc.edge));
                    queue.push_back(inc.neighbor);
                }
            }
        }
        (order, parent)
    }

    /// Relabels nodes: node `k` becomes `perm[k]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        assert_eq!(perm.len(), self.n);
        let edges: Vec<_> = self.edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        let mut g = Self::from_edges_unchecked(self.n, &edges)?;
        if let Some(pos) = &self.positions {
            let mut p = vec![[0.0; 2]; self.n];
            for (k, &v) in pos.iter().enumerate() {
                p[perm[k]] = v;
            }
            g.positions = Some(p);
        }
        Ok(g)
    }

    pub fn to_dump(&self) -> GraphDump {
        GraphDump {
            n: self.n,
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
            positions: self.positions.clone(),
        }
    }

    pub fn from_dump(dump: &GraphDump) -> Result<Self> {
        let edges: Vec<_> = dump.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Self::from_edges(dump.n, &edges)?;
        Ok(match &dump.positions {
            Some(p) if p.len() == dump.n => g.with_positions(p.clone()),
            Some(_) => return Err(Error::InvalidGraph("positions length mismatch".into())),
            None => g,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_dump())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_dump(&serde_json::from_str(s)?)
    }
}
