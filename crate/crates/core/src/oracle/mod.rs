//! Exact graph Steiner solvers used as ground truth and as the subproblem
//! engine of the wall pipeline.

mod boundary;
mod brute_force;
mod dreyfus_wagner;
mod gr;

pub use boundary::{solve_with_boundary, BoundarySolution, Slice};
pub use brute_force::{brute_force_all_optima, brute_force_mrst, BRUTE_FORCE_EDGE_LIMIT};
pub use dreyfus_wagner::{dreyfus_wagner, dreyfus_wagner_with_limit, DEFAULT_TERMINAL_LIMIT};
pub use gr::parse_gr;

use crate::coord::Coord;
use crate::error::Result;
use crate::grid::{build_hanan_grid, HananGrid};
use crate::points::PointSet;
use crate::tree::{RectTree, UnionFind};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    edges: Vec<(usize, usize, Coord)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    pub fn new(num_vertices: usize) -> Self {
        WeightedGraph { edges: Vec::new(), adj: vec![Vec::new(); num_vertices] }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: Coord) -> usize {
        assert!(weight >= 0, "negative edge weight");
        let id = self.edges.len();
        self.edges.push((u, v, weight));
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        id
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> (usize, usize, Coord) {
        self.edges[id]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Same vertex and edge numbering as the grid.
    pub fn from_grid(grid: &HananGrid) -> Self {
        let mut g = WeightedGraph::new(grid.num_vertices());
        for e in grid.edges() {
            g.add_edge(e.u, e.v, e.weight);
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerInstance {
    pub graph: WeightedGraph,
    /// Distinct vertex ids.
    pub terminals: Vec<usize>,
}

impl SteinerInstance {
    pub fn new(graph: WeightedGraph, terminals: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = terminals.into_iter().collect();
        SteinerInstance { graph, terminals: set.into_iter().collect() }
    }

    pub fn on_grid(grid: &HananGrid, terminals: impl IntoIterator<Item = usize>) -> Self {
        Self::new(WeightedGraph::from_grid(grid), terminals)
    }

    pub fn for_points(p: &PointSet) -> (Self, HananGrid) {
        let grid = build_hanan_grid(p);
        let inst = Self::on_grid(&grid, grid.terminal_vertices(p));
        (inst, grid)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerSolution {
    pub length: Coord,
    /// Sorted edge ids.
    pub edges: Vec<usize>,
}

impl SteinerSolution {
    pub fn into_tree(self, grid: HananGrid) -> RectTree {
        RectTree::new(grid, self.edges)
    }
}

/// Dreyfus–Wagner on the Hanan grid of `p`.
pub fn oracle_mrst(p: &PointSet) -> Result<(SteinerSolution, RectTree)> {
    let (inst, grid) = SteinerInstance::for_points(p);
    let sol = dreyfus_wagner(&inst)?;
    let tree = RectTree::new(grid, sol.edges.iter().copied());
    Ok((sol, tree))
}

/// Turns an edge set that connects the terminals into a tree: drops edges
/// closing cycles, then strips non-terminal leaves.
pub(crate) fn prune_to_tree(g: &WeightedGraph, terminals: &[usize], edges: &BTreeSet<usize>) -> SteinerSolution {
    let mut uf = UnionFind::new(g.num_vertices());
    let mut kept: BTreeSet<usize> = BTreeSet::new();
    // Cheap edges first so zero-weight cycles never cost a positive edge.
    let mut order: Vec<usize> = edges.iter().copied().collect();
    order.sort_by_key(|&e| (g.edge(e).2, e));
    for e in order {
        let (u, v, _) = g.edge(e);
        if uf.union(u, v) {
            kept.insert(e);
        }
    }
    let term: BTreeSet<usize> = terminals.iter().copied().collect();
    let mut deg = vec![0usize; g.num_vertices()];
    for &e in &kept {
        let (u, v, _) = g.edge(e);
        deg[u] += 1;
        deg[v] += 1;
    }
    loop {
        let leaf = kept.iter().copied().find(|&e| {
            let (u, v, _) = g.edge(e);
            (deg[u] == 1 && !term.contains(&u)) || (deg[v] == 1 && !term.contains(&v))
        });
        let Some(e) = leaf else { break };
        let (u, v, _) = g.edge(e);
        deg[u] -= 1;
        deg[v] -= 1;
        kept.remove(&e);
    }
    SteinerSolution { length: kept.iter().map(|&e| g.edge(e).2).sum(), edges: kept.into_iter().collect() }
}

/// True when all terminals lie in one component of the graph.
pub(crate) fn terminals_connected(g: &WeightedGraph, terminals: &[usize]) -> bool {
    let Some(&start) = terminals.first() else { return true };
    let mut seen = vec![false; g.num_vertices()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &(v, _) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    terminals.iter().all(|&t| seen[t])
}
