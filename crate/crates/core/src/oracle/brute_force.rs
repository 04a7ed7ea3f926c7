use super::{SteinerInstance, SteinerSolution, WeightedGraph};
use crate::coord::Coord;
use crate::error::{Error, Result};

pub const BRUTE_FORCE_EDGE_LIMIT: usize = 26;

/// Scans every edge subset (include-first depth-first order) and keeps the
/// first minimum that is connected, acyclic and spans the terminals.
/// Subsets that already contain a cycle or already exceed the best length
/// are cut off, which skips no candidate.
pub fn brute_force_mrst(inst: &SteinerInstance) -> Result<SteinerSolution> {
    let (length, mut all) = search(inst, false)?;
    Ok(SteinerSolution { length, edges: all.swap_remove(0) })
}

/// Every minimum-length tree, as sorted edge lists.
pub fn brute_force_all_optima(inst: &SteinerInstance) -> Result<(Coord, Vec<Vec<usize>>)> {
    search(inst, true)
}

struct Search<'a> {
    g: &'a WeightedGraph,
    terminals: &'a [usize],
    parent: Vec<usize>,
    size: Vec<usize>,
    chosen: Vec<usize>,
    best: Coord,
    found: Vec<Vec<usize>>,
    keep_ties: bool,
}

fn search(inst: &SteinerInstance, keep_ties: bool) -> Result<(Coord, Vec<Vec<usize>>)> {
    let g = &inst.graph;
    if g.num_edges() > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::TooManyEdges { got: g.num_edges(), limit: BRUTE_FORCE_EDGE_LIMIT });
    }
    if inst.terminals.is_empty() {
        return Err(Error::InvalidInput("no terminals".into()));
    }
    let n = g.num_vertices();
    let mut s = Search {
        g,
        terminals: &inst.terminals,
        parent: (0..n).collect(),
        size: vec![1; n],
        chosen: Vec::new(),
        best: Coord::MAX,
        found: Vec::new(),
        keep_ties,
    };
    s.dfs(0, 0);
    if s.found.is_empty() {
        return Err(Error::DisconnectedGrid);
    }
    Ok((s.best, s.found))
}

impl Search<'_> {
    fn root(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn dfs(&mut self, e: usize, len: Coord) {
        if len > self.best || (len == self.best && !self.keep_ties) {
            return;
        }
        if e == self.g.num_edges() {
            self.leaf(len);
            return;
        }
        let (u, v, w) = self.g.edge(e);
        let (ru, rv) = (self.root(u), self.root(v));
        if ru != rv {
            let (big, small) = if self.size[ru] >= self.size[rv] { (ru, rv) } else { (rv, ru) };
            self.parent[small] = big;
            self.size[big] += self.size[small];
            self.chosen.push(e);
            self.dfs(e + 1, len + w);
            self.chosen.pop();
            self.size[big] -= self.size[small];
            self.parent[small] = small;
        }
        self.dfs(e + 1, len);
    }

    fn leaf(&mut self, len: Coord) {
        let r = self.root(self.terminals[0]);
        if self.terminals.iter().any(|&t| self.root(t) != r) {
            return;
        }
        let connected = self.chosen.iter().all(|&e| self.root(self.g.edge(e).0) == r);
        if !connected {
            return;
        }
        if len < self.best {
            self.best = len;
            self.found.clear();
        }
        let mut edges = self.chosen.clone();
        edges.sort_unstable();
        self.found.push(edges);
    }
}
