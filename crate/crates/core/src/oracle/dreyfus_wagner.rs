use super::{prune_to_tree, terminals_connected, SteinerInstance, SteinerSolution};
use crate::coord::Coord;
use crate::error::{Error, Result};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

pub const DEFAULT_TERMINAL_LIMIT: usize = 16;

const INF: Coord = Coord::MAX / 4;
const NONE: u32 = u32::MAX;
const MERGE: u32 = 1 << 31;

pub fn dreyfus_wagner(inst: &SteinerInstance) -> Result<SteinerSolution> {
    dreyfus_wagner_with_limit(inst, DEFAULT_TERMINAL_LIMIT)
}

/// Subset DP rooted at the last terminal: `dp[S][v]` is the cheapest tree
/// joining the terminals in `S` and vertex `v`.
pub fn dreyfus_wagner_with_limit(inst: &SteinerInstance, limit: usize) -> Result<SteinerSolution> {
    let g = &inst.graph;
    let terms = &inst.terminals;
    if terms.is_empty() {
        return Err(Error::InvalidInput("no terminals".into()));
    }
    if terms.len() > limit {
        return Err(Error::TooManyTerminals { got: terms.len(), limit });
    }
    if !terminals_connected(g, terms) {
        return Err(Error::DisconnectedGrid);
    }
    if terms.len() == 1 {
        return Ok(SteinerSolution { length: 0, edges: Vec::new() });
    }
    let n = g.num_vertices();
    let m = terms.len() - 1;
    let full = (1usize << m) - 1;
    let mut dp = vec![INF; (full + 1) * n];
    let mut bp = vec![NONE; (full + 1) * n];

    for (i, &t) in terms[..m].iter().enumerate() {
        let s = 1 << i;
        dp[s * n + t] = 0;
        dijkstra(g, &mut dp[s * n..(s + 1) * n], &mut bp[s * n..(s + 1) * n]);
    }
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        let low = s & s.wrapping_neg();
        let (head, row) = dp.split_at_mut(s * n);
        let row = &mut row[..n];
        let brow = &mut bp[s * n..(s + 1) * n];
        let mut a = (s - 1) & s;
        while a > 0 {
            if a & low != 0 {
                let (ra, rb) = (&head[a * n..(a + 1) * n], &head[(s ^ a) * n..((s ^ a) + 1) * n]);
                for v in 0..n {
                    let c = ra[v] + rb[v];
                    if c < row[v] {
                        row[v] = c;
                        brow[v] = MERGE | a as u32;
                    }
                }
            }
            a = (a - 1) & s;
        }
        dijkstra(g, row, brow);
    }

    let root = terms[m];
    let mut edges = BTreeSet::new();
    let mut stack = vec![(full, root)];
    while let Some((s, v)) = stack.pop() {
        let b = bp[s * n + v];
        if b == NONE {
            continue;
        }
        if b & MERGE != 0 {
            let a = (b & !MERGE) as usize;
            stack.push((a, v));
            stack.push((s ^ a, v));
        } else {
            let (x, y, _) = g.edge(b as usize);
            edges.insert(b as usize);
            stack.push((s, if x == v { y } else { x }));
        }
    }
    let sol = prune_to_tree(g, terms, &edges);
    debug_assert_eq!(sol.length, dp[full * n + root]);
    Ok(sol)
}

/// Relaxes `dist` in place from every finite entry.
fn dijkstra(g: &super::WeightedGraph, dist: &mut [Coord], bp: &mut [u32]) {
    let mut heap: BinaryHeap<Reverse<(Coord, usize)>> =
        (0..dist.len()).filter(|&v| dist[v] < INF).map(|v| Reverse((dist[v], v))).collect();
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, e) in g.neighbors(u) {
            let nd = d + g.edge(e).2;
            if nd < dist[v] {
                dist[v] = nd;
                bp[v] = e as u32;
                heap.push(Reverse((nd, v)));
            }
        }
    }
}
