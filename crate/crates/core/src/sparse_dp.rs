//! Sweep over the grid columns keeping, per crossing pattern of the next
//! separator, the cheapest forest left of it that realizes the pattern.

use crate::coord::{ceil_sqrt_ratio, Coord};
use crate::error::{Error, Result};
use crate::grid::{build_hanan_grid, HananGrid};
use crate::oracle::SteinerSolution;
use crate::patterns::{CrossingPattern, Slab};
use crate::points::PointSet;
use crate::tree::{tonicity, RectTree};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Separator index used for the empty patterns before the first and after
/// the last column.
pub const OUTER_SEPARATOR: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cap {
    Fixed(usize),
    /// `min(n, ceil((9k+18)(2+sqrt(delta))))` from the sparseness bound.
    Auto,
    /// Doubles the cap until the length repeats twice. Heuristic.
    Escalate,
}

#[derive(Clone, Debug)]
pub struct SparseConfig {
    pub cap: Cap,
    /// Prune with an upper bound from a cheaper run (or the rectilinear MST)
    /// and a span lower bound on the part right of each slab.
    pub branch_and_bound: bool,
    /// Skip slab subsets that leave a non-terminal leaf.
    pub prune_leaves: bool,
}

impl Default for SparseConfig {
    fn default() -> Self {
        SparseConfig { cap: Cap::Auto, branch_and_bound: true, prune_leaves: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseReport {
    pub length_units: Coord,
    pub cap_used: usize,
    pub stages: usize,
    pub max_patterns_per_stage: usize,
    pub tonicity_profile: Vec<usize>,
    /// Some separator is crossed exactly `cap_used` times with `cap_used < n`,
    /// so a larger cap might give a shorter tree.
    pub cap_reached: bool,
    pub heuristic: bool,
}

#[derive(Clone, Debug)]
pub struct SparseSolution {
    pub solution: SteinerSolution,
    pub tree: RectTree,
    pub report: SparseReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpEntry {
    pub cost: Coord,
    /// Index into the previous stage's entries.
    pub pred: usize,
    /// Chosen slab edges, local indices ascending.
    pub subset: Vec<u32>,
}

impl DpEntry {
    fn better_than(&self, other: &DpEntry) -> bool {
        (self.cost, &self.subset, self.pred) < (other.cost, &other.subset, other.pred)
    }
}

/// Finite entries only, sorted by pattern.
#[derive(Clone, Debug, Default)]
pub struct DpStage {
    pub entries: Vec<(CrossingPattern, DpEntry)>,
}

#[derive(Clone, Debug)]
pub struct DpTable {
    pub grid: HananGrid,
    /// `stages[0]` is the base; `stages[c + 1]` follows column `c`.
    pub stages: Vec<DpStage>,
}

#[derive(Clone, Debug)]
pub struct TransitionParams {
    pub cap: usize,
    pub right_separator: usize,
    pub prune_leaves: bool,
    pub bound: Option<Bound>,
}

/// Totals above `upper` are discarded. `horizontal_rest` is the x-span still
/// to be covered right of the slab and `right_terminal_ys` the sorted,
/// distinct heights of terminals in later columns.
#[derive(Clone, Debug)]
pub struct Bound {
    pub upper: Coord,
    pub horizontal_rest: Coord,
    pub right_terminal_ys: Vec<Coord>,
}

pub fn auto_cap(p: &PointSet) -> Result<usize> {
    let k = p.sparseness_k().ok_or(Error::MissingSparsenessK)? as i64;
    let b = 9 * k + 18;
    // ceil(2b + b*sqrt(delta)) = 2b + ceil(sqrt(b^2 * delta))
    let root = ceil_sqrt_ratio(b.saturating_mul(b).saturating_mul(p.delta()), p.scale());
    Ok(((2 * b + root) as usize).min(p.len()))
}

pub fn solve_sparse(p: &PointSet, cap: Cap) -> Result<SparseSolution> {
    solve_sparse_with(p, &SparseConfig { cap, ..SparseConfig::default() })
}

pub fn solve_sparse_with(p: &PointSet, config: &SparseConfig) -> Result<SparseSolution> {
    match config.cap {
        Cap::Fixed(c) => solve_fixed(p, c, config),
        Cap::Auto => solve_fixed(p, auto_cap(p)?, config),
        Cap::Escalate => {
            let mut cap = 1;
            let mut history: Vec<Coord> = Vec::new();
            loop {
                let attempt = solve_fixed(p, cap, config);
                if let Ok(sol) = &attempt {
                    history.push(sol.report.length_units);
                    let n = history.len();
                    if n >= 3 && history[n - 1] == history[n - 2] && history[n - 2] == history[n - 3] {
                        return attempt.map(mark_heuristic);
                    }
                }
                if cap >= p.len() {
                    return attempt.map(mark_heuristic);
                }
                match attempt {
                    Ok(_) | Err(Error::NoSolution) => cap = (cap * 2).min(p.len()),
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

fn mark_heuristic(mut s: SparseSolution) -> SparseSolution {
    s.report.heuristic = true;
    s
}

fn solve_fixed(p: &PointSet, cap: usize, config: &SparseConfig) -> Result<SparseSolution> {
    let grid = build_hanan_grid(p);
    // An optimum under a smaller cap is a valid tree here and usually close
    // to the final length, which keeps the tables small.
    let upper = match config.branch_and_bound {
        false => None,
        true if cap > 2 => {
            let smaller = if cap <= 6 { cap - 1 } else { cap / 2 };
            Some(solve_fixed(p, smaller, config).map_or_else(|_| mst_length(p), |s| s.report.length_units))
        }
        true => Some(mst_length(p)),
    };
    let table = match build_table(p, &grid, cap, config.prune_leaves, upper) {
        Ok(t) => t,
        // The upper bound can undercut the constrained optimum when the cap binds.
        Err(Error::NoSolution) if upper.is_some() => build_table(p, &grid, cap, config.prune_leaves, None)?,
        Err(e) => return Err(e),
    };
    let tree = reconstruct(&table)?;
    let t = tonicity(&tree, p);
    let length = tree.length();
    let report = SparseReport {
        length_units: length,
        cap_used: cap,
        stages: grid.nx(),
        max_patterns_per_stage: table.stages.iter().map(|s| s.entries.len()).max().unwrap_or(0),
        cap_reached: cap < p.len() && t.max == cap,
        tonicity_profile: t.per_separator,
        heuristic: false,
    };
    let solution = SteinerSolution { length, edges: tree.edges().to_vec() };
    Ok(SparseSolution { solution, tree, report })
}

/// Runs all stages. Fails with `NoSolution` when nothing reaches the end.
pub fn build_table(p: &PointSet, grid: &HananGrid, cap: usize, prune_leaves: bool, upper: Option<Coord>) -> Result<DpTable> {
    let base = DpStage {
        entries: vec![(CrossingPattern::empty(OUTER_SEPARATOR), DpEntry { cost: 0, pred: 0, subset: Vec::new() })],
    };
    let mut table = DpTable { grid: grid.clone(), stages: vec![base] };
    let mut distinct_sites = grid.terminal_vertices(p);
    distinct_sites.sort_unstable();
    distinct_sites.dedup();
    if distinct_sites.len() <= 1 {
        return Ok(table);
    }
    let seps = p.separators();
    let nx = grid.nx();
    let mut rows_by_col: Vec<Vec<u32>> = vec![Vec::new(); nx];
    for &v in &distinct_sites {
        let (c, r) = grid.cell(v);
        rows_by_col[c].push(r as u32);
    }
    for c in 0..nx {
        let slab = Slab::new(grid, c, rows_by_col[c].clone());
        let right_separator = if c + 1 < nx { seps[c].index } else { OUTER_SEPARATOR };
        let bound = upper.map(|u| Bound {
            upper: u,
            horizontal_rest: if c + 1 < nx { grid.xs()[nx - 1] - grid.xs()[c + 1] } else { 0 },
            right_terminal_ys: {
                let mut ys: Vec<Coord> = rows_by_col[c + 1..].iter().flatten().map(|&r| grid.ys()[r as usize]).collect();
                ys.sort_unstable();
                ys.dedup();
                ys
            },
        });
        let params = TransitionParams { cap, right_separator, prune_leaves, bound };
        let next = slab_transition(table.stages.last().unwrap(), &slab, &params);
        if next.entries.is_empty() {
            return Err(Error::NoSolution);
        }
        table.stages.push(next);
    }
    Ok(table)
}

/// Forward relaxation of every stored left pattern through every admissible
/// subset of slab edges. Subsets are decided one edge at a time, bottom row
/// first, and partial choices that leave the same frontier are merged, so
/// the work scales with the number of frontier states rather than with
/// patterns times subsets. Same minima as `for_each_extension`.
pub fn slab_transition(prev: &DpStage, slab: &Slab, params: &TransitionParams) -> DpStage {
    let grid = slab.grid;
    let ny = grid.ny();
    let last = slab.is_last();
    let mut terminal = vec![false; ny];
    for &r in &slab.terminal_rows {
        terminal[r as usize] = true;
    }
    let wv: Vec<Coord> = (0..ny.saturating_sub(1)).map(|r| grid.edge(grid.vertical_edge(slab.col, r)).weight).collect();
    let wh: Vec<Coord> = if last { Vec::new() } else { (0..ny).map(|r| grid.edge(grid.horizontal_edge(slab.col, r)).weight).collect() };
    let budget = params.bound.as_ref().map_or(Coord::MAX, |b| b.upper - b.horizontal_rest);
    let words = (2 * ny).div_ceil(64);

    let mut layer: HashMap<Frontier, Partial> = HashMap::new();
    for (pred, (left, entry)) in prev.entries.iter().enumerate() {
        if entry.cost > budget {
            continue;
        }
        let f = Frontier {
            out: Vec::new(),
            vertex: None,
            deg: 0,
            left: left.points().iter().zip(left.labels()).map(|(&r, &l)| (r, l)).collect(),
            closed: false,
        };
        relax(&mut layer, f, Partial { cost: entry.cost, bits: vec![0; words], pred });
    }
    let step = Step { ny, last, terminal: &terminal, prune_leaves: params.prune_leaves, cap: params.cap };
    for r in 0..ny {
        let mut next = HashMap::with_capacity(layer.len());
        for (f, val) in layer {
            for take_v in [false, true] {
                let mut val = val.clone();
                if take_v {
                    if r == 0 || val.cost + wv[r - 1] > budget {
                        continue;
                    }
                    val.cost += wv[r - 1];
                    set_bit(&mut val.bits, 2 * r - 1);
                }
                let Some(g) = step.enter_row(&f, r, take_v) else { continue };
                if !last && g.out.len() < params.cap && val.cost + wh[r] <= budget {
                    let mut hv = val.clone();
                    hv.cost += wh[r];
                    set_bit(&mut hv.bits, 2 * r);
                    relax(&mut next, g.clone().with_outgoing(r as u32), hv);
                }
                relax(&mut next, g.canonical(), val);
            }
        }
        layer = next;
    }

    let mut best: HashMap<CrossingPattern, DpEntry> = HashMap::new();
    let mut finals: Vec<(CrossingPattern, Partial)> = Vec::new();
    for (f, val) in layer {
        let Some(g) = step.finish(&f) else { continue };
        if let Some(b) = &params.bound {
            let rows: Vec<(Coord, u32)> = g.out.iter().map(|&(q, l)| (grid.ys()[q as usize], l)).collect();
            if val.cost + vertical_lower_bound(&rows, &b.right_terminal_ys) > b.upper - b.horizontal_rest {
                continue;
            }
        }
        let right = CrossingPattern::from_labeled(
            params.right_separator,
            g.out.iter().map(|&(q, l)| (q, l as usize)).collect(),
        );
        if right.is_noncrossing() {
            finals.push((right, val));
        }
    }
    let nv = ny.saturating_sub(1);
    for (right, val) in finals {
        let subset: Vec<u32> = (0..2 * ny)
            .filter(|&pos| get_bit(&val.bits, pos))
            .map(|pos| if pos % 2 == 1 { (pos / 2) as u32 } else { (nv + pos / 2) as u32 })
            .collect::<std::collections::BTreeSet<u32>>()
            .into_iter()
            .collect();
        let cand = DpEntry { cost: val.cost, pred: val.pred, subset };
        match best.get_mut(&right) {
            Some(cur) if !cand.better_than(cur) => {}
            Some(cur) => *cur = cand,
            None => {
                best.insert(right, cand);
            }
        }
    }
    let mut entries: Vec<_> = best.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    DpStage { entries }
}

/// What the undecided part of the slab can still see: outgoing crossings
/// already chosen below the current row, the vertex just below it, and the
/// incoming crossings at or above it, all labelled by component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Frontier {
    out: Vec<(u32, u32)>,
    vertex: Option<u32>,
    deg: u8,
    left: Vec<(u32, u32)>,
    /// Last column only: a finished component exists.
    closed: bool,
}

impl Frontier {
    fn fresh_label(&self) -> u32 {
        self.out.iter().chain(&self.left).map(|&(_, l)| l + 1).chain(self.vertex.map(|l| l + 1)).max().unwrap_or(0)
    }

    fn relabel(&mut self, from: u32, to: u32) {
        for (_, l) in self.out.iter_mut().chain(self.left.iter_mut()) {
            if *l == from {
                *l = to;
            }
        }
        if self.vertex == Some(from) {
            self.vertex = Some(to);
        }
    }

    fn with_outgoing(mut self, r: u32) -> Frontier {
        let l = match self.vertex {
            Some(l) => l,
            None => {
                let l = self.fresh_label();
                self.vertex = Some(l);
                l
            }
        };
        self.out.push((r, l));
        self.deg += 1;
        self.canonical()
    }

    fn canonical(mut self) -> Frontier {
        let mut map: Vec<(u32, u32)> = Vec::new();
        let mut rename = |l: u32| match map.iter().find(|&&(a, _)| a == l) {
            Some(&(_, b)) => b,
            None => {
                let b = map.len() as u32;
                map.push((l, b));
                b
            }
        };
        for (_, l) in self.out.iter_mut() {
            *l = rename(*l);
        }
        self.vertex = self.vertex.map(&mut rename);
        for (_, l) in self.left.iter_mut() {
            *l = rename(*l);
        }
        self
    }
}

#[derive(Clone, Debug)]
struct Partial {
    cost: Coord,
    /// Taken edges in decision order, first decision in the top bit.
    bits: Vec<u64>,
    pred: usize,
}

fn set_bit(bits: &mut [u64], pos: usize) {
    bits[pos / 64] |= 1 << (63 - pos % 64);
}

fn get_bit(bits: &[u64], pos: usize) -> bool {
    bits[pos / 64] >> (63 - pos % 64) & 1 == 1
}

fn relax(map: &mut HashMap<Frontier, Partial>, f: Frontier, val: Partial) {
    match map.get_mut(&f) {
        Some(cur) => {
            if (val.cost, &val.bits, val.pred) < (cur.cost, &cur.bits, cur.pred) {
                *cur = val;
            }
        }
        None => {
            map.insert(f, val);
        }
    }
}

struct Step<'a> {
    ny: usize,
    last: bool,
    terminal: &'a [bool],
    prune_leaves: bool,
    cap: usize,
}

impl Step<'_> {
    /// Applies the vertical edge below row `r` (if taken), retires vertex
    /// `r - 1` and makes vertex `r` current. `None` when a rule is broken.
    fn enter_row(&self, f: &Frontier, r: usize, take_v: bool) -> Option<Frontier> {
        let mut g = f.clone();
        let mut cur: Option<u32> = None;
        let mut cur_deg = 0u8;
        if g.left.first().is_some_and(|&(q, _)| q as usize == r) {
            cur = Some(g.left.remove(0).1);
            cur_deg = 1;
        }
        if take_v {
            match (g.vertex, cur) {
                (Some(a), Some(b)) if a == b => return None,
                (Some(a), Some(b)) => {
                    g.relabel(b, a);
                    cur = Some(a);
                }
                (Some(a), None) => cur = Some(a),
                (None, Some(b)) => g.vertex = Some(b),
                (None, None) => {
                    let l = g.fresh_label();
                    g.vertex = Some(l);
                    cur = Some(l);
                }
            }
            g.deg += 1;
            cur_deg += 1;
        }
        if r > 0 && !self.retire(&mut g, r - 1, take_v, cur) {
            return None;
        }
        g.vertex = cur;
        g.deg = cur_deg;
        Some(g)
    }

    /// Final checks after the top row; the frontier then holds only the
    /// outgoing crossings.
    fn finish(&self, f: &Frontier) -> Option<Frontier> {
        let mut g = f.clone();
        if !self.retire(&mut g, self.ny - 1, false, None) {
            return None;
        }
        g.vertex = None;
        g.deg = 0;
        if self.last && !g.closed {
            return None;
        }
        debug_assert!(g.out.len() <= self.cap);
        Some(g.canonical())
    }

    /// Vertex `q` gets no more edges. `above` is the label of vertex `q + 1`.
    fn retire(&self, g: &mut Frontier, q: usize, joined_above: bool, above: Option<u32>) -> bool {
        let Some(a) = g.vertex else { return !self.terminal[q] };
        if g.closed {
            return false;
        }
        if g.deg == 1 && !self.terminal[q] && self.prune_leaves {
            return false;
        }
        if joined_above || above == Some(a) || g.left.iter().any(|&(_, l)| l == a) {
            return true;
        }
        // The component of q is complete.
        if self.last {
            if above.is_some() || !g.left.is_empty() {
                return false;
            }
            g.closed = true;
            true
        } else {
            g.out.iter().any(|&(_, l)| l == a)
        }
    }
}

/// Calls `emit(right pattern, slab cost, sorted subset)` for every subset of
/// slab edges that is acyclic together with the left parts, covers the
/// column's terminals, strands no component, respects the cap and costs at
/// most `budget`.
pub fn for_each_extension(
    left: &CrossingPattern,
    slab: &Slab,
    params: &TransitionParams,
    budget: Coord,
    mut emit: impl FnMut(CrossingPattern, Coord, &[u32]),
) {
    let grid = slab.grid;
    let ny = grid.ny();
    let last = slab.is_last();
    let mut terminal = vec![false; ny];
    for &r in &slab.terminal_rows {
        terminal[r as usize] = true;
    }
    let mut uf: Vec<u32> = (0..ny as u32).collect();
    let mut deg = vec![0u8; ny];
    let mut first_of_part: HashMap<u32, usize> = HashMap::new();
    for (&r, &l) in left.points().iter().zip(left.labels()) {
        deg[r as usize] = 1;
        if let Some(&f) = first_of_part.get(&l) {
            union(&mut uf, f, r as usize);
        } else {
            first_of_part.insert(l, r as usize);
        }
    }
    let mut dfs = Dfs {
        ny,
        last,
        terminal,
        wv: (0..ny.saturating_sub(1)).map(|r| grid.edge(grid.vertical_edge(slab.col, r)).weight).collect(),
        wh: if last { Vec::new() } else { (0..ny).map(|r| grid.edge(grid.horizontal_edge(slab.col, r)).weight).collect() },
        ys: grid.ys(),
        params,
        budget,
        deg,
        chosen: Vec::new(),
        out: Vec::new(),
        cost: 0,
        emit: &mut emit,
    };
    dfs.row(0, uf.as_mut_slice());
}

struct Dfs<'a, F> {
    ny: usize,
    last: bool,
    terminal: Vec<bool>,
    wv: Vec<Coord>,
    wh: Vec<Coord>,
    ys: &'a [Coord],
    params: &'a TransitionParams,
    budget: Coord,
    deg: Vec<u8>,
    chosen: Vec<u32>,
    out: Vec<usize>,
    cost: Coord,
    emit: &'a mut F,
}

impl<F: FnMut(CrossingPattern, Coord, &[u32])> Dfs<'_, F> {
    fn row(&mut self, r: usize, uf: &mut [u32]) {
        if r == self.ny {
            if self.ny > 0 && !self.finalize(self.ny - 1, uf) {
                return;
            }
            self.finish(uf);
            return;
        }
        // Vertical edge (r-1, r), then the vertex r-1 is complete.
        for take_v in [false, true] {
            if take_v && (r == 0 || self.cost + self.wv[r - 1] > self.budget) {
                continue;
            }
            let mut next = uf.to_vec();
            if take_v {
                if !union(&mut next, r - 1, r) {
                    continue;
                }
                self.deg[r - 1] += 1;
                self.deg[r] += 1;
                self.chosen.push((r - 1) as u32);
                self.cost += self.wv[r - 1];
            }
            if r == 0 || self.finalize(r - 1, &mut next) {
                self.horizontal(r, &mut next);
            }
            if take_v {
                self.deg[r - 1] -= 1;
                self.deg[r] -= 1;
                self.chosen.pop();
                self.cost -= self.wv[r - 1];
            }
        }
    }

    fn horizontal(&mut self, r: usize, uf: &mut [u32]) {
        self.row(r + 1, uf);
        if self.last || self.out.len() >= self.params.cap || self.cost + self.wh[r] > self.budget {
            return;
        }
        self.deg[r] += 1;
        self.chosen.push((self.ny - 1 + r) as u32);
        self.out.push(r);
        self.cost += self.wh[r];
        self.row(r + 1, uf);
        self.deg[r] -= 1;
        self.chosen.pop();
        self.out.pop();
        self.cost -= self.wh[r];
    }

    /// Checks vertex `q` once all its incident slab edges are decided.
    fn finalize(&self, q: usize, uf: &mut [u32]) -> bool {
        let d = self.deg[q];
        if d == 0 {
            return !self.terminal[q];
        }
        if d == 1 && !self.terminal[q] && self.params.prune_leaves {
            return false;
        }
        let root = find(uf, q);
        if (q + 1..self.ny).any(|s| find(uf, s) == root) {
            return true;
        }
        // Component of q cannot grow any more.
        if self.last {
            (0..q).filter(|&s| self.deg[s] > 0).all(|s| find(uf, s) == root)
        } else {
            self.out.iter().any(|&s| find(uf, s) == root)
        }
    }

    fn finish(&mut self, uf: &mut [u32]) {
        if let Some(b) = &self.params.bound {
            let vertical = b
                .right_terminal_ys
                .iter()
                .map(|&y| self.out.iter().map(|&q| (y - self.ys[q]).abs()).min().unwrap_or(0))
                .max()
                .unwrap_or(0);
            if self.cost + vertical > self.budget {
                return;
            }
        }
        let pairs = self.out.iter().map(|&q| (q as u32, find(uf, q) as usize)).collect();
        let right = CrossingPattern::from_labeled(self.params.right_separator, pairs);
        if !right.is_noncrossing() {
            return;
        }
        let mut subset = self.chosen.clone();
        subset.sort_unstable();
        (self.emit)(right, self.cost, &subset);
    }
}

fn find(uf: &mut [u32], mut v: usize) -> usize {
    while uf[v] as usize != v {
        let up = uf[uf[v] as usize];
        uf[v] = up;
        v = up as usize;
    }
    v
}

fn union(uf: &mut [u32], a: usize, b: usize) -> bool {
    let (ra, rb) = (find(uf, a), find(uf, b));
    if ra == rb {
        return false;
    }
    let (lo, hi) = (ra.min(rb), ra.max(rb));
    uf[hi] = lo as u32;
    true
}

/// Lower bound on the vertical length of any forest right of a separator
/// that joins the given crossings (height, part label; ascending heights)
/// and reaches the terminals at `terminal_ys` (sorted). The vertical
/// projection of such a forest has to reach every terminal from some
/// crossing and fully cover enough gaps between crossings to join all
/// parts; the cheapest choice of gaps is a spanning tree over the parts.
pub fn vertical_lower_bound(crossings: &[(Coord, u32)], terminal_ys: &[Coord]) -> Coord {
    let (Some(&(bottom, _)), Some(&(top, _))) = (crossings.first(), crossings.last()) else {
        return if terminal_ys.is_empty() { 0 } else { Coord::MAX / 4 };
    };
    let mut total = 0;
    if let (Some(&lo), Some(&hi)) = (terminal_ys.first(), terminal_ys.last()) {
        total += (hi - top).max(0) + (bottom - lo).max(0);
    }
    let mut gaps: Vec<(Coord, u32, u32)> = Vec::with_capacity(crossings.len());
    let mut t = terminal_ys.partition_point(|&y| y <= bottom);
    for w in crossings.windows(2) {
        let ((lo, a), (hi, b)) = (w[0], w[1]);
        // Leave the widest stretch between consecutive heights uncovered.
        let mut widest = 0;
        let mut prev = lo;
        while t < terminal_ys.len() && terminal_ys[t] < hi {
            widest = widest.max(terminal_ys[t] - prev);
            prev = terminal_ys[t];
            t += 1;
        }
        widest = widest.max(hi - prev);
        let partial = (hi - lo) - widest;
        total += partial;
        gaps.push((hi - lo - partial, a, b));
    }
    gaps.sort_unstable();
    let parts = crossings.iter().map(|&(_, l)| l as usize + 1).max().unwrap_or(0);
    let mut uf: Vec<u32> = (0..parts as u32).collect();
    for (extra, a, b) in gaps {
        if union(&mut uf, a as usize, b as usize) {
            total += extra;
        }
    }
    total
}

/// Walks the backpointers from the final empty pattern.
pub fn reconstruct(table: &DpTable) -> Result<RectTree> {
    let grid = &table.grid;
    let last = table.stages.len() - 1;
    let Some((pat, entry)) = table.stages[last].entries.first() else { return Err(Error::NoSolution) };
    if !pat.is_empty() || table.stages[last].entries.len() != 1 {
        return Err(Error::NoSolution);
    }
    let mut edges = Vec::new();
    let mut entry = entry;
    for c in (0..last).rev() {
        let slab_edges = Slab::new(grid, c, Vec::new()).edges();
        edges.extend(entry.subset.iter().map(|&l| slab_edges[l as usize]));
        entry = &table.stages[c].entries[entry.pred].1;
    }
    Ok(RectTree::new(grid.clone(), edges))
}

/// Rectilinear minimum spanning tree length over the distinct sites.
pub fn mst_length(p: &PointSet) -> Coord {
    let mut pts = p.points().to_vec();
    pts.dedup();
    let n = pts.len();
    if n <= 1 {
        return 0;
    }
    let mut dist = vec![Coord::MAX; n];
    let mut done = vec![false; n];
    dist[0] = 0;
    let mut total = 0;
    for _ in 0..n {
        let u = (0..n).filter(|&i| !done[i]).min_by_key(|&i| dist[i]).unwrap();
        done[u] = true;
        total += dist[u];
        for v in 0..n {
            if !done[v] {
                let d = (pts[u].x - pts[v].x).abs() + (pts[u].y - pts[v].y).abs();
                dist[v] = dist[v].min(d);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_mrst, dreyfus_wagner, oracle_mrst, SteinerInstance};
    use crate::patterns::{compose_across_slab, enumerate_viable_patterns};
    use crate::points::Point;
    use crate::tree::validate_steiner_tree;
    use std::collections::BTreeMap;

    fn ps(pts: &[(i64, i64)], delta: i64) -> PointSet {
        PointSet::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), delta, 1).unwrap()
    }

    fn exhaustive(left: &CrossingPattern, slab: &Slab, cap: usize) -> BTreeMap<CrossingPattern, Coord> {
        let m = slab.edges().len();
        let mut out = BTreeMap::new();
        for mask in 0u32..(1 << m) {
            let subset: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let o = compose_across_slab(left, slab, &subset, 7);
            if o.feasible && o.acyclic && o.right.len() <= cap {
                let cost: Coord = subset.iter().map(|&l| slab.local_weight(l)).sum();
                let e = out.entry(o.right).or_insert(cost);
                *e = (*e).min(cost);
            }
        }
        out
    }

    fn dfs_map(left: &CrossingPattern, slab: &Slab, cap: usize, prune_leaves: bool) -> BTreeMap<CrossingPattern, Coord> {
        let params = TransitionParams { cap, right_separator: 7, prune_leaves, bound: None };
        let mut out = BTreeMap::new();
        for_each_extension(left, slab, &params, Coord::MAX, |right, cost, subset| {
            let w: Coord = subset.iter().map(|&l| slab.local_weight(l as usize)).sum();
            assert_eq!(w, cost);
            let e = out.entry(right).or_insert(cost);
            *e = (*e).min(cost);
        });
        out
    }

    fn frontier_map(left: &CrossingPattern, slab: &Slab, cap: usize, prune_leaves: bool) -> BTreeMap<CrossingPattern, Coord> {
        let params = TransitionParams { cap, right_separator: 7, prune_leaves, bound: None };
        let stage = DpStage { entries: vec![(left.clone(), DpEntry { cost: 0, pred: 0, subset: Vec::new() })] };
        slab_transition(&stage, slab, &params)
            .entries
            .into_iter()
            .map(|(pat, e)| {
                let w: Coord = e.subset.iter().map(|&l| slab.local_weight(l as usize)).sum();
                assert_eq!(w, e.cost);
                (pat, e.cost)
            })
            .collect()
    }

    #[test]
    fn frontier_agrees_with_subset_enumeration() {
        let sets: &[&[(i64, i64)]] = &[
            &[(0, 0), (0, 1), (1, 0), (2, 1)],
            &[(0, 0), (0, 1), (0, 2), (1, 0), (2, 2), (2, 1)],
            &[(0, 0), (0, 3), (1, 1), (1, 2), (2, 0), (2, 3), (3, 2)],
        ];
        for pts in sets {
            let p = ps(pts, 3);
            let grid = build_hanan_grid(&p);
            for col in 0..grid.nx() {
                let rows: Vec<u32> = p.points().iter().filter(|q| grid.col_of(q.x) == Some(col)).map(|q| grid.row_of(q.y).unwrap() as u32).collect();
                let slab = Slab::new(&grid, col, rows);
                for left in enumerate_viable_patterns(&grid, 0, grid.ny()) {
                    for cap in [1, 2, grid.ny()] {
                        let reference = exhaustive(&left, &slab, cap);
                        assert_eq!(frontier_map(&left, &slab, cap, false), reference, "col {col} cap {cap} {left:?}");
                        assert_eq!(frontier_map(&left, &slab, cap, true), dfs_map(&left, &slab, cap, true));
                    }
                }
            }
        }
    }

    #[test]
    fn two_points_cap_one() {
        let p = ps(&[(0, 0), (3, 2)], 2);
        let s = solve_sparse(&p, Cap::Fixed(1)).unwrap();
        assert_eq!(s.report.length_units, 5);
        assert_eq!(s.tree.edges().len(), 2);
        assert!(validate_steiner_tree(&s.tree, &p).unwrap().is_valid());
    }

    #[test]
    fn three_points_match_brute_force() {
        let p = ps(&[(0, 0), (2, 3), (5, 1)], 3);
        let s = solve_sparse(&p, Cap::Fixed(3)).unwrap();
        let (inst, _) = SteinerInstance::for_points(&p);
        assert_eq!(s.report.length_units, brute_force_mrst(&inst).unwrap().length);
        assert_eq!(s.report.length_units, 8);
    }

    #[test]
    fn four_edge_slab_matches_all_subsets() {
        // Two rows, middle column: one vertical edge plus two outgoing
        // horizontals, with a terminal at the bottom.
        let p = ps(&[(0, 0), (0, 1), (1, 0), (2, 1)], 1);
        let grid = build_hanan_grid(&p);
        let slab = Slab::new(&grid, 1, vec![0]);
        assert_eq!(slab.edges().len(), 3);
        for left in enumerate_viable_patterns(&grid, 0, 2) {
            assert_eq!(dfs_map(&left, &slab, 2, false), exhaustive(&left, &slab, 2), "{left:?}");
        }
        // Three rows on the last column: 2 vertical edges, plus a wider case.
        let p = ps(&[(0, 0), (0, 1), (0, 2), (1, 0), (2, 2), (2, 1)], 2);
        let grid = build_hanan_grid(&p);
        for col in 0..3 {
            let rows: Vec<u32> = p.points().iter().filter(|q| grid.col_of(q.x) == Some(col)).map(|q| grid.row_of(q.y).unwrap() as u32).collect();
            let slab = Slab::new(&grid, col, rows);
            for left in enumerate_viable_patterns(&grid, 0, 3) {
                for cap in 0..=3 {
                    assert_eq!(dfs_map(&left, &slab, cap, false), exhaustive(&left, &slab, cap), "col {col} {left:?}");
                }
            }
        }
    }

    #[test]
    fn empty_slab_carries_nothing() {
        let p = ps(&[(0, 0), (1, 0)], 1);
        let grid = build_hanan_grid(&p);
        let slab = Slab::new(&grid, 0, Vec::new());
        let m = dfs_map(&CrossingPattern::empty(0), &slab, 1, true);
        assert_eq!(m.get(&CrossingPattern::empty(7)), Some(&0));
        // A terminal that nothing touches is rejected.
        let slab = Slab::new(&grid, 0, vec![0]);
        assert!(!dfs_map(&CrossingPattern::empty(0), &slab, 1, true).contains_key(&CrossingPattern::empty(7)));
    }

    #[test]
    fn leaf_pruning_keeps_minima() {
        let p = ps(&[(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)], 2);
        let grid = build_hanan_grid(&p);
        let slab = Slab::new(&grid, 1, vec![1]);
        for left in enumerate_viable_patterns(&grid, 1, 3) {
            let full = dfs_map(&left, &slab, 3, false);
            for (pat, cost) in dfs_map(&left, &slab, 3, true) {
                assert!(full[&pat] <= cost);
            }
        }
    }

    #[test]
    fn matches_oracle_on_small_instances() {
        let cases: &[&[(i64, i64)]] = &[
            &[(0, 0), (1, 2), (2, 0), (2, 1), (2, 3), (2, 4)],
            &[(0, 1), (1, 0), (1, 2), (2, 1)],
            &[(0, 0), (0, 3), (2, 1), (3, 3), (5, 0), (6, 2)],
            &[(0, 2), (1, 0), (1, 4), (3, 1), (4, 3), (6, 2), (7, 0)],
        ];
        for pts in cases {
            let p = ps(pts, 4);
            let (oracle, _) = oracle_mrst(&p).unwrap();
            for bnb in [false, true] {
                let cfg = SparseConfig { cap: Cap::Fixed(p.len()), branch_and_bound: bnb, prune_leaves: true };
                let s = solve_sparse_with(&p, &cfg).unwrap();
                assert_eq!(s.report.length_units, oracle.length, "{pts:?}");
                assert!(validate_steiner_tree(&s.tree, &p).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn cap_is_monotone() {
        let p = ps(&[(0, 0), (1, 2), (2, 0), (2, 1), (2, 3), (2, 4)], 4);
        let lens: Vec<Option<Coord>> = (0..=6).map(|c| solve_sparse(&p, Cap::Fixed(c)).ok().map(|s| s.report.length_units)).collect();
        assert_eq!(lens[0], None);
        for w in lens.windows(2) {
            if let (Some(a), Some(b)) = (w[0], w[1]) {
                assert!(a >= b);
            }
        }
        let (oracle, _) = oracle_mrst(&p).unwrap();
        assert_eq!(lens[6], Some(oracle.length));
    }

    #[test]
    fn auto_cap_needs_k() {
        let p = ps(&[(0, 0), (3, 2)], 4);
        assert_eq!(solve_sparse(&p, Cap::Auto).err(), Some(Error::MissingSparsenessK));
        // (9+18)(2+2) = 108, clipped to n.
        let p = p.with_sparseness_k(Some(1));
        assert_eq!(auto_cap(&p).unwrap(), 2);
        let s = solve_sparse(&p, Cap::Auto).unwrap();
        assert_eq!(s.report.cap_used, 2);
    }

    #[test]
    fn auto_cap_formula() {
        let big: Vec<Point> = (0..500).map(|i| Point::new(i, 0)).collect();
        let p = PointSet::new(big, 4, 1).unwrap().with_sparseness_k(Some(2));
        assert_eq!(auto_cap(&p).unwrap(), 36 * 4);
    }

    #[test]
    fn escalation_is_flagged() {
        let p = ps(&[(0, 0), (1, 2), (2, 0), (2, 1), (2, 3), (2, 4)], 4);
        let s = solve_sparse(&p, Cap::Escalate).unwrap();
        assert!(s.report.heuristic);
        let (oracle, _) = oracle_mrst(&p).unwrap();
        assert_eq!(s.report.length_units, oracle.length);
    }

    #[test]
    fn single_site_is_empty() {
        let p = ps(&[(1, 1), (1, 1)], 2);
        let s = solve_sparse(&p, Cap::Fixed(1)).unwrap();
        assert_eq!(s.report.length_units, 0);
        let p = ps(&[(0, 0), (0, 2)], 2);
        let s = solve_sparse(&p, Cap::Fixed(0)).unwrap();
        assert_eq!(s.report.length_units, 2);
    }

    #[test]
    fn deterministic_reconstruction() {
        let p = ps(&[(0, 0), (1, 1), (2, 0), (3, 1)], 1);
        let a = solve_sparse(&p, Cap::Fixed(4)).unwrap();
        let b = solve_sparse(&p, Cap::Fixed(4)).unwrap();
        assert_eq!(a.tree.edges(), b.tree.edges());
        let (inst, _) = SteinerInstance::for_points(&p);
        assert_eq!(a.report.length_units, dreyfus_wagner(&inst).unwrap().length);
    }

    #[test]
    fn vertical_bound_examples() {
        // One part, terminals outside the crossing span.
        assert_eq!(vertical_lower_bound(&[(2, 0), (4, 0)], &[0, 7]), 2 + 3);
        // Two parts must be joined across the gap.
        assert_eq!(vertical_lower_bound(&[(2, 0), (4, 1)], &[]), 2);
        // Terminal inside the gap: covering it from below or above.
        assert_eq!(vertical_lower_bound(&[(0, 0), (10, 0)], &[3]), 3);
        assert_eq!(vertical_lower_bound(&[(0, 0), (10, 0)], &[3, 8]), 5);
        // Joining the parts also serves the terminal inside.
        assert_eq!(vertical_lower_bound(&[(0, 0), (10, 1)], &[3, 8]), 10);
        // Nested parts {0, 2} and {1}: the cheaper gap joins them.
        assert_eq!(vertical_lower_bound(&[(0, 0), (5, 1), (6, 0)], &[]), 1);
        assert_eq!(vertical_lower_bound(&[], &[1]), Coord::MAX / 4);
        assert_eq!(vertical_lower_bound(&[], &[]), 0);
    }

    #[test]
    fn mst_bounds_the_tree() {
        let p = ps(&[(0, 1), (1, 0), (1, 2), (2, 1)], 2);
        assert_eq!(mst_length(&p), 6);
    }
}
