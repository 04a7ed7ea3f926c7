//! Crossing patterns: which Hanan rows a tree uses to cross a separator and
//! how those crossings are connected on one side of it.

use crate::coord::Coord;
use crate::error::{Error, Result};
use crate::grid::HananGrid;
use crate::points::PointSet;
use crate::tree::{RectTree, UnionFind};
use std::collections::BTreeMap;

/// Crossing rows (grid row indices, ascending) with a partition given as
/// canonical labels: parts are numbered by their lowest row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossingPattern {
    pub separator_index: usize,
    points: Vec<u32>,
    labels: Vec<u32>,
}

/// Same data; the partition records connectivity right of the separator.
pub type MirroredCrossingPattern = CrossingPattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl CrossingPattern {
    pub fn empty(separator_index: usize) -> Self {
        CrossingPattern { separator_index, points: Vec::new(), labels: Vec::new() }
    }

    /// From `(row, label)` pairs with arbitrary labels; rows must be distinct.
    pub fn from_labeled(separator_index: usize, mut pairs: Vec<(u32, usize)>) -> Self {
        pairs.sort_unstable();
        debug_assert!(pairs.windows(2).all(|w| w[0].0 != w[1].0), "duplicate crossing row");
        let mut rename: BTreeMap<usize, u32> = BTreeMap::new();
        let mut points = Vec::with_capacity(pairs.len());
        let mut labels = Vec::with_capacity(pairs.len());
        for (row, label) in pairs {
            let next = rename.len() as u32;
            labels.push(*rename.entry(label).or_insert(next));
            points.push(row);
        }
        CrossingPattern { separator_index, points, labels }
    }

    pub fn from_parts(separator_index: usize, parts: &[Vec<u32>]) -> Self {
        let pairs = parts.iter().enumerate().flat_map(|(i, part)| part.iter().map(move |&r| (r, i))).collect();
        Self::from_labeled(separator_index, pairs)
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_parts(&self) -> usize {
        self.labels.iter().max().map_or(0, |&l| l as usize + 1)
    }

    /// Parts as row lists, ordered by lowest row.
    pub fn parts(&self) -> Vec<Vec<u32>> {
        let mut parts = vec![Vec::new(); self.num_parts()];
        for (&r, &l) in self.points.iter().zip(&self.labels) {
            parts[l as usize].push(r);
        }
        parts
    }

    pub fn is_noncrossing(&self) -> bool {
        labels_noncrossing(&self.labels)
    }
}

/// Open parts must close in stack order.
fn labels_noncrossing(labels: &[u32]) -> bool {
    let mut last = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        last.insert(l, i);
    }
    let mut seen = vec![false; last.len()];
    let mut stack: Vec<u32> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if !seen[l as usize] {
            seen[l as usize] = true;
            if last[&l] > i {
                stack.push(l);
            }
        } else {
            if stack.last() != Some(&l) {
                return false;
            }
            if last[&l] == i {
                stack.pop();
            }
        }
    }
    true
}

pub fn crossing_points(grid: &HananGrid, _separator_index: usize) -> Vec<Coord> {
    grid.ys().to_vec()
}

/// All non-crossing partitions of `0..m` as canonical label vectors, in
/// lexicographic order.
pub fn enumerate_noncrossing_partitions(m: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, m: usize, labels: &mut Vec<u32>, open: &mut Vec<u32>, next: u32, out: &mut Vec<Vec<u32>>) {
        if i == m {
            out.push(labels.clone());
            return;
        }
        // Joining the block at stack depth d closes every block above it.
        for d in 0..open.len() {
            let saved = open.split_off(d + 1);
            labels.push(open[d]);
            rec(i + 1, m, labels, open, next, out);
            labels.pop();
            open.extend(saved);
        }
        open.push(next);
        labels.push(next);
        rec(i + 1, m, labels, open, next + 1, out);
        labels.pop();
        open.pop();
    }
    let mut out = Vec::new();
    rec(0, m, &mut Vec::new(), &mut Vec::new(), 0, &mut out);
    out
}

/// Patterns on the grid rows with at most `cap` points.
pub fn enumerate_viable_patterns(grid: &HananGrid, separator_index: usize, cap: usize) -> Vec<CrossingPattern> {
    viable_patterns_on_rows(grid.ny(), separator_index, cap)
}

pub fn viable_patterns_on_rows(rows: usize, separator_index: usize, cap: usize) -> Vec<CrossingPattern> {
    let mut out = Vec::new();
    for m in 0..=cap.min(rows) {
        let partitions = enumerate_noncrossing_partitions(m);
        for subset in combinations(rows, m) {
            for labels in &partitions {
                out.push(CrossingPattern { separator_index, points: subset.clone(), labels: labels.clone() });
            }
        }
    }
    out
}

fn combinations(n: usize, m: usize) -> Vec<Vec<u32>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < m - cur.len() {
                break;
            }
            cur.push(i as u32);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Crossings of `t` at separator `separator_index` of `p`, partitioned by
/// connectivity on the chosen side.
pub fn pattern_of_tree(t: &RectTree, p: &PointSet, separator_index: usize, side: Side) -> Result<CrossingPattern> {
    let pts = p.points();
    if separator_index + 1 >= pts.len() {
        return Err(Error::IndexOutOfRange { index: separator_index, n: pts.len() });
    }
    let s2 = pts[separator_index].x + pts[separator_index + 1].x;
    let grid = t.grid();
    let x2 = |v: usize| 2 * grid.vertex_point(v).x;
    let mut uf = UnionFind::new(grid.num_vertices());
    let mut crossings = Vec::new();
    for &e in t.edges() {
        let ge = grid.edge(e);
        let (a, b) = (x2(ge.u), x2(ge.v));
        if a < s2 && s2 < b {
            let (_, row) = grid.cell(ge.u);
            crossings.push((row as u32, if side == Side::Left { ge.u } else { ge.v }));
        } else if (side == Side::Left && b < s2) || (side == Side::Right && a > s2) {
            uf.union(ge.u, ge.v);
        }
    }
    let pairs = crossings.into_iter().map(|(row, v)| (row, uf.find(v))).collect();
    Ok(CrossingPattern::from_labeled(separator_index, pairs))
}

/// One column of the separator sweep: the vertical edges on grid column
/// `col` and the horizontal edges leaving it to the right. Crossings of the
/// previous separator arrive at this column.
#[derive(Clone, Debug)]
pub struct Slab<'g> {
    pub grid: &'g HananGrid,
    pub col: usize,
    /// Rows of terminals on this column.
    pub terminal_rows: Vec<u32>,
}

impl<'g> Slab<'g> {
    pub fn new(grid: &'g HananGrid, col: usize, terminal_rows: Vec<u32>) -> Self {
        Slab { grid, col, terminal_rows }
    }

    pub fn is_last(&self) -> bool {
        self.col + 1 == self.grid.nx()
    }

    /// Local edge order: vertical edges bottom-up, then outgoing horizontals.
    pub fn edges(&self) -> Vec<usize> {
        let ny = self.grid.ny();
        let mut out: Vec<usize> = (0..ny.saturating_sub(1)).map(|r| self.grid.vertical_edge(self.col, r)).collect();
        if !self.is_last() {
            out.extend((0..ny).map(|r| self.grid.horizontal_edge(self.col, r)));
        }
        out
    }

    pub fn local_weight(&self, local: usize) -> Coord {
        self.grid.edge(self.edges()[local]).weight
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlabOutcome {
    pub right: CrossingPattern,
    /// Terminals covered and no component stranded: each one continues to
    /// the right, or this is the last column and only one component exists.
    pub feasible: bool,
    pub acyclic: bool,
}

/// Pushes a left pattern through a chosen subset (local indices) of slab
/// edges. Left parts act as pre-merged super-nodes.
pub fn compose_across_slab(left: &CrossingPattern, slab: &Slab, subset: &[usize], right_separator: usize) -> SlabOutcome {
    let ny = slab.grid.ny();
    let nv = ny.saturating_sub(1);
    let parts = left.num_parts();
    // Nodes: column vertices 0..ny, then one per left part.
    let mut uf = UnionFind::new(ny + parts);
    let mut touched = vec![false; ny];
    for (&r, &l) in left.points().iter().zip(left.labels()) {
        touched[r as usize] = true;
        uf.union(ny + l as usize, r as usize);
    }
    let mut acyclic = true;
    let mut outgoing = Vec::new();
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &e in &sorted {
        if e < nv {
            touched[e] = true;
            touched[e + 1] = true;
            if !uf.union(e, e + 1) {
                acyclic = false;
            }
        } else {
            let r = e - nv;
            touched[r] = true;
            outgoing.push(r);
        }
    }
    let right = CrossingPattern::from_labeled(
        right_separator,
        outgoing.iter().map(|&r| (r as u32, uf.find(r))).collect(),
    );
    let covered = slab.terminal_rows.iter().all(|&r| touched[r as usize]);
    // Components in play: touched vertices, terminals and left parts.
    let mut live: Vec<usize> = (0..ny)
        .filter(|&r| touched[r] || slab.terminal_rows.contains(&(r as u32)))
        .chain(ny..ny + parts)
        .collect();
    for v in live.iter_mut() {
        *v = uf.find(*v);
    }
    live.sort_unstable();
    live.dedup();
    let continuing: Vec<usize> = outgoing.iter().map(|&r| uf.find(r)).collect();
    let stranded = live.iter().any(|c| !continuing.contains(c));
    let feasible = covered && if slab.is_last() { live.len() <= 1 } else { !stranded };
    SlabOutcome { right, feasible, acyclic }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_hanan_grid;
    use crate::points::Point;
    use crate::tree::Segment;

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (0..=7).map(|m| enumerate_noncrossing_partitions(m).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42, 132, 429]);
    }

    #[test]
    fn partitions_are_canonical_distinct_and_noncrossing() {
        let all = enumerate_noncrossing_partitions(6);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
        assert!(all.iter().all(|l| labels_noncrossing(l)));
    }

    #[test]
    fn crossing_detection() {
        assert!(labels_noncrossing(&[0, 0, 1, 1, 0]));
        assert!(!labels_noncrossing(&[0, 1, 0, 1]));
        assert!(labels_noncrossing(&[0, 1, 1, 0, 2, 0]));
        assert!(!labels_noncrossing(&[0, 1, 2, 1, 0, 2]));
    }

    fn five_row_grid() -> HananGrid {
        HananGrid::from_coords(vec![0, 1], (0..5).collect())
    }

    #[test]
    fn viable_counts() {
        let g = five_row_grid();
        assert_eq!(enumerate_viable_patterns(&g, 0, 0), vec![CrossingPattern::empty(0)]);
        assert_eq!(enumerate_viable_patterns(&g, 0, 5).len(), 1 + 5 + 20 + 50 + 70 + 42);
        let nested = CrossingPattern::from_parts(0, &[vec![0, 1, 4], vec![2, 3]]);
        assert!(nested.is_noncrossing());
        assert!(enumerate_viable_patterns(&g, 0, 5).contains(&nested));
    }

    #[test]
    fn crossing_points_follow_rows() {
        let p = PointSet::new(vec![Point::new(0, 0), Point::new(1, 0)], 1, 1).unwrap();
        assert_eq!(crossing_points(&build_hanan_grid(&p), 0).len(), 1);
    }

    /// Five crossings at one separator: rows 0, 1, 4 joined on the left by a
    /// spine, rows 2, 3 joined by a separate bracket.
    pub(crate) fn nested_tree() -> (PointSet, RectTree) {
        let pts = [(0, 0), (1, 2), (2, 0), (2, 1), (2, 3), (2, 4)];
        let p = PointSet::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), 4, 1).unwrap();
        let seg = |a: (i64, i64), b: (i64, i64)| Segment::new(Point::new(a.0, a.1), Point::new(b.0, b.1));
        let segs = [
            seg((0, 0), (0, 4)),
            seg((0, 0), (2, 0)),
            seg((0, 1), (2, 1)),
            seg((0, 4), (2, 4)),
            seg((1, 2), (1, 3)),
            seg((1, 2), (2, 2)),
            seg((1, 3), (2, 3)),
            seg((2, 1), (2, 2)),
        ];
        let t = RectTree::from_segments(build_hanan_grid(&p), &segs).unwrap();
        (p, t)
    }

    #[test]
    fn nested_pattern_read_off_a_tree() {
        let (p, t) = nested_tree();
        assert!(crate::tree::validate_steiner_tree(&t, &p).unwrap().is_valid());
        // Separator between x=1 and x=2 follows point index 1.
        let left = pattern_of_tree(&t, &p, 1, Side::Left).unwrap();
        assert_eq!(left.parts(), vec![vec![0, 1, 4], vec![2, 3]]);
        assert_eq!(crate::tree::tonicity(&t, &p).per_separator, vec![3, 5]);
        let right = pattern_of_tree(&t, &p, 1, Side::Right).unwrap();
        assert_eq!(right.parts(), vec![vec![0], vec![1, 2], vec![3], vec![4]]);
    }

    #[test]
    fn monotone_and_one_sided_patterns() {
        let p = PointSet::new(vec![Point::new(0, 0), Point::new(2, 1)], 1, 1).unwrap();
        let seg = Segment::new(Point::new(0, 0), Point::new(2, 0));
        let up = Segment::new(Point::new(2, 0), Point::new(2, 1));
        let t = RectTree::from_segments(build_hanan_grid(&p), &[seg, up]).unwrap();
        assert_eq!(pattern_of_tree(&t, &p, 0, Side::Left).unwrap().parts(), vec![vec![0]]);
        let left_only = RectTree::from_segments(build_hanan_grid(&p), &[]).unwrap();
        assert!(pattern_of_tree(&left_only, &p, 0, Side::Right).unwrap().is_empty());
    }

    fn slab_grid() -> HananGrid {
        HananGrid::from_coords(vec![0, 1, 2], vec![0, 1])
    }

    #[test]
    fn compose_examples() {
        let g = slab_grid();
        // Local edges on column 1: 0 = vertical, 1 and 2 = outgoing rows 0 and 1.
        let slab = Slab::new(&g, 1, vec![0]);
        let out = compose_across_slab(&CrossingPattern::empty(0), &slab, &[0, 2], 1);
        assert_eq!(out.right.parts(), vec![vec![1]]);
        assert!(out.feasible && out.acyclic);

        // A left part with both rows plus the vertical edge closes a cycle.
        let both = CrossingPattern::from_parts(0, &[vec![0, 1]]);
        assert!(!compose_across_slab(&both, &slab, &[0, 1], 1).acyclic);

        // Two left parts joined by the vertical edge leave as one part.
        let two = CrossingPattern::from_parts(0, &[vec![0], vec![1]]);
        let out = compose_across_slab(&two, &slab, &[0, 1, 2], 1);
        assert!(out.acyclic && out.feasible);
        assert_eq!(out.right.parts(), vec![vec![0, 1]]);

        // Terminal untouched.
        let out = compose_across_slab(&CrossingPattern::empty(0), &slab, &[2], 1);
        assert!(!out.feasible);
    }

    #[test]
    fn compose_ignores_edge_order() {
        let g = slab_grid();
        let slab = Slab::new(&g, 1, vec![]);
        let two = CrossingPattern::from_parts(0, &[vec![0], vec![1]]);
        assert_eq!(compose_across_slab(&two, &slab, &[2, 0, 1], 1), compose_across_slab(&two, &slab, &[0, 1, 2], 1));
    }
}
