use crate::coord::Coord;
use crate::error::{Error, Result};
use crate::grid::{build_hanan_grid, HananGrid};
use crate::points::{Point, PointSet};
use std::collections::{BTreeMap, BTreeSet};

/// A set of Hanan-grid edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectTree {
    grid: HananGrid,
    edges: Vec<usize>,
}

/// Axis-parallel segment with `a <= b` in (x, y) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(p: Point, q: Point) -> Self {
        if p <= q {
            Segment { a: p, b: q }
        } else {
            Segment { a: q, b: p }
        }
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.y == self.b.y
    }

    pub fn length(&self) -> Coord {
        (self.b.x - self.a.x) + (self.b.y - self.a.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    Terminal,
    /// Non-terminal of degree at least 3. Grid vertices have degree at most
    /// 4, so classification reports `TPoint` or `Cross` instead.
    SteinerPoint,
    Corner,
    TPoint,
    Cross,
    Interior,
    /// Non-terminal leaf. Never present in a minimal tree.
    Dangling,
}

impl VertexClass {
    pub fn is_steiner_point(self) -> bool {
        matches!(self, VertexClass::SteinerPoint | VertexClass::TPoint | VertexClass::Cross)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub disconnected: bool,
    pub cyclic: bool,
    /// Indices into the sorted point set.
    pub uncovered: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !self.disconnected && !self.cyclic && self.uncovered.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tonicity {
    pub max: usize,
    /// One count per entry of `PointSet::separators`.
    pub per_separator: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UShape {
    pub base: Segment,
    pub arms: [Segment; 2],
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

impl RectTree {
    pub fn new(grid: HananGrid, edges: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = edges.into_iter().collect();
        debug_assert!(set.iter().all(|&e| e < grid.num_edges()));
        RectTree { grid, edges: set.into_iter().collect() }
    }

    pub fn empty(grid: HananGrid) -> Self {
        RectTree { grid, edges: Vec::new() }
    }

    pub fn grid(&self) -> &HananGrid {
        &self.grid
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn length(&self) -> Coord {
        self.edges.iter().map(|&e| self.grid.edge(e).weight).sum()
    }

    pub fn union(&self, other: &RectTree) -> RectTree {
        assert_eq!(self.grid, other.grid, "union of trees on different grids");
        RectTree::new(self.grid.clone(), self.edges.iter().chain(&other.edges).copied())
    }

    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut deg = BTreeMap::new();
        for &e in &self.edges {
            let ge = self.grid.edge(e);
            *deg.entry(ge.u).or_insert(0) += 1;
            *deg.entry(ge.v).or_insert(0) += 1;
        }
        deg
    }

    /// Maps axis-parallel segments given in unit coordinates onto the grid.
    pub fn from_segments(grid: HananGrid, segs: &[Segment]) -> Result<RectTree> {
        let doubled: Vec<Segment> = segs
            .iter()
            .map(|s| {
                Segment::new(Point::new(2 * s.a.x, 2 * s.a.y), Point::new(2 * s.b.x, 2 * s.b.y))
            })
            .collect();
        Self::from_doubled_segments(grid, &doubled)
    }

    /// Maps segments in doubled units onto the grid. A grid edge is taken
    /// when the union of the segments covers it; partial cover is an error.
    pub fn from_doubled_segments(grid: HananGrid, segs: &[Segment]) -> Result<RectTree> {
        let mut rows: BTreeMap<Coord, Vec<(Coord, Coord)>> = BTreeMap::new();
        let mut cols: BTreeMap<Coord, Vec<(Coord, Coord)>> = BTreeMap::new();
        for s in segs {
            if s.a == s.b {
                continue;
            }
            if s.is_horizontal() {
                rows.entry(s.a.y).or_default().push((s.a.x, s.b.x));
            } else if s.a.x == s.b.x {
                cols.entry(s.a.x).or_default().push((s.a.y, s.b.y));
            } else {
                return Err(Error::OffGrid(format!("{s:?} is not axis-parallel")));
            }
        }
        let mut edges = Vec::new();
        for (y2, ivs) in rows {
            let row = (y2 % 2 == 0).then(|| grid.row_of(y2 / 2)).flatten();
            let row = row.ok_or_else(|| Error::OffGrid(format!("row y2={y2}")))?;
            let xs2: Vec<Coord> = grid.xs().iter().map(|x| 2 * x).collect();
            for c in covered(&merge_intervals(ivs), &xs2)? {
                edges.push(grid.horizontal_edge(c, row));
            }
        }
        for (x2, ivs) in cols {
            let col = (x2 % 2 == 0).then(|| grid.col_of(x2 / 2)).flatten();
            let col = col.ok_or_else(|| Error::OffGrid(format!("column x2={x2}")))?;
            let ys2: Vec<Coord> = grid.ys().iter().map(|y| 2 * y).collect();
            for r in covered(&merge_intervals(ivs), &ys2)? {
                edges.push(grid.vertical_edge(col, r));
            }
        }
        Ok(RectTree::new(grid, edges))
    }

    /// Unit grid edges as segments.
    pub fn grid_segments(&self) -> Vec<Segment> {
        self.edges
            .iter()
            .map(|&e| {
                let ge = self.grid.edge(e);
                Segment::new(self.grid.vertex_point(ge.u), self.grid.vertex_point(ge.v))
            })
            .collect()
    }

    /// Edges between tree nodes: chains through `Interior` vertices merged.
    pub fn node_segments(&self, p: &PointSet) -> Vec<Segment> {
        let classes = classify_vertices(self, p);
        let adj = self.adjacency();
        let is_node = |v: usize| classes.get(&v).is_some_and(|c| *c != VertexClass::Interior);
        let mut out = BTreeSet::new();
        for (&v, nbrs) in &adj {
            if !is_node(v) {
                continue;
            }
            for &w in nbrs {
                let (mut prev, mut cur) = (v, w);
                while !is_node(cur) {
                    let next = adj[&cur].iter().copied().find(|&z| z != prev).expect("interior has two neighbours");
                    prev = cur;
                    cur = next;
                }
                out.insert(Segment::new(self.grid.vertex_point(v), self.grid.vertex_point(cur)));
            }
        }
        out.into_iter().collect()
    }

    pub(crate) fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &e in &self.edges {
            let ge = self.grid.edge(e);
            adj.entry(ge.u).or_default().push(ge.v);
            adj.entry(ge.v).or_default().push(ge.u);
        }
        adj
    }
}

fn merge_intervals(mut ivs: Vec<(Coord, Coord)>) -> Vec<(Coord, Coord)> {
    ivs.sort_unstable();
    let mut out: Vec<(Coord, Coord)> = Vec::new();
    for (a, b) in ivs {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Indices `i` whose cell `[lines[i], lines[i+1]]` lies inside the union.
fn covered(ivs: &[(Coord, Coord)], lines: &[Coord]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..lines.len().saturating_sub(1) {
        let (lo, hi) = (lines[i], lines[i + 1]);
        let mut overlap = 0;
        for &(a, b) in ivs {
            overlap += (b.min(hi) - a.max(lo)).max(0);
        }
        if overlap == hi - lo {
            out.push(i);
        } else if overlap > 0 {
            return Err(Error::OffGrid(format!("partial cover of [{lo}, {hi}] (doubled units)")));
        }
    }
    for &(a, b) in ivs {
        if a < lines[0] || b > *lines.last().unwrap() {
            return Err(Error::OffGrid(format!("[{a}, {b}] leaves the grid (doubled units)")));
        }
    }
    Ok(out)
}

pub fn tree_length(t: &RectTree) -> Coord {
    t.length()
}

pub fn validate_steiner_tree(t: &RectTree, p: &PointSet) -> Result<ValidationReport> {
    if *t.grid() != build_hanan_grid(p) {
        return Err(Error::GridMismatch);
    }
    let grid = t.grid();
    let mut uf = UnionFind::new(grid.num_vertices());
    let mut report = ValidationReport::default();
    let mut touched = BTreeSet::new();
    for &e in t.edges() {
        let ge = grid.edge(e);
        touched.insert(ge.u);
        touched.insert(ge.v);
        if !uf.union(ge.u, ge.v) {
            report.cyclic = true;
        }
    }
    let roots: BTreeSet<usize> = touched.iter().map(|&v| uf.find(v)).collect();
    report.disconnected = roots.len() > 1;
    let terminals = grid.terminal_vertices(p);
    let single_site = terminals.iter().all(|&v| v == terminals[0]);
    if !(t.edges().is_empty() && single_site) {
        report.uncovered = (0..terminals.len()).filter(|&i| !touched.contains(&terminals[i])).collect();
    }
    Ok(report)
}

/// Class of every tree vertex and every terminal, keyed by grid vertex id.
pub fn classify_vertices(t: &RectTree, p: &PointSet) -> BTreeMap<usize, VertexClass> {
    let grid = t.grid();
    let terminals: BTreeSet<usize> = p.points().iter().filter_map(|&q| grid.vertex_at(q)).collect();
    let adj = t.adjacency();
    let mut out = BTreeMap::new();
    for &v in &terminals {
        out.insert(v, VertexClass::Terminal);
    }
    for (&v, nbrs) in &adj {
        if terminals.contains(&v) {
            continue;
        }
        let class = match nbrs.len() {
            1 => VertexClass::Dangling,
            2 => {
                let (c0, r0) = grid.cell(nbrs[0]);
                let (c1, r1) = grid.cell(nbrs[1]);
                if c0 == c1 || r0 == r1 {
                    VertexClass::Interior
                } else {
                    VertexClass::Corner
                }
            }
            3 => VertexClass::TPoint,
            4 => VertexClass::Cross,
            _ => VertexClass::SteinerPoint,
        };
        out.insert(v, class);
    }
    out
}

pub fn tonicity(t: &RectTree, p: &PointSet) -> Tonicity {
    let grid = t.grid();
    let spans: Vec<(Coord, Coord)> = t
        .edges()
        .iter()
        .map(|&e| grid.edge(e))
        .filter(|ge| ge.horizontal)
        .map(|ge| (2 * grid.vertex_point(ge.u).x, 2 * grid.vertex_point(ge.v).x))
        .collect();
    let per_separator: Vec<usize> = p
        .separators()
        .iter()
        .map(|s| spans.iter().filter(|&&(a, b)| a < s.abscissa2 && s.abscissa2 < b).count())
        .collect();
    Tonicity { max: per_separator.iter().copied().max().unwrap_or(0), per_separator }
}

/// Maximal collinear chains of tree edges that do not pass through a terminal.
pub fn complete_segments(t: &RectTree, p: &PointSet) -> Vec<Segment> {
    let grid = t.grid();
    let terminals: BTreeSet<Point> = p.points().iter().copied().collect();
    let mut horizontal: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut vertical: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in t.edges() {
        let ge = grid.edge(e);
        let (c, r) = grid.cell(ge.u);
        if ge.horizontal {
            horizontal.entry(r).or_default().push(c);
        } else {
            vertical.entry(c).or_default().push(r);
        }
    }
    let mut out = Vec::new();
    // `starts` are sorted lower endpoints of unit edges along one line.
    let mut chains = |starts: &[usize], at: &dyn Fn(usize) -> Point| {
        let mut begin = starts[0];
        for w in 0..starts.len() {
            let end = starts[w] + 1;
            let continues = w + 1 < starts.len() && starts[w + 1] == end && !terminals.contains(&at(end));
            if !continues {
                out.push(Segment::new(at(begin), at(end)));
                if w + 1 < starts.len() {
                    begin = starts[w + 1];
                }
            }
        }
    };
    for (&r, cs) in &mut horizontal {
        cs.sort_unstable();
        chains(cs, &|c| Point::new(grid.xs()[c], grid.ys()[r]));
    }
    for (&c, rs) in &mut vertical {
        rs.sort_unstable();
        chains(rs, &|r| Point::new(grid.xs()[c], grid.ys()[r]));
    }
    out.sort();
    out
}

/// Complete segments whose two non-terminal endpoints both carry a
/// perpendicular complete segment ending there, on the same side.
pub fn detect_u_shapes(t: &RectTree, p: &PointSet) -> Vec<UShape> {
    let segs = complete_segments(t, p);
    let terminals: BTreeSet<Point> = p.points().iter().copied().collect();
    // Perpendicular arm ending at `end`, with its side relative to `base`.
    let arm = |base: &Segment, end: Point| -> Option<(Segment, i8)> {
        segs.iter().find_map(|s| {
            if s.is_horizontal() == base.is_horizontal() || (s.a != end && s.b != end) {
                return None;
            }
            let other = if s.a == end { s.b } else { s.a };
            let side = if base.is_horizontal() { (other.y - end.y).signum() } else { (other.x - end.x).signum() };
            Some((*s, side as i8))
        })
    };
    let mut out = Vec::new();
    for base in &segs {
        if terminals.contains(&base.a) || terminals.contains(&base.b) {
            continue;
        }
        if let (Some((a1, s1)), Some((a2, s2))) = (arm(base, base.a), arm(base, base.b)) {
            if s1 == s2 {
                out.push(UShape { base: *base, arms: [a1, a2] });
            }
        }
    }
    out
}
