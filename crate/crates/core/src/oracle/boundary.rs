use super::{dreyfus_wagner_with_limit, SteinerInstance, WeightedGraph};
use crate::coord::Coord;
use crate::error::{Error, Result};
use crate::grid::HananGrid;
use crate::patterns::{CrossingPattern, MirroredCrossingPattern};
use crate::points::Point;
use crate::tree::{Segment, UnionFind};

/// Terminals between two separators plus the boundary patterns. All
/// coordinates handed out are in doubled units.
#[derive(Clone, Debug)]
pub struct Slice<'a> {
    pub points: &'a [Point],
    /// y-coordinates (units) that pattern rows index into.
    pub rows: &'a [Coord],
    /// Left separator abscissa (doubled units) and its pattern.
    pub left: Option<(Coord, &'a CrossingPattern)>,
    /// Right separator abscissa (doubled units) and its mirrored pattern.
    pub right: Option<(Coord, &'a MirroredCrossingPattern)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySolution {
    /// Length in doubled units.
    pub length2: Coord,
    /// Real edges in doubled units.
    pub segments: Vec<Segment>,
    /// Crossings of the right separator by real edges, partitioned by
    /// connectivity through the real edges and the left parts.
    pub realized: Option<CrossingPattern>,
}

/// Optimal forest inside the slice that, together with the boundary parts
/// modelled as zero-weight paths, connects everything. No vertical edge is
/// placed on a separator line.
pub fn solve_with_boundary(slice: &Slice, terminal_limit: usize) -> Result<BoundarySolution> {
    let mut xs: Vec<Coord> = slice.points.iter().map(|p| 2 * p.x).collect();
    let mut ys: Vec<Coord> = slice.rows.iter().map(|y| 2 * y).collect();
    ys.extend(slice.points.iter().map(|p| 2 * p.y));
    let fences: Vec<Coord> = [slice.left.map(|l| l.0), slice.right.map(|r| r.0)].into_iter().flatten().collect();
    xs.extend(&fences);
    let grid = HananGrid::from_coords(xs, ys);
    let row_vertex = |abscissa2: Coord, row: u32| {
        let col = grid.col_of(abscissa2).expect("separator column");
        let r = grid.row_of(2 * slice.rows[row as usize]).expect("pattern row");
        grid.vertex(col, r)
    };

    let mut g = WeightedGraph::new(grid.num_vertices());
    let mut real = Vec::new();
    for e in grid.edges() {
        let on_fence = !e.horizontal && fences.contains(&grid.vertex_point(e.u).x);
        if !on_fence {
            g.add_edge(e.u, e.v, e.weight);
            real.push(Segment::new(grid.vertex_point(e.u), grid.vertex_point(e.v)));
        }
    }
    let num_real = g.num_edges();
    let mut terminals: Vec<usize> = slice.points.iter().map(|&p| grid.vertex_at(Point::new(2 * p.x, 2 * p.y)).unwrap()).collect();
    let chain = |g: &mut WeightedGraph, abscissa2: Coord, pat: &CrossingPattern, terminals: &mut Vec<usize>| {
        for part in pat.parts() {
            let vs: Vec<usize> = part.iter().map(|&r| row_vertex(abscissa2, r)).collect();
            terminals.extend(&vs);
            for w in vs.windows(2) {
                g.add_edge(w[0], w[1], 0);
            }
        }
    };
    if let Some((a, pat)) = slice.left {
        chain(&mut g, a, pat, &mut terminals);
    }
    let num_left_virtual = g.num_edges();
    if let Some((a, pat)) = slice.right {
        chain(&mut g, a, pat, &mut terminals);
    }
    let inst = SteinerInstance::new(g, terminals);
    let sol = match dreyfus_wagner_with_limit(&inst, terminal_limit) {
        Err(Error::DisconnectedGrid) => return Err(Error::Infeasible),
        other => other?,
    };

    let realized = slice.right.map(|(a, pat)| {
        let mut uf = UnionFind::new(grid.num_vertices());
        let mut crossed = vec![false; grid.num_vertices()];
        for &e in &sol.edges {
            let (u, v, _) = inst.graph.edge(e);
            if e < num_real {
                crossed[u] = true;
                crossed[v] = true;
            }
            if e < num_left_virtual {
                uf.union(u, v);
            }
        }
        let pairs = pat
            .points()
            .iter()
            .map(|&r| (r, row_vertex(a, r)))
            .filter(|&(_, v)| crossed[v])
            .map(|(r, v)| (r, uf.find(v)))
            .collect();
        CrossingPattern::from_labeled(pat.separator_index, pairs)
    });
    let segments = sol.edges.iter().filter(|&&e| e < num_real).map(|&e| real[e]).collect();
    Ok(BoundarySolution { length2: sol.length, segments, realized })
}
