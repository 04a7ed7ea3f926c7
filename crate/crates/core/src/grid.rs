use crate::coord::Coord;
use crate::points::{Point, PointSet};

/// The grid spanned by the distinct x- and y-coordinates of a point set.
///
/// Vertex `(col, row)` has id `col * ny + row`. Horizontal edges come first,
/// `(col, row) -> (col + 1, row)` with id `col * ny + row`; vertical edges
/// `(col, row) -> (col, row + 1)` follow with id `H + col * (ny - 1) + row`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HananGrid {
    xs: Vec<Coord>,
    ys: Vec<Coord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridEdge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub weight: Coord,
    pub horizontal: bool,
}

pub fn build_hanan_grid(p: &PointSet) -> HananGrid {
    HananGrid::from_coords(
        p.points().iter().map(|q| q.x).collect(),
        p.points().iter().map(|q| q.y).collect(),
    )
}

impl HananGrid {
    pub fn from_coords(mut xs: Vec<Coord>, mut ys: Vec<Coord>) -> Self {
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();
        HananGrid { xs, ys }
    }

    pub fn xs(&self) -> &[Coord] {
        &self.xs
    }

    pub fn ys(&self) -> &[Coord] {
        &self.ys
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.nx() * self.ny()
    }

    fn num_horizontal(&self) -> usize {
        self.nx().saturating_sub(1) * self.ny()
    }

    pub fn num_edges(&self) -> usize {
        self.num_horizontal() + self.nx() * self.ny().saturating_sub(1)
    }

    pub fn vertex(&self, col: usize, row: usize) -> usize {
        col * self.ny() + row
    }

    pub fn cell(&self, v: usize) -> (usize, usize) {
        (v / self.ny(), v % self.ny())
    }

    pub fn vertex_point(&self, v: usize) -> Point {
        let (c, r) = self.cell(v);
        Point::new(self.xs[c], self.ys[r])
    }

    pub fn col_of(&self, x: Coord) -> Option<usize> {
        self.xs.binary_search(&x).ok()
    }

    pub fn row_of(&self, y: Coord) -> Option<usize> {
        self.ys.binary_search(&y).ok()
    }

    pub fn vertex_at(&self, p: Point) -> Option<usize> {
        Some(self.vertex(self.col_of(p.x)?, self.row_of(p.y)?))
    }

    /// Edge from `(col, row)` to `(col + 1, row)`.
    pub fn horizontal_edge(&self, col: usize, row: usize) -> usize {
        debug_assert!(col + 1 < self.nx() && row < self.ny());
        col * self.ny() + row
    }

    /// Edge from `(col, row)` to `(col, row + 1)`.
    pub fn vertical_edge(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.nx() && row + 1 < self.ny());
        self.num_horizontal() + col * (self.ny() - 1) + row
    }

    pub fn edge(&self, id: usize) -> GridEdge {
        let h = self.num_horizontal();
        if id < h {
            let (col, row) = (id / self.ny(), id % self.ny());
            GridEdge {
                id,
                u: self.vertex(col, row),
                v: self.vertex(col + 1, row),
                weight: self.xs[col + 1] - self.xs[col],
                horizontal: true,
            }
        } else {
            let k = id - h;
            let (col, row) = (k / (self.ny() - 1), k % (self.ny() - 1));
            GridEdge {
                id,
                u: self.vertex(col, row),
                v: self.vertex(col, row + 1),
                weight: self.ys[row + 1] - self.ys[row],
                horizontal: false,
            }
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = GridEdge> + '_ {
        (0..self.num_edges()).map(|id| self.edge(id))
    }

    pub fn total_weight(&self) -> Coord {
        self.edges().map(|e| e.weight).sum()
    }

    pub fn terminal_vertices(&self, p: &PointSet) -> Vec<usize> {
        p.points().iter().map(|&q| self.vertex_at(q).expect("terminal on its own grid")).collect()
    }
}
