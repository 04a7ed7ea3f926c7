use crate::coord::{coord_limit, to_units, Coord};
use crate::error::{Error, Result};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Coord,
    pub y: Coord,
}

impl Point {
    pub fn new(x: Coord, y: Coord) -> Self {
        Point { x, y }
    }
}

/// A vertical line between two consecutive distinct x-coordinates.
///
/// `index` is the position `i` of the last point left of the line, so the
/// line separates `points[..=i]` from `points[i + 1..]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Separator {
    pub index: usize,
    /// `x_i + x_{i+1}`, i.e. the abscissa in doubled units.
    pub abscissa2: Coord,
}

/// Terminals in the strip `R x [0, delta]`, sorted by (x, y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
    delta: Coord,
    scale: i64,
    sparseness_k: Option<u32>,
}

impl PointSet {
    pub fn new(mut points: Vec<Point>, delta: Coord, scale: i64) -> Result<Self> {
        if scale < 1 {
            return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
        }
        if delta <= 0 {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        let limit = coord_limit(scale);
        if delta >= limit {
            return Err(Error::CoordOverflow(delta.to_string()));
        }
        for p in &points {
            if p.x.unsigned_abs() >= limit as u64 || p.y.unsigned_abs() >= limit as u64 {
                return Err(Error::CoordOverflow(format!("({}, {})", p.x, p.y)));
            }
        }
        if let Some(index) = points.iter().position(|p| p.y < 0 || p.y > delta) {
            return Err(Error::OutOfStrip { index });
        }
        points.sort();
        Ok(PointSet { points, delta, scale, sparseness_k: None })
    }

    pub fn with_sparseness_k(mut self, k: Option<u32>) -> Self {
        self.sparseness_k = k;
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn delta(&self) -> Coord {
        self.delta
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn sparseness_k(&self) -> Option<u32> {
        self.sparseness_k
    }

    /// `x_{i+1} - x_i`.
    pub fn spacing(&self, i: usize) -> Coord {
        self.points[i + 1].x - self.points[i].x
    }

    pub fn spacings(&self) -> Vec<Coord> {
        (0..self.len().saturating_sub(1)).map(|i| self.spacing(i)).collect()
    }

    pub fn separators(&self) -> Vec<Separator> {
        (0..self.len().saturating_sub(1))
            .filter(|&i| self.spacing(i) > 0)
            .map(|i| Separator { index: i, abscissa2: self.points[i].x + self.points[i + 1].x })
            .collect()
    }

    /// The sub-instance `points[start..=end]` with the same strip.
    pub fn slice(&self, start: usize, end: usize) -> PointSet {
        PointSet {
            points: self.points[start..=end].to_vec(),
            delta: self.delta,
            scale: self.scale,
            sparseness_k: self.sparseness_k,
        }
    }

    /// Largest number of points in a closed window of unit width.
    pub fn measured_sparseness(&self) -> u32 {
        let mut best = 0;
        let mut hi = 0;
        for lo in 0..self.len() {
            while hi < self.len() && self.points[hi].x - self.points[lo].x <= self.scale {
                hi += 1;
            }
            best = best.max(hi - lo);
        }
        best as u32
    }
}

pub fn ingest_points(raw: &[(Decimal, Decimal)], delta: Decimal, scale: i64) -> Result<PointSet> {
    if raw.is_empty() {
        return Err(Error::InvalidInput("no points".into()));
    }
    if scale < 1 {
        return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
    }
    let delta_units = to_units(delta, scale)?;
    let points = raw
        .iter()
        .map(|&(x, y)| Ok(Point::new(to_units(x, scale)?, to_units(y, scale)?)))
        .collect::<Result<Vec<_>>>()?;
    // Report strip violations against the caller's order, not the sorted one.
    if let Some(index) = points.iter().position(|p| p.y < 0 || p.y > delta_units) {
        return Err(Error::OutOfStrip { index });
    }
    PointSet::new(points, delta_units, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::parse_decimal;

    fn raw(pts: &[(&str, &str)]) -> Vec<(Decimal, Decimal)> {
        pts.iter().map(|(x, y)| (parse_decimal(x).unwrap(), parse_decimal(y).unwrap())).collect()
    }

    #[test]
    fn ingest_examples() {
        let p = ingest_points(&raw(&[("3", "2"), ("0", "0")]), parse_decimal("2").unwrap(), 1).unwrap();
        assert_eq!(p.points(), &[Point::new(0, 0), Point::new(3, 2)]);
        assert_eq!(p.spacing(0), 3);

        let p = ingest_points(&raw(&[("1.5", "0.25")]), parse_decimal("1").unwrap(), 4).unwrap();
        assert_eq!(p.points(), &[Point::new(6, 1)]);
        assert_eq!(p.delta(), 4);

        let e = ingest_points(&raw(&[("0", "3")]), parse_decimal("2").unwrap(), 1);
        assert_eq!(e, Err(Error::OutOfStrip { index: 0 }));
    }

    #[test]
    fn separators_skip_shared_columns() {
        let p = PointSet::new(vec![Point::new(0, 0), Point::new(0, 1), Point::new(2, 0)], 1, 1).unwrap();
        assert_eq!(p.separators(), vec![Separator { index: 1, abscissa2: 2 }]);
    }

    #[test]
    fn sparseness_counts_closed_windows() {
        let pts = [0, 1, 2, 5].iter().map(|&x| Point::new(x * 10, 0)).collect();
        let p = PointSet::new(pts, 1, 10).unwrap();
        assert_eq!(p.measured_sparseness(), 2);
    }
}
