//! JSON instance, tree and report files.
//!
//! Instance coordinates are decimal numbers read at the file's scale; with
//! serde_json's arbitrary precision the digits reach the decimal parser
//! untouched. Tree files carry integer units.

use crate::coord::{parse_decimal, to_units, units_to_string, Coord};
use crate::error::{Error, Result};
use crate::grid::build_hanan_grid;
use crate::points::{Point, PointSet};
use crate::random::GeneratorMeta;
use crate::tree::{RectTree, Segment};
use serde::{Deserialize, Serialize};
use serde_json::Number;
use std::str::FromStr;

/// A point set plus how it was produced, when known.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub set: PointSet,
    pub generator: Option<GeneratorMeta>,
}

impl Instance {
    pub fn new(set: PointSet) -> Self {
        Instance { set, generator: None }
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    scale: i64,
    delta: Number,
    points: Vec<[Number; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sparseness_k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub length_units: Coord,
    pub scale: i64,
    /// `[x1, y1, x2, y2]` per grid edge, in units.
    pub edges: Vec<[Coord; 4]>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn number(units: Coord, scale: i64) -> Number {
    Number::from_str(&units_to_string(units, scale)).expect("decimal text is a JSON number")
}

pub fn read_instance(text: &str) -> Result<Instance> {
    let f: InstanceFile = serde_json::from_str(text).map_err(parse_err)?;
    if f.scale < 1 {
        return Err(Error::Parse(format!("scale must be positive, got {}", f.scale)));
    }
    if f.points.is_empty() {
        return Err(Error::InvalidInput("no points".into()));
    }
    let units = |n: &Number| to_units(parse_decimal(&n.to_string())?, f.scale);
    let delta = units(&f.delta)?;
    let mut points = Vec::with_capacity(f.points.len());
    for (index, [x, y]) in f.points.iter().enumerate() {
        let p = Point::new(units(x)?, units(y)?);
        if p.y < 0 || p.y > delta {
            return Err(Error::OutOfStrip { index });
        }
        points.push(p);
    }
    let set = PointSet::new(points, delta, f.scale)?.with_sparseness_k(f.sparseness_k);
    Ok(Instance { set, generator: f.generator })
}

pub fn write_instance(inst: &Instance) -> String {
    let p = &inst.set;
    let f = InstanceFile {
        scale: p.scale(),
        delta: number(p.delta(), p.scale()),
        points: p.points().iter().map(|q| [number(q.x, p.scale()), number(q.y, p.scale())]).collect(),
        sparseness_k: p.sparseness_k(),
        generator: inst.generator.clone(),
    };
    let mut s = serde_json::to_string_pretty(&f).expect("instance serializes");
    s.push('\n');
    s
}

pub fn tree_file(t: &RectTree, scale: i64) -> TreeFile {
    TreeFile {
        length_units: t.length(),
        scale,
        edges: t.grid_segments().iter().map(|s| [s.a.x, s.a.y, s.b.x, s.b.y]).collect(),
    }
}

pub fn write_tree(t: &RectTree, scale: i64) -> String {
    let mut s = serde_json::to_string_pretty(&tree_file(t, scale)).expect("tree serializes");
    s.push('\n');
    s
}

pub fn parse_tree_file(text: &str) -> Result<TreeFile> {
    serde_json::from_str(text).map_err(parse_err)
}

/// Rebuilds a tree on the grid of `p`. The stored length must match the
/// edges.
pub fn read_tree(text: &str, p: &PointSet) -> Result<RectTree> {
    let f = parse_tree_file(text)?;
    if f.scale != p.scale() {
        return Err(Error::Mismatch(format!("tree scale {} but instance scale {}", f.scale, p.scale())));
    }
    let segs: Vec<Segment> =
        f.edges.iter().map(|e| Segment::new(Point::new(e[0], e[1]), Point::new(e[2], e[3]))).collect();
    let t = RectTree::from_segments(build_hanan_grid(p), &segs)?;
    if t.length() != f.length_units {
        return Err(Error::Mismatch(format!("stated length {} but edges sum to {}", f.length_units, t.length())));
    }
    Ok(t)
}

pub fn to_json_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
