//! Structural checks on solver output. A minimal tree on a strip obeys a
//! few crossing bounds; each violated bound becomes one [`Violation`].

use crate::coord::{ceil_sqrt_ratio, Coord};
use crate::error::Result;
use crate::fpt::mirrored_cap_bound;
use crate::points::PointSet;
use crate::tree::{tonicity, validate_steiner_tree, RectTree};
use crate::walls::find_walls;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Invalid { disconnected: bool, cyclic: bool, uncovered: Vec<usize> },
    TonicityAboveN { separator: usize, count: usize },
    /// A separator with spacing above delta crossed other than once.
    WideGap { separator: usize, count: usize },
    /// More horizontal edges span both lines than the strip allows.
    Parallel { left: usize, right: usize, count: usize, bound: usize },
    SoftWall { separator: usize, count: usize, bound: usize },
    Sparseness { separator: usize, count: usize, bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub n: usize,
    pub length_units: Coord,
    pub tonicity_max: usize,
    /// Crossing count per separator, indexed like `PointSet::separators`.
    pub tonicity_profile: Vec<usize>,
    pub soft_walls: Vec<usize>,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `ceil((9k + 18)(2 + sqrt(delta)))`, without the cap at n.
pub fn sparse_tonicity_bound(p: &PointSet, k: u32) -> usize {
    let b = 9 * k as i64 + 18;
    (2 * b + ceil_sqrt_ratio(b * b * p.delta(), p.scale())) as usize
}

/// Runs every check. `k` enables the sparseness bound; it defaults to the
/// point set's declared k.
pub fn audit_tree(t: &RectTree, p: &PointSet, k: Option<u32>) -> Result<AuditReport> {
    let mut violations = Vec::new();
    let v = validate_steiner_tree(t, p)?;
    if !v.is_valid() {
        violations.push(Violation::Invalid { disconnected: v.disconnected, cyclic: v.cyclic, uncovered: v.uncovered });
    }
    let seps = p.separators();
    let ton = tonicity(t, p);
    let n = p.len();
    for (s, &count) in seps.iter().zip(&ton.per_separator) {
        if count > n {
            violations.push(Violation::TonicityAboveN { separator: s.index, count });
        }
        if p.spacing(s.index) > p.delta() && count != 1 {
            violations.push(Violation::WideGap { separator: s.index, count });
        }
    }

    // Tree edges run between nodes, so a straight run through a Steiner
    // point or terminal counts as two edges.
    let spans: Vec<(Coord, Coord)> =
        t.node_segments(p).iter().filter(|s| s.is_horizontal()).map(|s| (2 * s.a.x, 2 * s.b.x)).collect();
    for a in 0..seps.len() {
        for b in a + 1..seps.len() {
            let (l, r) = (seps[a].abscissa2, seps[b].abscissa2);
            let count = spans.iter().filter(|&&(x0, x1)| x0 < l && r < x1).count();
            // dist = (r - l) / 2, so delta / dist = 2 delta / (r - l).
            let bound = 1 + (2 * p.delta() / (r - l)) as usize;
            if count > bound {
                violations.push(Violation::Parallel { left: seps[a].index, right: seps[b].index, count, bound });
            }
        }
    }

    let soft: Vec<usize> = find_walls(p).soft.concat();
    let soft_bound = mirrored_cap_bound(p);
    for &r in &soft {
        let count = count_at(&seps, &ton.per_separator, r);
        if count > soft_bound {
            violations.push(Violation::SoftWall { separator: r, count, bound: soft_bound });
        }
    }
    if let Some(k) = k.or(p.sparseness_k()) {
        let bound = sparse_tonicity_bound(p, k);
        for (s, &count) in seps.iter().zip(&ton.per_separator) {
            if count > bound {
                violations.push(Violation::Sparseness { separator: s.index, count, bound });
            }
        }
    }

    Ok(AuditReport {
        n,
        length_units: t.length(),
        tonicity_max: ton.max,
        tonicity_profile: ton.per_separator,
        soft_walls: soft,
        violations,
    })
}

fn count_at(seps: &[crate::points::Separator], counts: &[usize], index: usize) -> usize {
    seps.iter().position(|s| s.index == index).map_or(0, |i| counts[i])
}
