//! Split at hard walls, then solve each interval either directly with the
//! exact oracle or with a dynamic program over soft walls whose steps are
//! oracle calls with boundary patterns.

use crate::coord::{ceil_sqrt_ratio, to_units, Coord};
use crate::error::{Error, Result};
use crate::grid::build_hanan_grid;
use crate::oracle::{dreyfus_wagner_with_limit, solve_with_boundary, SteinerInstance, Slice, DEFAULT_TERMINAL_LIMIT};
use crate::patterns::{viable_patterns_on_rows, CrossingPattern};
use crate::points::{Point, PointSet};
use crate::sparse_dp::OUTER_SEPARATOR;
use crate::tree::{RectTree, Segment};
use crate::walls::{find_hard_walls, find_soft_walls};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug)]
pub struct FptConfig {
    /// Strips narrower than this are solved per interval by the oracle.
    pub delta_threshold: Decimal,
    pub terminal_limit: usize,
    /// Largest mirrored pattern tried at a soft wall; `None` means
    /// `ceil(18(2 + sqrt(delta)))`.
    pub mirrored_cap: Option<usize>,
}

impl Default for FptConfig {
    fn default() -> Self {
        FptConfig { delta_threshold: Decimal::from(100), terminal_limit: DEFAULT_TERMINAL_LIMIT, mirrored_cap: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub start: usize,
    pub end: usize,
    pub method: String,
    pub soft_walls: Vec<usize>,
    pub stage_sizes: Vec<usize>,
    pub length_units: Coord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FptReport {
    pub length_units: Coord,
    pub hard_walls: Vec<usize>,
    pub intervals: Vec<IntervalReport>,
}

#[derive(Clone, Debug)]
pub struct FptSolution {
    pub length: Coord,
    pub tree: RectTree,
    pub report: FptReport,
}

/// `ceil(18(2 + sqrt(delta)))`.
pub fn mirrored_cap_bound(p: &PointSet) -> usize {
    (36 + ceil_sqrt_ratio(324 * p.delta(), p.scale())) as usize
}

pub fn compute_mrst(p: &PointSet) -> Result<FptSolution> {
    compute_mrst_with(p, &FptConfig::default())
}

pub fn compute_mrst_with(p: &PointSet, config: &FptConfig) -> Result<FptSolution> {
    let hard = find_hard_walls(p);
    let grid = build_hanan_grid(p);
    let threshold = to_units(config.delta_threshold, p.scale())?;
    let mut segments = Vec::new();
    let mut intervals = Vec::new();
    let mut total = 0;
    if hard.len() == 1 {
        intervals.push(IntervalReport {
            start: 0,
            end: 0,
            method: "oracle".into(),
            soft_walls: Vec::new(),
            stage_sizes: Vec::new(),
            length_units: 0,
        });
    }
    for w in hard.windows(2) {
        let (start, end) = (w[0], w[1]);
        let q = p.slice(start, end);
        let (length, segs, report) = if p.delta() < threshold {
            let (inst, qgrid) = SteinerInstance::for_points(&q);
            let sol = match dreyfus_wagner_with_limit(&inst, config.terminal_limit) {
                Err(Error::TooManyTerminals { got, .. }) => {
                    return Err(Error::SubproblemTooLarge { start, end, terminals: got })
                }
                other => other?,
            };
            let tree = RectTree::new(qgrid, sol.edges.iter().copied());
            let report = IntervalReport {
                start,
                end,
                method: "oracle".into(),
                soft_walls: Vec::new(),
                stage_sizes: Vec::new(),
                length_units: sol.length,
            };
            (sol.length, doubled(&tree.grid_segments()), report)
        } else {
            let soft: Vec<usize> = find_soft_walls(p, start, end).into_iter().filter(|&r| r < end).collect();
            let local: Vec<usize> = soft.iter().map(|&r| r - start).collect();
            let cap = config.mirrored_cap.unwrap_or_else(|| mirrored_cap_bound(p));
            let reps = representative_sets(&q, &local, cap, config.terminal_limit)?;
            let (length, segs) = reps.best()?;
            let report = IntervalReport {
                start,
                end,
                method: "soft-wall-dp".into(),
                soft_walls: soft,
                stage_sizes: reps.stages.iter().map(|s| s.pairs.len()).collect(),
                length_units: length,
            };
            (length, segs, report)
        };
        total += length;
        segments.extend(segs);
        intervals.push(report);
    }
    let tree = RectTree::from_doubled_segments(grid, &segments)?;
    // Intervals meet only at shared wall centres, so nothing is counted twice.
    debug_assert_eq!(tree.length(), total);
    let length = tree.length();
    Ok(FptSolution { length, tree, report: FptReport { length_units: length, hard_walls: hard, intervals } })
}

fn doubled(segs: &[Segment]) -> Vec<Segment> {
    segs.iter().map(|s| Segment::new(Point::new(2 * s.a.x, 2 * s.a.y), Point::new(2 * s.b.x, 2 * s.b.y))).collect()
}

/// Where a stage of the soft-wall program sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Start,
    /// Separator right of this local point index.
    Separator(usize),
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepPair {
    pub pattern: CrossingPattern,
    /// Doubled units.
    pub length2: Coord,
    pred: usize,
    segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentativeStage {
    pub boundary: Boundary,
    /// At most one pair per pattern, sorted by pattern.
    pub pairs: Vec<RepPair>,
}

#[derive(Clone, Debug)]
pub struct RepresentativeSet {
    pub stages: Vec<RepresentativeStage>,
    terminals2: BTreeSet<Point>,
}

impl RepresentativeSet {
    /// Length (units) and segments (doubled units) of the final pair, with
    /// dangling half-edges at the walls removed.
    pub fn best(&self) -> Result<(Coord, Vec<Segment>)> {
        let last = self.stages.last().ok_or(Error::NoSolution)?;
        let top = last.pairs.first().ok_or(Error::NoSolution)?;
        let mut segs: Vec<Segment> = Vec::new();
        let mut pair = top;
        for s in (0..self.stages.len()).rev() {
            segs.extend(&pair.segments);
            if s == 0 {
                break;
            }
            pair = &self.stages[s - 1].pairs[pair.pred];
        }
        let segs = strip_stubs(segs, &self.terminals2);
        let length2: Coord = segs.iter().map(Segment::length).sum();
        debug_assert!(length2 <= top.length2 && length2 % 2 == 0);
        Ok((length2 / 2, segs))
    }
}

/// Runs the stages `[start, soft walls..., end]` on the sub-instance `q`.
pub fn representative_sets(q: &PointSet, soft: &[usize], cap: usize, limit: usize) -> Result<RepresentativeSet> {
    let mut bounds = vec![Boundary::Start];
    bounds.extend(soft.iter().map(|&r| Boundary::Separator(r)));
    bounds.push(Boundary::End);
    let base = RepresentativeStage {
        boundary: Boundary::Start,
        pairs: vec![RepPair { pattern: CrossingPattern::empty(OUTER_SEPARATOR), length2: 0, pred: 0, segments: Vec::new() }],
    };
    let mut stages = vec![base];
    for &b in &bounds[1..] {
        let next = compute_a(q, stages.last().unwrap(), b, cap, limit)?;
        if next.pairs.is_empty() {
            return Err(Error::NoSolution);
        }
        stages.push(next);
    }
    let terminals2 = q.points().iter().map(|p| Point::new(2 * p.x, 2 * p.y)).collect();
    Ok(RepresentativeSet { stages, terminals2 })
}

/// One step: every stored pair against every viable mirrored pattern at the
/// next boundary, one oracle call each; keeps the shortest pair per
/// realized pattern.
pub fn compute_a(q: &PointSet, prev: &RepresentativeStage, to: Boundary, cap: usize, limit: usize) -> Result<RepresentativeStage> {
    let pts = q.points();
    let rows = build_hanan_grid(q).ys().to_vec();
    let abscissa2 = |r: usize| pts[r].x + pts[r + 1].x;
    let lo = match prev.boundary {
        Boundary::Start => 0,
        Boundary::Separator(a) => a + 1,
        Boundary::End => return Err(Error::InvalidInput("stage after the end".into())),
    };
    let hi = match to {
        Boundary::Separator(b) => b,
        Boundary::End => pts.len() - 1,
        Boundary::Start => return Err(Error::InvalidInput("stage before the start".into())),
    };
    let slab_points = &pts[lo..=hi];
    let mirrored: Vec<CrossingPattern> = match to {
        Boundary::Separator(b) => viable_patterns_on_rows(rows.len(), b, cap).into_iter().filter(|x| !x.is_empty()).collect(),
        _ => vec![CrossingPattern::empty(OUTER_SEPARATOR)],
    };
    let mut best: BTreeMap<CrossingPattern, RepPair> = BTreeMap::new();
    for (pred, pair) in prev.pairs.iter().enumerate() {
        let left = match prev.boundary {
            Boundary::Separator(a) => Some((abscissa2(a), &pair.pattern)),
            _ => None,
        };
        for xr in &mirrored {
            let right = match to {
                Boundary::Separator(b) => Some((abscissa2(b), xr)),
                _ => None,
            };
            let slice = Slice { points: slab_points, rows: &rows, left, right };
            let sol = match solve_with_boundary(&slice, limit) {
                Ok(s) => s,
                Err(Error::Infeasible) => continue,
                Err(e) => return Err(e),
            };
            let pattern = sol.realized.unwrap_or_else(|| CrossingPattern::empty(OUTER_SEPARATOR));
            if matches!(to, Boundary::Separator(_)) && (pattern.is_empty() || pattern.len() > cap || !pattern.is_noncrossing()) {
                continue;
            }
            let cand = RepPair { pattern, length2: pair.length2 + sol.length2, pred, segments: sol.segments };
            match best.get(&cand.pattern) {
                Some(cur) if cur.length2 <= cand.length2 => {}
                _ => {
                    best.insert(cand.pattern.clone(), cand);
                }
            }
        }
    }
    Ok(RepresentativeStage { boundary: to, pairs: best.into_values().collect() })
}

/// Removes non-terminal leaves from a union of elementary segments
/// (doubled units), such as half-edges ending at a separator.
fn strip_stubs(segs: Vec<Segment>, terminals2: &BTreeSet<Point>) -> Vec<Segment> {
    let mut live: BTreeSet<Segment> = segs.into_iter().filter(|s| s.a != s.b).collect();
    loop {
        let mut deg: BTreeMap<Point, usize> = BTreeMap::new();
        for s in &live {
            *deg.entry(s.a).or_insert(0) += 1;
            *deg.entry(s.b).or_insert(0) += 1;
        }
        let leaf = |p: &Point| deg[p] == 1 && !terminals2.contains(p);
        let before = live.len();
        live.retain(|s| !leaf(&s.a) && !leaf(&s.b));
        if live.len() == before {
            return live.into_iter().collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_mrst;
    use crate::tree::validate_steiner_tree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ps(pts: &[(i64, i64)], delta: i64, scale: i64) -> PointSet {
        PointSet::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), delta, scale).unwrap()
    }

    fn soft_only(cap: usize) -> FptConfig {
        FptConfig { delta_threshold: Decimal::ZERO, mirrored_cap: Some(cap), ..FptConfig::default() }
    }

    fn random_set(rng: &mut ChaCha8Rng, n: usize, delta: i64, scale: i64) -> PointSet {
        let mut x = 0;
        let pts: Vec<(i64, i64)> = (0..n)
            .map(|_| {
                x += rng.gen_range(0..=2 * scale);
                (x, rng.gen_range(0..=delta))
            })
            .collect();
        ps(&pts, delta, scale)
    }

    #[test]
    fn single_point_and_pair() {
        let s = compute_mrst(&ps(&[(3, 1)], 2, 1)).unwrap();
        assert_eq!(s.length, 0);
        assert!(s.tree.edges().is_empty());
        let s = compute_mrst(&ps(&[(0, 0), (3, 2)], 2, 1)).unwrap();
        assert_eq!(s.length, 5);
    }

    #[test]
    fn hard_walls_split_additively() {
        // A wall planted at window 0 with centre at index 2.
        let pts = [(0, 2), (8, 1), (16, 2), (24, 3), (32, 0), (33, 4), (34, 1)];
        let p = ps(&pts, 4, 1);
        let s = compute_mrst(&p).unwrap();
        assert_eq!(s.report.hard_walls, vec![0, 2, 6]);
        let left = oracle_mrst(&p.slice(0, 2)).unwrap().0.length;
        let right = oracle_mrst(&p.slice(2, 6)).unwrap().0.length;
        assert_eq!(s.length, left + right);
        assert_eq!(s.length, oracle_mrst(&p).unwrap().0.length);
        assert!(validate_steiner_tree(&s.tree, &p).unwrap().is_valid());
    }

    #[test]
    fn matches_oracle_without_walls() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = random_set(&mut rng, 7, 3, 2);
            let s = compute_mrst(&p).unwrap();
            assert_eq!(s.length, oracle_mrst(&p).unwrap().0.length);
            assert!(validate_steiner_tree(&s.tree, &p).unwrap().is_valid());
        }
    }

    #[test]
    fn soft_wall_program_is_exact_with_full_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut stages_seen = 0;
        for _ in 0..12 {
            let p = random_set(&mut rng, 7, 2, 2);
            let rows = build_hanan_grid(&p).ny();
            let s = compute_mrst_with(&p, &soft_only(rows)).unwrap();
            assert_eq!(s.length, oracle_mrst(&p).unwrap().0.length, "{p:?}");
            assert!(validate_steiner_tree(&s.tree, &p).unwrap().is_valid());
            stages_seen += s.report.intervals.iter().map(|i| i.soft_walls.len()).sum::<usize>();
            assert!(s.report.intervals.iter().all(|i| i.method == "soft-wall-dp"));
        }
        assert!(stages_seen > 0);
    }

    #[test]
    fn small_cap_never_beats_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..12 {
            let p = random_set(&mut rng, 7, 2, 2);
            match compute_mrst_with(&p, &soft_only(1)) {
                Ok(s) => {
                    assert!(s.length >= oracle_mrst(&p).unwrap().0.length);
                    assert!(validate_steiner_tree(&s.tree, &p).unwrap().is_valid());
                }
                Err(e) => assert_eq!(e, Error::NoSolution),
            }
        }
    }

    #[test]
    fn oversized_interval_is_reported() {
        let pts: Vec<(i64, i64)> = (0..20).map(|i| (i, i % 3)).collect();
        let cfg = FptConfig { terminal_limit: 6, ..FptConfig::default() };
        let e = compute_mrst_with(&ps(&pts, 2, 1), &cfg).unwrap_err();
        assert!(matches!(e, Error::SubproblemTooLarge { start: 0, end: 19, .. }), "{e:?}");
    }

    #[test]
    fn default_mirrored_cap() {
        assert_eq!(mirrored_cap_bound(&ps(&[(0, 0)], 4, 1)), 72);
        assert_eq!(mirrored_cap_bound(&ps(&[(0, 0)], 1000, 1000)), 54);
    }
}
