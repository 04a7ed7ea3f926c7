use proptest::prelude::*;
use std::collections::BTreeSet;
use strip_steiner::audit::audit_tree;
use strip_steiner::fpt::{compute_mrst, compute_mrst_with, representative_sets, Boundary, FptConfig};
use strip_steiner::io::{read_instance, read_tree, write_instance, write_tree, Instance};
use strip_steiner::oracle::{brute_force_all_optima, oracle_mrst, SteinerInstance};
use strip_steiner::patterns::{enumerate_noncrossing_partitions, pattern_of_tree, CrossingPattern, Side};
use strip_steiner::render::{render_svg, RenderOptions};
use strip_steiner::sparse_dp::{solve_sparse, Cap};
use strip_steiner::walls::{find_walls, soft_window};
use strip_steiner::{build_hanan_grid, tonicity, Decimal, Point, PointSet, RectTree};

/// Up to `max_n` points on a small integer lattice, so ties in x and y occur.
fn point_set(max_n: usize, max_x: i64, max_delta: i64) -> impl Strategy<Value = PointSet> {
    (1..=max_delta).prop_flat_map(move |delta| {
        prop::collection::vec((0..=max_x, 0..=delta), 1..=max_n).prop_map(move |pts| {
            PointSet::new(pts.into_iter().map(|(x, y)| Point::new(x, y)).collect(), delta, 1).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solvers_agree_and_stay_within_tonicity(p in point_set(7, 12, 3)) {
        let (dw, tree) = oracle_mrst(&p).unwrap();
        let sparse = solve_sparse(&p, Cap::Fixed(p.len())).unwrap();
        let fpt = compute_mrst(&p).unwrap();
        prop_assert_eq!(sparse.report.length_units, dw.length);
        prop_assert_eq!(fpt.length, dw.length);
        for t in [&tree, &sparse.tree, &fpt.tree] {
            prop_assert!(tonicity(t, &p).max <= p.len());
            let audit = audit_tree(t, &p, None).unwrap();
            prop_assert!(audit.ok(), "{:?}", audit.violations);
        }
    }

    #[test]
    fn soft_wall_program_matches_oracle(p in point_set(6, 10, 2)) {
        let rows = build_hanan_grid(&p).ny();
        let cfg = FptConfig { delta_threshold: Decimal::ZERO, mirrored_cap: Some(rows), ..FptConfig::default() };
        let s = compute_mrst_with(&p, &cfg).unwrap();
        prop_assert_eq!(s.length, oracle_mrst(&p).unwrap().0.length);
    }

    #[test]
    fn length_is_additive_over_disjoint_edges(p in point_set(5, 8, 3), mask in any::<u64>()) {
        let grid = build_hanan_grid(&p);
        let (a, b): (Vec<usize>, Vec<usize>) = (0..grid.num_edges()).partition(|&e| mask >> (e % 64) & 1 == 1);
        let ta = RectTree::new(grid.clone(), a);
        let tb = RectTree::new(grid, b);
        prop_assert_eq!(ta.union(&tb).length(), ta.length() + tb.length());
    }

    #[test]
    fn grid_is_idempotent_on_its_vertices(p in point_set(6, 20, 5)) {
        let grid = build_hanan_grid(&p);
        let vertices: Vec<Point> = (0..grid.num_vertices()).map(|v| grid.vertex_point(v)).collect();
        let q = PointSet::new(vertices, p.delta(), p.scale()).unwrap();
        prop_assert_eq!(build_hanan_grid(&q), grid.clone());
        let (nx, ny) = (grid.nx(), grid.ny());
        prop_assert!(grid.num_edges() <= 2 * nx * ny - nx - ny);
    }

    #[test]
    fn files_round_trip(p in point_set(8, 1000, 50), scale in 1i64..2000) {
        let p = PointSet::new(p.points().to_vec(), p.delta(), scale).unwrap();
        let inst = Instance::new(p.clone());
        prop_assert_eq!(read_instance(&write_instance(&inst)).unwrap(), inst);
        let (_, t) = oracle_mrst(&p).unwrap();
        prop_assert_eq!(read_tree(&write_tree(&t, scale), &p).unwrap(), t);
    }

    #[test]
    fn walls_are_ordered(p in point_set(40, 200, 2)) {
        let w = find_walls(&p);
        prop_assert_eq!(w.hard[0], 0);
        prop_assert!(w.hard.windows(2).all(|h| h[0] < h[1]));
        let interior: Vec<usize> = if w.hard.len() > 2 { w.hard[1..w.hard.len() - 1].to_vec() } else { Vec::new() };
        prop_assert!(interior.windows(2).all(|h| h[1] - h[0] >= 5));
        for (h, soft) in w.hard.windows(2).zip(&w.soft) {
            prop_assert!(soft.iter().all(|&s| h[0] <= s && s < h[1]));
        }
    }

    #[test]
    fn rendering_is_deterministic(p in point_set(6, 10, 3)) {
        let (_, t) = oracle_mrst(&p).unwrap();
        let opts = RenderOptions { show_walls: true, show_separators: true };
        prop_assert_eq!(render_svg(&p, Some(&t), &opts), render_svg(&p, Some(&t), &opts));
    }
}

#[test]
fn noncrossing_partitions_are_distinct_and_valid() {
    for m in 0..=7 {
        let all = enumerate_noncrossing_partitions(m);
        let set: BTreeSet<&Vec<u32>> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        for labels in &all {
            let pairs = labels.iter().enumerate().map(|(r, &l)| (r as u32, l as usize)).collect();
            let pat = CrossingPattern::from_labeled(0, pairs);
            assert!(pat.is_noncrossing());
            assert_eq!(pat.labels(), &labels[..]);
        }
    }
}

/// Tiny instances on a unit strip, where every positive gap is a soft wall.
fn tiny_instances() -> Vec<PointSet> {
    let mut out = Vec::new();
    let xs = [[0, 1, 2, 3], [0, 2, 3, 5], [0, 1, 1, 3], [0, 2, 4, 5]];
    for x in &xs {
        for ys in [[0, 1, 0, 1], [1, 0, 0, 1], [0, 0, 1, 1], [1, 1, 0, 0], [0, 1, 1, 0]] {
            let pts: Vec<Point> = x.iter().zip(ys).map(|(&x, y)| Point::new(x, y)).collect();
            let p = PointSet::new(pts, 1, 1).unwrap();
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

#[test]
fn representative_sets_contain_an_optimal_pattern() {
    for p in tiny_instances() {
        assert_eq!(soft_window(&p), 1);
        let walls = find_walls(&p);
        assert_eq!(walls.hard, vec![0, p.len() - 1]);
        let soft = walls.soft[0].clone();
        assert!(!soft.is_empty());
        let rows = build_hanan_grid(&p).ny();
        let reps = representative_sets(&p, &soft, rows, 16).unwrap();

        let (inst, grid) = SteinerInstance::for_points(&p);
        let (best, optima) = brute_force_all_optima(&inst).unwrap();
        let last = reps.stages.last().unwrap();
        assert_eq!(last.pairs.len(), 1);
        assert_eq!(reps.best().unwrap().0, best, "{p:?}");

        let trees: Vec<RectTree> = optima.into_iter().map(|e| RectTree::new(grid.clone(), e)).collect();
        for stage in &reps.stages {
            let Boundary::Separator(sep) = stage.boundary else { continue };
            let optimal: BTreeSet<(Vec<u32>, Vec<u32>)> = trees
                .iter()
                .map(|t| {
                    let pat = pattern_of_tree(t, &p, sep, Side::Left).unwrap();
                    (pat.points().to_vec(), pat.labels().to_vec())
                })
                .collect();
            let found = stage.pairs.iter().any(|pair| optimal.contains(&(pair.pattern.points().to_vec(), pair.pattern.labels().to_vec())));
            assert!(found, "{p:?} at separator {sep}");
        }
    }
}
