//! One entry point over all solvers, plus the `--verify` checks.

use crate::audit::{audit_tree, AuditReport};
use crate::coord::Coord;
use crate::error::{Error, Result};
use crate::fpt::{compute_mrst_with, FptConfig, FptReport};
use crate::io::Instance;
use crate::oracle::{brute_force_mrst, oracle_mrst, SteinerInstance, DEFAULT_TERMINAL_LIMIT};
use crate::sparse_dp::{solve_sparse_with, Cap, SparseConfig, SparseReport};
use crate::tree::{tonicity, RectTree};
use crate::walls::find_walls;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Auto,
    SparseDp,
    Fpt,
    Oracle,
    Brute,
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Algorithm::Auto,
            "sparse-dp" => Algorithm::SparseDp,
            "fpt" => Algorithm::Fpt,
            "oracle" => Algorithm::Oracle,
            "brute" => Algorithm::Brute,
            _ => return Err(Error::InvalidInput(format!("unknown algorithm {s:?}"))),
        })
    }
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::SparseDp => "sparse-dp",
            Algorithm::Fpt => "fpt",
            Algorithm::Oracle => "oracle",
            Algorithm::Brute => "brute",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    /// `None` picks `Auto` when a sparseness bound is known, else `Escalate`.
    pub cap: Option<Cap>,
    pub fpt: FptConfig,
    /// Record wall-clock time per phase. Needs a platform clock.
    pub time: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { algorithm: Algorithm::Auto, cap: None, fpt: FptConfig::default(), time: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub phases: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub n: usize,
    pub scale: i64,
    pub delta_units: Coord,
    pub length_units: Coord,
    pub tonicity_max: usize,
    pub tonicity_profile: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparse: Option<SparseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fpt: Option<FptReport>,
    /// Why `auto` or `fpt` ended up on another solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub tree: RectTree,
    pub report: SolveReport,
}

struct Clock {
    on: bool,
    phases: Vec<(String, f64)>,
}

impl Clock {
    fn run<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        if !self.on {
            return f();
        }
        let t = Instant::now();
        let out = f();
        self.phases.push((name.to_string(), t.elapsed().as_secs_f64()));
        out
    }
}

fn resolve(inst: &Instance, algorithm: Algorithm) -> Algorithm {
    match algorithm {
        Algorithm::Auto if inst.generator.is_some() => Algorithm::Fpt,
        Algorithm::Auto if inst.set.sparseness_k().is_some() => Algorithm::SparseDp,
        Algorithm::Auto if inst.set.len() <= DEFAULT_TERMINAL_LIMIT => Algorithm::Oracle,
        Algorithm::Auto => Algorithm::SparseDp,
        a => a,
    }
}

pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<Solved> {
    let p = &inst.set;
    let mut clock = Clock { on: opts.time, phases: Vec::new() };
    let mut algorithm = resolve(inst, opts.algorithm);
    let mut fallback = None;
    let mut sparse = None;
    let mut fpt = None;
    if algorithm == Algorithm::Fpt {
        clock.run("wall scan", || find_walls(p));
        match clock.run("fpt", || compute_mrst_with(p, &opts.fpt)) {
            Ok(s) => fpt = Some(s),
            Err(Error::SubproblemTooLarge { start, end, terminals }) if opts.algorithm == Algorithm::Auto => {
                fallback = Some(format!("interval {start}..={end} has {terminals} terminals; used sparse-dp"));
                algorithm = Algorithm::SparseDp;
            }
            Err(e) => return Err(e),
        }
    }
    let tree = match algorithm {
        Algorithm::Fpt => {
            let s = fpt.expect("fpt ran");
            fpt = Some(s.clone());
            s.tree
        }
        Algorithm::SparseDp => {
            let cap = opts.cap.unwrap_or(if p.sparseness_k().is_some() { Cap::Auto } else { Cap::Escalate });
            let cfg = SparseConfig { cap, ..SparseConfig::default() };
            let s = clock.run("sparse dp", || solve_sparse_with(p, &cfg))?;
            sparse = Some(s.report.clone());
            s.tree
        }
        Algorithm::Oracle => clock.run("oracle", || oracle_mrst(p))?.1,
        Algorithm::Brute => {
            let (inst, grid) = SteinerInstance::for_points(p);
            clock.run("brute force", || brute_force_mrst(&inst))?.into_tree(grid)
        }
        Algorithm::Auto => unreachable!("resolved above"),
    };
    let ton = tonicity(&tree, p);
    let report = SolveReport {
        algorithm,
        n: p.len(),
        scale: p.scale(),
        delta_units: p.delta(),
        length_units: tree.length(),
        tonicity_max: ton.max,
        tonicity_profile: ton.per_separator,
        sparse,
        fpt: fpt.map(|s| s.report),
        fallback,
        timings: opts.time.then_some(Timings { phases: clock.phases }),
    };
    Ok(Solved { tree, report })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub audit: AuditReport,
    /// Oracle length, for instances small enough to run it.
    pub oracle_length: Option<Coord>,
    pub ok: bool,
}

/// Structural audit plus, up to the oracle's terminal limit, an exact
/// length comparison.
pub fn verify(inst: &Instance, tree: &RectTree) -> Result<VerifyReport> {
    let p = &inst.set;
    let audit = audit_tree(tree, p, None)?;
    let oracle_length = if p.len() <= DEFAULT_TERMINAL_LIMIT { Some(oracle_mrst(p)?.0.length) } else { None };
    let ok = audit.ok() && oracle_length.is_none_or(|l| l == tree.length());
    Ok(VerifyReport { audit, oracle_length, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{Point, PointSet};
    use crate::random::{generate_random_instance, GenSpec};
    use rust_decimal::Decimal;

    fn cross() -> Instance {
        let pts = vec![Point::new(1, 0), Point::new(0, 1), Point::new(2, 1), Point::new(1, 2)];
        Instance::new(PointSet::new(pts, 2, 1).unwrap())
    }

    #[test]
    fn every_algorithm_agrees_on_the_cross() {
        for a in ["auto", "sparse-dp", "fpt", "oracle", "brute"] {
            let opts = SolveOptions { algorithm: a.parse().unwrap(), ..SolveOptions::default() };
            let s = solve(&cross(), &opts).unwrap();
            assert_eq!(s.report.length_units, 4, "{a}");
            assert!(verify(&cross(), &s.tree).unwrap().ok);
        }
        assert!("magic".parse::<Algorithm>().is_err());
    }

    #[test]
    fn auto_resolution() {
        let spec = GenSpec::new(12, Decimal::ONE, 3, 1000);
        let inst = Instance { set: generate_random_instance(&spec).unwrap(), generator: Some(spec.metadata()) };
        let s = solve(&inst, &SolveOptions { time: true, ..SolveOptions::default() }).unwrap();
        assert_eq!(s.report.algorithm, Algorithm::Fpt);
        assert!(s.report.timings.is_some());
        assert_eq!(s.report.length_units, oracle_mrst(&inst.set).unwrap().0.length);
        assert_eq!(solve(&cross(), &SolveOptions::default()).unwrap().report.algorithm, Algorithm::Oracle);
        let k = Instance::new(cross().set.with_sparseness_k(Some(2)));
        assert_eq!(solve(&k, &SolveOptions::default()).unwrap().report.algorithm, Algorithm::SparseDp);
    }
}
