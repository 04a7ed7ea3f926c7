//! Browser bindings. Each export takes plain numbers and returns a JSON
//! string; the inner functions are ordinary Rust so they test natively.

use serde_json::{json, Value};
use strip_steiner::coord::{decimal_from_f64, units_to_string};
use strip_steiner::io::Instance;
use strip_steiner::patterns::{pattern_of_tree, Side};
use strip_steiner::random::{generate_random_instance, GenSpec};
use strip_steiner::render::{render_svg, RenderOptions};
use strip_steiner::solve::{solve, Algorithm, SolveOptions};
use strip_steiner::stats::instance_stats;
use strip_steiner::walls::find_walls;
use wasm_bindgen::prelude::*;

const SCALE: i64 = 1000;
const MAX_POINTS: usize = 2000;

fn instance(n: usize, delta: f64, seed: u64) -> Result<Instance, String> {
    if n == 0 || n > MAX_POINTS {
        return Err(format!("n must be between 1 and {MAX_POINTS}"));
    }
    let delta = decimal_from_f64(delta).map_err(|e| e.to_string())?;
    let spec = GenSpec::new(n, delta, seed, SCALE);
    let set = generate_random_instance(&spec).map_err(|e| e.to_string())?;
    Ok(Instance { set, generator: Some(spec.metadata()) })
}

fn text(units: i64) -> String {
    units_to_string(units, SCALE)
}

pub fn solve_json(n: usize, delta: f64, seed: u64, algorithm: &str) -> Result<String, String> {
    let inst = instance(n, delta, seed)?;
    let algorithm: Algorithm = algorithm.parse().map_err(|e: strip_steiner::Error| e.to_string())?;
    let solved = solve(&inst, &SolveOptions { algorithm, ..SolveOptions::default() }).map_err(|e| e.to_string())?;
    let svg = render_svg(&inst.set, Some(&solved.tree), &RenderOptions { show_walls: true, show_separators: false });
    Ok(json!({
        "svg": svg,
        "length": text(solved.report.length_units),
        "algorithm": solved.report.algorithm,
        "tonicity_max": solved.report.tonicity_max,
        "fallback": solved.report.fallback,
    })
    .to_string())
}

pub fn walls_json(n: usize, delta: f64, seed: u64) -> Result<String, String> {
    let inst = instance(n, delta, seed)?;
    let walls = find_walls(&inst.set);
    let stats = instance_stats(&inst.set);
    let svg = render_svg(&inst.set, None, &RenderOptions { show_walls: true, show_separators: false });
    Ok(json!({
        "svg": svg,
        "hard_walls": walls.hard,
        "soft_walls": walls.soft,
        "rates": stats.empirical_rates,
        "expected": stats.expected,
    })
    .to_string())
}

/// Crossings of an optimal tree at the separator right of point `index`,
/// grouped by connectivity on each side.
pub fn pattern_json(n: usize, delta: f64, seed: u64, index: usize) -> Result<String, String> {
    let inst = instance(n, delta, seed)?;
    let p = &inst.set;
    if index + 1 >= p.len() || p.spacing(index) == 0 {
        return Err(format!("no separator right of point {index}"));
    }
    let solved = solve(&inst, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let ys = solved.tree.grid().ys().to_vec();
    let side = |s: Side| -> Result<Value, String> {
        let pat = pattern_of_tree(&solved.tree, p, index, s).map_err(|e| e.to_string())?;
        let parts: Vec<Vec<String>> =
            pat.parts().iter().map(|part| part.iter().map(|&r| text(ys[r as usize])).collect()).collect();
        Ok(json!(parts))
    };
    let svg = render_svg(p, Some(&solved.tree), &RenderOptions { show_walls: false, show_separators: true });
    Ok(json!({
        "svg": svg,
        "separator_x": units_to_string(p.points()[index].x + p.points()[index + 1].x, 2 * SCALE),
        "left": side(Side::Left)?,
        "right": side(Side::Right)?,
    })
    .to_string())
}

#[wasm_bindgen(start)]
pub fn start() {
    console_error_panic_hook::set_once();
}

#[wasm_bindgen]
pub fn solve_random(n: usize, delta: f64, seed: u64, algorithm: &str) -> Result<String, JsError> {
    solve_json(n, delta, seed, algorithm).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn walls_view(n: usize, delta: f64, seed: u64) -> Result<String, JsError> {
    walls_json(n, delta, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn crossing_pattern(n: usize, delta: f64, seed: u64, index: usize) -> Result<String, JsError> {
    pattern_json(n, delta, seed, index).map_err(|e| JsError::new(&e))
}
