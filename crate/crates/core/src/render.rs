//! Deterministic SVG drawings in raw units. The y axis is flipped so the
//! strip floor is at the bottom.

use crate::coord::Coord;
use crate::points::PointSet;
use crate::tree::{classify_vertices, RectTree};
use crate::walls::find_walls;
use std::fmt::Write;

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    pub show_walls: bool,
    pub show_separators: bool,
}

/// Draws `p` and, when given, a tree on its grid.
pub fn render_svg(p: &PointSet, tree: Option<&RectTree>, opts: &RenderOptions) -> String {
    let pts = p.points();
    let (x0, x1) = (pts.first().map_or(0, |q| q.x), pts.last().map_or(0, |q| q.x));
    let delta = p.delta();
    let span = (x1 - x0).max(delta).max(1);
    let margin = (span / 20).max(1);
    let r = (span / 150).max(1);
    let flip = |y: Coord| delta - y;
    let (vx, vy, vw, vh) = (x0 - margin, -margin, x1 - x0 + 2 * margin, delta + 2 * margin);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx} {vy} {vw} {vh}" preserveAspectRatio="xMidYMid meet">"#
    );
    let _ = writeln!(s, r##"<rect class="strip" x="{vx}" y="0" width="{vw}" height="{delta}" fill="#f4f4f4"/>"##);
    let guide = |s: &mut String, class: &str, x2: Coord, color: &str| {
        // Doubled abscissa: emit as a decimal with at most one place.
        let x = if x2 % 2 == 0 { format!("{}", x2 / 2) } else { format!("{}.5", x2.div_euclid(2)) };
        let _ = writeln!(
            s,
            r#"<line class="{class}" x1="{x}" y1="{vy}" x2="{x}" y2="{}" stroke="{color}" stroke-dasharray="4 3" vector-effect="non-scaling-stroke"/>"#,
            vy + vh
        );
    };
    if opts.show_separators {
        for sep in p.separators() {
            guide(&mut s, "separator", sep.abscissa2, "#bbbbbb");
        }
    }
    if opts.show_walls {
        let walls = find_walls(p);
        for &h in &walls.hard {
            guide(&mut s, "hard-wall", 2 * pts[h].x, "#c0392b");
        }
        for &w in walls.soft.iter().flatten() {
            guide(&mut s, "soft-wall", pts[w].x + pts[w + 1].x, "#2471a3");
        }
    }
    if let Some(t) = tree {
        for seg in t.node_segments(p) {
            let _ = writeln!(
                s,
                r#"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="2" vector-effect="non-scaling-stroke"/>"#,
                seg.a.x,
                flip(seg.a.y),
                seg.b.x,
                flip(seg.b.y)
            );
        }
        let grid = t.grid();
        for (v, class) in classify_vertices(t, p) {
            if class.is_steiner_point() {
                let q = grid.vertex_point(v);
                let _ = writeln!(
                    s,
                    r#"<circle class="steiner" cx="{}" cy="{}" r="{r}" fill="white" stroke="black" vector-effect="non-scaling-stroke"/>"#,
                    q.x,
                    flip(q.y)
                );
            }
        }
    }
    for q in pts {
        let _ = writeln!(s, r#"<circle class="terminal" cx="{}" cy="{}" r="{r}" fill="black"/>"#, q.x, flip(q.y));
    }
    s.push_str("</svg>\n");
    s
}
