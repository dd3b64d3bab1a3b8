use std::collections::HashMap;

use super::sweep::ErrorSurface;
use super::Method;

/// Ordered `(x, y)` points of one connected piece of a level set.
pub type Polyline = Vec<(f64, f64)>;

/// Level set of `method`'s error surface. An empty list means the level is
/// never crossed.
pub fn extract_contour(surface: &ErrorSurface, method: Method, level: f64) -> Vec<Polyline> {
    march_squares(
        &surface.x_axis,
        &surface.y_axis,
        &surface.values(method),
        level,
    )
}

// Edge identifiers: horizontal edge from (ix, iy) to (ix+1, iy), or vertical
// edge from (ix, iy) to (ix, iy+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Marching squares over `values[iy * x.len() + ix]`. Cells with a NaN
/// corner are skipped; saddles are resolved with the cell-centre mean.
pub fn march_squares(x: &[f64], y: &[f64], values: &[f64], level: f64) -> Vec<Polyline> {
    let (nx, ny) = (x.len(), y.len());
    assert_eq!(values.len(), nx * ny, "values must be nx*ny");
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let v = |ix: usize, iy: usize| values[iy * nx + ix];
    let above = |z: f64| z >= level;

    let point = |e: Edge| -> (f64, f64) {
        let ((x0, y0, a), (x1, y1, b)) = match e {
            Edge::H(i, j) => ((x[i], y[j], v(i, j)), (x[i + 1], y[j], v(i + 1, j))),
            Edge::V(i, j) => ((x[i], y[j], v(i, j)), (x[i], y[j + 1], v(i, j + 1))),
        };
        let s = ((level - a) / (b - a)).clamp(0.0, 1.0);
        (x0 + s * (x1 - x0), y0 + s * (y1 - y0))
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            // corners counter-clockwise from bottom-left
            let c = [v(ix, iy), v(ix + 1, iy), v(ix + 1, iy + 1), v(ix, iy + 1)];
            if c.iter().any(|z| z.is_nan()) {
                continue;
            }
            let up = c.map(above);
            // edge k joins corner k and corner k+1
            let edges = [
                Edge::H(ix, iy),
                Edge::V(ix + 1, iy),
                Edge::H(ix, iy + 1),
                Edge::V(ix, iy),
            ];
            let cut: Vec<usize> = (0..4).filter(|&k| up[k] != up[(k + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let centre = above(c.iter().sum::<f64>() / 4.0);
                    // isolate the two corners that disagree with the centre
                    let lone = if centre == up[0] { 1 } else { 0 };
                    for corner in [lone, lone + 2] {
                        segments.push((edges[(corner + 3) % 4], edges[corner]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut at: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        at.entry(*a).or_default().push(k);
        at.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start: usize, from: Edge, used: &mut Vec<bool>| -> Polyline {
        let mut line = vec![point(from)];
        let (mut seg, mut edge) = (start, from);
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            edge = if a == edge { b } else { a };
            line.push(point(edge));
            match at[&edge].iter().find(|&&s| !used[s]) {
                Some(&next) => seg = next,
                None => break,
            }
        }
        line
    };

    // open chains start at boundary edges touched by a single segment; sort
    // the starts so output does not depend on hash order
    let mut ends: Vec<(Edge, usize)> = at
        .iter()
        .filter(|(_, s)| s.len() == 1)
        .map(|(e, s)| (*e, s[0]))
        .collect();
    ends.sort();
    for (edge, seg) in ends {
        if !used[seg] {
            lines.push(walk(seg, edge, &mut used));
        }
    }
    for seg in 0..segments.len() {
        if !used[seg] {
            let start = segments[seg].0;
            lines.push(walk(seg, start, &mut used));
        }
    }
    lines
}
