use std::collections::VecDeque;

use super::BinaryMask;
use crate::{Error, Result};

/// Moore neighbourhood offsets in counter-clockwise order as displayed
/// (y axis pointing down), starting west.
const NEIGHBORS: [(i64, i64); 8] = [
    (-1, 0),  // W
    (-1, 1),  // SW
    (0, 1),   // S
    (1, 1),   // SE
    (1, 0),   // E
    (1, -1),  // NE
    (0, -1),  // N
    (-1, -1), // NW
];

/// Ordered closed sequence of pixel coordinates `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    points: Vec<(i64, i64)>,
}

impl Contour {
    pub fn from_points(points: Vec<(i64, i64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateContour(0));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        Self {
            points: self.points.iter().map(|&(x, y)| (x + dx, y + dy)).collect(),
        }
    }

    /// True when consecutive points, including last-to-first, are 8-neighbours.
    pub fn is_closed_chain(&self) -> bool {
        let n = self.points.len();
        if n == 1 {
            return true;
        }
        (0..n).all(|i| {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            let (dx, dy) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
            dx <= 1 && dy <= 1 && (dx, dy) != (0, 0)
        })
    }

    /// Twice the signed shoelace area in raw pixel coordinates. Negative for
    /// traversals that run counter-clockwise on screen.
    pub fn signed_area2(&self) -> i64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum()
    }

    /// Samples the closed polyline through the points so that consecutive
    /// samples are at most `step` apart.
    pub fn densified(&self, step: f64) -> Vec<(f64, f64)> {
        let n = self.points.len();
        if n == 1 {
            let (x, y) = self.points[0];
            return vec![(x as f64, y as f64)];
        }
        let mut out = Vec::new();
        for i in 0..n {
            let (ax, ay) = (self.points[i].0 as f64, self.points[i].1 as f64);
            let (bx, by) = (
                self.points[(i + 1) % n].0 as f64,
                self.points[(i + 1) % n].1 as f64,
            );
            let len = (bx - ax).hypot(by - ay);
            let pieces = ((len / step).ceil() as usize).max(1);
            for j in 0..pieces {
                let f = j as f64 / pieces as f64;
                out.push((ax + (bx - ax) * f, ay + (by - ay) * f));
            }
        }
        out
    }
}

/// Labels of the 8-connected foreground components, in raster order of
/// their first pixel.
fn components(mask: &BinaryMask) -> Vec<Vec<usize>> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if seen[start] || !mask.data()[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(idx) = queue.pop_front() {
            comp.push(idx);
            let (x, y) = ((idx % w) as i64, (idx / w) as i64);
            for (dx, dy) in NEIGHBORS {
                let (nx, ny) = (x + dx, y + dy);
                if mask.get_signed(nx, ny) {
                    let n = ny as usize * w + nx as usize;
                    if !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Traces the outer boundary of the largest 8-connected foreground component.
///
/// Moore-neighbour tracing, counter-clockwise on screen, starting at the
/// top-most then left-most pixel of the component. Equal-sized components are
/// resolved in favour of the one whose start pixel comes first in raster
/// order. Tracing stops when the first move (start to second point) would be
/// repeated, so pixels on one-pixel-wide necks appear once per pass.
pub fn trace_contour(mask: &BinaryMask) -> Result<Contour> {
    let comps = components(mask);
    let mut best: Option<&Vec<usize>> = None;
    for c in &comps {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    let comp = best.ok_or(Error::EmptyMask)?;

    let w = mask.width();
    let mut inside = BinaryMask::empty(w, mask.height())?;
    for &idx in comp {
        inside.set(idx % w, idx / w, true);
    }
    // BFS visits in raster order of discovery, not raster order overall.
    let start_idx = *comp.iter().min().expect("component is non-empty");
    let start = ((start_idx % w) as i64, (start_idx / w) as i64);

    let mut points = vec![start];
    let mut current = start;
    // West of the start pixel is background: nothing in the component lies
    // left of it on its row.
    let mut backtrack = 0usize;
    loop {
        let mut next = None;
        for k in 1..=8 {
            let dir = (backtrack + k) % 8;
            let cand = (current.0 + NEIGHBORS[dir].0, current.1 + NEIGHBORS[dir].1);
            if inside.get_signed(cand.0, cand.1) {
                // The previously examined neighbour is background and a
                // 4-neighbour of the candidate; it becomes the new backtrack.
                let prev = (backtrack + k - 1) % 8;
                let bg = (current.0 + NEIGHBORS[prev].0, current.1 + NEIGHBORS[prev].1);
                let rel = (bg.0 - cand.0, bg.1 - cand.1);
                let new_back = NEIGHBORS
                    .iter()
                    .position(|&d| d == rel)
                    .expect("backtrack is adjacent to the candidate");
                next = Some((cand, new_back));
                break;
            }
        }
        let Some((cand, new_back)) = next else {
            // isolated pixel
            return Contour::from_points(points);
        };
        if current == start && points.len() > 1 && cand == points[1] {
            // the trailing point is the start pixel again
            points.pop();
            break;
        }
        points.push(cand);
        current = cand;
        backtrack = new_back;
    }
    Contour::from_points(points)
}
