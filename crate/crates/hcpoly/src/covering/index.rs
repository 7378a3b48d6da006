//! Uniform-grid range search over points and axis-aligned rectangles.

use std::collections::HashMap;

use num_complex::Complex;

type Cell = (i64, i64);

fn cell_of(x: f64, y: f64, origin: (f64, f64), side: f64) -> Cell {
    (((x - origin.0) / side).floor() as i64, ((y - origin.1) / side).floor() as i64)
}

/// Points bucketed into square cells sized so each holds about one point.
#[derive(Clone, Debug)]
pub struct PointIndex {
    points: Vec<Complex<f64>>,
    origin: (f64, f64),
    side: f64,
    cells: HashMap<Cell, Vec<u32>>,
}

impl PointIndex {
    pub fn new(points: &[Complex<f64>]) -> PointIndex {
        assert!(points.iter().all(|p| p.re.is_finite() && p.im.is_finite()), "non-finite point");
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in points {
            x0 = x0.min(p.re);
            y0 = y0.min(p.im);
            x1 = x1.max(p.re);
            y1 = y1.max(p.im);
        }
        if points.is_empty() {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let extent = (x1 - x0).max(y1 - y0);
        let extent = if extent > 0.0 { extent } else { 1.0 };
        let side = extent / (points.len() as f64).sqrt().max(1.0);
        let origin = (x0, y0);
        let mut cells: HashMap<Cell, Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(cell_of(p.re, p.im, origin, side)).or_default().push(i as u32);
        }
        PointIndex { points: points.to_vec(), origin, side, cells }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex<f64>] {
        &self.points
    }

    /// Ids of the points in the closed disk `D(center, radius)`, ascending.
    pub fn query_disk(&self, center: Complex<f64>, radius: f64) -> Vec<usize> {
        let lo = cell_of(center.re - radius, center.im - radius, self.origin, self.side);
        let hi = cell_of(center.re + radius, center.im + radius, self.origin, self.side);
        let span = (hi.0 as f64 - lo.0 as f64 + 1.0) * (hi.1 as f64 - lo.1 as f64 + 1.0);
        let inside = |i: &u32| (self.points[*i as usize] - center).norm() <= radius;
        let mut out: Vec<usize> = if span > self.cells.len() as f64 {
            self.cells
                .iter()
                .filter(|(c, _)| c.0 >= lo.0 && c.0 <= hi.0 && c.1 >= lo.1 && c.1 <= hi.1)
                .flat_map(|(_, v)| v.iter().filter(|i| inside(i)).map(|&i| i as usize))
                .collect()
        } else {
            let mut v = Vec::new();
            for cx in lo.0..=hi.0 {
                for cy in lo.1..=hi.1 {
                    if let Some(ids) = self.cells.get(&(cx, cy)) {
                        v.extend(ids.iter().filter(|i| inside(i)).map(|&i| i as usize));
                    }
                }
            }
            v
        };
        out.sort_unstable();
        out
    }
}

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
        assert!(x0 <= x1 && y0 <= y1, "rectangle corners out of order");
        Rect { x0, y0, x1, y1 }
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }
}

/// Rectangles registered in every grid cell they overlap; rectangles
/// spanning too many cells go to a list that every query scans.
#[derive(Clone, Debug)]
pub struct RectIndex {
    rects: Vec<Rect>,
    origin: (f64, f64),
    side: f64,
    cells: HashMap<Cell, Vec<u32>>,
    wide: Vec<u32>,
}

const WIDE_CELLS: i64 = 64;

impl RectIndex {
    pub fn new(rects: &[Rect]) -> RectIndex {
        let mut sides: Vec<f64> = rects.iter().map(|r| (r.x1 - r.x0).max(r.y1 - r.y0)).collect();
        sides.sort_by(f64::total_cmp);
        let median = sides.get(sides.len() / 2).copied().unwrap_or(1.0);
        let (x0, y0) = rects.iter().fold((0f64, 0f64), |a, r| (a.0.min(r.x0), a.1.min(r.y0)));
        let side = if median > 0.0 { median } else { 1.0 };
        let origin = (x0, y0);
        let mut cells: HashMap<Cell, Vec<u32>> = HashMap::new();
        let mut wide = Vec::new();
        for (i, r) in rects.iter().enumerate() {
            let lo = cell_of(r.x0, r.y0, origin, side);
            let hi = cell_of(r.x1, r.y1, origin, side);
            if (hi.0 - lo.0 + 1) * (hi.1 - lo.1 + 1) > WIDE_CELLS {
                wide.push(i as u32);
                continue;
            }
            for cx in lo.0..=hi.0 {
                for cy in lo.1..=hi.1 {
                    cells.entry((cx, cy)).or_default().push(i as u32);
                }
            }
        }
        RectIndex { rects: rects.to_vec(), origin, side, cells, wide }
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Ids of the stored rectangles meeting `q`, ascending.
    pub fn query_intersecting(&self, q: &Rect) -> Vec<usize> {
        let lo = cell_of(q.x0, q.y0, self.origin, self.side);
        let hi = cell_of(q.x1, q.y1, self.origin, self.side);
        let span = (hi.0 as f64 - lo.0 as f64 + 1.0) * (hi.1 as f64 - lo.1 as f64 + 1.0);
        let mut cand: Vec<u32> = self.wide.clone();
        if span > self.cells.len() as f64 {
            for (c, v) in &self.cells {
                if c.0 >= lo.0 && c.0 <= hi.0 && c.1 >= lo.1 && c.1 <= hi.1 {
                    cand.extend(v);
                }
            }
        } else {
            for cx in lo.0..=hi.0 {
                for cy in lo.1..=hi.1 {
                    if let Some(v) = self.cells.get(&(cx, cy)) {
                        cand.extend(v);
                    }
                }
            }
        }
        cand.sort_unstable();
        cand.dedup();
        cand.into_iter().filter(|&i| self.rects[i as usize].intersects(q)).map(|i| i as usize).collect()
    }
}
