//! Upper concave envelope of a planar point cloud (monotone chain).

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct UpperHull {
    /// Hull vertices sorted by x, strictly increasing.
    pub vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Smallest concave function lying above every point, as its vertex list.
pub fn upper_hull(points: &[(f64, f64)]) -> UpperHull {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    // keep the highest point per abscissa
    pts.dedup_by(|later, earlier| later.0 == earlier.0);

    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    UpperHull { vertices: hull }
}

impl UpperHull {
    pub fn domain(&self) -> (f64, f64) {
        (self.vertices[0].0, self.vertices[self.vertices.len() - 1].0)
    }

    /// Piecewise-linear hull value; `None` outside the sampled range.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let idx = self.vertices.partition_point(|v| v.0 < x);
        if idx == 0 {
            return Some(self.vertices[0].1);
        }
        let (x0, y0) = self.vertices[idx - 1];
        let (x1, y1) = self.vertices[idx];
        if x1 == x0 {
            return Some(y1.max(y0));
        }
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    pub fn vertices_in(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.vertices
            .iter()
            .copied()
            .filter(|v| v.0 >= lo && v.0 <= hi)
            .collect()
    }

    /// Largest second difference of consecutive vertex slopes (≤ 0 for a
    /// concave chain).
    pub fn max_slope_increase(&self) -> f64 {
        let slopes: Vec<f64> = self
            .vertices
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        slopes
            .windows(2)
            .map(|s| s[1] - s[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
