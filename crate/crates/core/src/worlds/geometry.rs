//! Points and obstacles in R^d, with exact segment tests for collision checking.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        PointSet { dim, coords: Vec::new() }
    }

    pub fn from_points<const D: usize>(dim: usize, pts: &[[f64; D]]) -> Self {
        assert_eq!(dim, D);
        PointSet { dim, coords: pts.iter().flatten().copied().collect() }
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(self.point(i), self.point(j))
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Closed axis-aligned box or closed ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Obstacle {
    Rect { min: Vec<f64>, max: Vec<f64> },
    Circle { center: Vec<f64>, radius: f64 },
}

impl Obstacle {
    pub fn rect(min: &[f64], max: &[f64]) -> Self {
        Obstacle::Rect { min: min.to_vec(), max: max.to_vec() }
    }

    pub fn circle(center: &[f64], radius: f64) -> Self {
        Obstacle::Circle { center: center.to_vec(), radius }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Obstacle::Rect { min, max } => p.iter().zip(min.iter().zip(max)).all(|(&x, (&lo, &hi))| lo <= x && x <= hi),
            Obstacle::Circle { center, radius } => {
                let d2: f64 = p.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
                d2 <= radius * radius
            }
        }
    }

    /// Whether the closed segment `a`-`b` touches the obstacle.
    pub fn intersects_segment(&self, a: &[f64], b: &[f64]) -> bool {
        match self {
            Obstacle::Rect { min, max } => {
                // slab clipping
                let (mut t0, mut t1) = (0.0f64, 1.0f64);
                for k in 0..a.len() {
                    let d = b[k] - a[k];
                    if d == 0.0 {
                        if a[k] < min[k] || a[k] > max[k] {
                            return false;
                        }
                        continue;
                    }
                    let mut lo = (min[k] - a[k]) / d;
                    let mut hi = (max[k] - a[k]) / d;
                    if lo > hi {
                        std::mem::swap(&mut lo, &mut hi);
                    }
                    t0 = t0.max(lo);
                    t1 = t1.min(hi);
                    if t0 > t1 {
                        return false;
                    }
                }
                true
            }
            Obstacle::Circle { center, radius } => {
                let mut dd = 0.0;
                let mut dc = 0.0;
                for k in 0..a.len() {
                    let d = b[k] - a[k];
                    dd += d * d;
                    dc += (center[k] - a[k]) * d;
                }
                let t = if dd == 0.0 { 0.0 } else { (dc / dd).clamp(0.0, 1.0) };
                let d2: f64 = (0..a.len())
                    .map(|k| {
                        let q = a[k] + t * (b[k] - a[k]) - center[k];
                        q * q
                    })
                    .sum();
                d2 <= radius * radius
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_segment_tests() {
        let r = Obstacle::rect(&[1.0, 1.0], &[2.0, 2.0]);
        assert!(r.intersects_segment(&[0.0, 1.5], &[3.0, 1.5]));
        assert!(r.intersects_segment(&[0.0, 0.0], &[3.0, 3.0]));
        assert!(!r.intersects_segment(&[0.0, 0.0], &[3.0, 0.5]));
        assert!(!r.intersects_segment(&[0.0, 3.0], &[0.5, 0.0]));
        // touching a corner counts
        assert!(r.intersects_segment(&[0.0, 2.0], &[1.0, 3.0]) || r.intersects_segment(&[0.0, 1.0], &[1.0, 1.0]));
        assert!(r.intersects_segment(&[1.5, 1.5], &[1.5, 1.5]));
        assert!(!r.intersects_segment(&[0.0, 0.0], &[0.9, 0.9]));
    }

    #[test]
    fn circle_segment_tests() {
        let c = Obstacle::circle(&[0.0, 0.0], 1.0);
        assert!(c.intersects_segment(&[-2.0, 0.5], &[2.0, 0.5]));
        assert!(!c.intersects_segment(&[-2.0, 1.5], &[2.0, 1.5]));
        assert!(!c.intersects_segment(&[2.0, 0.0], &[3.0, 0.0]));
        assert!(c.intersects_segment(&[0.2, 0.2], &[0.3, 0.3]));
        assert!(c.contains(&[0.5, 0.5]));
        assert!(!c.contains(&[1.0, 1.0]));
    }

    #[test]
    fn three_dimensional_box() {
        let r = Obstacle::rect(&[0.4, 0.4, 0.4], &[0.6, 0.6, 0.6]);
        assert!(r.intersects_segment(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]));
        assert!(!r.intersects_segment(&[0.0, 0.0, 0.9], &[1.0, 1.0, 0.9]));
    }
}
