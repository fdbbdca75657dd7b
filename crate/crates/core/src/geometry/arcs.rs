//! Angle-interval sets on the circle, used for exact circle/domain intersections in 2D.

use std::f64::consts::{PI, TAU};

use crate::geometry::domain::Primitive;

pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Finite union of open arcs, stored as sorted disjoint intervals inside `[0, 2π]`.
#[derive(Debug, Clone, Default)]
pub struct ArcSet {
    intervals: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { intervals: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet { intervals: vec![(0.0, TAU)] }
    }

    /// Arc from angle `a` counter-clockwise to `b` (`b >= a`), wrapping as needed.
    pub fn arc(a: f64, b: f64) -> Self {
        let mut s = ArcSet::empty();
        s.push_arc(a, b);
        s.normalize();
        s
    }

    fn push_arc(&mut self, a: f64, b: f64) {
        if !(b > a) {
            return;
        }
        if b - a >= TAU {
            self.intervals.push((0.0, TAU));
            return;
        }
        let start = normalize_angle(a);
        let end = start + (b - a);
        if end <= TAU {
            self.intervals.push((start, end));
        } else {
            self.intervals.push((start, TAU));
            self.intervals.push((0.0, end - TAU));
        }
    }

    fn normalize(&mut self) {
        self.intervals.retain(|(a, b)| b > a);
        self.intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.intervals.len());
        for &(a, b) in &self.intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        self.intervals = merged;
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum::<f64>().min(TAU)
    }

    pub fn union_with(&mut self, other: &ArcSet) {
        self.intervals.extend_from_slice(&other.intervals);
        self.normalize();
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                let lo = a.max(c);
                let hi = b.min(d);
                if hi > lo {
                    out.push((lo, hi));
                }
            }
        }
        let mut s = ArcSet { intervals: out };
        s.normalize();
        s
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::new();
        let mut start = 0.0;
        for &(a, b) in &self.intervals {
            if a > start {
                out.push((start, a));
            }
            start = b;
        }
        if start < TAU {
            out.push((start, TAU));
        }
        ArcSet { intervals: out }
    }

    /// Closed-arc membership (endpoints count).
    pub fn contains(&self, theta: f64) -> bool {
        let t = normalize_angle(theta);
        self.intervals.iter().any(|&(a, b)| t >= a && t <= b)
            || (t == 0.0 && self.intervals.last().is_some_and(|&(_, b)| b >= TAU))
    }

    pub fn endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals.iter().flat_map(|&(a, b)| [a, b])
    }
}

/// Angles θ for which `center + r·(cos θ, sin θ)` lies in the open primitive.
pub fn circle_inside(center: &[f64], r: f64, p: &Primitive) -> ArcSet {
    match p {
        Primitive::Box { lo, hi } => {
            let cos_set = cos_between((lo[0] - center[0]) / r, (hi[0] - center[0]) / r);
            let sin_set = sin_between((lo[1] - center[1]) / r, (hi[1] - center[1]) / r);
            cos_set.intersect(&sin_set)
        }
        Primitive::Ball { center: c, radius } => {
            let dx = c[0] - center[0];
            let dy = c[1] - center[1];
            let d = (dx * dx + dy * dy).sqrt();
            if d == 0.0 {
                return if r < *radius { ArcSet::full() } else { ArcSet::empty() };
            }
            let kappa = (r * r + d * d - radius * radius) / (2.0 * r * d);
            if kappa <= -1.0 {
                ArcSet::full()
            } else if kappa >= 1.0 {
                ArcSet::empty()
            } else {
                let phi = dy.atan2(dx);
                let half = kappa.acos();
                ArcSet::arc(phi - half, phi + half)
            }
        }
    }
}

/// θ with cos θ ∈ (lo, hi).
fn cos_between(lo: f64, hi: f64) -> ArcSet {
    if lo >= 1.0 || hi <= -1.0 || hi <= lo {
        return ArcSet::empty();
    }
    let a = hi.min(1.0).acos();
    let b = lo.max(-1.0).acos();
    let mut s = ArcSet::empty();
    s.push_arc(a, b);
    s.push_arc(TAU - b, TAU - a);
    s.normalize();
    s
}

/// θ with sin θ ∈ (lo, hi).
fn sin_between(lo: f64, hi: f64) -> ArcSet {
    if lo >= 1.0 || hi <= -1.0 || hi <= lo {
        return ArcSet::empty();
    }
    let a = lo.max(-1.0).asin();
    let b = hi.min(1.0).asin();
    let mut s = ArcSet::empty();
    s.push_arc(a, b);
    s.push_arc(PI - b, PI - a);
    s.normalize();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(center: &[f64], r: f64, p: &Primitive) -> f64 {
        let m = 200_000;
        let inside = (0..m)
            .filter(|&i| {
                let t = (i as f64 + 0.5) / m as f64 * TAU;
                p.contains(&[center[0] + r * t.cos(), center[1] + r * t.sin()])
            })
            .count();
        inside as f64 / m as f64 * TAU
    }

    #[test]
    fn box_and_ball_arcs_match_sampling() {
        let prims = [
            Primitive::Box { lo: vec![0.0, 0.0], hi: vec![2.0, 1.0] },
            Primitive::Box { lo: vec![-0.3, -0.2], hi: vec![0.4, 0.9] },
            Primitive::Ball { center: vec![0.7, -0.1], radius: 0.8 },
        ];
        let centers = [[0.1, 0.2], [1.5, 0.5], [-0.5, 0.0], [0.7, -0.1]];
        for p in &prims {
            for c in &centers {
                for r in [0.1, 0.45, 0.9, 1.7] {
                    let exact = circle_inside(c, r, p).measure();
                    let approx = brute(c, r, p);
                    assert!((exact - approx).abs() < 1e-3, "{p} {c:?} {r}: {exact} vs {approx}");
                }
            }
        }
    }

    #[test]
    fn complement_and_wrap() {
        let s = ArcSet::arc(-0.5, 0.5);
        assert!((s.measure() - 1.0).abs() < 1e-15);
        assert!(s.contains(0.0) && s.contains(6.0) && !s.contains(3.0));
        assert!((s.complement().measure() - (TAU - 1.0)).abs() < 1e-12);
    }
}
