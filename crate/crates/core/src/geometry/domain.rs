//! Domains built as finite unions of open axis-aligned boxes and open balls.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::arcs::{self, ArcSet};

/// Volume of the unit ball in dimension `dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        n => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface measure of the unit sphere in dimension `dim` (2 for `dim == 1`).
pub fn unit_sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Primitive {
    pub fn dim(&self) -> usize {
        match self {
            Primitive::Box { lo, .. } => lo.len(),
            Primitive::Ball { center, .. } => center.len(),
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Primitive::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(&xi, (&l, &h))| xi > l && xi < h),
            Primitive::Ball { center, radius } => dist2(x, center) < radius * radius,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Primitive::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            Primitive::Ball { radius, .. } => unit_ball_volume(self.dim()) * radius.powi(self.dim() as i32),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Primitive::Box { lo, hi } => (lo.clone(), hi.clone()),
            Primitive::Ball { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
        }
    }

    /// Distance from `x` to the closed set (zero inside).
    fn distance_to_set(&self, x: &[f64]) -> f64 {
        match self {
            Primitive::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&xi, (&l, &h))| {
                    let d = (l - xi).max(xi - h).max(0.0);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Primitive::Ball { center, radius } => (dist2(x, center).sqrt() - radius).max(0.0),
        }
    }

    fn overlaps(&self, other: &Primitive) -> bool {
        match (self, other) {
            (Primitive::Box { lo: a, hi: b }, Primitive::Box { lo: c, hi: d }) => {
                (0..a.len()).all(|i| a[i] < d[i] && c[i] < b[i])
            }
            (Primitive::Ball { center: c1, radius: r1 }, Primitive::Ball { center: c2, radius: r2 }) => {
                dist2(c1, c2).sqrt() < r1 + r2
            }
            (bx @ Primitive::Box { .. }, Primitive::Ball { center, radius })
            | (Primitive::Ball { center, radius }, bx @ Primitive::Box { .. }) => bx.distance_to_set(center) < *radius,
        }
    }

    fn translated(&self, shift: &[f64]) -> Primitive {
        match self {
            Primitive::Box { lo, hi } => Primitive::Box {
                lo: lo.iter().zip(shift).map(|(a, s)| a + s).collect(),
                hi: hi.iter().zip(shift).map(|(a, s)| a + s).collect(),
            },
            Primitive::Ball { center, radius } => {
                Primitive::Ball { center: center.iter().zip(shift).map(|(a, s)| a + s).collect(), radius: *radius }
            }
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match self {
            Primitive::Box { lo, hi } => write!(f, "box({},{})", join(lo), join(hi)),
            Primitive::Ball { center, radius } => write!(f, "ball({},{})", join(center), radius),
        }
    }
}

/// A union of open primitives in R^N.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    dim: usize,
    pieces: Vec<Primitive>,
}

impl Domain {
    pub fn new(pieces: Vec<Primitive>) -> Result<Self> {
        let first = pieces.first().ok_or_else(|| Error::Invalid("a domain needs at least one piece".into()))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        for p in &pieces {
            if p.dim() != dim {
                return Err(Error::Invalid(format!("piece {p} has dimension {}, expected {dim}", p.dim())));
            }
            match p {
                Primitive::Box { lo, hi } => {
                    if lo.iter().zip(hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
                        return Err(Error::Invalid(format!("degenerate box {p}")));
                    }
                }
                Primitive::Ball { center, radius } => {
                    if !(*radius > 0.0) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
                        return Err(Error::Invalid(format!("degenerate ball {p}")));
                    }
                }
            }
        }
        Ok(Domain { dim, pieces })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Domain::new(vec![Primitive::Ball { center, radius }])
    }

    pub fn cube(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Domain::new(vec![Primitive::Box { lo, hi }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Primitive] {
        &self.pieces
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &self.pieces {
            let (a, b) = p.bounding_box();
            for i in 0..self.dim {
                lo[i] = lo[i].min(a[i]);
                hi[i] = hi[i].max(b[i]);
            }
        }
        (lo, hi)
    }

    /// Largest distance from `x` to a point of the bounding box.
    pub fn reach_from(&self, x: &[f64]) -> f64 {
        let (lo, hi) = self.bounding_box();
        (0..self.dim)
            .map(|i| {
                let d = (x[i] - lo[i]).abs().max((hi[i] - x[i]).abs());
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `Some((center, radius))` when the domain is a single ball (in 1D, any single interval).
    pub fn as_ball(&self) -> Option<(Vec<f64>, f64)> {
        match self.pieces.as_slice() {
            [Primitive::Ball { center, radius }] => Some((center.clone(), *radius)),
            [Primitive::Box { lo, hi }] if self.dim == 1 => Some((vec![0.5 * (lo[0] + hi[0])], 0.5 * (hi[0] - lo[0]))),
            _ => None,
        }
    }

    pub fn translated(&self, shift: &[f64]) -> Domain {
        Domain { dim: self.dim, pieces: self.pieces.iter().map(|p| p.translated(shift)).collect() }
    }

    /// Lebesgue measure of the union.
    ///
    /// Exact for pairwise disjoint pieces and for unions of boxes; otherwise
    /// cell counting at two resolutions, returning the finer count.
    pub fn measure(&self) -> f64 {
        let disjoint = self.pieces.iter().enumerate().all(|(i, p)| self.pieces[i + 1..].iter().all(|q| !p.overlaps(q)));
        if disjoint {
            return self.pieces.iter().map(Primitive::measure).sum();
        }
        if self.pieces.iter().all(|p| matches!(p, Primitive::Box { .. })) {
            return self.box_union_measure();
        }
        let fine = match self.dim {
            1 => 1 << 16,
            2 => 2048,
            _ => 128,
        };
        self.measure_by_counting(fine)
    }

    /// Cell-counting measure on the bounding box with `cells` cells along the longest axis.
    pub fn measure_by_counting(&self, cells: usize) -> f64 {
        let (lo, hi) = self.bounding_box();
        let extent = (0..self.dim).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
        let h = extent / cells as f64;
        let counts: Vec<usize> = (0..self.dim).map(|i| ((hi[i] - lo[i]) / h).ceil().max(1.0) as usize).collect();
        let mut inside = 0usize;
        let mut x = vec![0.0; self.dim];
        for_each_index(&counts, |idx| {
            for i in 0..self.dim {
                x[i] = lo[i] + (idx[i] as f64 + 0.5) * h;
            }
            if self.contains(&x) {
                inside += 1;
            }
        });
        inside as f64 * h.powi(self.dim as i32)
    }

    fn box_union_measure(&self) -> f64 {
        let mut breaks: Vec<Vec<f64>> = vec![Vec::new(); self.dim];
        for p in &self.pieces {
            if let Primitive::Box { lo, hi } = p {
                for i in 0..self.dim {
                    breaks[i].push(lo[i]);
                    breaks[i].push(hi[i]);
                }
            }
        }
        for b in &mut breaks {
            b.sort_by(f64::total_cmp);
            b.dedup();
        }
        let counts: Vec<usize> = breaks.iter().map(|b| b.len() - 1).collect();
        let mut total = 0.0;
        let mut mid = vec![0.0; self.dim];
        for_each_index(&counts, |idx| {
            let mut vol = 1.0;
            for i in 0..self.dim {
                mid[i] = 0.5 * (breaks[i][idx[i]] + breaks[i][idx[i] + 1]);
                vol *= breaks[i][idx[i] + 1] - breaks[i][idx[i]];
            }
            if self.contains(&mid) {
                total += vol;
            }
        });
        total
    }

    /// Distance from an interior point to the boundary of the union.
    ///
    /// Exact in one and two dimensions. For `dim >= 3` the uncovered boundary
    /// is sampled on a 64-per-axis face grid, so the result may overshoot by
    /// up to one sample spacing.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Invalid(format!(
                "point of dimension {} for a domain of dimension {}",
                x.len(),
                self.dim
            )));
        }
        if !self.contains(x) {
            return Err(Error::OutsideDomain { point: x.to_vec() });
        }
        Ok(match self.dim {
            1 => self.distance_1d(x[0]),
            2 => self.distance_2d(x),
            _ => self.distance_sampled(x, 64),
        })
    }

    fn merged_intervals(&self) -> Vec<(f64, f64)> {
        let mut iv: Vec<(f64, f64)> = self
            .pieces
            .iter()
            .map(|p| {
                let (lo, hi) = p.bounding_box();
                (lo[0], hi[0])
            })
            .collect();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (a, b) in iv {
            match merged.last_mut() {
                // open intervals only join when they overlap
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        merged
    }

    fn distance_1d(&self, x: f64) -> f64 {
        self.merged_intervals()
            .into_iter()
            .find(|&(a, b)| x > a && x < b)
            .map(|(a, b)| (x - a).min(b - x))
            .unwrap_or(0.0)
    }

    fn distance_2d(&self, x: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for (pi, p) in self.pieces.iter().enumerate() {
            let others = || self.pieces.iter().enumerate().filter(move |(qi, _)| *qi != pi).map(|(_, q)| q);
            match p {
                Primitive::Box { lo, hi } => {
                    // four edges: (fixed axis, fixed value, free axis)
                    for (fixed, value) in [(0, lo[0]), (0, hi[0]), (1, lo[1]), (1, hi[1])] {
                        let free = 1 - fixed;
                        let mut covered: Vec<(f64, f64)> = Vec::new();
                        for q in others() {
                            if let Some(iv) = segment_cover(q, fixed, value, free) {
                                covered.push(iv);
                            }
                        }
                        for (a, b) in subtract_intervals((lo[free], hi[free]), covered) {
                            let t = x[free].clamp(a, b);
                            let mut y = [0.0; 2];
                            y[fixed] = value;
                            y[free] = t;
                            best = best.min(dist2(x, &y).sqrt());
                        }
                    }
                }
                Primitive::Ball { center, radius } => {
                    let mut covered = ArcSet::empty();
                    for q in others() {
                        covered.union_with(&arcs::circle_inside(center, *radius, q));
                    }
                    let free = covered.complement();
                    if free.is_empty() {
                        continue;
                    }
                    let dx = x[0] - center[0];
                    let dy = x[1] - center[1];
                    let rho = (dx * dx + dy * dy).sqrt();
                    let phi = arcs::normalize_angle(dy.atan2(dx));
                    if rho == 0.0 || free.contains(phi) {
                        best = best.min((radius - rho).abs());
                    } else {
                        for theta in free.endpoints() {
                            let y = [center[0] + radius * theta.cos(), center[1] + radius * theta.sin()];
                            best = best.min(dist2(x, &y).sqrt());
                        }
                    }
                }
            }
        }
        best
    }

    fn distance_sampled(&self, x: &[f64], per_axis: usize) -> f64 {
        let mut best = f64::INFINITY;
        for p in &self.pieces {
            for y in boundary_samples(p, per_axis) {
                if !self.contains(&y) {
                    best = best.min(dist2(x, &y).sqrt());
                }
            }
        }
        best
    }

    /// Surface measure of the sphere of radius `r` about `x` lying outside the domain.
    ///
    /// Exact for `dim <= 2`; for `dim == 3` a 4096-direction Fibonacci set is used.
    pub fn sphere_measure_outside(&self, x: &[f64], r: f64) -> Result<f64> {
        match self.dim {
            1 => {
                let left = !self.contains(&[x[0] - r]) as u8;
                let right = !self.contains(&[x[0] + r]) as u8;
                Ok((left + right) as f64)
            }
            2 => {
                let mut inside = ArcSet::empty();
                for p in &self.pieces {
                    inside.union_with(&arcs::circle_inside(x, r, p));
                }
                Ok(r * (2.0 * PI - inside.measure()))
            }
            3 => {
                const M: usize = 4096;
                let golden = PI * (3.0 - 5f64.sqrt());
                let mut outside = 0usize;
                let mut y = [0.0; 3];
                for i in 0..M {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / M as f64;
                    let rad = (1.0 - z * z).sqrt();
                    let th = golden * i as f64;
                    y[0] = x[0] + r * rad * th.cos();
                    y[1] = x[1] + r * rad * th.sin();
                    y[2] = x[2] + r * z;
                    if !self.contains(&y) {
                        outside += 1;
                    }
                }
                Ok(4.0 * PI * r * r * outside as f64 / M as f64)
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// Surface measure of the sphere of radius `r` about `x` lying inside the domain.
    pub fn sphere_measure_inside(&self, x: &[f64], r: f64) -> Result<f64> {
        let full = unit_sphere_area(self.dim) * r.powi(self.dim as i32 - 1);
        Ok((full - self.sphere_measure_outside(x, r)?).max(0.0))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for Primitive {
    type Err = Error;

    /// `box(lo…, hi…)` with `2N` numbers or `ball(center…, r)` with `N + 1`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Invalid(format!("cannot parse primitive '{text}'"));
        let open = text.find('(').ok_or_else(bad)?;
        let body = text[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let nums = body.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<f64>>>()?;
        match text[..open].trim() {
            "box" if nums.len() >= 2 && nums.len() % 2 == 0 => {
                let n = nums.len() / 2;
                Ok(Primitive::Box { lo: nums[..n].to_vec(), hi: nums[n..].to_vec() })
            }
            "ball" if nums.len() >= 2 => {
                let n = nums.len() - 1;
                Ok(Primitive::Ball { center: nums[..n].to_vec(), radius: nums[n] })
            }
            _ => Err(bad()),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;

    /// Primitives joined by `+`, as produced by `Display`.
    fn from_str(text: &str) -> Result<Self> {
        let mut pieces = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in text.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' if depth == 0 => {
                    pieces.push(text[start..i].parse::<Primitive>()?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        pieces.push(text[start..].parse::<Primitive>()?);
        Domain::new(pieces)
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Visit every multi-index of a box with the given per-axis counts, last axis fastest.
pub(crate) fn for_each_index(counts: &[usize], mut f: impl FnMut(&[usize])) {
    if counts.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; counts.len()];
    loop {
        f(&idx);
        let mut axis = counts.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Open interval of the free coordinate covered by `q` along the line `x[fixed] = value`.
fn segment_cover(q: &Primitive, fixed: usize, value: f64, free: usize) -> Option<(f64, f64)> {
    match q {
        Primitive::Box { lo, hi } => (value > lo[fixed] && value < hi[fixed]).then_some((lo[free], hi[free])),
        Primitive::Ball { center, radius } => {
            let off = value - center[fixed];
            let w2 = radius * radius - off * off;
            (w2 > 0.0).then(|| {
                let w = w2.sqrt();
                (center[free] - w, center[free] + w)
            })
        }
    }
}

/// `[a, b]` minus a union of open intervals, as closed pieces.
fn subtract_intervals(span: (f64, f64), mut cover: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    cover.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = Vec::new();
    let mut start = span.0;
    for (a, b) in cover {
        if b <= start {
            continue;
        }
        if a > span.1 {
            break;
        }
        if a >= start {
            out.push((start, a.min(span.1)));
        }
        start = start.max(b);
        if start >= span.1 {
            break;
        }
    }
    if start <= span.1 {
        out.push((start, span.1));
    }
    out
}

fn boundary_samples(p: &Primitive, per_axis: usize) -> Vec<Vec<f64>> {
    let dim = p.dim();
    let mut out = Vec::new();
    match p {
        Primitive::Box { lo, hi } => {
            for fixed in 0..dim {
                for value in [lo[fixed], hi[fixed]] {
                    let counts: Vec<usize> = (0..dim).map(|i| if i == fixed { 1 } else { per_axis + 1 }).collect();
                    for_each_index(&counts, |idx| {
                        let y: Vec<f64> = (0..dim)
                            .map(|i| {
                                if i == fixed {
                                    value
                                } else {
                                    lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / per_axis as f64
                                }
                            })
                            .collect();
                        out.push(y);
                    });
                }
            }
        }
        Primitive::Ball { center, radius } => {
            // Gaussian-free quasi-uniform directions: normalized lattice points on the cube surface
            let counts = vec![per_axis + 1; dim];
            for_each_index(&counts, |idx| {
                let v: Vec<f64> = idx.iter().map(|&k| 2.0 * k as f64 / per_axis as f64 - 1.0).collect();
                let on_surface = v.iter().any(|c| c.abs() == 1.0);
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if on_surface && norm > 0.0 {
                    out.push(center.iter().zip(&v).map(|(c, d)| c + radius * d / norm).collect());
                }
            });
        }
    }
    out
}
