//! Cell-centered lattices and nonnegative grid functions on them.

use crate::error::{Error, Result};
use crate::geometry::domain::{for_each_index, Domain};

/// A function of a point, shareable across workers.
pub type PointFn = std::sync::Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Cubic cells of width `h`; cell `k ∈ Z^N` is centered at `anchor + k·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub anchor: Vec<f64>,
    pub h: f64,
}

impl Lattice {
    pub fn new(anchor: Vec<f64>, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Invalid(format!("cell width must be positive, got {h}")));
        }
        if anchor.is_empty() {
            return Err(Error::Invalid("lattice needs dimension >= 1".into()));
        }
        Ok(Lattice { anchor, h })
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    pub fn center(&self, k: &[i64]) -> Vec<f64> {
        self.anchor.iter().zip(k).map(|(a, &ki)| a + ki as f64 * self.h).collect()
    }

    pub fn center_into(&self, k: &[i64], out: &mut [f64]) {
        for i in 0..out.len() {
            out[i] = self.anchor[i] + k[i] as f64 * self.h;
        }
    }

    /// Coordinate `axis` of the center of a cell with index `k` along that axis.
    pub fn center_component(&self, axis: usize, k: i64) -> f64 {
        self.anchor[axis] + k as f64 * self.h
    }

    /// Same anchor, cells split `factor` times per axis (odd factors keep the anchor a center).
    pub fn refined(&self, factor: usize) -> Lattice {
        Lattice { anchor: self.anchor.clone(), h: self.h / factor as f64 }
    }

    /// Index range `[lo, hi]` (inclusive) of cells whose centers may fall in `[a, b]` per axis.
    pub fn index_range(&self, a: &[f64], b: &[f64]) -> (Vec<i64>, Vec<i64>) {
        let lo = (0..self.dim()).map(|i| ((a[i] - self.anchor[i]) / self.h).floor() as i64).collect();
        let hi = (0..self.dim()).map(|i| ((b[i] - self.anchor[i]) / self.h).ceil() as i64).collect();
        (lo, hi)
    }

    /// All cells whose centers lie in `domain`, in lexicographic order.
    pub fn cells_in(&self, domain: &Domain) -> Vec<Vec<i64>> {
        let (a, b) = domain.bounding_box();
        let (lo, hi) = self.index_range(&a, &b);
        let counts: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let mut out = Vec::new();
        let mut k = vec![0i64; self.dim()];
        let mut x = vec![0.0; self.dim()];
        for_each_index(&counts, |idx| {
            for i in 0..k.len() {
                k[i] = lo[i] + idx[i] as i64;
            }
            self.center_into(&k, &mut x);
            if domain.contains(&x) {
                out.push(k.clone());
            }
        });
        out
    }
}

/// Nonnegative values at the centers of a box of lattice cells; zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lattice: Lattice,
    lo: Vec<i64>,
    shape: Vec<usize>,
    values: Vec<f64>,
    support: Option<Domain>,
}

impl GridFunction {
    pub fn new(lattice: Lattice, lo: Vec<i64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let dim = lattice.dim();
        if lo.len() != dim || shape.len() != dim {
            return Err(Error::Invalid("grid box does not match lattice dimension".into()));
        }
        let n: usize = shape.iter().product();
        if n != values.len() || n == 0 {
            return Err(Error::Invalid(format!("grid of shape {shape:?} needs {n} values, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Invalid(format!("grid values must be finite and nonnegative, found {v}")));
        }
        Ok(GridFunction { lattice, lo, shape, values, support: None })
    }

    /// Samples `f` at the cell centers of the box `lo .. lo + shape`.
    pub fn from_fn(lattice: Lattice, lo: Vec<i64>, shape: Vec<usize>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(shape.iter().product());
        let mut k = vec![0i64; lattice.dim()];
        let mut x = vec![0.0; lattice.dim()];
        for_each_index(&shape, |idx| {
            for i in 0..k.len() {
                k[i] = lo[i] + idx[i] as i64;
            }
            lattice.center_into(&k, &mut x);
            values.push(f(&x));
        });
        GridFunction::new(lattice, lo, shape, values)
    }

    /// Samples `f` on the cell-centered grid with `cells` cells along the longest
    /// axis of `domain`'s bounding box; values outside `domain` are zeroed.
    pub fn on_domain(domain: &Domain, cells: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let (a, b) = domain.bounding_box();
        let extent = (0..domain.dim()).map(|i| b[i] - a[i]).fold(0.0, f64::max);
        let h = extent / cells as f64;
        let anchor: Vec<f64> = a.iter().map(|x| x + 0.5 * h).collect();
        let shape: Vec<usize> = (0..domain.dim()).map(|i| (((b[i] - a[i]) / h).round() as usize).max(1)).collect();
        let lattice = Lattice::new(anchor, h)?;
        let mut u =
            GridFunction::from_fn(
                lattice,
                vec![0; domain.dim()],
                shape,
                |x| {
                    if domain.contains(x) {
                        f(x)
                    } else {
                        0.0
                    }
                },
            )?;
        u.support = Some(domain.clone());
        Ok(u)
    }

    pub fn zeros_like(&self) -> Self {
        GridFunction { values: vec![0.0; self.values.len()], ..self.clone() }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support_domain(&self) -> Option<&Domain> {
        self.support.as_ref()
    }

    pub fn with_support_domain(mut self, domain: Domain) -> Self {
        self.support = Some(domain);
        self
    }

    pub fn cell_volume(&self) -> f64 {
        self.lattice.cell_volume()
    }

    /// Row-major linear index to lattice index.
    pub fn index_of(&self, linear: usize) -> Vec<i64> {
        let mut k = vec![0i64; self.dim()];
        let mut rem = linear;
        for i in (0..self.dim()).rev() {
            k[i] = self.lo[i] + (rem % self.shape[i]) as i64;
            rem /= self.shape[i];
        }
        k
    }

    pub fn linear_of(&self, k: &[i64]) -> Option<usize> {
        let mut lin = 0usize;
        for i in 0..self.dim() {
            let off = k[i] - self.lo[i];
            if off < 0 || off as usize >= self.shape[i] {
                return None;
            }
            lin = lin * self.shape[i] + off as usize;
        }
        Some(lin)
    }

    pub fn value_at(&self, k: &[i64]) -> f64 {
        self.linear_of(k).map_or(0.0, |i| self.values[i])
    }

    pub fn center(&self, linear: usize) -> Vec<f64> {
        self.lattice.center(&self.index_of(linear))
    }

    /// Cells with positive value, in lexicographic index order.
    pub fn support_cells(&self) -> Vec<(Vec<i64>, f64)> {
        self.values.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, &v)| (self.index_of(i), v)).collect()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Zeros every cell whose center lies outside `domain`; returns the number of cells zeroed.
    pub fn restrict_to(&mut self, domain: &Domain) -> usize {
        let mut zeroed = 0;
        for i in 0..self.values.len() {
            if self.values[i] > 0.0 && !domain.contains(&self.center(i)) {
                self.values[i] = 0.0;
                zeroed += 1;
            }
        }
        zeroed
    }

    /// Maps the values through `f` (clamped at zero).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction { values: self.values.iter().map(|&v| f(v).max(0.0)).collect(), ..self.clone() }
    }

    /// Same box, values moved by `shift` cells; cells shifted out are lost, vacated cells are zero.
    pub fn shifted(&self, shift: &[i64]) -> GridFunction {
        let mut out = self.zeros_like();
        for i in 0..self.values.len() {
            let k: Vec<i64> = self.index_of(i).iter().zip(shift).map(|(a, b)| a + b).collect();
            if let Some(j) = out.linear_of(&k) {
                out.values[j] = self.values[i];
            }
        }
        out
    }

    /// Moves the lattice anchor by a whole number of cells without touching values
    /// (a rigid translation of the function).
    pub fn translated_cells(&self, shift: &[i64]) -> GridFunction {
        let lo = self.lo.iter().zip(shift).map(|(a, b)| a + b).collect();
        GridFunction { lo, ..self.clone() }
    }

    /// Block average onto the lattice with cells three times wider (same anchor).
    pub fn coarsened(&self) -> GridFunction {
        let dim = self.dim();
        let coarse = Lattice { anchor: self.lattice.anchor.clone(), h: 3.0 * self.lattice.h };
        let clo: Vec<i64> = self.lo.iter().map(|&l| (l + 1).div_euclid(3)).collect();
        let chi: Vec<i64> = (0..dim).map(|i| (self.lo[i] + self.shape[i] as i64 - 1 + 1).div_euclid(3)).collect();
        let cshape: Vec<usize> = (0..dim).map(|i| (chi[i] - clo[i] + 1) as usize).collect();
        let mut values = vec![0.0; cshape.iter().product()];
        let weight = 1.0 / 3f64.powi(dim as i32);
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let k = self.index_of(i);
            let mut lin = 0usize;
            for a in 0..dim {
                let ck = (k[a] + 1).div_euclid(3);
                lin = lin * cshape[a] + (ck - clo[a]) as usize;
            }
            values[lin] += v * weight;
        }
        GridFunction { lattice: coarse, lo: clo, shape: cshape, values, support: self.support.clone() }
    }

    /// Largest forward difference quotient between a cell and its axis neighbours.
    pub fn local_slopes(&self) -> Vec<f64> {
        let dim = self.dim();
        let h = self.lattice.h;
        (0..self.values.len())
            .map(|i| {
                let k = self.index_of(i);
                let mut best: f64 = 0.0;
                let mut nb = k.clone();
                for a in 0..dim {
                    for step in [-1i64, 1] {
                        nb[a] = k[a] + step;
                        best = best.max((self.values[i] - self.value_at(&nb)).abs() / h);
                    }
                    nb[a] = k[a];
                }
                best
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_round_trip() {
        let lat = Lattice::new(vec![0.0, 0.0], 0.1).unwrap();
        let u = GridFunction::new(lat, vec![-2, 3], vec![4, 5], vec![0.0; 20]).unwrap();
        for i in 0..20 {
            assert_eq!(u.linear_of(&u.index_of(i)), Some(i));
        }
        assert_eq!(u.index_of(0), vec![-2, 3]);
        assert_eq!(u.index_of(19), vec![1, 7]);
    }

    #[test]
    fn rejects_negative_values() {
        let lat = Lattice::new(vec![0.0], 0.1).unwrap();
        assert!(GridFunction::new(lat, vec![0], vec![2], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn coarsening_preserves_mass() {
        let lat = Lattice::new(vec![0.0, 0.0], 0.1).unwrap();
        let u = GridFunction::from_fn(lat, vec![-4, -5], vec![9, 11], |x| 1.0 + x[0] * x[0] + x[1]).unwrap();
        let c = u.coarsened();
        let m = |g: &GridFunction| g.values().iter().sum::<f64>() * g.cell_volume();
        assert!((m(&u) - m(&c)).abs() < 1e-12);
        assert_eq!(c.lattice().anchor, vec![0.0, 0.0]);
    }

    #[test]
    fn cells_in_domain() {
        let d = Domain::cube(vec![0.0], vec![1.0]).unwrap();
        let lat = Lattice::new(vec![0.05], 0.1).unwrap();
        assert_eq!(lat.cells_in(&d).len(), 10);
    }
}
