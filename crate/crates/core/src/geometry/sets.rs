use crate::error::{Error, Result};
use crate::geometry::domain::{for_each_index, unit_ball_volume, Domain};
use crate::geometry::grid::Lattice;

/// Origin-centered ball with the same measure as a set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizedSet {
    pub dim: usize,
    pub radius: f64,
}

impl SymmetrizedSet {
    pub fn measure(&self) -> f64 {
        unit_ball_volume(self.dim) * self.radius.powi(self.dim as i32)
    }

    pub fn to_domain(&self) -> Result<Domain> {
        Domain::ball(vec![0.0; self.dim], self.radius)
    }
}

pub fn symmetrized_set(domain: &Domain) -> Result<SymmetrizedSet> {
    let m = domain.measure();
    if !(m > 0.0) {
        return Err(Error::EmptyDomain);
    }
    if !m.is_finite() {
        return Err(Error::Invalid("domain measure is not finite".into()));
    }
    let dim = domain.dim();
    Ok(SymmetrizedSet { dim, radius: (m / unit_ball_volume(dim)).powf(1.0 / dim as f64) })
}

/// A ball inside a domain, centered at a cell center of the bounding-box lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct InscribedBall {
    pub center: Vec<f64>,
    pub radius: f64,
    /// The cell-centered lattice the center was chosen on.
    pub lattice: Lattice,
}

/// Picks the cell center farthest from the boundary and shrinks that distance by one cell.
pub fn inscribed_ball(domain: &Domain, cells: usize) -> Result<InscribedBall> {
    if !(domain.measure() > 0.0) {
        return Err(Error::EmptyDomain);
    }
    let dim = domain.dim();
    let (a, b) = domain.bounding_box();
    let extent = (0..dim).map(|i| b[i] - a[i]).fold(0.0, f64::max);
    let h = extent / cells as f64;
    let lattice = Lattice::new(a.iter().map(|x| x + 0.5 * h).collect(), h)?;
    let counts: Vec<usize> = (0..dim).map(|i| (((b[i] - a[i]) / h).round() as usize).max(1)).collect();

    let mut best: Option<(f64, Vec<i64>)> = None;
    let mut x = vec![0.0; dim];
    let mut failure = None;
    for_each_index(&counts, |idx| {
        let k: Vec<i64> = idx.iter().map(|&i| i as i64).collect();
        lattice.center_into(&k, &mut x);
        if !domain.contains(&x) {
            return;
        }
        match domain.distance_to_boundary(&x) {
            Ok(d) => {
                if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                    best = Some((d, k));
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (dist, k) = best.ok_or(Error::EmptyDomain)?;
    let radius = dist - h;
    if radius < 4.0 * h {
        return Err(Error::TooCoarse { radius, h });
    }
    let center = lattice.center(&k);
    verify_ball_inside(domain, &center, radius)?;
    Ok(InscribedBall { center, radius, lattice })
}

fn verify_ball_inside(domain: &Domain, center: &[f64], radius: f64) -> Result<()> {
    let dim = domain.dim();
    let per_axis = if dim <= 2 { 24 } else { 8 };
    let counts = vec![per_axis + 1; dim];
    let mut bad = None;
    for_each_index(&counts, |idx| {
        let v: Vec<f64> = idx.iter().map(|&k| 2.0 * k as f64 / per_axis as f64 - 1.0).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return;
        }
        for frac in [0.5, 0.999] {
            let y: Vec<f64> = center.iter().zip(&v).map(|(c, d)| c + frac * radius * d / norm).collect();
            if !domain.contains(&y) {
                bad = Some(y);
            }
        }
    });
    match bad {
        Some(y) => Err(Error::Precondition(format!("inscribed ball leaves the domain at {y:?}"))),
        None => Ok(()),
    }
}

/// `|D1 Δ D2|` by cell counting on the joint bounding box, `cells` along the longest axis.
pub fn symmetric_difference_measure(d1: &Domain, d2: &Domain, cells: usize) -> Result<f64> {
    if d1.dim() != d2.dim() {
        return Err(Error::Invalid("domains of different dimension".into()));
    }
    let dim = d1.dim();
    let (a1, b1) = d1.bounding_box();
    let (a2, b2) = d2.bounding_box();
    let a: Vec<f64> = (0..dim).map(|i| a1[i].min(a2[i])).collect();
    let b: Vec<f64> = (0..dim).map(|i| b1[i].max(b2[i])).collect();
    let extent = (0..dim).map(|i| b[i] - a[i]).fold(0.0, f64::max);
    let h = extent / cells as f64;
    let counts: Vec<usize> = (0..dim).map(|i| ((b[i] - a[i]) / h).ceil().max(1.0) as usize).collect();
    let mut n = 0usize;
    let mut x = vec![0.0; dim];
    for_each_index(&counts, |idx| {
        for i in 0..dim {
            x[i] = a[i] + (idx[i] as f64 + 0.5) * h;
        }
        if d1.contains(&x) != d2.contains(&x) {
            n += 1;
        }
    });
    Ok(n as f64 * h.powi(dim as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::Primitive;

    fn iv(a: f64, b: f64) -> Primitive {
        Primitive::Box { lo: vec![a], hi: vec![b] }
    }

    #[test]
    fn symmetrized_radii() {
        let d = Domain::new(vec![iv(0.0, 1.0), iv(2.0, 3.0)]).unwrap();
        assert_eq!(symmetrized_set(&d).unwrap().radius, 1.0);
        let sq = Domain::cube(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let r = symmetrized_set(&sq).unwrap().radius;
        assert!((r - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
        let two = Domain::new(vec![
            Primitive::Ball { center: vec![0.0, 0.0], radius: 1.0 },
            Primitive::Ball { center: vec![5.0, 0.0], radius: 1.0 },
        ])
        .unwrap();
        assert!((symmetrized_set(&two).unwrap().radius - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inscribed_balls() {
        let unit = Domain::cube(vec![0.0], vec![1.0]).unwrap();
        let b = inscribed_ball(&unit, 64).unwrap();
        let h = 1.0 / 64.0;
        assert!((b.center[0] - 0.5).abs() <= h);
        assert!((b.radius - (0.5 - h)).abs() <= h);

        let two = Domain::new(vec![iv(0.0, 1.0), iv(2.0, 4.0)]).unwrap();
        let b = inscribed_ball(&two, 256).unwrap();
        let h = 4.0 / 256.0;
        assert!((b.center[0] - 3.0).abs() <= h);
        assert!((b.radius - (1.0 - h)).abs() <= h);

        let sq = Domain::cube(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let b = inscribed_ball(&sq, 32).unwrap();
        assert!((b.center[0] - 0.5).abs() <= 1.0 / 32.0 && (b.center[1] - 0.5).abs() <= 1.0 / 32.0);

        assert!(matches!(inscribed_ball(&unit, 8), Err(Error::TooCoarse { .. })));
    }

    #[test]
    fn symmetric_differences() {
        let a = Domain::cube(vec![0.0], vec![1.0]).unwrap();
        let b = Domain::cube(vec![-0.5], vec![0.5]).unwrap();
        assert_eq!(symmetric_difference_measure(&a, &a, 100).unwrap(), 0.0);
        assert!((symmetric_difference_measure(&a, &b, 300).unwrap() - 1.0).abs() < 1e-12);
    }
}
