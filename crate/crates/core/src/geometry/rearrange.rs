//! Discrete Schwarz symmetrization.
//!
//! Values are sorted in decreasing order and dealt out to the cells of an
//! origin-centered box in order of increasing distance from the origin. Cell
//! distances are compared through the integer key `Σ k_i²`, ties broken by
//! lexicographic cell index, so the assignment is exact and deterministic.

use crate::error::Result;
use crate::geometry::domain::for_each_index;
use crate::geometry::grid::{GridFunction, Lattice};

/// Number of lattice points with `Σ k_i² <= m²`.
fn lattice_points_within(dim: usize, m: i64) -> usize {
    let counts = vec![(2 * m + 1) as usize; dim];
    let mut n = 0;
    for_each_index(&counts, |idx| {
        let r2: i64 = idx.iter().map(|&i| (i as i64 - m).pow(2)).sum();
        if r2 <= m * m {
            n += 1;
        }
    });
    n
}

/// Half-width of the output box for `total` input cells, `nonzero` of them positive.
fn output_half_width(dim: usize, total: usize, nonzero: usize) -> i64 {
    let mut m = 0i64;
    while ((2 * m + 1) as usize).pow(dim as u32) < total {
        m += 1;
    }
    while lattice_points_within(dim, m) < nonzero {
        m += 1;
    }
    m
}

/// Cell order of the box `[-m, m]^dim`: by squared distance, then lexicographically.
fn radial_order(dim: usize, m: i64) -> Vec<usize> {
    let side = (2 * m + 1) as usize;
    let counts = vec![side; dim];
    let mut keys: Vec<(i64, usize)> = Vec::with_capacity(side.pow(dim as u32));
    let mut lin = 0usize;
    for_each_index(&counts, |idx| {
        let r2: i64 = idx.iter().map(|&i| (i as i64 - m).pow(2)).sum();
        keys.push((r2, lin));
        lin += 1;
    });
    keys.sort_unstable();
    keys.into_iter().map(|(_, i)| i).collect()
}

/// Schwarz symmetrization of a grid function onto an origin-centered grid with the same cell width.
pub fn schwarz_rearrange(u: &GridFunction) -> Result<GridFunction> {
    let dim = u.dim();
    let mut sorted: Vec<f64> = u.values().to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let nonzero = sorted.iter().take_while(|&&v| v > 0.0).count();
    let m = output_half_width(dim, u.len(), nonzero);
    let side = (2 * m + 1) as usize;
    let mut values = vec![0.0; side.pow(dim as u32)];
    for (cell, &v) in radial_order(dim, m).into_iter().zip(sorted.iter().take(nonzero)) {
        values[cell] = v;
    }
    let lattice = Lattice::new(vec![0.0; dim], u.lattice().h)?;
    GridFunction::new(lattice, vec![-m; dim], vec![side; dim], values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[f64], lo: i64) -> GridFunction {
        let lat = Lattice::new(vec![0.0], 1.0).unwrap();
        GridFunction::new(lat, vec![lo], vec![values.len()], values.to_vec()).unwrap()
    }

    #[test]
    fn five_cell_example() {
        let u = line(&[0.0, 3.0, 1.0, 2.0, 0.0], 7);
        let r = schwarz_rearrange(&u).unwrap();
        assert_eq!(r.lo(), &[-2]);
        let v = r.values();
        assert!(v == [0.0, 1.0, 3.0, 2.0, 0.0] || v == [0.0, 2.0, 3.0, 1.0, 0.0], "{v:?}");
        assert_eq!(v, &[0.0, 2.0, 3.0, 1.0, 0.0]);
    }

    #[test]
    fn all_zero_maps_to_zero() {
        let u = line(&[0.0; 6], 0);
        let r = schwarz_rearrange(&u).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn box_covers_ball_of_nonzeros() {
        // 2D: 9 nonzero values need radius >= 2 (5 points within 1, 13 within 2)
        let lat = Lattice::new(vec![0.0, 0.0], 1.0).unwrap();
        let u = GridFunction::new(lat, vec![0, 0], vec![1, 9], vec![1.0; 9]).unwrap();
        let r = schwarz_rearrange(&u).unwrap();
        assert_eq!(r.lo(), &[-2, -2]);
        let n = r.values().iter().filter(|&&v| v > 0.0).count();
        assert_eq!(n, 9);
        for (k, _) in r.support_cells() {
            assert!(k[0] * k[0] + k[1] * k[1] <= 4);
        }
    }
}
