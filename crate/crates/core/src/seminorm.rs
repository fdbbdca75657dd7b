//! Modulars and fractional Orlicz–Sobolev seminorms of grid functions.
//!
//! A grid function is treated as constant on its cells and the double integral
//! `∬ G(|u(x)−u(y)| / M(|x−y|)) / N(|x−y|)` is replaced by its midpoint sum over
//! pairs of distinct cells. Cell distances come from integer offsets through a
//! lookup table, so two functions that agree up to a lattice translation give
//! bit-identical sums. The sum over a region `A` splits as
//!
//! ```text
//! I_A[u] = core + 2·halo,
//! core = Σ_{i≠j, both in supp u},   halo = Σ_{i ∈ supp u, j ∈ A∖supp u}.
//! ```
//!
//! Each refinement level is three times finer than the previous one; the
//! difference of the two finest levels plus an analytic bound on the omitted
//! self-cell pairs forms the error bound.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, Domain, GridFunction, Lattice, PointFn};
use crate::quadrature::oned::integrate_to_zero;
use crate::quadrature::{
    double_integral, exterior_tail_integral, tree_sum, CubatureSpec, Estimate, EstimateMetadata, PairIntegrand,
};
use crate::young::{KernelSpec, YoungFunction};

/// Which double integral to evaluate.
#[derive(Debug, Clone)]
pub enum Region {
    /// `Ω × Ω`.
    Domain(Domain),
    /// `ℝᴺ × ℝᴺ`.
    FullSpace,
    /// `Ω × (ℝᴺ ∖ Ω)`.
    Cross(Domain),
}

/// Grid representations of one function at successively finer levels (coarse first).
#[derive(Debug, Clone)]
pub struct Ladder {
    levels: Vec<GridFunction>,
}

impl Ladder {
    pub fn single(u: GridFunction) -> Self {
        Ladder { levels: vec![u] }
    }

    /// Explicit levels, coarse first.
    pub fn from_levels(levels: Vec<GridFunction>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("a ladder needs at least one level".into()));
        }
        Ok(Ladder { levels })
    }

    /// `u` is the finest level; coarser ones are block averages.
    pub fn from_grid(u: GridFunction, levels: usize) -> Self {
        let mut out = vec![u];
        for _ in 1..levels.max(1) {
            let c = out.last().unwrap().coarsened();
            out.push(c);
        }
        out.reverse();
        Ladder { levels: out }
    }

    /// Samples `f` on `coarse` refined by `3^ℓ`, over the cells meeting `[lo, hi]`.
    pub fn sampled(f: impl Fn(&[f64]) -> f64, coarse: &Lattice, lo: &[f64], hi: &[f64], levels: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(levels);
        for level in 0..levels.max(1) {
            let lattice = coarse.refined(3usize.pow(level as u32));
            let (a, b) = lattice.index_range(lo, hi);
            let shape = a.iter().zip(&b).map(|(l, h)| (h - l + 1) as usize).collect();
            out.push(GridFunction::from_fn(lattice, a, shape, &f)?);
        }
        Ok(Ladder { levels: out })
    }

    pub fn levels(&self) -> &[GridFunction] {
        &self.levels
    }

    pub fn finest(&self) -> &GridFunction {
        self.levels.last().unwrap()
    }

    pub fn map(&self, f: impl Fn(&GridFunction) -> Result<GridFunction>) -> Result<Ladder> {
        Ok(Ladder { levels: self.levels.iter().map(f).collect::<Result<_>>()? })
    }
}

/// Everything a seminorm evaluation needs.
#[derive(Debug, Clone)]
pub struct SeminormRequest {
    pub u: Ladder,
    pub young: YoungFunction,
    pub kernel: KernelSpec,
    pub region: Region,
    pub spec: CubatureSpec,
}

impl SeminormRequest {
    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let dim = self.u.finest().dim();
        if let Some((_, n)) = self.kernel.fractional_params() {
            if n != dim {
                return Err(Error::Invalid(format!("kernel dimension {n} does not match grid dimension {dim}")));
            }
        }
        match &self.region {
            Region::Domain(d) | Region::Cross(d) if d.dim() != dim => {
                Err(Error::Invalid(format!("domain dimension {} does not match grid dimension {dim}", d.dim())))
            }
            _ => Ok(()),
        }
    }
}

/// `1/M(r)` and `1/N(r)` for every absolute integer offset in a box.
struct OffsetTable {
    strides: Vec<usize>,
    m_inv: Vec<f64>,
    weight: Vec<f64>,
}

impl OffsetTable {
    fn new(kernel: &KernelSpec, h: f64, extents: &[usize]) -> Self {
        let dim = extents.len();
        let mut strides = vec![1usize; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * extents[a + 1];
        }
        let n: usize = extents.iter().product();
        let mut m_inv = vec![0.0; n];
        let mut weight = vec![0.0; n];
        for lin in 1..n {
            let mut rest = lin;
            let mut r2 = 0i64;
            for a in 0..dim {
                let d = (rest / strides[a]) as i64;
                rest %= strides[a];
                r2 += d * d;
            }
            let r = h * (r2 as f64).sqrt();
            m_inv[lin] = 1.0 / kernel.m(r);
            weight[lin] = 1.0 / kernel.n(r);
        }
        OffsetTable { strides, m_inv, weight }
    }

    #[inline]
    fn index(&self, a: &[i64], b: &[i64]) -> usize {
        let mut lin = 0;
        for i in 0..a.len() {
            lin += (a[i] - b[i]).unsigned_abs() as usize * self.strides[i];
        }
        lin
    }
}

fn extents_of(groups: &[&[i64]], dim: usize) -> Vec<usize> {
    let mut lo = vec![i64::MAX; dim];
    let mut hi = vec![i64::MIN; dim];
    for g in groups {
        for k in g.chunks(dim) {
            for a in 0..dim {
                lo[a] = lo[a].min(k[a]);
                hi[a] = hi[a].max(k[a]);
            }
        }
    }
    (0..dim).map(|a| if hi[a] >= lo[a] { (hi[a] - lo[a] + 1) as usize } else { 1 }).collect()
}

/// Midpoint sums of one level over a region: `I = core + 2·halo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSum {
    pub core: f64,
    pub halo: f64,
}

impl DomainSum {
    pub fn total(&self) -> f64 {
        self.core + 2.0 * self.halo
    }
}

fn flat_cells(cells: &[Vec<i64>]) -> Vec<i64> {
    cells.iter().flatten().copied().collect()
}

/// Core and halo sums of `u` over the lattice cells whose centers lie in `region`.
pub fn domain_sum(u: &GridFunction, region: &Domain, young: &YoungFunction, kernel: &KernelSpec) -> Result<DomainSum> {
    let dim = u.dim();
    let support = u.support_cells();
    let mut outside = support.iter().filter(|(k, _)| !region.contains(&u.lattice().center(k)));
    if let Some((k, _)) = outside.next() {
        return Err(Error::Precondition(format!(
            "grid function is positive at {:?}, outside the region",
            u.lattice().center(k)
        )));
    }
    let halo_cells: Vec<Vec<i64>> = u.lattice().cells_in(region).into_iter().filter(|k| u.value_at(k) == 0.0).collect();
    Ok(pair_sums(u, &support, &halo_cells, young, kernel, dim))
}

fn pair_sums(
    u: &GridFunction,
    support: &[(Vec<i64>, f64)],
    halo_cells: &[Vec<i64>],
    young: &YoungFunction,
    kernel: &KernelSpec,
    dim: usize,
) -> DomainSum {
    let h = u.lattice().h;
    let s_idx: Vec<i64> = support.iter().flat_map(|(k, _)| k.iter().copied()).collect();
    let s_val: Vec<f64> = support.iter().map(|(_, v)| *v).collect();
    let h_idx = flat_cells(halo_cells);
    let table = OffsetTable::new(kernel, h, &extents_of(&[&s_idx, &h_idx], dim));
    let vol2 = h.powi(2 * dim as i32);
    let n = s_val.len();

    let core_rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ki = &s_idx[i * dim..(i + 1) * dim];
            let vi = s_val[i];
            let mut row = 0.0;
            for j in i + 1..n {
                let o = table.index(ki, &s_idx[j * dim..(j + 1) * dim]);
                row += young.eval((vi - s_val[j]).abs() * table.m_inv[o]) * table.weight[o];
            }
            row
        })
        .collect();
    let halo_rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ki = &s_idx[i * dim..(i + 1) * dim];
            let vi = s_val[i];
            let mut row = 0.0;
            for kj in h_idx.chunks(dim) {
                let o = table.index(ki, kj);
                row += young.eval(vi * table.m_inv[o]) * table.weight[o];
            }
            row
        })
        .collect();
    DomainSum { core: 2.0 * vol2 * tree_sum(&core_rows), halo: vol2 * tree_sum(&halo_rows) }
}

/// `J(ρ) = ω ∫_0^ρ r^{N−1+p⁻} / (N(r) M(r)^{p⁻}) dr`, the kernel mass of a self-cell.
pub fn self_cell_kernel_mass(kernel: &KernelSpec, p_minus: f64, dim: usize, rho: f64) -> Result<f64> {
    let omega = unit_sphere_area(dim);
    if let Some((s, _)) = kernel.fractional_params() {
        let k = (1.0 - s) * p_minus;
        return Ok(omega * rho.powf(k) / k);
    }
    let d = dim as f64;
    let f = |r: f64| r.powf(d - 1.0 + p_minus) / (kernel.n(r) * kernel.m(r).powf(p_minus));
    let t = integrate_to_zero(&f, rho, 1e-8);
    if !t.converged {
        return Err(Error::NonIntegrableSingularity { exponent: t.exponent, dim });
    }
    Ok(omega * (t.value + t.error))
}

/// `Σ_i h^N G(L_i) J(h√N)` over support cells and their zero neighbours inside `region`,
/// with `L_i` the largest difference quotient to an axis neighbour.
pub fn self_cell_bound(
    u: &GridFunction,
    region: Option<&Domain>,
    young: &YoungFunction,
    kernel: &KernelSpec,
) -> Result<f64> {
    let dim = u.dim();
    let h = u.lattice().h;
    let mut slopes: HashMap<Vec<i64>, f64> = HashMap::new();
    for (k, v) in u.support_cells() {
        let mut nb = k.clone();
        for a in 0..dim {
            for step in [-1i64, 1] {
                nb[a] = k[a] + step;
                let q = (v - u.value_at(&nb)).abs() / h;
                for cell in [&k, &nb] {
                    let e = slopes.entry(cell.clone()).or_insert(0.0);
                    *e = e.max(q);
                }
            }
            nb[a] = k[a];
        }
    }
    let mut cells: Vec<(Vec<i64>, f64)> = slopes.into_iter().collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0));
    let terms: Vec<f64> = cells
        .iter()
        .filter(|(k, _)| region.is_none_or(|d| d.contains(&u.lattice().center(k))))
        .map(|(_, l)| young.eval(*l))
        .collect();
    let mass = self_cell_kernel_mass(kernel, young.p_minus(), dim, h * (dim as f64).sqrt())?;
    Ok(u.cell_volume() * mass * tree_sum(&terms))
}

fn ladder_estimate(values: &[f64], extra: f64, resolutions: Vec<usize>) -> Estimate {
    let mut est = Estimate {
        value: *values.last().unwrap(),
        error_bound: 0.0,
        metadata: EstimateMetadata { resolutions, level_values: values.to_vec(), ..Default::default() },
    };
    est.error_bound = est.richardson() + extra;
    est
}

fn resolutions(ladder: &Ladder) -> Vec<usize> {
    ladder.levels().iter().map(|u| u.shape().iter().copied().max().unwrap_or(0)).collect()
}

/// `I_Ω[u] = ∬_{Ω×Ω} G(|u(x)−u(y)| / M(|x−y|)) / N(|x−y|) dx dy`.
pub fn seminorm_domain(req: &SeminormRequest) -> Result<Estimate> {
    seminorm_domain_parts(req).map(|p| p.0)
}

/// [`seminorm_domain`] together with the core and halo sums of every level.
pub fn seminorm_domain_parts(req: &SeminormRequest) -> Result<(Estimate, Vec<DomainSum>)> {
    req.validate()?;
    let Region::Domain(domain) = &req.region else {
        return Err(Error::Invalid("seminorm_domain needs a domain region".into()));
    };
    let (sums, bound) = req.spec.install(|| -> Result<(Vec<DomainSum>, f64)> {
        let sums = req
            .u
            .levels()
            .iter()
            .map(|u| domain_sum(u, domain, &req.young, &req.kernel))
            .collect::<Result<Vec<_>>>()?;
        let bound = self_cell_bound(req.u.finest(), Some(domain), &req.young, &req.kernel)?;
        Ok((sums, bound))
    })??;
    let values: Vec<f64> = sums.iter().map(|s| s.total()).collect();
    let mut est = ladder_estimate(&values, bound, resolutions(&req.u));
    est.metadata.self_cell_bound = bound;
    Ok((est, sums))
}

/// Zeros positive cells closer than two cell widths to `∂Ω`; errors if `u` is positive outside `Ω`.
pub fn shrink_support(u: &GridFunction, domain: &Domain) -> Result<(GridFunction, usize)> {
    let h = u.lattice().h;
    let mut drop = Vec::new();
    for (i, &v) in u.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let x = u.center(i);
        if !domain.contains(&x) {
            return Err(Error::Precondition(format!("grid function is positive at {x:?}, outside the domain")));
        }
        if domain.distance_to_boundary(&x)? < 2.0 * h {
            drop.push(i);
        }
    }
    if drop.is_empty() {
        return Ok((u.clone(), 0));
    }
    log::warn!("support shrinkage: zeroed {} cells within 2h of the boundary", drop.len());
    let mut values = u.values().to_vec();
    for &i in &drop {
        values[i] = 0.0;
    }
    let shrunk = GridFunction::new(u.lattice().clone(), u.lo().to_vec(), u.shape().to_vec(), values)?;
    Ok((shrunk, drop.len()))
}

/// `Σ_i h^N ∫_{ℝᴺ∖Ω} G(u_i / M(|x_i−y|)) / N(|x_i−y|) dy` over support cells, with summed error.
pub fn exterior_sum(
    u: &GridFunction,
    domain: &Domain,
    young: &YoungFunction,
    kernel: &KernelSpec,
    spec: &CubatureSpec,
) -> Result<(f64, f64)> {
    let h = u.lattice().h;
    let vol = u.cell_volume();
    let cells = u.support_cells();
    let parts: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|(k, v)| {
            let x = u.lattice().center(k);
            exterior_tail_integral(&x, young, kernel, *v, domain, h, spec).map(|e| (e.value * vol, e.error_bound * vol))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let errors: Vec<f64> = parts.iter().map(|p| p.1).collect();
    Ok((tree_sum(&values), tree_sum(&errors)))
}

/// `∫_Ω ∫_{ℝᴺ∖Ω} G(u(x) / M(|x−y|)) / N(|x−y|) dy dx` (without the factor 2).
pub fn cross_term(req: &SeminormRequest) -> Result<Estimate> {
    req.validate()?;
    let Region::Cross(domain) = &req.region else {
        return Err(Error::Invalid("cross_term needs a cross region".into()));
    };
    let ladder = req.u.map(|u| shrink_support(u, domain).map(|s| s.0))?;
    let parts = req.spec.install(|| {
        ladder
            .levels()
            .iter()
            .map(|u| exterior_sum(u, domain, &req.young, &req.kernel, &req.spec))
            .collect::<Result<Vec<_>>>()
    })??;
    let values: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let tail = parts.last().unwrap().1;
    let mut est = ladder_estimate(&values, tail, resolutions(&ladder));
    est.metadata.tail_bound = tail;
    Ok(est)
}

/// Box of whole coarse cells around the support of `u`, widened by `margin` cells per side.
pub fn support_box(u: &GridFunction, margin: i64) -> Result<Option<Domain>> {
    let support = u.support_cells();
    if support.is_empty() {
        return Ok(None);
    }
    let dim = u.dim();
    let h = u.lattice().h;
    let mut lo = vec![i64::MAX; dim];
    let mut hi = vec![i64::MIN; dim];
    for (k, _) in &support {
        for a in 0..dim {
            lo[a] = lo[a].min(k[a]);
            hi[a] = hi[a].max(k[a]);
        }
    }
    let a: Vec<f64> = (0..dim).map(|i| u.lattice().center_component(i, lo[i] - margin) - 0.5 * h).collect();
    let b: Vec<f64> = (0..dim).map(|i| u.lattice().center_component(i, hi[i] + margin) + 0.5 * h).collect();
    Domain::cube(a, b).map(Some)
}

/// The enclosing box used for full-space sums: the support box of `u` widened
/// by half its largest width (at least two cells) on every side.
pub fn default_outer_box(u: &GridFunction) -> Result<Option<Domain>> {
    let support = u.support_cells();
    let mut width = 0i64;
    for a in 0..u.dim() {
        let (lo, hi) = support.iter().fold((i64::MAX, i64::MIN), |(l, h), (k, _)| (l.min(k[a]), h.max(k[a])));
        if hi >= lo {
            width = width.max(hi - lo + 1);
        }
    }
    support_box(u, (width / 2).max(2))
}

/// Full-space seminorm as `I_{Ω'} + 2·cross_{Ω'}` with `Ω'` a box around the support.
pub fn seminorm_fullspace(req: &SeminormRequest) -> Result<Estimate> {
    req.validate()?;
    if !matches!(req.region, Region::FullSpace) {
        return Err(Error::Invalid("seminorm_fullspace needs the full-space region".into()));
    }
    if req.u.levels().iter().all(|u| u.is_zero()) {
        return Ok(Estimate::exact(0.0));
    }
    let outer = default_outer_box(&req.u.levels()[0])?
        .ok_or_else(|| Error::Precondition("the coarsest level has empty support".into()))?;
    fullspace_over(&req.u, &outer, &req.young, &req.kernel, &req.spec)
}

/// `I_{Ω'} + 2·cross_{Ω'}` for a given enclosing box `Ω'`.
pub fn fullspace_over(
    ladder: &Ladder,
    outer: &Domain,
    young: &YoungFunction,
    kernel: &KernelSpec,
    spec: &CubatureSpec,
) -> Result<Estimate> {
    let parts = spec.install(|| {
        ladder
            .levels()
            .iter()
            .map(|u| {
                let inner = domain_sum(u, outer, young, kernel)?.total();
                let (cross, err) = exterior_sum(u, outer, young, kernel, spec)?;
                Ok((inner + 2.0 * cross, 2.0 * err))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let values: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let tail = parts.last().unwrap().1;
    let bound = self_cell_bound(ladder.finest(), None, young, kernel)?;
    let mut est = ladder_estimate(&values, tail + bound, resolutions(ladder));
    est.metadata.self_cell_bound = bound;
    est.metadata.tail_bound = tail;
    Ok(est)
}

/// `∫ G(u) dx` as a cell sum; exact for the grid representation.
pub fn modular(u: &GridFunction, young: &YoungFunction) -> Estimate {
    let terms: Vec<f64> = u.values().iter().map(|&v| young.eval(v)).collect();
    Estimate::exact(u.cell_volume() * tree_sum(&terms))
}

/// The pointwise integrand `G(|u(x)−u(y)| / M(|x−y|)) / N(|x−y|)` of a function given in closed form.
#[allow(clippy::type_complexity)]
pub fn pointwise_integrand<'a>(
    u: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>,
    young: &'a YoungFunction,
    kernel: &'a KernelSpec,
) -> Box<PairIntegrand<'a>> {
    Box::new(move |x: &[f64], y: &[f64]| {
        let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if r == 0.0 {
            return f64::NAN;
        }
        young.eval((u(x) - u(y)).abs() / kernel.m(r)) / kernel.n(r)
    })
}

/// `I_Ω[u]` for `u` in closed form, through the general double-integral cubature.
pub fn seminorm_pointwise(
    u: PointFn,
    domain: &Domain,
    young: &YoungFunction,
    kernel: &KernelSpec,
    spec: &CubatureSpec,
) -> Result<Estimate> {
    let f = pointwise_integrand(u, young, kernel);
    double_integral(&*f, domain, domain, spec)
}
