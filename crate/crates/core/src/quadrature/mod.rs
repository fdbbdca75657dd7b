//! Cubature for singular double integrals, exterior tail integrals and the
//! radial comparison integrals.

pub mod oned;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::domain::for_each_index;
use crate::geometry::{symmetric_difference_measure, symmetrized_set, unit_sphere_area, Domain, Primitive};
use crate::young::{KernelSpec, YoungFunction};
use oned::{adaptive, integrate_to_infinity, integrate_to_zero};

/// Resolution and tolerance settings shared by every cubature.
#[derive(Debug, Clone, PartialEq)]
pub struct CubatureSpec {
    /// Cells along the longest axis at the coarsest level.
    pub base_resolution: usize,
    pub refinement_levels: usize,
    /// Extra dyadic splits applied to cell pairs within two cells of the diagonal.
    pub diag_split_depth: usize,
    /// Outer cutoff for exterior integrals; `None` picks 8× the circumradius.
    pub truncation_radius: Option<f64>,
    /// Relative tolerance of the one-dimensional radial integrations.
    pub tolerance: f64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for CubatureSpec {
    fn default() -> Self {
        CubatureSpec {
            base_resolution: 64,
            refinement_levels: 2,
            diag_split_depth: 2,
            truncation_radius: None,
            tolerance: 1e-9,
            threads: None,
        }
    }
}

impl CubatureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_resolution == 0 {
            return Err(Error::Invalid("resolution must be positive".into()));
        }
        if self.refinement_levels == 0 {
            return Err(Error::Invalid("at least one refinement level is required".into()));
        }
        if self.diag_split_depth < 2 {
            return Err(Error::Invalid(format!("diagonal split depth must be >= 2, got {}", self.diag_split_depth)));
        }
        if let Some(r) = self.truncation_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Invalid(format!("truncation radius must be positive, got {r}")));
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Invalid(format!("tolerance must lie in (0,1), got {}", self.tolerance)));
        }
        if self.threads == Some(0) {
            return Err(Error::Invalid("thread count must be positive".into()));
        }
        Ok(())
    }

    /// Runs `op` on a pool with `threads` workers, or on the global pool.
    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> Result<R> {
        match self.threads {
            None => Ok(op()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Invalid(format!("cannot build thread pool: {e}")))?;
                Ok(pool.install(op))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimateMetadata {
    /// Cells along the longest axis, one entry per level.
    pub resolutions: Vec<usize>,
    pub level_values: Vec<f64>,
    pub truncation_radius: Option<f64>,
    pub tail_bound: f64,
    pub self_cell_bound: f64,
    /// Fitted power of the integrand near the diagonal.
    pub diagonal_exponent: Option<f64>,
}

/// A value with a nonnegative error bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub metadata: EstimateMetadata,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error_bound: 0.0, metadata: EstimateMetadata::default() }
    }

    /// Richardson difference of the last two levels (zero for a single level).
    pub fn richardson(&self) -> f64 {
        match self.metadata.level_values.as_slice() {
            [.., a, b] => (b - a).abs(),
            _ => 0.0,
        }
    }

    pub fn contains(&self, exact: f64) -> bool {
        (self.value - exact).abs() <= self.error_bound
    }
}

/// Pairwise summation; the result depends only on the order of `xs`.
pub fn tree_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

/// Parallel map over `0..n` followed by an order-fixed tree sum.
pub fn par_tree_sum(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let parts: Vec<f64> = (0..n).into_par_iter().map(f).collect();
    tree_sum(&parts)
}

/// Pointwise pair integrand `f(x, y)`.
pub type PairIntegrand<'a> = dyn Fn(&[f64], &[f64]) -> f64 + Sync + 'a;

struct CellSet {
    centers: Vec<f64>,
    count: usize,
}

fn cell_centers(domain: &Domain, h: f64) -> CellSet {
    let dim = domain.dim();
    let (lo, hi) = domain.bounding_box();
    let counts: Vec<usize> = (0..dim).map(|i| ((hi[i] - lo[i]) / h).ceil().max(1.0) as usize).collect();
    let mut centers = Vec::new();
    let mut x = vec![0.0; dim];
    for_each_index(&counts, |idx| {
        for i in 0..dim {
            x[i] = lo[i] + (idx[i] as f64 + 0.5) * h;
        }
        if domain.contains(&x) {
            centers.extend_from_slice(&x);
        }
    });
    let count = centers.len() / dim;
    CellSet { centers, count }
}

struct DiagonalFit {
    exponent: f64,
    constant: f64,
}

/// Fits `f(x, x + r e) ≈ C r^α` on dyadic radii at sample points of `A ∩ B`.
fn fit_diagonal(f: &PairIntegrand, a: &CellSet, b: &Domain, dim: usize, h: f64) -> Option<DiagonalFit> {
    let common: Vec<&[f64]> = a.centers.chunks(dim).filter(|x| b.contains(x)).collect();
    if common.is_empty() {
        return None;
    }
    let picks = 7.min(common.len());
    let radii: Vec<f64> = (3..=10).map(|k| h * 0.5f64.powi(k)).collect();
    let mut lines: Vec<Vec<(f64, f64)>> = Vec::new();
    for p in 0..picks {
        let x = common[(2 * p + 1) * common.len() / (2 * picks)];
        for axis in 0..dim {
            for sign in [-1.0, 1.0] {
                let mut y = x.to_vec();
                let line: Vec<(f64, f64)> = radii
                    .iter()
                    .filter_map(|&r| {
                        y[axis] = x[axis] + sign * r;
                        let v = f(x, &y);
                        (v > 0.0 && v.is_finite()).then_some((r, v))
                    })
                    .collect();
                if line.len() >= 3 {
                    lines.push(line);
                }
            }
        }
    }
    if lines.is_empty() {
        return None;
    }
    let slope = |line: &[(f64, f64)]| {
        let n = line.len() as f64;
        let (sx, sy) = line.iter().fold((0.0, 0.0), |(a, b), (r, v)| (a + r.ln(), b + v.ln()));
        let (mx, my) = (sx / n, sy / n);
        let (num, den) = line.iter().fold((0.0, 0.0), |(a, b), (r, v)| {
            let dx = r.ln() - mx;
            (a + dx * (v.ln() - my), b + dx * dx)
        });
        num / den
    };
    let exponent = lines.iter().map(|l| slope(l)).fold(f64::INFINITY, f64::min);
    let constant = lines.iter().flatten().map(|&(r, v)| v * r.powf(-exponent)).fold(0.0, f64::max);
    Some(DiagonalFit { exponent, constant })
}

struct LevelSum {
    value: f64,
    excluded_pairs: usize,
}

fn level_sum(
    f: &PairIntegrand,
    a: &CellSet,
    b: &CellSet,
    dim: usize,
    h: f64,
    depth: usize,
    upper: bool,
) -> Result<LevelSum> {
    let split = 1usize << depth;
    let hs = h / split as f64;
    let vol = h.powi(dim as i32);
    let sub_vol = hs.powi(dim as i32);
    let near = 2.0 * h * (1.0 + 1e-9);
    let offsets: Vec<Vec<f64>> = {
        let mut out = Vec::new();
        for_each_index(&vec![split; dim], |idx| {
            out.push(idx.iter().map(|&m| (m as f64 + 0.5) * hs - 0.5 * h).collect());
        });
        out
    };
    let rows: Vec<(f64, usize, bool)> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let x = &a.centers[i * dim..(i + 1) * dim];
            let mut row = 0.0;
            let mut excluded = 0usize;
            let mut finite = true;
            let start = if upper { i } else { 0 };
            let mut xs = vec![0.0; dim];
            let mut ys = vec![0.0; dim];
            for j in start..b.count {
                let y = &b.centers[j * dim..(j + 1) * dim];
                let weight = if upper && j > i { 2.0 } else { 1.0 };
                let cheb = x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                if cheb > near {
                    let v = f(x, y);
                    finite &= v.is_finite();
                    row += weight * v * vol * vol;
                    continue;
                }
                let mut pair = 0.0;
                for (oa, da) in offsets.iter().enumerate() {
                    for k in 0..dim {
                        xs[k] = x[k] + da[k];
                    }
                    for (ob, db) in offsets.iter().enumerate() {
                        for k in 0..dim {
                            ys[k] = y[k] + db[k];
                        }
                        let v = f(&xs, &ys);
                        if v.is_finite() {
                            pair += v;
                        } else if i == j && oa == ob || xs == ys {
                            excluded += 1;
                        } else {
                            finite = false;
                        }
                    }
                }
                row += weight * pair * sub_vol * sub_vol;
            }
            (row, excluded, finite)
        })
        .collect();
    if rows.iter().any(|r| !r.2) {
        return Err(Error::Invalid("integrand is not finite off the diagonal".into()));
    }
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(LevelSum { value: tree_sum(&values), excluded_pairs: rows.iter().map(|r| r.1).sum() })
}

fn double_integral_impl(
    f: &PairIntegrand,
    a: &Domain,
    b: &Domain,
    spec: &CubatureSpec,
    upper: bool,
) -> Result<Estimate> {
    spec.validate()?;
    let dim = a.dim();
    if b.dim() != dim {
        return Err(Error::Invalid("domains of different dimension".into()));
    }
    let extent = [a.bounding_box(), b.bounding_box()]
        .iter()
        .flat_map(|(lo, hi)| (0..dim).map(move |i| hi[i] - lo[i]))
        .fold(0.0, f64::max);
    let h0 = extent / spec.base_resolution as f64;
    let fit = fit_diagonal(f, &cell_centers(a, h0), b, dim, h0);
    if let Some(fit) = &fit {
        if fit.exponent <= -(dim as f64) + 1e-6 {
            return Err(Error::NonIntegrableSingularity { exponent: fit.exponent, dim });
        }
    }
    let mut meta = EstimateMetadata { diagonal_exponent: fit.as_ref().map(|f| f.exponent), ..Default::default() };
    let mut excluded = 0usize;
    let mut hs = h0;
    spec.install(|| -> Result<()> {
        for level in 0..spec.refinement_levels {
            let n = spec.base_resolution << level;
            let h = extent / n as f64;
            let ca = cell_centers(a, h);
            let cb = if upper { ca.centers.clone() } else { cell_centers(b, h).centers };
            let cb = CellSet { count: cb.len() / dim, centers: cb };
            let s = level_sum(f, &ca, &cb, dim, h, spec.diag_split_depth, upper)?;
            meta.resolutions.push(n);
            meta.level_values.push(s.value);
            excluded = s.excluded_pairs;
            hs = h / (1usize << spec.diag_split_depth) as f64;
        }
        Ok(())
    })??;
    if excluded > 0 {
        let fit = fit.ok_or_else(|| Error::Invalid("singular diagonal without a fitted exponent".into()))?;
        let rho = (dim as f64).sqrt() * hs;
        let power = fit.exponent + dim as f64;
        let per_pair = hs.powi(dim as i32) * fit.constant * unit_sphere_area(dim) * rho.powf(power) / power;
        meta.self_cell_bound = excluded as f64 * per_pair;
    }
    let mut value = *meta.level_values.last().unwrap();
    let est = Estimate { value, error_bound: 0.0, metadata: meta };
    let richardson = est.richardson();
    if let (true, Some(alpha), [.., prev, last]) =
        (excluded > 0, est.metadata.diagonal_exponent, est.metadata.level_values.as_slice())
    {
        // the left-out diagonal mass decays like h^{α+N}; extrapolate at that order
        let order = alpha + dim as f64;
        value = last + (last - prev) / (2f64.powf(order) - 1.0);
    }
    let error_bound = richardson + est.metadata.self_cell_bound;
    Ok(Estimate { value, error_bound, ..est })
}

/// `∬_{A×B} f(x, y) dx dy` by midpoint cubature over cell pairs with dyadic
/// subdivision near the diagonal; non-finite coincident sub-pairs are left out
/// of the value and bounded through the fitted singularity `C |x−y|^α`.
pub fn double_integral(f: &PairIntegrand, a: &Domain, b: &Domain, spec: &CubatureSpec) -> Result<Estimate> {
    double_integral_impl(f, a, b, spec, false)
}

/// Same as [`double_integral`] over `A×A` for symmetric `f`, summing the upper triangle twice.
pub fn double_integral_symmetric(f: &PairIntegrand, a: &Domain, spec: &CubatureSpec) -> Result<Estimate> {
    double_integral_impl(f, a, a, spec, true)
}

/// Radii at which the sphere about `x` can change how it meets `domain`.
fn radial_breakpoints(domain: &Domain, x: &[f64]) -> Vec<f64> {
    let dim = domain.dim();
    let mut out = Vec::new();
    for p in domain.pieces() {
        match p {
            Primitive::Box { lo, hi } => {
                for i in 0..dim {
                    out.push((x[i] - lo[i]).abs());
                    out.push((x[i] - hi[i]).abs());
                }
                for_each_index(&vec![2; dim], |idx| {
                    let d2: f64 = (0..dim)
                        .map(|i| {
                            let c = if idx[i] == 0 { lo[i] } else { hi[i] };
                            (x[i] - c) * (x[i] - c)
                        })
                        .sum();
                    out.push(d2.sqrt());
                });
                if dim == 3 {
                    // edges: distance within each coordinate plane pair
                    for i in 0..3 {
                        for j in i + 1..3 {
                            for ci in [lo[i], hi[i]] {
                                for cj in [lo[j], hi[j]] {
                                    out.push(((x[i] - ci).powi(2) + (x[j] - cj).powi(2)).sqrt());
                                }
                            }
                        }
                    }
                }
            }
            Primitive::Ball { center, radius } => {
                let d = crate::geometry::domain::dist2(x, center).sqrt();
                out.push((d - radius).abs());
                out.push(d + radius);
            }
        }
    }
    out.retain(|r| *r > 0.0 && r.is_finite());
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    out
}

/// `∫_lo^hi F` split at `breaks`; `lo == 0` is treated as a possibly singular endpoint.
fn piecewise_radial(
    f: &(impl Fn(f64) -> f64 + ?Sized),
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<(f64, f64)> {
    if hi <= lo {
        return Ok((0.0, 0.0));
    }
    let mut knots = vec![lo];
    knots.extend(breaks.iter().copied().filter(|&r| r > lo && r < hi));
    knots.push(hi);
    let mut parts = Vec::with_capacity(knots.len());
    let mut err = 0.0;
    for w in knots.windows(2) {
        let g = |r: f64| f(r);
        if w[0] == 0.0 {
            let t = integrate_to_zero(&g, w[1], tol);
            if !t.converged {
                return Err(Error::NonIntegrableSingularity { exponent: t.exponent, dim: 1 });
            }
            parts.push(t.value);
            err += t.error;
        } else {
            let piece = adaptive(&g, w[0], w[1], 0.0, tol, 400);
            parts.push(piece.value);
            err += piece.error;
        }
    }
    Ok((tree_sum(&parts), err))
}

/// `∫_{ℝᴺ∖D} G(a / M(|x−y|)) / N(|x−y|) dy` as a radial integral over spheres about `x`.
///
/// The part beyond the truncation radius `R` is bounded by `G(a) ω R^{−s p⁻}/(s p⁻)`
/// for fractional kernels and estimated by a power-tail integral otherwise.
pub fn exterior_tail_integral(
    x: &[f64],
    young: &YoungFunction,
    kernel: &KernelSpec,
    amplitude: f64,
    domain: &Domain,
    h: f64,
    spec: &CubatureSpec,
) -> Result<Estimate> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::Invalid(format!("amplitude must be nonnegative, got {amplitude}")));
    }
    if !domain.contains(x) {
        return Err(Error::OutsideDomain { point: x.to_vec() });
    }
    let d = domain.distance_to_boundary(x)?;
    if d < h {
        return Err(Error::OnBoundary { point: x.to_vec(), distance: d, h });
    }
    let reach = domain.reach_from(x);
    let mut r_t = spec.truncation_radius.unwrap_or(8.0 * reach).max(2.0 * reach).max(1.0);
    let mut meta = EstimateMetadata { truncation_radius: Some(r_t), ..Default::default() };
    if amplitude == 0.0 {
        return Ok(Estimate { value: 0.0, error_bound: 0.0, metadata: meta });
    }
    let dim = domain.dim();
    let omega = unit_sphere_area(dim);
    let radial = |r: f64| young.eval(amplitude / kernel.m(r)) / kernel.n(r);
    let shell = |r: f64| radial(r) * omega * r.powi(dim as i32 - 1);
    let breaks = radial_breakpoints(domain, x);
    let tol = spec.tolerance;

    let inner = |r: f64| {
        let s = domain.sphere_measure_outside(x, r).unwrap_or(f64::NAN);
        radial(r) * s
    };
    let (near, mut err) = piecewise_radial(&inner, d, reach, &breaks, tol)?;
    let (mid, e) = piecewise_radial(&shell, reach, r_t, &[], tol)?;
    err += e;
    let mut parts = vec![near, mid];

    let tail_bound = |r: f64| -> Result<f64> {
        match kernel.fractional_params() {
            Some((s, _)) => {
                let sp = s * young.p_minus();
                Ok(young.eval(amplitude) * omega * r.powf(-sp) / sp)
            }
            None => {
                let t = integrate_to_infinity(&shell, r, tol);
                if !t.converged {
                    return Err(Error::NonIntegrableSingularity { exponent: t.exponent, dim });
                }
                Ok(t.value + t.error)
            }
        }
    };
    let mut bound = tail_bound(r_t)?;
    let mut doublings = 0;
    while bound > 0.01 * tree_sum(&parts) && doublings < 400 {
        let (v, e) = piecewise_radial(&shell, r_t, 2.0 * r_t, &[], tol)?;
        parts.push(v);
        err += e;
        r_t *= 2.0;
        bound = tail_bound(r_t)?;
        doublings += 1;
    }
    if !bound.is_finite() {
        return Err(Error::Invalid("exterior tail bound is not finite".into()));
    }
    meta.truncation_radius = Some(r_t);
    meta.tail_bound = bound;
    Ok(Estimate { value: tree_sum(&parts), error_bound: err + bound, metadata: meta })
}

/// Integrals of a radial integrand over `D`, `D*`, and their complements with a centered ball excised.
#[derive(Debug, Clone)]
pub struct RadialComparison {
    pub over_symmetrized: Estimate,
    pub over_domain: Estimate,
    pub outside_domain: Estimate,
    pub outside_symmetrized: Estimate,
    pub excised_radius: f64,
    pub symmetric_difference: f64,
}

impl RadialComparison {
    pub fn inside_margin(&self) -> f64 {
        self.over_symmetrized.value - self.over_domain.value
    }

    pub fn outside_margin(&self) -> f64 {
        self.outside_domain.value - self.outside_symmetrized.value
    }
}

/// Compares `∫_{D*} f` with `∫_D f` and `∫_{ℝᴺ∖D} f` with `∫_{ℝᴺ∖D*} f` for radial
/// strictly decreasing `f`, both complements with `B_ρ` removed.
pub fn radial_comparison_check(
    f: &(dyn Fn(f64) -> f64 + Sync),
    domain: &Domain,
    excised_radius: f64,
    spec: &CubatureSpec,
) -> Result<RadialComparison> {
    spec.validate()?;
    let dim = domain.dim();
    let star = symmetrized_set(domain)?;
    let star_domain = star.to_domain()?;
    let sym_diff = symmetric_difference_measure(domain, &star_domain, spec.base_resolution.max(64))?;
    if sym_diff == 0.0 {
        return Err(Error::Precondition("the domain coincides with its symmetrization".into()));
    }
    if !(excised_radius >= 0.0) || excised_radius > star.radius {
        return Err(Error::Invalid(format!("excised radius must lie in [0, {}]", star.radius)));
    }
    let origin = vec![0.0; dim];
    let omega = unit_sphere_area(dim);
    let tol = spec.tolerance;
    let shell = |r: f64| f(r) * omega * r.powi(dim as i32 - 1);
    let reach = domain.reach_from(&origin);
    let breaks = radial_breakpoints(domain, &origin);

    let est =
        |(value, error): (f64, f64)| Estimate { value, error_bound: error, metadata: EstimateMetadata::default() };
    let over_symmetrized = est(piecewise_radial(&shell, 0.0, star.radius, &[], tol)?);
    let inside = |r: f64| f(r) * domain.sphere_measure_inside(&origin, r).unwrap_or(f64::NAN);
    let over_domain = est(piecewise_radial(&inside, 0.0, reach, &breaks, tol)?);

    let far = integrate_to_infinity(&shell, reach.max(star.radius), tol);
    if !far.converged {
        return Err(Error::NonIntegrableSingularity { exponent: far.exponent, dim });
    }
    let outside = |r: f64| f(r) * domain.sphere_measure_outside(&origin, r).unwrap_or(f64::NAN);
    let (near_out, near_err) = piecewise_radial(&outside, excised_radius, reach, &breaks, tol)?;
    let (gap, gap_err) = piecewise_radial(&shell, reach, reach.max(star.radius), &[], tol)?;
    let outside_domain = est((near_out + gap + far.value, near_err + gap_err + far.error));
    let (star_near, star_err) = piecewise_radial(&shell, star.radius, reach.max(star.radius), &[], tol)?;
    let outside_symmetrized = est((star_near + far.value, star_err + far.error));

    let out = RadialComparison {
        over_symmetrized,
        over_domain,
        outside_domain,
        outside_symmetrized,
        excised_radius,
        symmetric_difference: sym_diff,
    };
    let in_err = out.over_symmetrized.error_bound + out.over_domain.error_bound;
    if out.inside_margin() <= in_err {
        return Err(Error::Indistinguishable { difference: out.inside_margin(), error: in_err });
    }
    let out_err = out.outside_domain.error_bound + out.outside_symmetrized.error_bound;
    if out.outside_margin() <= out_err {
        return Err(Error::Indistinguishable { difference: out.outside_margin(), error: out_err });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        Domain::cube(vec![0.0], vec![1.0]).unwrap()
    }

    fn spec(base: usize, levels: usize) -> CubatureSpec {
        CubatureSpec { base_resolution: base, refinement_levels: levels, ..Default::default() }
    }

    #[test]
    fn tree_sum_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(tree_sum(&xs), tree_sum(&xs));
        assert!((tree_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
        assert_eq!(par_tree_sum(1000, |i| xs[i]), tree_sum(&xs));
    }

    #[test]
    fn constant_integrand() {
        let e = double_integral(&|_: &[f64], _: &[f64]| 1.0, &unit(), &unit(), &spec(16, 2)).unwrap();
        assert!(e.contains(1.0), "{e:?}");
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_converge_within_bounds() {
        let dist = |x: &[f64], y: &[f64]| (x[0] - y[0]).abs();
        let inv_sqrt = |x: &[f64], y: &[f64]| (x[0] - y[0]).abs().powf(-0.5);
        for levels in 2..=4 {
            let e = double_integral(&dist, &unit(), &unit(), &spec(8, levels)).unwrap();
            assert!(e.contains(1.0 / 3.0), "L={levels}: {e:?}");
            assert!(e.error_bound >= e.richardson());
            // ∫∫|x−y|^{-1/2} = 2 ∫_0^1 2√x dx = 8/3
            let e = double_integral(&inv_sqrt, &unit(), &unit(), &spec(8, levels)).unwrap();
            assert!(e.contains(8.0 / 3.0), "L={levels}: {e:?}");
            assert!(((e.value - 8.0 / 3.0) / (8.0 / 3.0)).abs() < 0.01 || levels == 2);
            assert!((e.metadata.diagonal_exponent.unwrap() + 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn symmetric_pair_sum_matches_full() {
        let f = |x: &[f64], y: &[f64]| ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt().powf(-0.7);
        let sq = Domain::cube(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let s = spec(8, 1);
        let full = double_integral(&f, &sq, &sq, &s).unwrap();
        let half = double_integral_symmetric(&f, &sq, &s).unwrap();
        assert!(((full.value - half.value) / full.value).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_integrable_diagonal() {
        let f = |x: &[f64], y: &[f64]| 1.0 / (x[0] - y[0]).abs();
        assert!(matches!(
            double_integral(&f, &unit(), &unit(), &spec(8, 1)),
            Err(Error::NonIntegrableSingularity { .. })
        ));
    }

    #[test]
    fn exterior_tail_examples() {
        let y = YoungFunction::power(2.0).unwrap();
        let k = KernelSpec::fractional(0.5, 1).unwrap();
        let d = Domain::cube(vec![-1.0], vec![1.0]).unwrap();
        let s = CubatureSpec::default();
        let e = exterior_tail_integral(&[0.0], &y, &k, 1.0, &d, 0.01, &s).unwrap();
        assert!((e.value - 2.0).abs() <= e.error_bound && e.error_bound < 0.05, "{e:?}");
        let zero = exterior_tail_integral(&[0.0], &y, &k, 0.0, &d, 0.01, &s).unwrap();
        assert_eq!(zero.value, 0.0);
        let two = exterior_tail_integral(&[0.0], &y, &k, 2.0, &d, 0.01, &s).unwrap();
        assert!(two.value > e.value);
        assert!(matches!(exterior_tail_integral(&[0.995], &y, &k, 1.0, &d, 0.01, &s), Err(Error::OnBoundary { .. })));
    }

    #[test]
    fn exterior_tail_bound_is_valid() {
        let y = YoungFunction::power(2.0).unwrap();
        let k = KernelSpec::fractional(0.5, 1).unwrap();
        let d = Domain::cube(vec![-1.0], vec![1.0]).unwrap();
        let s = CubatureSpec { truncation_radius: Some(4.0), ..Default::default() };
        let a = exterior_tail_integral(&[0.3], &y, &k, 1.0, &d, 0.01, &s).unwrap();
        let r = a.metadata.truncation_radius.unwrap();
        let s2 = CubatureSpec { truncation_radius: Some(2.0 * r), ..s };
        let b = exterior_tail_integral(&[0.3], &y, &k, 1.0, &d, 0.01, &s2).unwrap();
        assert!((b.value - a.value).abs() < a.metadata.tail_bound);
        // exact: ∫_{y>1} (y−0.3)^{-2} + ∫_{y<−1} (0.3−y)^{-2} = 1/0.7 + 1/1.3
        let exact = 1.0 / 0.7 + 1.0 / 1.3;
        assert!(a.contains(exact), "{a:?}");
    }

    #[test]
    fn exterior_tail_in_two_dimensions() {
        // outside the unit disk from its center: ∫_1^∞ r^{-2s} r^{-2} 2π r dr = 2π/(2s) for G = t²
        let y = YoungFunction::power(2.0).unwrap();
        let k = KernelSpec::fractional(0.5, 2).unwrap();
        let d = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let e = exterior_tail_integral(&[0.0, 0.0], &y, &k, 1.0, &d, 0.01, &CubatureSpec::default()).unwrap();
        let exact = 2.0 * std::f64::consts::PI;
        assert!(e.contains(exact), "{e:?}");
    }

    #[test]
    fn radial_comparison_examples() {
        let s = CubatureSpec::default();
        let exp = |r: f64| (-r).exp();
        let d = Domain::cube(vec![1.0], vec![3.0]).unwrap();
        let c = radial_comparison_check(&exp, &d, 0.0, &s).unwrap();
        let e1 = (-1f64).exp();
        assert!(
            c.over_symmetrized.contains(2.0 * (1.0 - e1)) || (c.over_symmetrized.value - 2.0 * (1.0 - e1)).abs() < 1e-9
        );
        assert!((c.over_domain.value - (e1 - (-3f64).exp())).abs() < 1e-9);
        assert!((c.outside_symmetrized.value - 2.0 * e1).abs() < 1e-9);
        assert!((c.outside_domain.value - (2.0 - e1 + (-3f64).exp())).abs() < 1e-9);

        let inv = |r: f64| (1.0 + r).powi(-2);
        let d = Domain::cube(vec![0.0], vec![2.0]).unwrap();
        let c = radial_comparison_check(&inv, &d, 0.0, &s).unwrap();
        assert!((c.over_symmetrized.value - 1.0).abs() < 1e-9);
        assert!((c.over_domain.value - 2.0 / 3.0).abs() < 1e-9);

        let centered = Domain::cube(vec![-1.0], vec![1.0]).unwrap();
        assert!(matches!(radial_comparison_check(&exp, &centered, 0.0, &s), Err(Error::Precondition(_))));
    }
}
