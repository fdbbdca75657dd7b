//! The counterexample to the domain Pólya–Szegő inequality and the
//! comparison-constant pipeline.
//!
//! For the counterexample a smooth bump `u_ε` is placed inside `Ω` and its
//! symmetrization `u*_ε` inside `Ω*`. On lattices anchored at the two bump
//! centers the rearranged grid is the same array of values, so the core sums
//! over `supp u × supp u` agree bit for bit and the margin
//! `I_{Ω*}[u*] − I_Ω[u]` reduces to twice the difference of the halo sums.

use crate::error::{Error, Result};
use crate::geometry::{inscribed_ball, schwarz_rearrange, symmetrized_set, Domain, GridFunction, Lattice, PointFn};
use crate::quadrature::{exterior_tail_integral, CubatureSpec, Estimate};
use crate::seminorm::{
    cross_term, default_outer_box, fullspace_over, modular, seminorm_domain, seminorm_domain_parts, seminorm_fullspace,
    shrink_support, Ladder, Region, SeminormRequest,
};
use crate::young::{classify_theorem2_case, KernelSpec, LambdaProbe, TheoremCase, YoungFunction};

/// `η(r)`: 1 on `[0, R₀/2]`, `exp(1 − 1/(1 − t²))` with `t = 2r/R₀ − 1` on `(R₀/2, R₀)`, 0 beyond.
pub fn bump_profile(r: f64, outer_radius: f64) -> f64 {
    if r <= 0.5 * outer_radius {
        return 1.0;
    }
    if r >= outer_radius {
        return 0.0;
    }
    let t = 2.0 * r / outer_radius - 1.0;
    (1.0 - 1.0 / (1.0 - t * t)).exp()
}

/// Placement of the bump `u_ε(x) = η(|x − x₀| / ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub outer_radius: f64,
    /// Coarse cell width; every level refines it by 3 around `center`.
    pub h: f64,
    pub ball_case: bool,
}

impl BumpSpec {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn plateau_radius(&self) -> f64 {
        0.5 * self.outer_radius
    }

    /// `u_ε` on the lattice with cell width `h` anchored at `anchor`, radii taken from integer offsets.
    pub fn sample(&self, eps: f64, h: f64, anchor: &[f64]) -> Result<GridFunction> {
        let dim = self.dim();
        let support = eps * self.outer_radius;
        let m = (support / h).ceil() as i64 + 1;
        let side = (2 * m + 1) as usize;
        let lattice = Lattice::new(anchor.to_vec(), h)?;
        let mut values = Vec::with_capacity(side.pow(dim as u32));
        let mut idx = vec![-m; dim];
        for _ in 0..side.pow(dim as u32) {
            let r2: i64 = idx.iter().map(|k| k * k).sum();
            values.push(bump_profile(h * (r2 as f64).sqrt() / eps, self.outer_radius));
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] <= m {
                    break;
                }
                idx[a] = -m;
            }
        }
        GridFunction::new(lattice, vec![-m; dim], vec![side; dim], values)
    }

    /// `u_ε` at every refinement level.
    pub fn ladder(&self, eps: f64, levels: usize) -> Result<Ladder> {
        let levels: Vec<GridFunction> =
            (0..levels).map(|l| self.sample(eps, self.h / 3f64.powi(l as i32), &self.center)).collect::<Result<_>>()?;
        Ladder::from_levels(levels)
    }
}

/// Bump placement: the inscribed ball of `Ω`, or in the ball case the point at half
/// the radius from the center with `R₀` a quarter of the radius.
pub fn build_bump(domain: &Domain, ball_case: bool, cells: usize) -> Result<BumpSpec> {
    let dim = domain.dim();
    let (lo, hi) = domain.bounding_box();
    let extent = (0..dim).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    let h = extent / cells as f64;
    if ball_case {
        let (c, rho) = domain
            .as_ball()
            .ok_or_else(|| Error::Invalid("the ball case needs a single ball (or interval) domain".into()))?;
        let mut center = c.clone();
        center[0] += 0.5 * rho;
        let outer_radius = 0.25 * rho;
        if outer_radius < 4.0 * h {
            return Err(Error::TooCoarse { radius: outer_radius, h });
        }
        return Ok(BumpSpec { center, outer_radius, h, ball_case });
    }
    let ball = inscribed_ball(domain, cells)?;
    Ok(BumpSpec { center: ball.center, outer_radius: ball.radius, h: ball.lattice.h, ball_case })
}

/// Default scan `R₀ · {1/2, …, 1/64}`.
pub fn default_epsilons(outer_radius: f64) -> Vec<f64> {
    (1..=6).map(|k| outer_radius / 2f64.powi(k)).collect()
}

#[derive(Debug, Clone)]
pub struct CounterexampleOptions {
    /// Overrides the bump placement.
    pub bump: Option<BumpSpec>,
    /// `None` picks the ball case for single-ball domains.
    pub ball_case: Option<bool>,
    pub epsilons: Option<Vec<f64>>,
    /// PASS needs `margin > pass_factor × combined error`.
    pub pass_factor: f64,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        CounterexampleOptions { bump: None, ball_case: None, epsilons: None, pass_factor: 3.0 }
    }
}

/// Results for one `ε`.
#[derive(Debug, Clone)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// `I_Ω[u_ε]`.
    pub lhs: Estimate,
    /// `I_{Ω*}[u*_ε]`.
    pub rhs: Estimate,
    pub margin: f64,
    pub combined_error: f64,
    pub pass: bool,
    /// Whether the two core sums agreed bit for bit (margin taken from the halos).
    pub cores_identical: bool,
    pub cross: Estimate,
    pub cross_star: Estimate,
    pub full: Estimate,
    pub full_star: Estimate,
    /// `|full − (lhs + 2·cross)|` and the sum of the three error bounds.
    pub identity_residual: f64,
    pub identity_bound: f64,
    /// `full(u*) ≤ full(u) + errors`.
    pub direction_ok: bool,
    /// `I_{Ω*}[u*] ≤ full(u*) + errors`.
    pub restriction_ok: bool,
}

#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    pub domain: Domain,
    pub symmetrized: Domain,
    pub bump: BumpSpec,
    pub young: String,
    pub s: f64,
    pub rows: Vec<EpsilonRow>,
    /// `H_Ω` at the bump center and `H_{Ω*}` at the origin, amplitude 1.
    pub tail: Estimate,
    pub tail_star: Estimate,
    /// The rearranged bump equals the bump sampled about the origin.
    pub rearrangement_exact: bool,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().any(|r| r.pass)
    }

    /// Smallest scanned `ε` with a PASS verdict.
    pub fn smallest_passing_epsilon(&self) -> Option<f64> {
        self.rows.iter().filter(|r| r.pass).map(|r| r.epsilon).fold(None, |a, e| Some(a.map_or(e, |a: f64| a.min(e))))
    }

    pub fn tail_margin(&self) -> f64 {
        self.tail.value - self.tail_star.value
    }

    pub fn tail_distinguished(&self) -> bool {
        self.tail_margin() > self.tail.error_bound + self.tail_star.error_bound
    }
}

fn richardson_of(xs: &[f64]) -> f64 {
    match xs {
        [.., a, b] => (b - a).abs(),
        _ => 0.0,
    }
}

fn request(
    u: &Ladder,
    young: &YoungFunction,
    kernel: &KernelSpec,
    region: Region,
    spec: &CubatureSpec,
) -> SeminormRequest {
    SeminormRequest { u: u.clone(), young: young.clone(), kernel: kernel.clone(), region, spec: spec.clone() }
}

fn outer_box(u: &GridFunction) -> Result<Domain> {
    default_outer_box(u)?.ok_or(Error::Precondition("bump has empty support".into()))
}

#[allow(clippy::too_many_arguments)]
fn scan_epsilon(
    domain: &Domain,
    star: &Domain,
    bump: &BumpSpec,
    eps: f64,
    young: &YoungFunction,
    kernel: &KernelSpec,
    spec: &CubatureSpec,
    pass_factor: f64,
) -> Result<(EpsilonRow, bool)> {
    let u = bump.ladder(eps, spec.refinement_levels)?;
    let u_star = u.map(schwarz_rearrange)?;
    let origin = vec![0.0; bump.dim()];
    let exact = u.levels().iter().zip(u_star.levels()).all(|(a, b)| {
        b.values() == bump.sample(eps, a.lattice().h, &origin).map(|g| g.values().to_vec()).unwrap_or_default()
    });

    let (lhs, sums) = seminorm_domain_parts(&request(&u, young, kernel, Region::Domain(domain.clone()), spec))?;
    let (rhs, sums_star) = seminorm_domain_parts(&request(&u_star, young, kernel, Region::Domain(star.clone()), spec))?;

    let cores_identical = sums.iter().zip(&sums_star).all(|(a, b)| a.core.to_bits() == b.core.to_bits());
    let (margin, combined_error) = if cores_identical {
        // near-support halo terms are shared and cancel; Richardson acts on the margin itself
        let margins: Vec<f64> = sums.iter().zip(&sums_star).map(|(a, b)| 2.0 * (b.halo - a.halo)).collect();
        (*margins.last().unwrap(), richardson_of(&margins))
    } else {
        (rhs.value - lhs.value, lhs.error_bound + rhs.error_bound)
    };
    let pass = margin > pass_factor * combined_error;

    let cross = cross_term(&request(&u, young, kernel, Region::Cross(domain.clone()), spec))?;
    let cross_star = cross_term(&request(&u_star, young, kernel, Region::Cross(star.clone()), spec))?;
    let full = fullspace_over(&u, &outer_box(&u.levels()[0])?, young, kernel, spec)?;
    let full_star = fullspace_over(&u_star, &outer_box(&u_star.levels()[0])?, young, kernel, spec)?;
    let identity_residual = (full.value - (lhs.value + 2.0 * cross.value)).abs();
    let identity_bound = full.error_bound + lhs.error_bound + 2.0 * cross.error_bound;
    let direction_ok = full_star.value <= full.value + full.error_bound + full_star.error_bound;
    let restriction_ok = rhs.value <= full_star.value + rhs.error_bound + full_star.error_bound;
    Ok((
        EpsilonRow {
            epsilon: eps,
            lhs,
            rhs,
            margin,
            combined_error,
            pass,
            cores_identical,
            cross,
            cross_star,
            full,
            full_star,
            identity_residual,
            identity_bound,
            direction_ok,
            restriction_ok,
        },
        exact,
    ))
}

/// Scans `ε` and certifies `I_Ω[u_ε] < I_{Ω*}[u*_ε]` when the margin beats the error budget.
pub fn verify_counterexample(
    domain: &Domain,
    young: &YoungFunction,
    s: f64,
    options: &CounterexampleOptions,
    spec: &CubatureSpec,
) -> Result<CounterexampleReport> {
    spec.validate()?;
    if spec.refinement_levels < 2 {
        return Err(Error::Invalid("the counterexample needs at least two refinement levels".into()));
    }
    let dim = domain.dim();
    let kernel = KernelSpec::fractional(s, dim)?;
    let ball_case = options.ball_case.unwrap_or_else(|| domain.as_ball().is_some());
    let bump = match &options.bump {
        Some(b) => b.clone(),
        None => build_bump(domain, ball_case, spec.base_resolution)?,
    };
    let star = symmetrized_set(domain)?.to_domain()?;
    let epsilons = options.epsilons.clone().unwrap_or_else(|| default_epsilons(bump.outer_radius));
    if epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Invalid("epsilon values must lie in (0,1)".into()));
    }

    let mut rows = Vec::with_capacity(epsilons.len());
    let mut rearrangement_exact = true;
    for &eps in &epsilons {
        let (row, exact) = scan_epsilon(domain, &star, &bump, eps, young, &kernel, spec, options.pass_factor)?;
        log::info!(
            "eps = {eps:.6}: margin {:.6e}, error {:.6e}, {}",
            row.margin,
            row.combined_error,
            if row.pass { "PASS" } else { "no pass" }
        );
        rearrangement_exact &= exact;
        rows.push(row);
    }
    let unit = 1.0;
    let tail = exterior_tail_integral(&bump.center, young, &kernel, unit, domain, bump.h, spec)?;
    let tail_star = exterior_tail_integral(&vec![0.0; dim], young, &kernel, unit, &star, bump.h, spec)?;
    Ok(CounterexampleReport {
        domain: domain.clone(),
        symmetrized: star,
        bump,
        young: young.to_string(),
        s,
        rows,
        tail,
        tail_star,
        rearrangement_exact,
    })
}

/// Residual of `full = I_Ω + 2·cross` for the bump at `eps`, with the sum of the three error bounds.
pub fn decomposition_residual(
    domain: &Domain,
    bump: &BumpSpec,
    eps: f64,
    young: &YoungFunction,
    s: f64,
    spec: &CubatureSpec,
) -> Result<(f64, f64)> {
    let kernel = KernelSpec::fractional(s, domain.dim())?;
    let u = bump.ladder(eps, spec.refinement_levels)?;
    decomposition_residual_of(&u, domain, young, &kernel, spec)
}

/// Same as [`decomposition_residual`] for an arbitrary grid function ladder.
pub fn decomposition_residual_of(
    u: &Ladder,
    domain: &Domain,
    young: &YoungFunction,
    kernel: &KernelSpec,
    spec: &CubatureSpec,
) -> Result<(f64, f64)> {
    if u.levels().iter().all(|g| g.is_zero()) {
        return Ok((0.0, 0.0));
    }
    let d = seminorm_domain(&request(u, young, kernel, Region::Domain(domain.clone()), spec))?;
    let c = cross_term(&request(u, young, kernel, Region::Cross(domain.clone()), spec))?;
    let f = seminorm_fullspace(&request(u, young, kernel, Region::FullSpace, spec))?;
    Ok(((f.value - (d.value + 2.0 * c.value)).abs(), f.error_bound + d.error_bound + 2.0 * c.error_bound))
}

/// Hardy-step quantities for one function.
#[derive(Debug, Clone)]
pub struct HardyReport {
    /// `Σ h^N G(u/δ^s)` over the support.
    pub a: f64,
    /// `I_Ω[u]`.
    pub b: Estimate,
    /// Sampled cells where the pointwise bound on the exterior integrand was tested.
    pub chain_checked: usize,
    pub chain_violations: usize,
}

impl HardyReport {
    pub fn ratio(&self) -> f64 {
        if self.b.value == 0.0 {
            if self.a == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.a / self.b.value
        }
    }
}

/// `A = ∫ G(u/δ^s)` and `B = I_Ω[u]`, plus the pointwise check
/// `H(x) ≤ G(u(x)/δ(x)^s) δ(x)^{s p⁻} ∫_{ℝᴺ∖Ω} |x−y|^{−N−s p⁻} dy` on sampled cells.
pub fn hardy_quotient(
    domain: &Domain,
    u: &Ladder,
    young: &YoungFunction,
    s: f64,
    spec: &CubatureSpec,
) -> Result<HardyReport> {
    let dim = domain.dim();
    let kernel = KernelSpec::fractional(s, dim)?;
    let fine = u.finest();
    if fine.is_zero() {
        return Ok(HardyReport { a: 0.0, b: Estimate::exact(0.0), chain_checked: 0, chain_violations: 0 });
    }
    let h = fine.lattice().h;
    let mut a_terms = Vec::new();
    let mut sample = Vec::new();
    for (k, v) in fine.support_cells() {
        let x = fine.lattice().center(&k);
        if !domain.contains(&x) {
            return Err(Error::Precondition(format!("grid function is positive at {x:?}, outside the domain")));
        }
        let delta = domain.distance_to_boundary(&x)?;
        a_terms.push(young.eval(v / delta.powf(s)));
        if delta >= 2.0 * h {
            sample.push((x, v, delta));
        }
    }
    let a = fine.cell_volume() * crate::quadrature::tree_sum(&a_terms);
    let b = seminorm_domain(&request(u, young, &kernel, Region::Domain(domain.clone()), spec))?;

    let p = young.p_minus();
    let power = YoungFunction::power(p)?;
    let stride = (sample.len() / 16).max(1);
    let mut checked = 0;
    let mut violations = 0;
    for (x, v, delta) in sample.iter().step_by(stride) {
        let lhs = exterior_tail_integral(x, young, &kernel, *v, domain, h, spec)?;
        let k = exterior_tail_integral(x, &power, &kernel, 1.0, domain, h, spec)?;
        let bound = young.eval(v / delta.powf(s)) * delta.powf(s * p);
        checked += 1;
        if lhs.value - lhs.error_bound > bound * (k.value + k.error_bound) {
            violations += 1;
        }
    }
    Ok(HardyReport { a, b, chain_checked: checked, chain_violations: violations })
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub index: usize,
    pub domain: Estimate,
    pub full: Estimate,
    pub full_star: Estimate,
    /// `full(u*) / I_Ω[u]`.
    pub rho: f64,
    /// `full(u*) ≤ full(u) + errors`.
    pub polya_szego_ok: bool,
    pub cross: Estimate,
    pub hardy: HardyReport,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub case: TheoremCase,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    /// `max ρ` over the corpus: an empirical lower bound for the comparison constant.
    pub fn empirical_lower_bound(&self) -> f64 {
        self.rows.iter().map(|r| r.rho).fold(0.0, f64::max)
    }

    /// `max cross / I_Ω` over the corpus.
    pub fn hardy_constant(&self) -> f64 {
        self.rows.iter().map(|r| r.cross.value / r.domain.value).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.rho.is_finite())
    }
}

/// Ratios `full(u*) / I_Ω[u]` over a corpus, gated by the β classifier for `case`.
pub fn verify_comparison(
    domain: &Domain,
    young: &YoungFunction,
    s: f64,
    case: TheoremCase,
    corpus: &[Ladder],
    spec: &CubatureSpec,
) -> Result<ComparisonReport> {
    let dim = domain.dim();
    let grid = crate::young::log_grid(1e-8, 1e8, 4);
    match classify_theorem2_case(young, s, dim, case, &LambdaProbe::default(), &grid) {
        Ok(true) => {}
        Ok(false) => {
            return Err(Error::CaseHypothesisFails(format!(
                "beta does not vanish in the limit required by case {}",
                case as u8
            )))
        }
        Err(Error::Inconclusive(m)) => return Err(Error::CaseHypothesisFails(m)),
        Err(e) => return Err(e),
    }
    let kernel = KernelSpec::fractional(s, dim)?;
    let mut rows = Vec::with_capacity(corpus.len());
    for (index, u) in corpus.iter().enumerate() {
        if u.finest().is_zero() {
            return Err(Error::Precondition(format!("corpus member {index} is identically zero")));
        }
        let u_star = u.map(schwarz_rearrange)?;
        let d = seminorm_domain(&request(u, young, &kernel, Region::Domain(domain.clone()), spec))?;
        let full = seminorm_fullspace(&request(u, young, &kernel, Region::FullSpace, spec))?;
        let full_star = seminorm_fullspace(&request(&u_star, young, &kernel, Region::FullSpace, spec))?;
        let cross = cross_term(&request(u, young, &kernel, Region::Cross(domain.clone()), spec))?;
        let hardy = hardy_quotient(domain, u, young, s, spec)?;
        let rho = full_star.value / d.value;
        rows.push(ComparisonRow {
            index,
            polya_szego_ok: full_star.value <= full.value + full.error_bound + full_star.error_bound,
            domain: d,
            full,
            full_star,
            rho,
            cross,
            hardy,
        });
    }
    Ok(ComparisonReport { case, rows })
}

/// `Σ h^N G(u)` convenience for reports.
pub fn modular_of(u: &GridFunction, young: &YoungFunction) -> f64 {
    modular(u, young).value
}

/// Closed-form grid function sampled on a domain's bounding-box lattice at every level.
pub fn sample_on_domain(domain: &Domain, cells: usize, levels: usize, f: PointFn) -> Result<Ladder> {
    let (lo, hi) = domain.bounding_box();
    let extent = (0..domain.dim()).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    let h = extent / cells as f64;
    let lattice = Lattice::new(lo.iter().map(|x| x + 0.5 * h).collect(), h)?;
    let d = domain.clone();
    let g = move |x: &[f64]| if d.contains(x) { f(x) } else { 0.0 };
    let ladder = Ladder::sampled(g, &lattice, &lo, &hi, levels)?;
    ladder.map(|u| shrink_support(u, domain).map(|s| s.0))
}
