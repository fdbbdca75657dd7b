//! Young functions: evaluation, growth exponents, complementary function,
//! doubling constants and the scaling function β used to gate the
//! comparison-constant theorem.

use std::f64::consts::E;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::oned::{integrate_to_infinity, integrate_to_zero, PowerTail};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Young function `G(t) = ∫_0^t g` with declared growth exponents `p⁻ ≤ t g(t)/G(t) ≤ p⁺`.
#[derive(Clone)]
pub struct YoungFunction {
    name: String,
    params: Vec<(&'static str, f64)>,
    big_g: ScalarFn,
    density: ScalarFn,
    p_minus: f64,
    p_plus: f64,
    complementary: Option<ScalarFn>,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("YoungFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("p_minus", &self.p_minus)
            .field("p_plus", &self.p_plus)
            .finish()
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

fn check_exponents(p_minus: f64, p_plus: f64) -> Result<()> {
    if !(p_minus > 1.0) || !(p_plus >= p_minus) || !p_plus.is_finite() {
        return Err(Error::NonYoung(format!(
            "growth exponents must satisfy 1 < p- <= p+ < inf, got ({p_minus}, {p_plus})"
        )));
    }
    Ok(())
}

/// Maximum of `t / ((e + t) ln(e + t))` over `t > 0`; the dip of `t g/G` for `t^p / ln(e+t)`.
fn log_denominator_dip() -> f64 {
    let phi = |v: f64| {
        let t = v.exp();
        t / ((E + t) * (E + t).ln())
    };
    // golden section in log t
    let (mut a, mut b) = (-10.0f64, 10.0f64);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if phi(c) > phi(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    phi(0.5 * (a + b))
}

impl YoungFunction {
    /// `G(t) = t^p`.
    pub fn power(p: f64) -> Result<Self> {
        Self::scaled_power(1.0, p)
    }

    /// `G(t) = c·t^p`, with complementary `(p-1)·c·(t/(c p))^{p/(p-1)}`.
    pub fn scaled_power(c: f64, p: f64) -> Result<Self> {
        check_exponents(p, p)?;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::NonYoung(format!("coefficient must be positive, got {c}")));
        }
        let q = p / (p - 1.0);
        Ok(YoungFunction {
            name: "tp".into(),
            params: vec![("c", c), ("p", p)],
            big_g: Arc::new(move |t| c * t.powf(p)),
            density: Arc::new(move |t| c * p * t.powf(p - 1.0)),
            p_minus: p,
            p_plus: p,
            complementary: Some(Arc::new(move |t| (p - 1.0) * c * (t / (c * p)).powf(q))),
        })
    }

    /// `G(t) = t^p (1 + |ln t|)`; exponents `p - 1` and `p + 1`.
    ///
    /// Convex with `p⁻ > 1` only for `p > (3 + √5)/2`.
    pub fn power_log(p: f64) -> Result<Self> {
        let threshold = 0.5 * (3.0 + 5f64.sqrt());
        if !(p > threshold) {
            return Err(Error::NonYoung(format!(
                "t^p(1+|log t|) has a decreasing density on (e^(-1/2), 1) unless p > {threshold:.4}, got p = {p}"
            )));
        }
        Ok(YoungFunction {
            name: "tp_log".into(),
            params: vec![("p", p)],
            big_g: Arc::new(move |t| if t == 0.0 { 0.0 } else { t.powf(p) * (1.0 + t.ln().abs()) }),
            density: Arc::new(move |t| {
                if t == 0.0 {
                    0.0
                } else if t < 1.0 {
                    t.powf(p - 1.0) * (p * (1.0 - t.ln()) - 1.0)
                } else {
                    t.powf(p - 1.0) * (p * (1.0 + t.ln()) + 1.0)
                }
            }),
            p_minus: p - 1.0,
            p_plus: p + 1.0,
            complementary: None,
        })
    }

    /// `G(t) = t^p / ln(e + t)`; exponents `p - max_t t/((e+t) ln(e+t))` and `p`.
    pub fn power_over_log(p: f64) -> Result<Self> {
        let p_minus = p - log_denominator_dip();
        check_exponents(p_minus, p)?;
        if p < 2.0 {
            return Err(Error::NonYoung(format!("t^p/log(e+t) is only catalogued for p >= 2, got {p}")));
        }
        Ok(YoungFunction {
            name: "tp_over_log".into(),
            params: vec![("p", p)],
            big_g: Arc::new(move |t| t.powf(p) / (E + t).ln()),
            density: Arc::new(move |t| {
                let l = (E + t).ln();
                p * t.powf(p - 1.0) / l - t.powf(p) / ((E + t) * l * l)
            }),
            p_minus,
            p_plus: p,
            complementary: None,
        })
    }

    /// Double phase `G(t) = t^q + t^p`, `p > q > 1`.
    pub fn double_phase(q: f64, p: f64) -> Result<Self> {
        if !(p > q) {
            return Err(Error::NonYoung(format!("double phase needs p > q, got q = {q}, p = {p}")));
        }
        check_exponents(q, p)?;
        Ok(YoungFunction {
            name: "double_phase".into(),
            params: vec![("q", q), ("p", p)],
            big_g: Arc::new(move |t| t.powf(q) + t.powf(p)),
            density: Arc::new(move |t| q * t.powf(q - 1.0) + p * t.powf(p - 1.0)),
            p_minus: q,
            p_plus: p,
            complementary: None,
        })
    }

    /// A user-supplied `G`; without a density, `g` is a central difference of `G`.
    pub fn custom(
        name: impl Into<String>,
        big_g: ScalarFn,
        density: Option<ScalarFn>,
        p_minus: f64,
        p_plus: f64,
    ) -> Result<Self> {
        check_exponents(p_minus, p_plus)?;
        let density = density.unwrap_or_else(|| finite_difference(big_g.clone()));
        Ok(YoungFunction { name: name.into(), params: vec![], big_g, density, p_minus, p_plus, complementary: None })
    }

    /// `G` tabulated at `(t, G(t))` pairs, monotone-cubic interpolated, extended by power laws.
    ///
    /// Exponents are taken from the arguments when given, otherwise measured on a
    /// log grid spanning the table.
    pub fn tabulated(points: &[(f64, f64)], p_minus: Option<f64>, p_plus: Option<f64>) -> Result<Self> {
        let table = Arc::new(MonotoneCubic::new(points)?);
        let g_table = table.clone();
        let big_g: ScalarFn = Arc::new(move |t| g_table.eval(t));
        let density = finite_difference(big_g.clone());
        let (lo, hi) = (table.t[0], *table.t.last().unwrap());
        let (pm, pp) = match (p_minus, p_plus) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let grid = log_grid(lo, hi, 50);
                let mut inf = f64::INFINITY;
                let mut sup: f64 = 0.0;
                for &t in &grid {
                    let r = t * density(t) / big_g(t);
                    inf = inf.min(r);
                    sup = sup.max(r);
                }
                (p_minus.unwrap_or(inf), p_plus.unwrap_or(sup))
            }
        };
        check_exponents(pm, pp)?;
        Ok(YoungFunction {
            name: "tabulated".into(),
            params: vec![("points", points.len() as f64)],
            big_g,
            density,
            p_minus: pm,
            p_plus: pp,
            complementary: None,
        })
    }

    /// The built-in examples with representative parameters.
    pub fn catalog() -> Vec<YoungFunction> {
        vec![
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::power(3.0).unwrap(),
            YoungFunction::power_log(3.0).unwrap(),
            YoungFunction::power_over_log(2.0).unwrap(),
            YoungFunction::double_phase(2.0, 3.0).unwrap(),
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.big_g)(t)
    }

    #[inline]
    pub fn density(&self, t: f64) -> f64 {
        (self.density)(t)
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn has_closed_form_complementary(&self) -> bool {
        self.complementary.is_some()
    }

    /// The same function with the numeric complementary forced (closed form dropped).
    pub fn without_closed_form_complementary(&self) -> Self {
        YoungFunction { complementary: None, ..self.clone() }
    }
}

fn finite_difference(big_g: ScalarFn) -> ScalarFn {
    Arc::new(move |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let h = (1e-6 * t.max(1.0)).min(0.5 * t);
        (big_g(t + h) - big_g(t - h)) / (2.0 * h)
    })
}

/// Fritsch–Carlson monotone cubic through `(t, G)` pairs.
struct MonotoneCubic {
    t: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
    low_power: f64,
    high_power: f64,
}

impl MonotoneCubic {
    fn new(points: &[(f64, f64)]) -> Result<Self> {
        let pts: Vec<(f64, f64)> = points.iter().copied().filter(|&(t, _)| t > 0.0).collect();
        if pts.len() < 3 {
            return Err(Error::Invalid("a tabulated Young function needs at least 3 points with t > 0".into()));
        }
        for w in pts.windows(2) {
            if !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1) || !(w[0].1 > 0.0) {
                return Err(Error::NonYoung("tabulated G must be positive and strictly increasing".into()));
            }
        }
        let n = pts.len();
        let t: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (t[i + 1] - t[i])).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            slope[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * (t[i + 1] - t[i]) + (t[i] - t[i - 1]);
                let w2 = (t[i + 1] - t[i]) + 2.0 * (t[i] - t[i - 1]);
                (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
            };
        }
        let low_power = (y[1] / y[0]).ln() / (t[1] / t[0]).ln();
        let high_power = (y[n - 1] / y[n - 2]).ln() / (t[n - 1] / t[n - 2]).ln();
        Ok(MonotoneCubic { t, y, slope, low_power, high_power })
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x <= 0.0 {
            return 0.0;
        }
        if x <= self.t[0] {
            return self.y[0] * (x / self.t[0]).powf(self.low_power);
        }
        if x >= self.t[n - 1] {
            return self.y[n - 1] * (x / self.t[n - 1]).powf(self.high_power);
        }
        let i = self.t.partition_point(|&ti| ti <= x) - 1;
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }
}

/// Log-spaced grid from `lo` to `hi` (inclusive) with `per_decade` points per decade.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let n = (((b - a) * per_decade as f64).ceil() as usize).max(1);
    (0..=n).map(|i| 10f64.powf(a + (b - a) * i as f64 / n as f64)).collect()
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty t grid".into()));
    }
    if grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::Invalid("t grid must be strictly positive and finite".into()));
    }
    let (lo, hi) = grid.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if (hi / lo).log10() < 8.0 - 1e-9 {
        log::debug!("t grid spans only {:.1} decades", (hi / lo).log10());
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Min,
    Max,
}

/// Extremum of `f` over a sorted log grid with one round of 10× refinement
/// around the running extremum. Returns `(value, argument)`.
fn grid_extremum(grid: &[f64], f: &impl Fn(f64) -> f64, kind: Extremum) -> (f64, f64) {
    let better = |a: f64, b: f64| match kind {
        Extremum::Min => a < b,
        Extremum::Max => a > b,
    };
    let mut best_i = 0;
    let mut best = f(grid[0]);
    for (i, &t) in grid.iter().enumerate().skip(1) {
        let v = f(t);
        if better(v, best) || best.is_nan() {
            best = v;
            best_i = i;
        }
    }
    let mut arg = grid[best_i];
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(grid.len() - 1)];
    if hi > lo {
        let n = 20;
        let (la, lb) = (lo.ln(), hi.ln());
        for j in 0..=n {
            let t = (la + (lb - la) * j as f64 / n as f64).exp();
            let v = f(t);
            if better(v, best) {
                best = v;
                arg = t;
            }
        }
    }
    (best, arg)
}

/// `(inf, sup)` of `t g(t)/G(t)` over the grid.
pub fn exponent_bounds(y: &YoungFunction, t_grid: &[f64]) -> Result<(f64, f64)> {
    validate_grid(t_grid)?;
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &t in &sorted {
        let big = y.eval(t);
        if !(big > 0.0) {
            return Err(Error::NonYoung(format!("G({t}) = {big} is not positive")));
        }
        let r = t * y.density(t) / big;
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::NonYoung(format!("t g(t)/G(t) = {r} at t = {t}")));
        }
    }
    let ratio = |t: f64| t * y.density(t) / y.eval(t);
    let (inf, _) = grid_extremum(&sorted, &ratio, Extremum::Min);
    let (sup, _) = grid_extremum(&sorted, &ratio, Extremum::Max);
    Ok((inf, sup))
}

/// `G̃(t) = sup_{w>0} (t w − G(w))`.
pub fn complementary(y: &YoungFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Invalid(format!("complementary needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if let Some(c) = &y.complementary {
        return Ok(c(t));
    }
    complementary_numeric(y, t)
}

fn complementary_numeric(y: &YoungFunction, t: f64) -> Result<f64> {
    // the objective t w − G(w) is concave; its maximizer is where g crosses t
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while y.density(hi) < t {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1000 || !hi.is_finite() {
            return Err(Error::MaximizerDiverged { t, bracket: hi });
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if y.density(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let obj = |w: f64| t * w - y.eval(w);
    Ok(obj(lo).max(obj(hi)).max(0.0))
}

/// `|G̃(g(t)) − (t g(t) − G(t))|`.
pub fn legendre_identity_residual(y: &YoungFunction, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Invalid(format!("identity residual needs t > 0, got {t}")));
    }
    let gt = y.density(t);
    Ok((complementary(y, gt)? - (t * gt - y.eval(t))).abs())
}

/// `sup G(2t)/G(t)` over the grid.
pub fn delta2_constant(y: &YoungFunction, t_grid: &[f64]) -> Result<f64> {
    validate_grid(t_grid)?;
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &t in &sorted {
        if !(y.eval(t) > 0.0) {
            return Err(Error::NonYoung(format!("G({t}) is not positive")));
        }
    }
    let (sup, _) = grid_extremum(&sorted, &|t: f64| y.eval(2.0 * t) / y.eval(t), Extremum::Max);
    Ok(sup)
}

/// `min{a^{p⁻}, a^{p⁺}} G(b) ≤ G(ab) ≤ max{a^{p⁻}, a^{p⁺}} G(b)` up to 1e-10 relative.
pub fn two_sided_scaling_check(y: &YoungFunction, a: f64, b: f64) -> bool {
    if a == 0.0 || b == 0.0 {
        return true;
    }
    let (x, z) = (a.powf(y.p_minus), a.powf(y.p_plus));
    let gb = y.eval(b);
    let mid = y.eval(a * b);
    let tol = 1e-10;
    x.min(z) * gb <= mid * (1.0 + tol) && mid <= x.max(z) * gb * (1.0 + tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaValue {
    pub value: f64,
    /// Grid point attaining the supremum.
    pub argmax: f64,
    pub diagnostic: Option<String>,
}

/// `β(λ) = sup_t G(λt) / (λ^{1/s} G(t))`, evaluated in log space.
pub fn beta(y: &YoungFunction, s: f64, lambda: f64, t_grid: &[f64]) -> Result<BetaValue> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Invalid(format!("s must lie in (0,1), got {s}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Invalid(format!("lambda must be positive, got {lambda}")));
    }
    validate_grid(t_grid)?;
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let shift = lambda.ln() / s;
    let log_ratio = |t: f64| {
        let num = y.eval(lambda * t);
        let den = y.eval(t);
        if !(den > 0.0) {
            f64::NEG_INFINITY
        } else if !num.is_finite() {
            f64::INFINITY
        } else {
            num.ln() - den.ln() - shift
        }
    };
    let (best, argmax) = grid_extremum(&sorted, &log_ratio, Extremum::Max);
    let value = best.exp();
    let diagnostic = (!value.is_finite())
        .then(|| format!("beta overflowed at lambda = {lambda:e}, t = {argmax:e}; reported as +inf"));
    if let Some(d) = &diagnostic {
        log::warn!("{d}");
    }
    Ok(BetaValue { value: if value.is_nan() { f64::INFINITY } else { value }, argmax, diagnostic })
}

/// Geometric λ probe toward 0 and toward ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaProbe {
    pub decades: u32,
    pub steps_per_decade: u32,
}

impl Default for LambdaProbe {
    fn default() -> Self {
        LambdaProbe { decades: 12, steps_per_decade: 1 }
    }
}

impl LambdaProbe {
    pub fn toward_zero(&self) -> Vec<f64> {
        let n = self.decades * self.steps_per_decade;
        (0..=n).map(|k| 10f64.powf(-(k as f64) / self.steps_per_decade as f64)).collect()
    }

    pub fn toward_infinity(&self) -> Vec<f64> {
        self.toward_zero().into_iter().map(|x| 1.0 / x).collect()
    }
}

/// Outcome of a numeric liminf test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    ToZero,
    NotToZero,
    Inconclusive,
}

impl Decay {
    fn and(self, other: Decay) -> Decay {
        match (self, other) {
            (Decay::NotToZero, _) | (_, Decay::NotToZero) => Decay::NotToZero,
            (Decay::ToZero, Decay::ToZero) => Decay::ToZero,
            _ => Decay::Inconclusive,
        }
    }

    fn or(self, other: Decay) -> Decay {
        match (self, other) {
            (Decay::ToZero, _) | (_, Decay::ToZero) => Decay::ToZero,
            (Decay::NotToZero, Decay::NotToZero) => Decay::NotToZero,
            _ => Decay::Inconclusive,
        }
    }
}

/// Monotone-decay rule: the tail of the sequence must be strictly decreasing and the
/// last value below 1e-3 times the first; a tail with both rises and falls is inconclusive.
pub fn decay_verdict(seq: &[f64]) -> Decay {
    if seq.len() < 2 || seq.iter().any(|v| v.is_nan()) {
        return Decay::Inconclusive;
    }
    let tail_start = seq.len() / 2;
    let tol = 1e-9;
    let (mut down, mut up, mut flat) = (0, 0, 0);
    for w in seq[tail_start..].windows(2) {
        let (a, b) = (w[0], w[1]);
        if b < a * (1.0 - tol) {
            down += 1;
        } else if b > a * (1.0 + tol) || (a.is_infinite() && b.is_infinite()) {
            up += 1;
        } else {
            flat += 1;
        }
    }
    if down > 0 && up > 0 {
        return Decay::Inconclusive;
    }
    let last = *seq.last().unwrap();
    if up == 0 && flat == 0 && last < 1e-3 * seq[0] {
        Decay::ToZero
    } else {
        Decay::NotToZero
    }
}

/// Geometry cases of the comparison theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremCase {
    /// Bounded Lipschitz domain: β → 0 at 0.
    Bounded = 1,
    /// Lipschitz epigraph: β → 0 at 0 or at ∞.
    Epigraph = 2,
    /// Exterior of a bounded Lipschitz domain.
    Exterior = 3,
}

impl TryFrom<u8> for TheoremCase {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(TheoremCase::Bounded),
            2 => Ok(TheoremCase::Epigraph),
            3 => Ok(TheoremCase::Exterior),
            _ => Err(Error::Invalid(format!("case must be 1, 2 or 3, got {v}"))),
        }
    }
}

/// Sampled β along a probe, for reporting.
#[derive(Debug, Clone)]
pub struct BetaCurve {
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
}

pub fn beta_curve(y: &YoungFunction, s: f64, lambdas: &[f64], t_grid: &[f64]) -> Result<BetaCurve> {
    let betas = lambdas.iter().map(|&l| beta(y, s, l, t_grid).map(|b| b.value)).collect::<Result<Vec<_>>>()?;
    Ok(BetaCurve { lambdas: lambdas.to_vec(), betas })
}

/// Whether the liminf hypotheses of the requested case hold empirically.
pub fn classify_theorem2_case(
    y: &YoungFunction,
    s: f64,
    dim: usize,
    case: TheoremCase,
    probe: &LambdaProbe,
    t_grid: &[f64],
) -> Result<bool> {
    if probe.decades < 10 {
        return Err(Error::Invalid(format!("lambda probe must span >= 10 decades, got {}", probe.decades)));
    }
    let to_zero = beta_curve(y, s, &probe.toward_zero(), t_grid)?;
    let to_inf = beta_curve(y, s, &probe.toward_infinity(), t_grid)?;
    let weighted = |c: &BetaCurve| -> Vec<f64> {
        c.lambdas.iter().zip(&c.betas).map(|(&l, &b)| l.powf((1.0 - dim as f64) / s) * b).collect()
    };
    let beta_zero = || decay_verdict(&to_zero.betas);
    let beta_inf = || decay_verdict(&to_inf.betas);
    let verdict = match case {
        TheoremCase::Bounded => beta_zero(),
        TheoremCase::Epigraph => beta_zero().or(beta_inf()),
        TheoremCase::Exterior => {
            let w_inf = decay_verdict(&weighted(&to_inf));
            let w_zero = decay_verdict(&weighted(&to_zero));
            w_inf.and(beta_zero()).or(w_zero).or(beta_inf())
        }
    };
    match verdict {
        Decay::ToZero => Ok(true),
        Decay::NotToZero => Ok(false),
        Decay::Inconclusive => Err(Error::Inconclusive(format!(
            "case {} for {y} with s = {s}: beta is non-monotone near the probed limit",
            case as u8
        ))),
    }
}

/// The kernel pair `(M, N)` of the general seminorm `∬ G(|Δu|/M(|x−y|)) / N(|x−y|)`.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    quotient: ScalarFn,
    weight: ScalarFn,
    fractional: Option<(f64, usize)>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec").field("name", &self.name).field("fractional", &self.fractional).finish()
    }
}

impl KernelSpec {
    /// `M(t) = t^s`, `N(t) = t^dim`.
    pub fn fractional(s: f64, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Invalid(format!("fractional order must lie in (0,1), got {s}")));
        }
        if dim == 0 {
            return Err(Error::Invalid("dimension must be >= 1".into()));
        }
        let n = dim as i32;
        Ok(KernelSpec {
            name: format!("fractional(s={s}, N={dim})"),
            quotient: Arc::new(move |t: f64| t.powf(s)),
            weight: Arc::new(move |t: f64| t.powi(n)),
            fractional: Some((s, dim)),
        })
    }

    pub fn general(name: impl Into<String>, m: ScalarFn, nker: ScalarFn) -> Self {
        KernelSpec { name: name.into(), quotient: m, weight: nker, fractional: None }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `M(r)`.
    #[inline]
    pub fn m(&self, r: f64) -> f64 {
        (self.quotient)(r)
    }

    /// `N(r)`.
    #[inline]
    pub fn n(&self, r: f64) -> f64 {
        (self.weight)(r)
    }

    pub fn fractional_params(&self) -> Option<(f64, usize)> {
        self.fractional
    }
}

#[derive(Debug, Clone)]
pub struct KernelReport {
    pub monotone_positive: bool,
    pub lower_bound: bool,
    pub integrable: bool,
    pub near_integral: PowerTail,
    pub far_integral: PowerTail,
}

/// Checks monotonicity/positivity of `M`, `N`, the bound `M(r) ≥ min{1, r}`, and finiteness of
/// `∫_0^1 r^{N−1+p⁻}/(N(r) M(r)^{p⁻}) dr` and `∫_1^∞ r^{N−1}/(N(r) M(r)^{p⁻}) dr`.
pub fn kernel_conditions_check(k: &KernelSpec, p_minus: f64, dim: usize, r_max: f64) -> Result<KernelReport> {
    if !(r_max > 1.0) {
        return Err(Error::Invalid(format!("r_max must exceed 1, got {r_max}")));
    }
    let grid = log_grid(1e-8, r_max, 40);
    let mut monotone_positive = true;
    let mut lower_bound = true;
    let mut prev = (0.0, 0.0);
    for &r in &grid {
        let (m, n) = (k.m(r), k.n(r));
        if !m.is_finite() || !n.is_finite() {
            return Err(Error::Invalid(format!("kernel {} is not finite at r = {r}", k.name)));
        }
        if !(m > 0.0 && n > 0.0) || m < prev.0 * (1.0 - 1e-12) || n < prev.1 * (1.0 - 1e-12) {
            monotone_positive = false;
        }
        if m < r.min(1.0) * (1.0 - 1e-12) {
            lower_bound = false;
        }
        prev = (m, n);
    }
    let d = dim as f64;
    let near = |r: f64| r.powf(d - 1.0 + p_minus) / (k.n(r) * k.m(r).powf(p_minus));
    let far = |r: f64| r.powf(d - 1.0) / (k.n(r) * k.m(r).powf(p_minus));
    let near_integral = integrate_to_zero(&near, 1.0, 1e-10);
    let far_integral = integrate_to_infinity(&far, 1.0, 1e-10);
    Ok(KernelReport {
        monotone_positive,
        lower_bound,
        integrable: near_integral.converged && far_integral.converged,
        near_integral,
        far_integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        log_grid(1e-4, 1e4, 100)
    }

    #[test]
    fn exponent_bound_examples() {
        let (a, b) = exponent_bounds(&YoungFunction::power(2.0).unwrap(), &grid()).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
        let (a, b) = exponent_bounds(&YoungFunction::double_phase(2.0, 3.0).unwrap(), &grid()).unwrap();
        assert!((a - 2.0).abs() < 1e-2 && (b - 3.0).abs() < 1e-2, "{a} {b}");
        let cubic = YoungFunction::scaled_power(1.0 / 3.0, 3.0).unwrap();
        let (a, b) = exponent_bounds(&cubic, &log_grid(1e-2, 1e2, 50)).unwrap();
        assert!((a - 3.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-12);
    }

    #[test]
    fn linear_growth_is_not_young() {
        let lin = YoungFunction {
            name: "linear".into(),
            params: vec![],
            big_g: Arc::new(|t| t),
            density: Arc::new(|_| 1.0),
            p_minus: 1.5,
            p_plus: 2.0,
            complementary: None,
        };
        assert!(matches!(exponent_bounds(&lin, &grid()), Err(Error::NonYoung(_))));
        assert!(matches!(complementary(&lin, 3.0), Err(Error::MaximizerDiverged { .. })));
    }

    #[test]
    fn complementary_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        assert_eq!(complementary(&sq, 2.0).unwrap(), 1.0);
        assert_eq!(complementary(&sq, 0.0).unwrap(), 0.0);
        let numeric = complementary(&sq.without_closed_form_complementary(), 2.0).unwrap();
        assert!((numeric - 1.0).abs() < 1e-12);

        // brute-force oracle: dense grid over w in (0, 10]
        let dp = YoungFunction::double_phase(2.0, 3.0).unwrap();
        let n = 2_000_000;
        let brute = (1..=n)
            .map(|i| {
                let w = 10.0 * i as f64 / n as f64;
                3.0 * w - dp.eval(w)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let c = complementary(&dp, 3.0).unwrap();
        assert!((c - brute).abs() < 1e-6, "{c} vs {brute}");
    }

    #[test]
    fn legendre_identity_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        assert!(legendre_identity_residual(&sq, 1.0).unwrap() < 1e-15);
        let cubic = YoungFunction::scaled_power(1.0 / 3.0, 3.0).unwrap();
        // closed form (2/3) u^{3/2}
        assert!((complementary(&cubic, 4.0).unwrap() - 2.0 / 3.0 * 8.0).abs() < 1e-12);
        assert!(legendre_identity_residual(&cubic, 2.0).unwrap() < 1e-8);
        assert!(legendre_identity_residual(&cubic.without_closed_form_complementary(), 2.0).unwrap() < 1e-8);
        let dp = YoungFunction::double_phase(2.0, 3.0).unwrap();
        assert!(legendre_identity_residual(&dp, 0.7).unwrap() < 1e-6);
    }

    #[test]
    fn delta2_examples() {
        assert!((delta2_constant(&YoungFunction::power(2.0).unwrap(), &grid()).unwrap() - 4.0).abs() < 1e-12);
        assert!((delta2_constant(&YoungFunction::power(3.0).unwrap(), &grid()).unwrap() - 8.0).abs() < 1e-12);
        let d = delta2_constant(&YoungFunction::double_phase(2.0, 3.0).unwrap(), &grid()).unwrap();
        assert!(d > 4.0 && d <= 8.0, "{d}");
    }

    #[test]
    fn scaling_check_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        assert!(two_sided_scaling_check(&sq, 3.0, 2.0));
        let dp = YoungFunction::double_phase(2.0, 3.0).unwrap();
        assert!(two_sided_scaling_check(&dp, 0.5, 1.0));
        assert!(two_sided_scaling_check(&dp, 0.0, 5.0));
        // a function violating the declared upper exponent fails
        let lying =
            YoungFunction::custom("t^4 declared as 2..3", Arc::new(|t: f64| t.powi(4)), None, 2.0, 3.0).unwrap();
        assert!(!two_sided_scaling_check(&lying, 2.0, 1.0));
    }

    #[test]
    fn beta_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        let g = log_grid(1e-8, 1e8, 4);
        let b = beta(&sq, 0.75, 1e-3, &g).unwrap().value;
        assert!((b - 1e-2).abs() < 1e-10, "{b}");
        let b = beta(&sq, 0.5, 0.1, &g).unwrap().value;
        assert!((b - 1.0).abs() < 1e-12);
        let dp = YoungFunction::double_phase(2.0, 3.0).unwrap();
        let coarse = beta(&dp, 0.8, 0.1, &log_grid(1e-8, 1e8, 10)).unwrap().value;
        let fine = beta(&dp, 0.8, 0.1, &log_grid(1e-8, 1e8, 100)).unwrap().value;
        assert!(((coarse - fine) / fine).abs() < 1e-4);
    }

    #[test]
    fn classifier_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        let g = log_grid(1e-8, 1e8, 4);
        let probe = LambdaProbe::default();
        assert!(classify_theorem2_case(&sq, 0.75, 1, TheoremCase::Bounded, &probe, &g).unwrap());
        assert!(!classify_theorem2_case(&sq, 0.5, 1, TheoremCase::Bounded, &probe, &g).unwrap());
        assert!(classify_theorem2_case(&sq, 0.8, 2, TheoremCase::Exterior, &probe, &g).unwrap());
        assert!(matches!(
            classify_theorem2_case(
                &sq,
                0.8,
                2,
                TheoremCase::Exterior,
                &LambdaProbe { decades: 5, steps_per_decade: 1 },
                &g
            ),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn decay_rule() {
        assert_eq!(decay_verdict(&[1.0, 0.1, 0.01, 1e-3, 1e-4]), Decay::ToZero);
        assert_eq!(decay_verdict(&[1.0, 1.0, 1.0, 1.0]), Decay::NotToZero);
        assert_eq!(decay_verdict(&[1.0, 0.5, 0.6, 0.4, 0.45, 0.3]), Decay::Inconclusive);
        assert_eq!(decay_verdict(&[1.0, 0.9, 0.8, 0.7]), Decay::NotToZero);
    }

    #[test]
    fn kernel_examples() {
        let k = KernelSpec::fractional(0.5, 1).unwrap();
        let r = kernel_conditions_check(&k, 2.0, 1, 1e3).unwrap();
        assert!(r.monotone_positive && r.lower_bound && r.integrable);
        assert!((r.near_integral.value - 1.0).abs() < 1e-8);
        assert!((r.far_integral.value - 1.0).abs() < 1e-8);

        let flat = KernelSpec::general("M=1", Arc::new(|_| 1.0), Arc::new(|t: f64| t));
        let r = kernel_conditions_check(&flat, 2.0, 1, 1e3).unwrap();
        assert!(!r.integrable && !r.far_integral.converged);

        let lin = KernelSpec::general("M=t", Arc::new(|t: f64| t), Arc::new(|t: f64| t));
        let r = kernel_conditions_check(&lin, 2.0, 1, 1e3).unwrap();
        assert!(r.lower_bound);
    }

    #[test]
    fn power_log_guard() {
        assert!(matches!(YoungFunction::power_log(2.0), Err(Error::NonYoung(_))));
        let y = YoungFunction::power_log(3.0).unwrap();
        let (a, b) = exponent_bounds(&y, &log_grid(1e-6, 1e6, 100)).unwrap();
        assert!((a - 2.0).abs() < 1e-2 && (b - 4.0).abs() < 1e-2, "{a} {b}");
    }

    #[test]
    fn tabulated_matches_source() {
        let pts: Vec<(f64, f64)> = log_grid(1e-3, 1e3, 20).into_iter().map(|t| (t, t * t + t * t * t)).collect();
        let y = YoungFunction::tabulated(&pts, Some(2.0), Some(3.0)).unwrap();
        for t in [0.01, 0.5, 2.0, 30.0] {
            let exact = t * t + t * t * t;
            assert!(((y.eval(t) - exact) / exact).abs() < 1e-3, "{t}");
            let g = 2.0 * t + 3.0 * t * t;
            assert!(((y.density(t) - g) / g).abs() < 2e-2, "{t}");
        }
    }
}
