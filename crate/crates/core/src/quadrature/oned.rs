//! One-dimensional adaptive Gauss–Kronrod integration and power-law tail integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// 15-point Kronrod rule with the embedded 7-point Gauss rule as error estimate.
pub fn gauss_kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Integral {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hw * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Integral { value: kronrod * hw, error: ((kronrod - gauss) * hw).abs() }
}

struct Piece {
    a: f64,
    b: f64,
    est: Integral,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive bisection until `error <= max(abs_tol, rel_tol·|value|)`.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_pieces: usize) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0 };
    }
    let mut heap = BinaryHeap::new();
    let first = gauss_kronrod15(f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    heap.push(Piece { a, b, est: first });
    while error > abs_tol.max(rel_tol * value.abs()) && heap.len() < max_pieces {
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod15(f, worst.a, m);
        let right = gauss_kronrod15(f, m, worst.b);
        value += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        heap.push(Piece { a: worst.a, b: m, est: left });
        heap.push(Piece { a: m, b: worst.b, est: right });
    }
    // re-sum to shed accumulated cancellation
    let (v, e) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
    Integral { value: v, error: e }
}

/// Result of integrating toward a singular endpoint or to infinity on dyadic pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTail {
    pub value: f64,
    pub error: f64,
    /// Power-law exponent α of the integrand (≈ r^α) fitted from the last two pieces.
    pub exponent: f64,
    pub converged: bool,
}

#[derive(Clone, Copy)]
enum Direction {
    ToZero,
    ToInfinity,
}

fn dyadic_tail(f: &impl Fn(f64) -> f64, start: f64, dir: Direction, rel_tol: f64) -> PowerTail {
    const MAX_PIECES: usize = 400;
    const MIN_PIECES: usize = 8;
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut prev: Option<f64> = None;
    let mut exponent = f64::NAN;
    let mut edge = start;
    for k in 0..MAX_PIECES {
        let (a, b, next) = match dir {
            Direction::ToZero => (0.5 * edge, edge, 0.5 * edge),
            Direction::ToInfinity => (edge, 2.0 * edge, 2.0 * edge),
        };
        let piece = adaptive(f, a, b, 0.0, 1e-12, 200);
        sum += piece.value;
        err += piece.error;
        edge = next;
        if let Some(p) = prev {
            if p == 0.0 && piece.value == 0.0 {
                exponent = match dir {
                    Direction::ToZero => f64::INFINITY,
                    Direction::ToInfinity => f64::NEG_INFINITY,
                };
            } else {
                let ratio = piece.value.abs() / p.abs();
                // piece ratio is 2^{-(α+1)} toward zero and 2^{α+1} toward infinity
                exponent = match dir {
                    Direction::ToZero => -ratio.log2() - 1.0,
                    Direction::ToInfinity => ratio.log2() - 1.0,
                };
            }
            let decaying = match dir {
                Direction::ToZero => exponent > -1.0 + 1e-3,
                Direction::ToInfinity => exponent < -1.0 - 1e-3,
            };
            if k + 1 >= MIN_PIECES {
                if !decaying && k + 1 >= 24 {
                    return PowerTail { value: f64::INFINITY, error: f64::INFINITY, exponent, converged: false };
                }
                if decaying {
                    let q = piece.value.abs() / p.abs().max(f64::MIN_POSITIVE);
                    let remainder = if q < 1.0 { piece.value * q / (1.0 - q) } else { f64::INFINITY };
                    if remainder.abs() <= rel_tol * sum.abs() || piece.value == 0.0 {
                        return PowerTail {
                            value: sum + remainder,
                            error: err + remainder.abs(),
                            exponent,
                            converged: true,
                        };
                    }
                }
            }
        }
        prev = Some(piece.value);
    }
    PowerTail { value: f64::INFINITY, error: f64::INFINITY, exponent, converged: false }
}

/// `∫_0^a f` for an integrand that may blow up like a power at 0.
pub fn integrate_to_zero(f: &impl Fn(f64) -> f64, a: f64, rel_tol: f64) -> PowerTail {
    dyadic_tail(f, a, Direction::ToZero, rel_tol)
}

/// `∫_a^∞ f` for an integrand with power-law decay.
pub fn integrate_to_infinity(f: &impl Fn(f64) -> f64, a: f64, rel_tol: f64) -> PowerTail {
    dyadic_tail(f, a, Direction::ToInfinity, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        let r = gauss_kronrod15(&|x: f64| x.powi(9) - 3.0 * x * x, 0.0, 2.0);
        assert!((r.value - (1024.0 / 10.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let r = adaptive(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-13, 1e-13, 500);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-12, "{r:?}");
        assert!(r.error < 1e-11);
    }

    #[test]
    fn power_tails() {
        let z = integrate_to_zero(&|r: f64| r.powf(-0.5), 1.0, 1e-12);
        assert!(z.converged && (z.value - 2.0).abs() < 1e-8, "{z:?}");
        assert!((z.exponent + 0.5).abs() < 1e-6);
        let i = integrate_to_infinity(&|r: f64| r.powi(-2), 1.0, 1e-12);
        assert!(i.converged && (i.value - 1.0).abs() < 1e-8, "{i:?}");
        let d = integrate_to_infinity(&|r: f64| 1.0 / r, 1.0, 1e-12);
        assert!(!d.converged);
        assert!((d.exponent + 1.0).abs() < 1e-6);
        let d0 = integrate_to_zero(&|r: f64| 1.0 / r, 1.0, 1e-12);
        assert!(!d0.converged);
    }
}
