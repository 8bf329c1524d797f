//! Adaptive Gauss–Kronrod (7/15) integration on finite intervals and
//! generalized Gauss–Laguerre rules on `[0, ∞)`.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::special::ln_gamma;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    Piece { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    if b < a {
        let r = integrate(f, b, a, rel_tol, abs_tol)?;
        return Ok(Integral { value: -r.value, error: r.error });
    }
    let first = kronrod_piece(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let (mut value, mut error) = (first.value, first.error);
    while error > abs_tol.max(rel_tol * value.abs()) {
        if !value.is_finite() {
            return Err(Error::QuadratureNonConvergence { a, b, error });
        }
        if heap.len() >= MAX_INTERVALS {
            // accept if only roundoff-level noise remains
            if error <= 50.0 * f64::EPSILON * heap.iter().map(|p| p.value.abs()).sum::<f64>() {
                break;
            }
            return Err(Error::QuadratureNonConvergence { a, b, error });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod_piece(&f, worst.a, mid);
        let right = kronrod_piece(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // resum to keep the running totals from drifting
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Integral { value, error })
}

/// Generalized Gauss–Laguerre rule: `∫₀^∞ x^α e^(-x) f(x) dx ≈ Σ wᵢ f(xᵢ)`,
/// exact for polynomial `f` of degree < 2n.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Gauss-Laguerre order must be positive".into()));
        }
        if !(alpha > -1.0) {
            return Err(Error::InvalidParameter(format!("Gauss-Laguerre alpha must exceed -1, got {alpha}")));
        }
        let nf = n as f64;
        let log_scale = ln_gamma(alpha + nf) - ln_gamma(nf);
        let mut nodes: Vec<f64> = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut z = 0.0;
        for i in 0..n {
            // initial guesses extrapolated from the previous roots
            z = match i {
                0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
                1 => z + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                        * (z - nodes[i - 2])
                        / (1.0 + 0.3 * alpha)
                }
            };
            let mut step = f64::INFINITY;
            for _ in 0..100 {
                let (p_n, p_nm1) = laguerre_pair(n, alpha, z);
                step = p_n / ((nf * p_n - (nf + alpha) * p_nm1) / z);
                z -= step;
                if step.abs() <= 3e-14 * z.abs() {
                    break;
                }
            }
            // roundoff can keep the last step a few ulps above the threshold
            if !(step.abs() <= 1e-11 * z.abs()) {
                return Err(Error::QuadratureNonConvergence { a: 0.0, b: f64::INFINITY, error: f64::NAN });
            }
            let (p_n, p_nm1) = laguerre_pair(n, alpha, z);
            let deriv = (nf * p_n - (nf + alpha) * p_nm1) / z;
            nodes.push(z);
            weights.push(-log_scale.exp() / (deriv * nf * p_nm1));
        }
        Ok(GaussLaguerre { alpha, nodes, weights })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(L_n^(α)(z), L_{n-1}^(α)(z))` by the three-term recurrence.
fn laguerre_pair(n: usize, alpha: f64, z: f64) -> (f64, f64) {
    let (mut p1, mut p2) = (1.0, 0.0);
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0 + alpha - z) * p2 - (jf - 1.0 + alpha) * p3) / jf;
    }
    (p1, p2)
}
