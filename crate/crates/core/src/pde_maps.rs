//! Two-variable polynomials `π_n(x, y)`, the variable-conductivity heat
//! equation `u_t = (x^N u_x)_x`, and the point maps linking it and the
//! Sunyaev–Zeldovich equation `w_τ = ξ⁻²(ξ⁴ w_ξ)_ξ` to `w_y = w_zz`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ladder::monomial;
use crate::scalar::{Dual, Scalar};
use crate::table::{linspace, Table};

/// Points per axis below which central differences are refused.
pub const MIN_GRID_POINTS: usize = 5;

/// `u_t = (x^N u_x)_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductivityPDE {
    n: f64,
}

impl ConductivityPDE {
    pub fn new(n: f64) -> Result<Self> {
        if n == 2.0 || !n.is_finite() {
            return Err(Error::InvalidParameter(format!("conductivity exponent must differ from 2, got {n}")));
        }
        Ok(ConductivityPDE { n })
    }

    /// `N = 1 − q` for the profile `Y' = A x^q`.
    pub fn from_q(q: f64) -> Result<Self> {
        Self::new(1.0 - q)
    }

    pub fn exponent(&self) -> f64 {
        self.n
    }
}

/// Uniform tensor grid; `x` is the space axis, `t` the time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
}

impl Grid {
    pub fn new(x_range: (f64, f64), nx: usize, t_range: (f64, f64), nt: usize) -> Self {
        Grid { x: linspace(x_range.0, x_range.1, nx), t: linspace(t_range.0, t_range.1, nt) }
    }

    /// Grid whose spacing along both axes is as close to `h` as the ranges allow.
    pub fn with_spacing(x_range: (f64, f64), t_range: (f64, f64), h: f64) -> Self {
        let count = |(a, b): (f64, f64)| ((b - a) / h).round().max(1.0) as usize + 1;
        Self::new(x_range, count(x_range), t_range, count(t_range))
    }

    /// 201 × 201 points on `[0.1, 3] × [0.1, 1]`.
    pub fn default_residual_grid() -> Self {
        Self::new((0.1, 3.0), 201, (0.1, 1.0), 201)
    }

    fn check(&self) -> Result<()> {
        let needed = MIN_GRID_POINTS;
        let got = self.x.len().min(self.t.len());
        if got < needed {
            return Err(Error::GridTooCoarse { needed, got });
        }
        Ok(())
    }
}

/// Values `u(x_i, t_k)`, stored as `values[k][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub grid: Grid,
    pub values: Vec<Vec<f64>>,
}

impl Samples {
    pub fn from_fn(grid: Grid, u: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.t.iter().map(|&t| grid.x.iter().map(|&x| u(x, t)).collect()).collect();
        Samples { grid, values }
    }

    /// Long-format table with the given column names.
    pub fn to_table(&self, names: [&str; 3]) -> Table {
        let mut table = Table::new(names);
        for (k, &t) in self.grid.t.iter().enumerate() {
            for (i, &x) in self.grid.x.iter().enumerate() {
                table.push(vec![x, t, self.values[k][i]]);
            }
        }
        table
    }
}

/// Central-difference residual of `u_t = s(x)⁻¹·(c(x) u_x)_x` at interior
/// points, flux form with `c` at the half points.
fn flux_residual(samples: &Samples, conductivity: impl Fn(f64) -> f64, inv_density: impl Fn(f64) -> f64) -> Result<f64> {
    samples.grid.check()?;
    let (xs, ts, u) = (&samples.grid.x, &samples.grid.t, &samples.values);
    let mut worst: f64 = 0.0;
    for k in 1..ts.len() - 1 {
        let ut_den = ts[k + 1] - ts[k - 1];
        for i in 1..xs.len() - 1 {
            let ut = (u[k + 1][i] - u[k - 1][i]) / ut_den;
            let (hl, hr) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            let right = conductivity(0.5 * (xs[i] + xs[i + 1])) * (u[k][i + 1] - u[k][i]) / hr;
            let left = conductivity(0.5 * (xs[i - 1] + xs[i])) * (u[k][i] - u[k][i - 1]) / hl;
            let flux = (right - left) / (0.5 * (hl + hr));
            let r = (ut - inv_density(xs[i]) * flux).abs();
            if r.is_nan() {
                return Err(Error::Domain(format!("non-finite sample near x = {}, t = {}", xs[i], ts[k])));
            }
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// `max |u_t − (x^N u_x)_x|` over the interior of the grid.
pub fn heat_residual(pde: &ConductivityPDE, samples: &Samples) -> Result<f64> {
    let n = pde.exponent();
    flux_residual(samples, |x| if n == 0.0 { 1.0 } else { x.powf(n) }, |_| 1.0)
}

/// Values `w(ξ, τ)` of a Sunyaev–Zeldovich solution; the grid's `x` axis is ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct SZSolution {
    pub samples: Samples,
}

impl SZSolution {
    /// `max |w_τ − ξ⁻²(ξ⁴ w_ξ)_ξ|` over the interior of the grid.
    pub fn residual(&self) -> Result<f64> {
        flux_residual(&self.samples, |xi| xi.powi(4), |xi| 1.0 / (xi * xi))
    }

    pub fn to_table(&self) -> Table {
        self.samples.to_table(["xi", "tau", "w"])
    }
}

/// `w(ξ, τ) = ξ^(−3/2)·e^(−9τ/4)·u(ln ξ, τ)` for a heat solution `u`.
pub fn sz_value(u: impl Fn(f64, f64) -> f64, xi: f64, tau: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    Ok(xi.powf(-1.5) * (-2.25 * tau).exp() * u(xi.ln(), tau))
}

/// Samples the SZ image of `u` on `grid` (ξ along `x`).
pub fn sz_from_heat(u: impl Fn(f64, f64) -> f64, grid: Grid) -> Result<SZSolution> {
    if let Some(&bad) = grid.x.iter().find(|&&xi| !(xi > 0.0)) {
        return Err(Error::Domain(format!("xi must be positive, got {bad}")));
    }
    let samples = Samples::from_fn(grid, |xi, tau| sz_value(&u, xi, tau).expect("positive xi"));
    Ok(SZSolution { samples })
}

/// `w(z, y) = (z/3)·u((z/3)³, y)`: solutions of `u_t = (x^(4/3) u_x)_x`
/// to solutions of `w_y = w_zz`.
pub fn heat_from_43(u: impl Fn(f64, f64) -> f64, z: f64, y: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("z must be positive, got {z}")));
    }
    let s = z / 3.0;
    Ok(s * u(s * s * s, y))
}

/// Inverse map `u(x, t) = x^(−1/3)·w(3x^(1/3), t)`.
pub fn heat_to_43(w: impl Fn(f64, f64) -> f64, x: f64, t: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let c = x.cbrt();
    Ok(w(3.0 * c, t) / c)
}

/// [`heat_from_43`] as a function of `(z, y)`; NaN off the domain.
pub fn map_43_to_heat<U: Fn(f64, f64) -> f64>(u: U) -> impl Fn(f64, f64) -> f64 {
    move |z, y| heat_from_43(&u, z, y).unwrap_or(f64::NAN)
}

/// [`heat_to_43`] as a function of `(x, t)`; NaN off the domain.
pub fn map_heat_to_43<W: Fn(f64, f64) -> f64>(w: W) -> impl Fn(f64, f64) -> f64 {
    move |x, t| heat_to_43(&w, x, t).unwrap_or(f64::NAN)
}

/// Generators whose finite flows are implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// time translation
    X1,
    /// scaling
    X2,
    /// amplitude
    X6,
}

/// Finite flow of a symmetry generator of `u_t = (x^N u_x)_x`:
/// `X1: u(x, t−ε)`, `X2: e^(−ε/(2(2−N)))·u(e^(−ε/(2−N))x, e^(−ε)t)`, `X6: e^ε u`.
pub fn symmetry_transform<U: Fn(f64, f64) -> f64>(
    gen: Generator,
    eps: f64,
    u: U,
    pde: &ConductivityPDE,
) -> impl Fn(f64, f64) -> f64 {
    let n = pde.exponent();
    move |x, t| match gen {
        Generator::X1 => u(x, t - eps),
        Generator::X2 => (-eps / (2.0 * (2.0 - n))).exp() * u((-eps / (2.0 - n)).exp() * x, (-eps).exp() * t),
        Generator::X6 => eps.exp() * u(x, t),
    }
}

/// `π_n(x, y)` for `Y' = A x^q` at `y = A(q+1)t`, which solves
/// `u_t = (x^(1−q) u_x)_x`. Coefficients by the closed binomial form, so
/// `t = 0` is allowed.
pub fn two_variable_polynomial(n: usize, q: f64, a: f64, x: f64, t: f64) -> f64 {
    let alpha = -q / (q + 1.0);
    let y = a * (q + 1.0) * t;
    let big_y = a * x.powf(q + 1.0) / (q + 1.0);
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut denom = 1.0;
    for j in 0..=n {
        if j > 0 {
            binom = binom * (n - j + 1) as f64 / j as f64;
            denom *= alpha + j as f64;
        }
        sum += binom * y.powi((n - j) as i32) * big_y.powi(j as i32) / denom;
    }
    sum
}

/// Heat polynomial: [`two_variable_polynomial`] with `q = 1`, `A = 1`.
pub fn heat_polynomial(n: usize, x: f64, t: f64) -> f64 {
    two_variable_polynomial(n, 1.0, 1.0, x, t)
}

/// Source solution `(4πt)^(−1/2) e^(−x²/(4t))` of `u_t = u_xx`.
pub fn heat_kernel(x: f64, t: f64) -> f64 {
    (4.0 * std::f64::consts::PI * t).powf(-0.5) * (-x * x / (4.0 * t)).exp()
}

/// Coefficient-wise `∂π_n/∂y − P̂π_n`, with `y = k0`: the `y`-derivative comes
/// from forward-mode differentiation of the ladder recursion. Returns the
/// largest magnitude; exactly zero in exact arithmetic.
pub fn dpi_dy_check<T: Scalar>(n: usize, alpha: T, k0: T) -> Result<T> {
    let seeded = monomial(n, Dual::constant(alpha.clone()), Dual::variable(k0.clone()))?;
    let image = monomial(n, alpha, k0)?.apply_p();
    let len = seeded.coeffs().len().max(image.coeffs().len());
    let mut worst = T::zero();
    for j in 0..len {
        let d = seeded.coeff(j).eps - image.coeff(j);
        let d = d.abs_value();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// `dpi_dy_check` for the bare family of `Y' = A x^q` (`A` scales `Y` only).
pub fn dpi_dy_check_power_law<T: Scalar>(n: usize, q: T, k0: T) -> Result<T> {
    let alpha = -(q.clone() / (q + T::one()));
    dpi_dy_check(n, alpha, k0)
}

/// Residuals at spacing `h` and `h/2` and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub h: f64,
    pub coarse: f64,
    pub fine: f64,
}

impl Refinement {
    pub fn ratio(&self) -> f64 {
        self.coarse / self.fine
    }

    /// Second order: ratio in `[3.5, 4.5]`.
    pub fn is_second_order(&self) -> bool {
        (3.5..=4.5).contains(&self.ratio())
    }
}

pub fn refinement_study(h: f64, residual_at: impl Fn(f64) -> Result<f64>) -> Result<Refinement> {
    let coarse = residual_at(h)?;
    let fine = residual_at(h / 2.0)?;
    if fine.is_zero() {
        return Err(Error::Domain("residual vanished on the fine grid; no ratio to report".into()));
    }
    Ok(Refinement { h, coarse, fine })
}
