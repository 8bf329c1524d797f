//! Profile functions `Y(x)`, the coefficient functions Φ₂, Φ₁, Φ₀ they
//! induce, and the numeric action of P̂ and M̂ on ordinary functions.
//!
//! With `S = Y + c0` and `g = Y'`:
//!
//! ```text
//! Φ₂ = S / g²
//! Φ₁ = [(c1 + 3)·g² − 3·S·g'] / g³
//! Φ₀ = −[S·(g''·g − 3·g'²) + (c1 + 3)·g²·g'] / g⁴
//! P̂ = Φ₂ D² + Φ₁ D + Φ₀,   M̂ = g·D⁻¹ + k0
//! ```

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ladder::LadderState;
use crate::quadrature;

/// Shared real function of one variable.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative tolerance of the `D⁻¹` quadrature.
pub const ANTIDERIVATIVE_REL_TOL: f64 = 1e-10;

/// Offsets used for the one-sided limit at `x0`.
pub const BOUNDARY_OFFSETS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `Y' = A (x + γ)^q`.
    PowerLaw { a: f64, q: f64, gamma: f64 },
    Custom,
}

/// `Y(x)` with its first three derivatives and lower limit `x0`, `Y(x0) = 0`.
#[derive(Clone)]
pub struct YProfile {
    y: RealFn,
    dy: RealFn,
    d2y: RealFn,
    d3y: RealFn,
    x0: f64,
    kind: ProfileKind,
}

impl fmt::Debug for YProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("YProfile").field("x0", &self.x0).field("kind", &self.kind).finish()
    }
}

/// `c·s^e`, with `0·s^e = 0` even where `s^e` is infinite.
fn scaled_pow(c: f64, s: f64, e: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * s.powf(e)
    }
}

impl YProfile {
    /// Power law with `γ = -x0`: `Y = A/(q+1)·(x - x0)^(q+1)`.
    pub fn power_law(a: f64, q: f64, x0: f64) -> Result<Self> {
        Self::power_law_shifted(a, q, x0, -x0)
    }

    /// `Y' = A (x+γ)^q`, `Y = A/(q+1)·[(x+γ)^(q+1) - (x0+γ)^(q+1)]`.
    pub fn power_law_shifted(a: f64, q: f64, x0: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("A must be positive, got {a}")));
        }
        if !(q > -1.0) {
            return Err(Error::InvalidParameter(format!("q must exceed -1, got {q}")));
        }
        let base = a / (q + 1.0) * (x0 + gamma).powf(q + 1.0);
        Ok(YProfile {
            y: Arc::new(move |x| a / (q + 1.0) * (x + gamma).powf(q + 1.0) - base),
            dy: Arc::new(move |x| scaled_pow(a, x + gamma, q)),
            d2y: Arc::new(move |x| scaled_pow(a * q, x + gamma, q - 1.0)),
            d3y: Arc::new(move |x| scaled_pow(a * q * (q - 1.0), x + gamma, q - 2.0)),
            x0,
            kind: ProfileKind::PowerLaw { a, q, gamma },
        })
    }

    /// A user-supplied profile; derivatives must be consistent with `y`.
    pub fn custom(x0: f64, y: RealFn, dy: RealFn, d2y: RealFn, d3y: RealFn) -> Self {
        YProfile { y, dy, d2y, d3y, x0, kind: ProfileKind::Custom }
    }

    /// `Y = sinh(x)` on `[0, ∞)`.
    pub fn sinh() -> Self {
        Self::custom(
            0.0,
            Arc::new(f64::sinh),
            Arc::new(f64::cosh),
            Arc::new(f64::sinh),
            Arc::new(f64::cosh),
        )
    }

    /// Reads `kind` (`power-law` or `sinh`), `A`, `q`, `x0`.
    pub fn from_config(table: &HashMap<String, String>) -> Result<Self> {
        let num = |key: &str, default: f64| -> Result<f64> {
            match table.get(key) {
                Some(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("{key}: not a number: {v}"))),
                None => Ok(default),
            }
        };
        match table.get("kind").map(|s| s.trim()).unwrap_or("power-law") {
            "power-law" | "powerlaw" => Self::power_law(num("A", 1.0)?, num("q", 3.0)?, num("x0", 0.0)?),
            "sinh" => Ok(Self::sinh()),
            other => Err(Error::InvalidParameter(format!("unknown profile kind: {other}"))),
        }
    }

    pub fn y(&self, x: f64) -> f64 {
        (self.y)(x)
    }

    pub fn dy(&self, x: f64) -> f64 {
        (self.dy)(x)
    }

    pub fn d2y(&self, x: f64) -> f64 {
        (self.d2y)(x)
    }

    pub fn d3y(&self, x: f64) -> f64 {
        (self.d3y)(x)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// `α = -q/(q+1)` for power-law profiles, the ladder parameter of the
    /// bare basis `Y^j`.
    pub fn bare_alpha(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::PowerLaw { q, .. } => Some(-q / (q + 1.0)),
            ProfileKind::Custom => None,
        }
    }
}

/// The three coefficient functions of P̂ for a given profile and `(c0, c1)`.
#[derive(Debug, Clone)]
pub struct PhiFunctions {
    profile: YProfile,
    c0: f64,
    c1: f64,
}

/// Profile values at one point, with `S = Y + c0`.
struct Local {
    s: f64,
    g: f64,
    g1: f64,
    g2: f64,
}

pub fn phi_from_profile(profile: YProfile, c0: f64, c1: f64) -> PhiFunctions {
    PhiFunctions { profile, c0, c1 }
}

impl PhiFunctions {
    fn local(&self, x: f64) -> Result<Local> {
        let g = self.profile.dy(x);
        if g == 0.0 {
            return Err(Error::DivisionByZero { x });
        }
        Ok(Local { s: self.profile.y(x) + self.c0, g, g1: self.profile.d2y(x), g2: self.profile.d3y(x) })
    }

    pub fn profile(&self) -> &YProfile {
        &self.profile
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn phi2(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        Ok(l.s / (l.g * l.g))
    }

    pub fn phi1(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        Ok(((self.c1 + 3.0) * l.g * l.g - 3.0 * l.s * l.g1) / l.g.powi(3))
    }

    pub fn phi0(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        if let ProfileKind::PowerLaw { a, q, gamma } = *self.profile.kind() {
            // the general form cancels to O(ε/g⁴) near a zero of Y'
            let s = x + gamma;
            let d = self.c0 - a / (q + 1.0) * (self.profile.x0() + gamma).powf(q + 1.0);
            let mut value = q * ((2.0 * q + 1.0) - (self.c1 + 3.0) * (q + 1.0)) / ((q + 1.0) * a * s.powf(q + 1.0));
            if d != 0.0 {
                value += d * q * (2.0 * q + 1.0) / (a * a * s.powf(2.0 * q + 2.0));
            }
            return Ok(value);
        }
        Ok(-(l.s * (l.g2 * l.g - 3.0 * l.g1 * l.g1) + (self.c1 + 3.0) * l.g * l.g * l.g1) / l.g.powi(4))
    }

    /// Φ₂' = 1/g − 2 S g'/g³.
    pub fn dphi2(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        Ok(1.0 / l.g - 2.0 * l.s * l.g1 / l.g.powi(3))
    }

    /// Φ₂'' = −3 g'/g² − 2 S g''/g³ + 6 S g'²/g⁴.
    pub fn d2phi2(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        Ok(-3.0 * l.g1 / (l.g * l.g) - 2.0 * l.s * l.g2 / l.g.powi(3) + 6.0 * l.s * l.g1 * l.g1 / l.g.powi(4))
    }

    /// Φ₁' = −(c1 + 6) g'/g² − 3 S g''/g³ + 9 S g'²/g⁴.
    pub fn dphi1(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        Ok(-(self.c1 + 6.0) * l.g1 / (l.g * l.g) - 3.0 * l.s * l.g2 / l.g.powi(3)
            + 9.0 * l.s * l.g1 * l.g1 / l.g.powi(4))
    }

    /// Scaled residuals of the three defining identities at `x`:
    /// no `D⁻¹` term in P̂M̂, no `D⁻¹` term in M̂P̂, and the commutator
    /// normalization. Each is `|Σ terms| / max(1, Σ|terms|)`.
    pub fn residuals(&self, x: f64) -> Result<PhiResiduals> {
        let g = self.profile.dy(x);
        let g1 = self.profile.d2y(x);
        let g2 = self.profile.d3y(x);
        let (p2, p1, p0) = (self.phi2(x)?, self.phi1(x)?, self.phi0(x)?);
        let scaled = |terms: &[f64]| {
            let sum: f64 = terms.iter().sum();
            let mag: f64 = terms.iter().map(|t| t.abs()).sum();
            sum.abs() / mag.max(1.0)
        };
        Ok(PhiResiduals {
            pm_no_integral: scaled(&[p2 * g2, p1 * g1, p0 * g]),
            mp_no_integral: scaled(&[self.d2phi2(x)?, -self.dphi1(x)?, p0]),
            commutator: scaled(&[2.0 * p2 * g1, self.dphi2(x)? * g, -1.0]),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiResiduals {
    /// Φ₂g'' + Φ₁g' + Φ₀g = 0
    pub pm_no_integral: f64,
    /// Φ₂'' − Φ₁' + Φ₀ = 0
    pub mp_no_integral: f64,
    /// 2Φ₂g' + Φ₂'g = 1
    pub commutator: f64,
}

impl PhiResiduals {
    pub fn max(&self) -> f64 {
        self.pm_no_integral.max(self.mp_no_integral).max(self.commutator)
    }
}

/// A function with optional analytic first and second derivatives.
#[derive(Clone)]
pub struct SmoothFn {
    value: RealFn,
    first: Option<RealFn>,
    second: Option<RealFn>,
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFn")
            .field("first", &self.first.is_some())
            .field("second", &self.second.is_some())
            .finish()
    }
}

impl SmoothFn {
    pub fn new(value: RealFn) -> Self {
        SmoothFn { value, first: None, second: None }
    }

    pub fn with_derivatives(value: RealFn, first: RealFn, second: RealFn) -> Self {
        SmoothFn { value, first: Some(first), second: Some(second) }
    }

    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(Arc::new(f))
    }

    pub fn has_derivatives(&self) -> bool {
        self.first.is_some() && self.second.is_some()
    }

    /// Drops the analytic derivatives, forcing finite differences.
    pub fn without_derivatives(&self) -> Self {
        Self::new(self.value.clone())
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    /// f'(x); 4th-order central differences when no analytic form is set,
    /// with the stencil kept above `lower`.
    pub fn first(&self, x: f64, lower: f64) -> f64 {
        match &self.first {
            Some(d) => d(x),
            None => {
                let h = fd_step(x, lower, f64::EPSILON.powf(0.2));
                let f = &self.value;
                (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
            }
        }
    }

    /// f''(x); analytic or 4th-order central differences.
    pub fn second(&self, x: f64, lower: f64) -> f64 {
        match &self.second {
            Some(d) => d(x),
            None => {
                let h = fd_step(x, lower, f64::EPSILON.powf(1.0 / 6.0));
                let f = &self.value;
                (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
                    / (12.0 * h * h)
            }
        }
    }
}

fn fd_step(x: f64, lower: f64, base: f64) -> f64 {
    let h = base * x.abs().max(1.0);
    if x - 2.0 * h <= lower {
        ((x - lower) / 2.5).min(h)
    } else {
        h
    }
}

/// Which basis a [`LadderState`] is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// `e_j = Y'·Y^(α+j)`
    Prefactored,
    /// `e_j = Y^j`
    Bare,
}

/// Sums `Σ c_j Y^(α+j)` and its first two `Y`-derivatives.
fn power_sums(coeffs: &[f64], alpha: f64, y: f64) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let e = alpha + j as f64;
        v += c * if e == 0.0 { 1.0 } else { y.powf(e) };
        if e != 0.0 {
            d1 += c * e * if e == 1.0 { 1.0 } else { y.powf(e - 1.0) };
        }
        if e != 0.0 && e != 1.0 {
            d2 += c * e * (e - 1.0) * if e == 2.0 { 1.0 } else { y.powf(e - 2.0) };
        }
    }
    (v, d1, d2)
}

fn check_domain(profile: &YProfile, flavor: Flavor, alpha: f64, x: f64) -> Result<()> {
    if x < profile.x0() || x.is_nan() {
        return Err(Error::Domain(format!("x = {x} lies below x0 = {}", profile.x0())));
    }
    if flavor == Flavor::Prefactored && alpha < 0.0 && profile.y(x) == 0.0 {
        return Err(Error::SingularPoint { x });
    }
    Ok(())
}

/// Value of the state at `x`:
/// `Y'·Y^α·Σ c_j Y^j` (prefactored) or `Σ c_j Y^j` (bare).
pub fn evaluate_state(state: &LadderState<f64>, profile: &YProfile, flavor: Flavor, x: f64) -> Result<f64> {
    Ok(evaluate_state_derivatives(state, profile, flavor, x)?.0)
}

/// `(u, u', u'')` of the state at `x`, analytically.
pub fn evaluate_state_derivatives(
    state: &LadderState<f64>,
    profile: &YProfile,
    flavor: Flavor,
    x: f64,
) -> Result<(f64, f64, f64)> {
    let alpha = *state.alpha();
    check_domain(profile, flavor, alpha, x)?;
    let y = profile.y(x);
    let (g, g1, g2) = (profile.dy(x), profile.d2y(x), profile.d3y(x));
    match flavor {
        Flavor::Bare => {
            let (p, p1, p2) = power_sums(state.coeffs(), 0.0, y);
            Ok((p, p1 * g, p2 * g * g + p1 * g1))
        }
        Flavor::Prefactored => {
            let (q, q1, q2) = power_sums(state.coeffs(), alpha, y);
            Ok((g * q, g1 * q + g * g * q1, g2 * q + 3.0 * g * g1 * q1 + g.powi(3) * q2))
        }
    }
}

/// Wraps a state as a [`SmoothFn`] with analytic derivatives. Points outside
/// the domain evaluate to NaN.
pub fn state_function(state: &LadderState<f64>, profile: &YProfile, flavor: Flavor) -> SmoothFn {
    let part = |k: usize| -> RealFn {
        let (state, profile) = (state.clone(), profile.clone());
        Arc::new(move |x| match evaluate_state_derivatives(&state, &profile, flavor, x) {
            Ok(v) => [v.0, v.1, v.2][k],
            Err(_) => f64::NAN,
        })
    };
    SmoothFn::with_derivatives(part(0), part(1), part(2))
}

/// Concrete P̂, M̂ pair for a profile and constants `(c0, c1, k0)`.
#[derive(Debug, Clone)]
pub struct UmbralOperators {
    phi: PhiFunctions,
    k0: f64,
}

impl UmbralOperators {
    pub fn new(profile: YProfile, c0: f64, c1: f64, k0: f64) -> Self {
        UmbralOperators { phi: phi_from_profile(profile, c0, c1), k0 }
    }

    /// Constant seed `u_0 = 1` on a power-law profile:
    /// `c0 = A/(q+1)·(x0+γ)^(q+1)`, `c1 = -(q+2)/(q+1)`.
    pub fn constant_seed(profile: YProfile, k0: f64) -> Result<Self> {
        match *profile.kind() {
            ProfileKind::PowerLaw { a, q, gamma } => {
                let c0 = a / (q + 1.0) * (profile.x0() + gamma).powf(q + 1.0);
                Ok(Self::new(profile, c0, -(q + 2.0) / (q + 1.0), k0))
            }
            ProfileKind::Custom => {
                Err(Error::InvalidParameter("constant seed needs a power-law profile".into()))
            }
        }
    }

    /// Seed `u_0 = Y'·Y^α`: `c0 = 0`, `c1 = -2 - α`.
    pub fn prefactored(profile: YProfile, alpha: f64, k0: f64) -> Self {
        Self::new(profile, 0.0, -2.0 - alpha, k0)
    }

    pub fn phi(&self) -> &PhiFunctions {
        &self.phi
    }

    pub fn profile(&self) -> &YProfile {
        &self.phi.profile
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    fn require_interior(&self, x: f64) -> Result<()> {
        if !(x > self.profile().x0()) {
            return Err(Error::SingularPoint { x });
        }
        Ok(())
    }

    /// (P̂f)(x) = Φ₂f'' + Φ₁f' + Φ₀f.
    pub fn apply_p_numeric(&self, f: &SmoothFn, x: f64) -> Result<f64> {
        self.require_interior(x)?;
        let x0 = self.profile().x0();
        let (p2, p1, p0) = (self.phi.phi2(x)?, self.phi.phi1(x)?, self.phi.phi0(x)?);
        let value = p2 * f.second(x, x0) + p1 * f.first(x, x0) + p0 * f.eval(x);
        if !value.is_finite() {
            return Err(Error::SingularPoint { x });
        }
        Ok(value)
    }

    /// `∫_{x0}^{x} f` by adaptive Gauss–Kronrod.
    pub fn antiderivative<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> Result<f64> {
        let x0 = self.profile().x0();
        if x < x0 {
            return Err(Error::Domain(format!("x = {x} lies below x0 = {x0}")));
        }
        Ok(quadrature::integrate(f, x0, x, ANTIDERIVATIVE_REL_TOL, 1e-300)?.value)
    }

    /// (M̂f)(x) = Y'(x)·∫_{x0}^{x} f + k0·f(x).
    pub fn apply_m_numeric<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> Result<f64> {
        let fx = f(x);
        let integral = self.antiderivative(f, x)?;
        Ok(self.profile().dy(x) * integral + self.k0 * fx)
    }

    /// The bracket of the domain boundary condition at `x`:
    /// `[S·Y'·u' + ((2 + c1)·Y'² − S·Y'')·u] / Y'³`.
    pub fn boundary_bracket(&self, f: &SmoothFn, x: f64) -> Result<f64> {
        let p = self.profile();
        let g = p.dy(x);
        if g == 0.0 {
            return Err(Error::DivisionByZero { x });
        }
        let s = p.y(x) + self.phi.c0;
        let du = f.first(x, p.x0());
        Ok((s * g * du + ((2.0 + self.phi.c1) * g * g - s * p.d2y(x)) * f.eval(x)) / g.powi(3))
    }

    /// One-sided limit of [`boundary_bracket`](Self::boundary_bracket) as
    /// `x → x0⁺`, by Richardson extrapolation over [`BOUNDARY_OFFSETS`].
    pub fn boundary_residual(&self, f: &SmoothFn) -> Result<f64> {
        let x0 = self.profile().x0();
        let v: Vec<f64> = BOUNDARY_OFFSETS
            .iter()
            .map(|d| self.boundary_bracket(f, x0 + d))
            .collect::<Result<_>>()?;
        if v.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonConvergentLimit(v));
        }
        let d1 = (v[1] - v[0]).abs();
        let d2 = (v[2] - v[1]).abs();
        let scale = v.iter().map(|b| b.abs()).fold(1.0, f64::max);
        if d2 > 1e-12 * scale && d2 >= d1 {
            return Err(Error::NonConvergentLimit(vec![d1, d2]));
        }
        // error ~ δ: successive offsets shrink by 10
        let r1 = v[1] + (v[1] - v[0]) / 9.0;
        let r2 = v[2] + (v[2] - v[1]) / 9.0;
        Ok(r2 + (r2 - r1) / 99.0)
    }

    /// `(L̂ - λ)u` at `x` with `L̂ = P̂M̂ = f₂D² + f₁D + f₀`:
    /// `f₂ = k0Φ₂`, `f₁ = k0Φ₁ + Φ₂g`, `f₀ = k0Φ₀ + 2Φ₂g' + Φ₁g`.
    pub fn number_operator_residual(&self, u: &SmoothFn, lambda: f64, x: f64) -> Result<f64> {
        self.require_interior(x)?;
        let p = self.profile();
        let (g, g1) = (p.dy(x), p.d2y(x));
        let (p2, p1, p0) = (self.phi.phi2(x)?, self.phi.phi1(x)?, self.phi.phi0(x)?);
        let k0 = self.k0;
        let f2 = k0 * p2;
        let f1 = k0 * p1 + p2 * g;
        let f0 = k0 * p0 + 2.0 * p2 * g1 + p1 * g;
        Ok(f2 * u.second(x, p.x0()) + f1 * u.first(x, p.x0()) + (f0 - lambda) * u.eval(x))
    }
}

/// Residual of the power-law eigenvalue ODE (`γ = -x0 = 0`, `u_0 = 1`):
///
/// ```text
/// k0/(A(q+1))·x^(1-q)·u'' + [A x + k0(1-q) x^(-q)]/(A(q+1))·u' − n·u
/// ```
pub fn power_law_eigen_residual(q: f64, a: f64, k0: f64, n: usize, u: &SmoothFn, x: f64) -> f64 {
    let c = 1.0 / (a * (q + 1.0));
    c * k0 * x.powf(1.0 - q) * u.second(x, 0.0)
        + c * (a * x + k0 * (1.0 - q) * x.powf(-q)) * u.first(x, 0.0)
        - n as f64 * u.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::monomial;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn power_law_values() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        assert!(close(p.y(1.0), 0.25, 1e-15));
        assert!(close(p.dy(1.0), 1.0, 1e-15));
        assert_eq!(p.y(0.0), 0.0);
        let p1 = YProfile::power_law(1.0, 1.0, 0.0).unwrap();
        assert!(close(p1.y(2.0), 2.0, 1e-15));
        assert_eq!(p1.d3y(0.0), 0.0);
    }

    #[test]
    fn power_law_rejects_bad_parameters() {
        assert!(YProfile::power_law(1.0, -1.0, 0.0).is_err());
        assert!(YProfile::power_law(0.0, 2.0, 0.0).is_err());
        assert!(YProfile::power_law(-1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn shifted_power_law_vanishes_at_x0() {
        let p = YProfile::power_law_shifted(2.0, 1.5, 0.5, 1.0).unwrap();
        assert!(p.y(0.5).abs() < 1e-15);
        // Y' = A(x+γ)^q
        assert!(close(p.dy(1.0), 2.0 * 2.0f64.powf(1.5), 1e-14));
    }

    #[test]
    fn phi_for_constant_seed_power_law() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        let phi = phi_from_profile(p, 0.0, -5.0 / 4.0);
        for &x in &[0.3, 1.0, 2.7] {
            assert!(close(phi.phi2(x).unwrap(), x.powi(-2) / 4.0, 1e-14));
            assert!(phi.phi0(x).unwrap().abs() < 1e-12 * x.powi(-4));
            // Φ₁ = Φ₂' for this family
            assert!(close(phi.phi1(x).unwrap(), phi.dphi2(x).unwrap(), 1e-13));
        }
    }

    #[test]
    fn phi_where_profile_is_locally_linear() {
        // Y = x: Y'' = Y''' = 0 gives Φ₀ = 0 for any c1
        let lin = YProfile::custom(
            0.0,
            Arc::new(|x| x),
            Arc::new(|_| 1.0),
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
        );
        let phi = phi_from_profile(lin, 0.0, -2.0);
        assert_eq!(phi.phi0(0.7).unwrap(), 0.0);
    }

    #[test]
    fn power_law_phi0_matches_general_form() {
        for (c0, c1) in [(0.0, -1.25), (0.7, -2.0), (-0.3, 0.4)] {
            let p = YProfile::power_law_shifted(1.5, 2.5, 0.2, 0.3).unwrap();
            let custom = YProfile::custom(0.2, p.y.clone(), p.dy.clone(), p.d2y.clone(), p.d3y.clone());
            let special = phi_from_profile(p, c0, c1);
            let general = phi_from_profile(custom, c0, c1);
            for &x in &[0.4, 1.1, 2.3] {
                let (a, b) = (special.phi0(x).unwrap(), general.phi0(x).unwrap());
                assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn phi_heat_case() {
        let p = YProfile::power_law(1.0, 1.0, 0.0).unwrap();
        let phi = phi_from_profile(p, 0.0, -1.5);
        for &x in &[0.2, 1.0, 3.0] {
            assert!(close(phi.phi2(x).unwrap(), 0.5, 1e-15));
        }
    }

    #[test]
    fn phi_division_by_zero() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        let phi = phi_from_profile(p, 0.0, -1.25);
        assert_eq!(phi.phi2(0.0), Err(Error::DivisionByZero { x: 0.0 }));
    }

    #[test]
    fn apply_p_numeric_examples() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        let ops = UmbralOperators::constant_seed(p.clone(), -1.0).unwrap();
        let one = SmoothFn::from_fn(|_| 1.0);
        assert!(ops.apply_p_numeric(&one, 1.3).unwrap().abs() < 1e-7);
        let u1 = SmoothFn::with_derivatives(
            Arc::new(|x: f64| x.powi(4) - 1.0),
            Arc::new(|x: f64| 4.0 * x.powi(3)),
            Arc::new(|x: f64| 12.0 * x * x),
        );
        assert!(close(ops.apply_p_numeric(&u1, 2.0).unwrap(), 1.0, 1e-14));
        assert!(close(ops.apply_p_numeric(&u1.without_derivatives(), 2.0).unwrap(), 1.0, 1e-7));

        // prefactored α = 0: P̂ e₁ = (α+1) e₀ = Y'
        let pre = UmbralOperators::prefactored(p.clone(), 0.0, -1.0);
        let e1 = state_function(&LadderState::new(0.0, -1.0, vec![0.0, 1.0]).unwrap(), &p, Flavor::Prefactored);
        assert!(close(pre.apply_p_numeric(&e1, 1.0).unwrap(), 1.0, 1e-13));
        assert!(close(pre.apply_p_numeric(&e1, 1.5).unwrap(), 1.5f64.powi(3), 1e-13));
    }

    #[test]
    fn apply_p_numeric_singular_point() {
        let p = YProfile::power_law(1.0, 0.5, 0.0).unwrap();
        let ops = UmbralOperators::constant_seed(p, -1.0).unwrap();
        let one = SmoothFn::from_fn(|_| 1.0);
        assert!(matches!(ops.apply_p_numeric(&one, 0.0), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn apply_m_numeric_examples() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        let ops = UmbralOperators::constant_seed(p, -1.0).unwrap();
        assert!(ops.apply_m_numeric(|_| 1.0, 1.0).unwrap().abs() < 1e-14);
        assert_eq!(ops.apply_m_numeric(|_| 0.0, 1.7).unwrap(), 0.0);
        let u2 = ops.apply_m_numeric(|x: f64| x.powi(4) - 1.0, 1.0).unwrap();
        assert!(close(u2, -0.8, 1e-12));
    }

    #[test]
    fn evaluate_state_examples() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        let m1 = monomial(1, -0.75, -1.0).unwrap();
        assert!(evaluate_state(&m1, &p, Flavor::Bare, 1.0).unwrap().abs() < 1e-15);
        let m2 = monomial(2, -0.75, -1.0).unwrap();
        assert_eq!(evaluate_state(&m2, &p, Flavor::Bare, 0.0).unwrap(), 1.0);
        let m0 = monomial(0, 0.5, -1.0).unwrap();
        assert_eq!(evaluate_state(&m0, &p, Flavor::Bare, 1.3).unwrap(), 1.0);
        let x: f64 = 1.3;
        let pre = evaluate_state(&m0, &p, Flavor::Prefactored, x).unwrap();
        assert!(close(pre, p.dy(x) * p.y(x).powf(0.5), 1e-15));
    }

    #[test]
    fn evaluate_state_domain_errors() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        let m = monomial(1, -0.5, -1.0).unwrap();
        assert!(matches!(evaluate_state(&m, &p, Flavor::Prefactored, 0.0), Err(Error::SingularPoint { .. })));
        assert!(matches!(evaluate_state(&m, &p, Flavor::Bare, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn eq63_empty_product_for_low_indices() {
        // u_1 = A x^(q+1) + k0 with denominator 1 for j = 0, 1
        let p = YProfile::power_law(2.0, 1.5, 0.0).unwrap();
        let m1 = monomial(1, -1.5 / 2.5, -0.7).unwrap();
        for &x in &[0.2f64, 1.0, 1.9] {
            let expected = 2.0 * x.powf(2.5) - 0.7;
            assert!(close(evaluate_state(&m1, &p, Flavor::Bare, x).unwrap(), expected, 1e-14));
        }
    }

    #[test]
    fn state_derivatives_match_differences() {
        let p = YProfile::sinh();
        let s = monomial(3, 0.5, -1.5).unwrap();
        let f = state_function(&s, &p, Flavor::Prefactored);
        let g = f.without_derivatives();
        for &x in &[0.4, 1.0, 1.8] {
            assert!(close(f.first(x, 0.0), g.first(x, 0.0), 1e-9));
            assert!(close(f.second(x, 0.0), g.second(x, 0.0), 1e-6));
        }
    }

    #[test]
    fn boundary_residual_examples() {
        let p = YProfile::power_law(1.0, 3.0, 0.0).unwrap();
        let ops = UmbralOperators::constant_seed(p.clone(), -1.0).unwrap();
        let one = SmoothFn::from_fn(|_| 1.0);
        assert!(ops.boundary_residual(&one).unwrap().abs() < 1e-10);

        for alpha in [0.0, 0.5, 1.5] {
            let pre = UmbralOperators::prefactored(p.clone(), alpha, -1.0);
            let seed = state_function(&LadderState::unit(alpha, -1.0).unwrap(), &p, Flavor::Prefactored);
            assert!(pre.boundary_residual(&seed).unwrap().abs() < 1e-10, "alpha = {alpha}");
        }

        // Y'·ln Y with c1 = -2: bracket is identically Y'³/Y'³ = 1
        let log_ops = UmbralOperators::new(p.clone(), 0.0, -2.0, -1.0);
        let pl = p.clone();
        let pd = p.clone();
        let log_seed = SmoothFn::with_derivatives(
            Arc::new(move |x| pl.dy(x) * pl.y(x).ln()),
            Arc::new(move |x| pd.d2y(x) * pd.y(x).ln() + pd.dy(x).powi(2) / pd.y(x)),
            Arc::new(|_| f64::NAN),
        );
        let r = log_ops.boundary_residual(&log_seed).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn boundary_residual_divergent() {
        // u = 1/(x - x0) makes the bracket blow up
        let p = YProfile::power_law(1.0, 1.0, 0.0).unwrap();
        let ops = UmbralOperators::constant_seed(p, -1.0).unwrap();
        let f = SmoothFn::with_derivatives(Arc::new(|x| 1.0 / x), Arc::new(|x| -1.0 / (x * x)), Arc::new(|x| 2.0 / x.powi(3)));
        assert!(matches!(ops.boundary_residual(&f), Err(Error::NonConvergentLimit(_))));
    }

    #[test]
    fn config_table() {
        let mut t = HashMap::new();
        t.insert("kind".to_string(), "power-law".to_string());
        t.insert("A".to_string(), "2".to_string());
        t.insert("q".to_string(), "1".to_string());
        let p = YProfile::from_config(&t).unwrap();
        assert_eq!(p.kind(), &ProfileKind::PowerLaw { a: 2.0, q: 1.0, gamma: 0.0 });
        t.insert("q".to_string(), "-3".to_string());
        assert!(YProfile::from_config(&t).is_err());
        t.insert("kind".to_string(), "spline".to_string());
        assert!(YProfile::from_config(&t).is_err());
    }
}
