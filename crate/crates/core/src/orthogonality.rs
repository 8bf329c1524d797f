//! Weights, inner products and Gram matrices of the ladder eigenfunctions.
//!
//! Both families reduce, under `z = −Y/k0`, to
//! `const · ∫₀^∞ z^α e^(−z) p_m(−k0 z) p_n(−k0 z) dz` with `p_n` the
//! coefficient polynomial of `M̂ⁿ u₀` in powers of `Y`, which a
//! Gauss–Laguerre rule integrates exactly.

use crate::error::{Error, Result};
use crate::ladder::{monomial, LadderState};
use crate::profiles::{evaluate_state_derivatives, Flavor, YProfile};
use crate::quadrature::{self, GaussLaguerre};
use crate::special::ln_gamma;
use crate::table::Table;

/// Which eigenfunction family the weight belongs to; integration is over
/// `[x0, ∞)`.
#[derive(Debug, Clone)]
pub enum WeightSpec {
    /// `u_n = M̂ⁿ(Y'Y^α)` with `c0 = 0`, `c1 = −2 − α`.
    Prefactored { alpha: f64, k0: f64, profile: YProfile },
    /// `u_n = M̂ⁿ 1` with `Y' = A x^q`, `x0 = 0`.
    Bare { q: f64, a: f64, k0: f64 },
}

impl WeightSpec {
    pub fn prefactored(alpha: f64, k0: f64, profile: YProfile) -> Result<Self> {
        let spec = WeightSpec::Prefactored { alpha, k0, profile };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bare(q: f64, a: f64, k0: f64) -> Result<Self> {
        let spec = WeightSpec::Bare { q, a, k0 };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.k0() < 0.0) {
            return Err(Error::InvalidParameter(format!("k0 must be negative, got {}", self.k0())));
        }
        match self {
            WeightSpec::Prefactored { alpha, .. } if !(*alpha > -1.0) => {
                Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")))
            }
            WeightSpec::Bare { q, a, .. } => {
                if !(*q > -1.0) {
                    return Err(Error::InvalidParameter(format!("q must exceed -1, got {q}")));
                }
                if !(*a > 0.0) {
                    return Err(Error::InvalidParameter(format!("A must be positive, got {a}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn k0(&self) -> f64 {
        match self {
            WeightSpec::Prefactored { k0, .. } | WeightSpec::Bare { k0, .. } => *k0,
        }
    }

    /// Ladder parameter of the family: `α`, or `−q/(q+1)` for the bare one.
    pub fn ladder_alpha(&self) -> f64 {
        match self {
            WeightSpec::Prefactored { alpha, .. } => *alpha,
            WeightSpec::Bare { q, .. } => -q / (q + 1.0),
        }
    }

    pub fn flavor(&self) -> Flavor {
        match self {
            WeightSpec::Prefactored { .. } => Flavor::Prefactored,
            WeightSpec::Bare { .. } => Flavor::Bare,
        }
    }

    pub fn profile(&self) -> YProfile {
        match self {
            WeightSpec::Prefactored { profile, .. } => profile.clone(),
            WeightSpec::Bare { q, a, .. } => YProfile::power_law(*a, *q, 0.0).expect("validated parameters"),
        }
    }

    /// `(c0, c1)` of the operators the family is built on.
    pub fn constants(&self) -> (f64, f64) {
        match self {
            WeightSpec::Prefactored { alpha, .. } => (0.0, -2.0 - alpha),
            WeightSpec::Bare { q, .. } => (0.0, -(q + 2.0) / (q + 1.0)),
        }
    }

    /// `u_n` as a ladder state.
    pub fn state(&self, n: usize) -> Result<LadderState<f64>> {
        monomial(n, self.ladder_alpha(), self.k0())
    }

    /// Constant `C` with `∫ w u_m u_n dx = C·∫ z^α e^(−z) p_m p_n dz`.
    fn substitution_constant(&self) -> f64 {
        let alpha = self.ladder_alpha();
        let base = (-self.k0()).powf(alpha + 1.0);
        match self {
            WeightSpec::Prefactored { .. } => base,
            WeightSpec::Bare { q, a, .. } => (a / (q + 1.0)).powf((q - 1.0) / (q + 1.0)) / (a * (q + 1.0)) * base,
        }
    }
}

/// `w = (Y + c0)^(c1+2)/|Y'|·e^(Y/k0)`.
pub fn weight_eval(spec: &WeightSpec, x: f64) -> Result<f64> {
    let k0 = spec.k0();
    match spec {
        WeightSpec::Bare { q, a, .. } => {
            if x < 0.0 {
                return Err(Error::Domain(format!("x = {x} is negative")));
            }
            let y = a * x.powf(q + 1.0) / (q + 1.0);
            Ok((a / (q + 1.0)).powf(q / (q + 1.0)) / a * (y / k0).exp())
        }
        WeightSpec::Prefactored { alpha, profile, .. } => {
            if x < profile.x0() {
                return Err(Error::Domain(format!("x = {x} lies below x0 = {}", profile.x0())));
            }
            let (y, g) = (profile.y(x), profile.dy(x));
            if g == 0.0 || (*alpha > 0.0 && y == 0.0) {
                return Err(Error::SingularPoint { x });
            }
            let power = if *alpha == 0.0 { 1.0 } else { y.powf(-alpha) };
            Ok(power / g.abs() * (y / k0).exp())
        }
    }
}

fn eval_poly(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
}

/// Gauss–Laguerre order used for `⟨u_m, u_n⟩`.
pub fn rule_order(m: usize, n: usize) -> usize {
    2 * (m + n) + 8
}

/// `∫ w u_m u_n dx` by substitution onto a Gauss–Laguerre rule.
pub fn inner_product(spec: &WeightSpec, m: usize, n: usize) -> Result<f64> {
    let rule = GaussLaguerre::new(rule_order(m, n), spec.ladder_alpha())?;
    inner_product_with_rule(spec, &rule, m, n)
}

fn inner_product_with_rule(spec: &WeightSpec, rule: &GaussLaguerre, m: usize, n: usize) -> Result<f64> {
    let (um, un) = (spec.state(m)?, spec.state(n)?);
    let k0 = spec.k0();
    let sum = rule.integrate(|z| eval_poly(um.coeffs(), -k0 * z) * eval_poly(un.coeffs(), -k0 * z));
    Ok(spec.substitution_constant() * sum)
}

/// `∫ w u_m u_n dx` by adaptive quadrature in `x` on `[x0, X]`, where
/// `e^(Y(X)/k0) < 1e−30`. Independent of the substitution.
pub fn inner_product_direct(spec: &WeightSpec, m: usize, n: usize) -> Result<f64> {
    let profile = spec.profile();
    let (um, un) = (spec.state(m)?, spec.state(n)?);
    let flavor = spec.flavor();
    let x0 = profile.x0();
    let target = -30.0 * std::f64::consts::LN_10 * spec.k0();
    let mut upper = x0 + 1.0;
    let mut doublings = 0;
    while profile.y(upper) < target {
        upper = x0 + 2.0 * (upper - x0);
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Domain("profile does not grow without bound".into()));
        }
    }
    let integrand = |x: f64| {
        if x <= x0 {
            return 0.0;
        }
        let w = weight_eval(spec, x).unwrap_or(f64::NAN);
        let a = evaluate_state_derivatives(&um, &profile, flavor, x).map(|v| v.0).unwrap_or(f64::NAN);
        let b = evaluate_state_derivatives(&un, &profile, flavor, x).map(|v| v.0).unwrap_or(f64::NAN);
        w * a * b
    };
    Ok(quadrature::integrate(integrand, x0, upper, 1e-11, 1e-300)?.value)
}

/// Symmetric `(n_max + 1)²` matrix of inner products.
pub fn gram_matrix(spec: &WeightSpec, n_max: usize) -> Result<Vec<Vec<f64>>> {
    let rule = GaussLaguerre::new(rule_order(n_max, n_max), spec.ladder_alpha())?;
    let mut g = vec![vec![0.0; n_max + 1]; n_max + 1];
    for i in 0..=n_max {
        for j in i..=n_max {
            let v = inner_product_with_rule(spec, &rule, i, j)?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// Gram matrix as rows `(i, j, value)`.
pub fn gram_table(g: &[Vec<f64>]) -> Table {
    let mut t = Table::new(["i", "j", "value"]);
    for (i, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            t.push(vec![i as f64, j as f64, v]);
        }
    }
    t
}

/// `max_{i≠j} |G_ij| / √(G_ii G_jj)`.
pub fn max_offdiagonal_ratio(g: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..g.len() {
        for j in 0..g.len() {
            if i != j {
                worst = worst.max(g[i][j].abs() / (g[i][i] * g[j][j]).abs().sqrt());
            }
        }
    }
    worst
}

/// Analytic `⟨u_n, u_n⟩` for the ladder-normalized `u_n = M̂ⁿ u₀`:
/// `C·(−k0)^(2n)·n!·Γ(α+1)²/Γ(n+α+1)`.
pub fn norm_oracle(spec: &WeightSpec, n: usize) -> f64 {
    let alpha = spec.ladder_alpha();
    let nf = n as f64;
    let log_gammas = ln_gamma(nf + 1.0) + 2.0 * ln_gamma(alpha + 1.0) - ln_gamma(nf + alpha + 1.0);
    spec.substitution_constant() * (-spec.k0()).powi(2 * n as i32) * log_gammas.exp()
}

/// The normalization constant stated for the prefactored family, `(−k0)^α`.
pub fn stated_prefactored_norm(alpha: f64, k0: f64) -> f64 {
    (-k0).powf(alpha)
}

/// The closed-form bare-family norm as stated:
/// `Γ(1/(q+1))²·n!/Γ(n + 1/(q+1))·(A/(q+1))^(2q/(q+1))/A²·(−k0)^(1/(q+1))`.
pub fn stated_bare_norm(q: f64, a: f64, k0: f64, n: usize) -> f64 {
    let s = 1.0 / (q + 1.0);
    let nf = n as f64;
    (2.0 * ln_gamma(s) + ln_gamma(nf + 1.0) - ln_gamma(nf + s)).exp()
        * (a / (q + 1.0)).powf(2.0 * q / (q + 1.0))
        / (a * a)
        * (-k0).powf(s)
}

/// Boundary term whose vanishing at both ends makes `u_m ⊥ u_n`:
/// `(Y+c0)^(c1+3)/|Y'|³·e^(Y/k0)·(u_m u_n' − u_m' u_n)`.
pub fn boundary_term(spec: &WeightSpec, m: usize, n: usize, x: f64) -> Result<f64> {
    let profile = spec.profile();
    let (c0, c1) = spec.constants();
    let (um, un) = (spec.state(m)?, spec.state(n)?);
    let a = evaluate_state_derivatives(&um, &profile, spec.flavor(), x)?;
    let b = evaluate_state_derivatives(&un, &profile, spec.flavor(), x)?;
    let s = profile.y(x) + c0;
    let g = profile.dy(x).abs();
    if g == 0.0 {
        return Err(Error::DivisionByZero { x });
    }
    Ok(s.powf(c1 + 3.0) / g.powi(3) * (profile.y(x) / spec.k0()).exp() * (a.0 * b.1 - a.1 * b.0))
}

/// Scaled residual of the weight equation `f₂ w' + (f₂' − f₁) w = 0`
/// with `f₂ = k0Φ₂`, `f₁ = k0Φ₁ + Φ₂Y'`, divided by `w`.
pub fn weight_equation_residual(spec: &WeightSpec, x: f64) -> Result<f64> {
    let profile = spec.profile();
    let (c0, c1) = spec.constants();
    let k0 = spec.k0();
    let phi = crate::profiles::phi_from_profile(profile.clone(), c0, c1);
    let (s, g, g1) = (profile.y(x) + c0, profile.dy(x), profile.d2y(x));
    if s == 0.0 {
        return Err(Error::SingularPoint { x });
    }
    let log_dw = (c1 + 2.0) * g / s - g1 / g + g / k0;
    let p2 = phi.phi2(x)?;
    let terms = [k0 * p2 * log_dw, k0 * phi.dphi2(x)?, -k0 * phi.phi1(x)?, -p2 * g];
    let sum: f64 = terms.iter().sum();
    let mag: f64 = terms.iter().map(|t| t.abs()).sum();
    Ok(sum.abs() / mag.max(f64::MIN_POSITIVE))
}
