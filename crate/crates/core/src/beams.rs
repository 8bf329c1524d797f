//! Flattened beam modes
//! `Φ_n(x) = α_n·exp(A x^(q+1)/(2y(q+1)))·π_n(x, y)`, where `π_n = M̂ⁿ 1`
//! on the profile `Y' = A x^q` with `k0 = y < 0`.

use crate::error::{Error, Result};
use crate::ladder::{monomial, LadderState};
use crate::quadrature::{self, GaussLaguerre};
use crate::table::Table;

/// Envelope exponent at which the modes are treated as zero.
const ENVELOPE_CUTOFF: f64 = 100.0;

/// Shape parameters shared by all modes of one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamFamily {
    pub q: f64,
    pub a: f64,
    pub y: f64,
}

/// One normalized mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamModeParams {
    pub n: usize,
    pub q: f64,
    pub a: f64,
    pub y: f64,
    pub alpha_n: f64,
}

impl BeamFamily {
    pub fn new(q: f64, a: f64, y: f64) -> Result<Self> {
        if !(y < 0.0) {
            return Err(Error::InvalidParameter("y must be negative".into()));
        }
        if !(q > -1.0) {
            return Err(Error::InvalidParameter(format!("q must exceed -1, got {q}")));
        }
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("A must be positive, got {a}")));
        }
        Ok(BeamFamily { q, a, y })
    }

    /// Ladder parameter `−q/(q+1)` of the bare family.
    pub fn ladder_alpha(&self) -> f64 {
        -self.q / (self.q + 1.0)
    }

    /// `z = −A x^(q+1)/(y(q+1))`, the Laguerre argument at `x`.
    pub fn laguerre_argument(&self, x: f64) -> f64 {
        -self.a * x.powf(self.q + 1.0) / (self.y * (self.q + 1.0))
    }

    /// `π_n(·, y)` as a ladder state.
    pub fn polynomial(&self, n: usize) -> Result<LadderState<f64>> {
        monomial(n, self.ladder_alpha(), self.y)
    }

    /// `exp(A x^(q+1)/(2y(q+1)))`.
    pub fn envelope(&self, x: f64) -> f64 {
        (-0.5 * self.laguerre_argument(x)).exp()
    }

    /// `π_k` at Laguerre argument `z` for `k = 0..=n`, through
    /// `π_k = k!Γ(α+1)/Γ(k+α+1)·yᵏ·L_k^(α)(z)` and the three-term recurrence;
    /// the expanded power form loses all digits at large `z`.
    pub fn polynomials_at(&self, n: usize, z: f64) -> Vec<f64> {
        let alpha = self.ladder_alpha();
        let mut out = Vec::with_capacity(n + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        let mut factor = 1.0;
        for k in 0..=n {
            if k > 0 {
                let kf = k as f64;
                let next = ((2.0 * kf - 1.0 + alpha - z) * cur - (kf - 1.0 + alpha) * prev) / kf;
                prev = cur;
                cur = next;
                factor *= kf / (alpha + kf) * self.y;
            }
            out.push(factor * cur);
        }
        out
    }

    /// `∫₀^∞ env²·π_m·π_n dx` by Gauss–Laguerre after `z = −Y/y`:
    /// `dx = ((q+1)/A)^(1/(q+1))/(q+1)·(−y)^(α+1)·z^α dz`.
    pub fn raw_overlap(&self, m: usize, n: usize) -> Result<f64> {
        let alpha = self.ladder_alpha();
        let rule = GaussLaguerre::new(m + n + 8, alpha)?;
        let jacobian = ((self.q + 1.0) / self.a).powf(1.0 / (self.q + 1.0)) / (self.q + 1.0) * (-self.y).powf(alpha + 1.0);
        let top = m.max(n);
        Ok(jacobian * rule.integrate(|z| {
            let p = self.polynomials_at(top, z);
            p[m] * p[n]
        }))
    }

    /// Largest `x` worth integrating to: envelope exponent equal to 100.
    pub fn support_end(&self) -> f64 {
        (ENVELOPE_CUTOFF * 2.0 * (-self.y) * (self.q + 1.0) / self.a).powf(1.0 / (self.q + 1.0))
    }

    pub fn mode(&self, n: usize) -> Result<BeamModeParams> {
        Ok(BeamModeParams { n, q: self.q, a: self.a, y: self.y, alpha_n: normalize(n, self.q, self.a, self.y)? })
    }
}

impl BeamModeParams {
    pub fn family(&self) -> BeamFamily {
        BeamFamily { q: self.q, a: self.a, y: self.y }
    }
}

/// `α_n = (∫ env²·π_n² dx)^(−1/2)`.
pub fn normalize(n: usize, q: f64, a: f64, y: f64) -> Result<f64> {
    let family = BeamFamily::new(q, a, y)?;
    let norm = family.raw_overlap(n, n)?;
    if !(norm > 0.0) {
        return Err(Error::QuadratureNonConvergence { a: 0.0, b: f64::INFINITY, error: norm });
    }
    Ok(norm.powf(-0.5))
}

/// `Φ_n(x)`.
pub fn mode_eval(params: &BeamModeParams, x: f64) -> Result<f64> {
    ModeFn::new(params)?.eval(x)
}

/// A combination `env(x)·Σ w_k π_k(x)`, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ModeFn {
    family: BeamFamily,
    weights: Vec<f64>,
}

impl ModeFn {
    pub fn new(params: &BeamModeParams) -> Result<Self> {
        let family = BeamFamily::new(params.q, params.a, params.y)?;
        let mut weights = vec![0.0; params.n + 1];
        weights[params.n] = params.alpha_n;
        Ok(ModeFn { family, weights })
    }

    /// `Σ c_i Φ_i` for modes of one family.
    pub fn combination(family: &BeamFamily, modes: &[BeamModeParams], coeffs: &[f64]) -> Self {
        let top = modes.iter().map(|m| m.n).max().unwrap_or(0);
        let mut weights = vec![0.0; top + 1];
        for (m, c) in modes.iter().zip(coeffs) {
            weights[m.n] += c * m.alpha_n;
        }
        ModeFn { family: *family, weights }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("x = {x} is negative")));
        }
        let z = self.family.laguerre_argument(x);
        let p = self.family.polynomials_at(self.weights.len() - 1, z);
        let sum: f64 = p.iter().zip(&self.weights).map(|(a, w)| a * w).sum();
        Ok(self.family.envelope(x) * sum)
    }
}

/// Number of sign changes of `Φ_n` on `samples` equally spaced points of
/// `(0, support_end]`.
pub fn count_zeros(params: &BeamModeParams, samples: usize) -> Result<usize> {
    let end = params.family().support_end();
    let mode = ModeFn::new(params)?;
    let mut count = 0;
    let mut prev_sign = 0.0;
    for i in 1..=samples {
        let v = mode.eval(end * i as f64 / samples as f64)?;
        // the envelope underflows far out; only count resolved signs
        if v == 0.0 || v.abs() < 1e-200 {
            continue;
        }
        let s = v.signum();
        if prev_sign != 0.0 && s != prev_sign {
            count += 1;
        }
        prev_sign = s;
    }
    Ok(count)
}

/// Target `f(x) = e^(−(x/s)^p)/‖·‖₂` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperGaussian {
    pub p: f64,
    pub scale: f64,
    norm: f64,
}

impl SuperGaussian {
    pub fn new(p: f64, scale: f64) -> Result<Self> {
        if !(p > 0.0) || !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("super-gaussian needs p > 0 and s > 0, got p = {p}, s = {scale}")));
        }
        // ∫₀^∞ e^(−2(x/s)^p) dx = s·Γ(1 + 1/p)/2^(1/p)
        let sq = scale * crate::special::gamma(1.0 + 1.0 / p) / 2f64.powf(1.0 / p);
        Ok(SuperGaussian { p, scale, norm: sq.sqrt() })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (-(x / self.scale).powf(self.p)).exp() / self.norm
    }

    /// Point beyond which `f < e^(−60)`.
    pub fn support_end(&self) -> f64 {
        self.scale * 60f64.powf(1.0 / self.p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub coefficients: Vec<f64>,
    pub l2_error: f64,
}

/// Projects a normalized super-gaussian onto `Φ_0 … Φ_{n_max}` and reports
/// `‖f − Σ a_n Φ_n‖₂` by direct quadrature.
pub fn supergaussian_expand(target: &SuperGaussian, family: &BeamFamily, n_max: usize) -> Result<Expansion> {
    let modes: Vec<BeamModeParams> = (0..=n_max).map(|n| family.mode(n)).collect::<Result<_>>()?;
    let end = family.support_end().max(target.support_end());
    let coefficients = modes
        .iter()
        .map(|m| {
            let mode = ModeFn::new(m)?;
            let integrand = |x: f64| mode.eval(x).unwrap_or(f64::NAN) * target.eval(x);
            // both factors have unit norm, so |a_n| ≤ 1
            Ok(quadrature::integrate(integrand, 0.0, end, 1e-12, 1e-14)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let approx = ModeFn::combination(family, &modes, &coefficients);
    let residual = |x: f64| {
        let d = target.eval(x) - approx.eval(x).unwrap_or(f64::NAN);
        d * d
    };
    let sq = quadrature::integrate(residual, 0.0, end, 1e-10, 1e-24)?.value;
    Ok(Expansion { coefficients, l2_error: sq.max(0.0).sqrt() })
}

/// Columns `x, phi_n…` (or `x, I_n…` with `squared`).
pub fn emit_profiles(ns: &[usize], family: &BeamFamily, xs: &[f64], squared: bool) -> Result<Table> {
    let prefix = if squared { "I" } else { "phi" };
    let header: Vec<String> =
        std::iter::once("x".to_string()).chain(ns.iter().map(|n| format!("{prefix}_{n}"))).collect();
    let mut table = Table::new(header);
    let modes: Vec<ModeFn> = ns.iter().map(|&n| ModeFn::new(&family.mode(n)?)).collect::<Result<_>>()?;
    for &x in xs {
        let mut row = vec![x];
        for m in &modes {
            let v = m.eval(x)?;
            row.push(if squared { v * v } else { v });
        }
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use crate::table::linspace;

    fn reference_family() -> BeamFamily {
        BeamFamily::new(3.0, 1.0, -1.0).unwrap()
    }

    #[test]
    fn ground_normalization() {
        let a0 = normalize(0, 3.0, 1.0, -1.0).unwrap();
        let exact = (4f64.powf(-0.75) * gamma(0.25)).powf(-0.5);
        assert!((a0 - exact).abs() < 1e-13);
        let g = normalize(0, 1.0, 1.0, -1.0).unwrap();
        assert!((g - (std::f64::consts::PI / 2.0).sqrt().powf(-0.5)).abs() < 1e-13);
        assert!((g - 0.893244).abs() < 1e-6);
    }

    #[test]
    fn mode_values() {
        let f = reference_family();
        let m0 = f.mode(0).unwrap();
        assert_eq!(mode_eval(&m0, 0.0).unwrap(), m0.alpha_n);
        let x: f64 = 1.3;
        assert!((mode_eval(&m0, x).unwrap() - m0.alpha_n * (-x.powi(4) / 8.0).exp()).abs() < 1e-15);
        let m1 = f.mode(1).unwrap();
        assert!(mode_eval(&m1, 1.0).unwrap().abs() < 1e-15);
        assert!((mode_eval(&m1, 0.0).unwrap() + m1.alpha_n).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonnegative_y() {
        assert!(matches!(BeamFamily::new(3.0, 1.0, 1.0), Err(Error::InvalidParameter(m)) if m == "y must be negative"));
        assert!(normalize(0, 3.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn recurrence_matches_ladder_polynomials() {
        use crate::profiles::{evaluate_state, Flavor, YProfile};
        let f = BeamFamily::new(2.0, 1.5, -0.8).unwrap();
        let profile = YProfile::power_law(1.5, 2.0, 0.0).unwrap();
        for &x in &[0.0, 0.4, 1.0, 1.7] {
            let p = f.polynomials_at(8, f.laguerre_argument(x));
            for (n, v) in p.iter().enumerate() {
                let direct = evaluate_state(&f.polynomial(n).unwrap(), &profile, Flavor::Bare, x).unwrap();
                assert!((v - direct).abs() < 1e-12 * direct.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn zero_counts() {
        let f = reference_family();
        for n in 0..=6 {
            assert_eq!(count_zeros(&f.mode(n).unwrap(), 4000).unwrap(), n);
        }
    }

    #[test]
    fn expanding_a_mode() {
        let f = reference_family();
        // Φ₀ ∝ e^(−x⁴/8): matched scale 8^(1/4)
        let target = SuperGaussian::new(4.0, 8f64.powf(0.25)).unwrap();
        let e = supergaussian_expand(&target, &f, 3).unwrap();
        assert!((e.coefficients[0] - 1.0).abs() < 1e-9);
        assert!(e.coefficients[1..].iter().all(|c| c.abs() < 1e-8));
        assert!(e.l2_error < 1e-6);
    }

    #[test]
    fn flatter_target_converges() {
        let target = SuperGaussian::new(6.0, 1.0).unwrap();
        let errs: Vec<f64> = [5, 10, 20]
            .iter()
            .map(|&n| supergaussian_expand(&target, &reference_family(), n).unwrap().l2_error)
            .collect();
        eprintln!("super-gaussian p=6 errors: {errs:?}");
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn profile_tables() {
        let f = reference_family();
        let xs = linspace(0.0, 3.0, 301);
        let t = emit_profiles(&[0, 1, 2], &f, &xs, false).unwrap();
        assert_eq!(t.header, vec!["x", "phi_0", "phi_1", "phi_2"]);
        assert_eq!(t.rows.len(), 301);
        assert!(t.rows[100][2].abs() < 1e-9);
        let empty = emit_profiles(&[], &f, &xs, false).unwrap();
        assert_eq!(empty.header, vec!["x"]);
        let sq = emit_profiles(&[4], &f, &xs, true).unwrap();
        assert_eq!(sq.header[1], "I_4");
        assert!(sq.rows.iter().all(|r| r[1] >= 0.0));
    }
}
