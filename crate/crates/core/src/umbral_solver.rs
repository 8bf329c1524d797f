//! Solving `∂f/∂τ = F(P̂, M̂) f` by expanding `f(τ, ·) = Σ c_k(τ) u_k` on the
//! ladder basis, where the operators act on indices:
//! `P̂ u_n = n u_{n−1}`, `M̂ u_n = u_{n+1}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::ladder::{monomial, LadderState};
use crate::profiles::{evaluate_state_derivatives, Flavor, ProfileKind, UmbralOperators, YProfile};
use crate::scalar::Scalar;

/// Relative tolerance of the step-halving test in [`evolve_series`].
pub const STEP_TOLERANCE: f64 = 1e-9;
const MAX_STEPS: usize = 1 << 22;

/// The function space `{u_k}` a series lives in.
#[derive(Debug, Clone)]
pub struct Basis {
    alpha: f64,
    k0: f64,
    flavor: Flavor,
    profile: YProfile,
}

impl Basis {
    /// `u_0 = 1` on `Y' = A x^q`, `x0 = 0`.
    pub fn bare_power_law(q: f64, a: f64, k0: f64) -> Result<Self> {
        Self::bare(YProfile::power_law(a, q, 0.0)?, k0)
    }

    /// `u_0 = 1` on a power-law profile with `γ = −x0`.
    pub fn bare(profile: YProfile, k0: f64) -> Result<Self> {
        let alpha = match *profile.kind() {
            ProfileKind::PowerLaw { q, gamma, .. } if gamma == -profile.x0() => -q / (q + 1.0),
            _ => {
                return Err(Error::InvalidParameter(
                    "the constant seed needs a power-law profile with gamma = -x0".into(),
                ))
            }
        };
        Self::checked(alpha, k0, Flavor::Bare, profile)
    }

    /// `u_0 = Y'·Y^α` on any profile.
    pub fn prefactored(alpha: f64, k0: f64, profile: YProfile) -> Result<Self> {
        Self::checked(alpha, k0, Flavor::Prefactored, profile)
    }

    fn checked(alpha: f64, k0: f64, flavor: Flavor, profile: YProfile) -> Result<Self> {
        LadderState::unit(alpha, k0)?;
        Ok(Basis { alpha, k0, flavor, profile })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn profile(&self) -> &YProfile {
        &self.profile
    }

    /// The P̂, M̂ realization whose monomials are this basis.
    pub fn operators(&self) -> Result<UmbralOperators> {
        match self.flavor {
            Flavor::Bare => UmbralOperators::constant_seed(self.profile.clone(), self.k0),
            Flavor::Prefactored => Ok(UmbralOperators::prefactored(self.profile.clone(), self.alpha, self.k0)),
        }
    }

    /// `Σ c_k u_k` collapsed into one ladder state.
    pub fn combine(&self, coeffs: &[f64]) -> Result<LadderState<f64>> {
        let mut total = LadderState::zero(self.alpha, self.k0)?;
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                total = total.add(&monomial(k, self.alpha, self.k0)?.scale(&c));
            }
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    P,
    M,
}

impl Letter {
    /// Index action on a truncated coefficient vector.
    pub fn apply<T: Scalar>(self, c: &[T]) -> Vec<T> {
        let len = c.len();
        let mut out = vec![T::zero(); len];
        match self {
            Letter::P => {
                for m in 0..len.saturating_sub(1) {
                    out[m] = T::from_usize(m + 1) * c[m + 1].clone();
                }
            }
            Letter::M => {
                for m in 1..len {
                    out[m] = c[m - 1].clone();
                }
            }
        }
        out
    }
}

/// One weighted ordered product; letters act right to left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordTerm {
    pub numerator: i64,
    pub denominator: i64,
    pub letters: Vec<Letter>,
}

/// `F(P̂, M̂)` as a finite sum of weighted words, e.g. `"P+M"` or
/// `"0.5*MP-2*P"`. `L` abbreviates `PM`; a bare number is the identity word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorWord {
    terms: Vec<WordTerm>,
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if t.numerator < 0 { "-" } else if i > 0 { "+" } else { "" };
            let word: String = t.letters.iter().map(|l| if *l == Letter::P { 'P' } else { 'M' }).collect();
            let num = t.numerator.abs();
            match (num, t.denominator, word.is_empty()) {
                (1, 1, false) => write!(f, "{sign}{word}")?,
                (_, 1, true) => write!(f, "{sign}{num}")?,
                (_, 1, false) => write!(f, "{sign}{num}*{word}")?,
                (_, d, true) => write!(f, "{sign}{num}/{d}")?,
                (_, d, false) => write!(f, "{sign}{num}/{d}*{word}")?,
            }
        }
        Ok(())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn parse_weight(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidParameter(format!("bad operator weight: {text:?}"));
    let (num, den) = if let Some((n, d)) = text.split_once('/') {
        (n.parse::<i64>().map_err(|_| bad())?, d.parse::<i64>().map_err(|_| bad())?)
    } else if let Some((int, frac)) = text.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        (int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?, den)
    } else {
        (text.parse::<i64>().map_err(|_| bad())?, 1)
    };
    if den == 0 {
        return Err(bad());
    }
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let g = gcd(num, den).max(1);
    Ok((num / g, den / g))
}

impl OperatorWord {
    pub fn zero() -> Self {
        OperatorWord { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[WordTerm] {
        &self.terms
    }

    /// Appends `(num/den)·word`, with `word` written left to right.
    pub fn push(mut self, numerator: i64, denominator: i64, letters: Vec<Letter>) -> Self {
        if numerator != 0 {
            self.terms.push(WordTerm { numerator, denominator, letters });
        }
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::InvalidParameter("empty operator expression".into()));
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            // a sign right after an operator belongs to the weight
            let signed_weight = compact[..i].ends_with(['/', '*', '+', '-']);
            if i > 0 && (ch == '+' || ch == '-') && !signed_weight {
                pieces.push(&compact[start..i]);
                start = i;
            }
        }
        pieces.push(&compact[start..]);

        let mut word = OperatorWord::zero();
        for piece in pieces {
            let (sign, body) = match piece.as_bytes().first() {
                Some(b'-') => (-1, &piece[1..]),
                Some(b'+') => (1, &piece[1..]),
                _ => (1, piece),
            };
            let split = body
                .find(|c: char| c.is_ascii_alphabetic() || c == '*')
                .unwrap_or(body.len());
            let (weight_text, rest) = body.split_at(split);
            let letters_text = rest.strip_prefix('*').unwrap_or(rest);
            if weight_text.is_empty() && letters_text.is_empty() {
                return Err(Error::InvalidParameter(format!("empty term in {text:?}")));
            }
            let (num, den) = if weight_text.is_empty() { (1, 1) } else { parse_weight(weight_text)? };
            let mut letters = Vec::new();
            for ch in letters_text.chars() {
                match ch {
                    'P' => letters.push(Letter::P),
                    'M' => letters.push(Letter::M),
                    'L' => letters.extend([Letter::P, Letter::M]),
                    'I' => {}
                    _ => return Err(Error::InvalidParameter(format!("unknown operator letter {ch:?} in {text:?}"))),
                }
            }
            word = word.push(sign * num, den, letters);
        }
        Ok(word)
    }

    /// Longest word length, the band half-width of the index action.
    pub fn max_length(&self) -> usize {
        self.terms.iter().map(|t| t.letters.len()).max().unwrap_or(0)
    }

    /// `F·c` on a truncated coefficient vector (indices beyond `len − 1`
    /// are dropped).
    pub fn apply<T: Scalar>(&self, c: &[T]) -> Vec<T> {
        let mut acc = vec![T::zero(); c.len()];
        for term in &self.terms {
            let mut v = c.to_vec();
            for letter in term.letters.iter().rev() {
                v = letter.apply(&v);
            }
            let w = T::from_ratio(term.numerator, term.denominator);
            for (a, x) in acc.iter_mut().zip(v) {
                *a = a.clone() + w.clone() * x;
            }
        }
        acc
    }

    /// Dense `(n+1)×(n+1)` matrix of the truncated action.
    pub fn matrix(&self, n: usize) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; n + 1]; n + 1];
        for j in 0..=n {
            let mut e = vec![0.0; n + 1];
            e[j] = 1.0;
            for (i, v) in self.apply(&e).into_iter().enumerate() {
                m[i][j] = v;
            }
        }
        m
    }
}

/// `τ^k/k!` for `k ≤ n`; the example coefficients without the common
/// factor `e^(τ²/2)`.
pub fn example_series_reduced<T: Scalar>(tau: &T, n: usize) -> Vec<T> {
    let mut c = Vec::with_capacity(n + 1);
    let mut cur = T::one();
    for k in 0..=n {
        if k > 0 {
            cur = cur * tau.clone() / T::from_usize(k);
        }
        c.push(cur.clone());
    }
    c
}

/// `d/dτ` of [`example_series_reduced`] after restoring the common factor,
/// divided by it again: `τ c_k + c_{k−1}`.
pub fn example_rates_reduced<T: Scalar>(tau: &T, n: usize) -> Vec<T> {
    let c = example_series_reduced(tau, n);
    (0..=n)
        .map(|k| {
            let lower = if k > 0 { c[k - 1].clone() } else { T::zero() };
            tau.clone() * c[k].clone() + lower
        })
        .collect()
}

/// `c_k(τ) = e^(τ²/2)·τ^k/k!`, the solution of `f_τ = (P̂ + M̂) f`,
/// `f(0) = u_0`.
pub fn example_series(tau: f64, n: usize) -> Vec<f64> {
    let e = (0.5 * tau * tau).exp();
    example_series_reduced(&tau, n).into_iter().map(|c| c * e).collect()
}

/// `ċ_k = τ c_k + c_{k−1}` for [`example_series`].
pub fn example_rates(tau: f64, n: usize) -> Vec<f64> {
    let e = (0.5 * tau * tau).exp();
    example_rates_reduced(&tau, n).into_iter().map(|c| c * e).collect()
}

/// Coefficients and their τ-derivatives at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSnapshot {
    pub tau: f64,
    pub coeffs: Vec<f64>,
    pub rates: Vec<f64>,
}

/// A truncated series `Σ_{k≤N} c_k(τ) u_k` sampled at a set of times.
#[derive(Debug, Clone)]
pub struct UmbralSeries {
    basis: Basis,
    truncation: usize,
    samples: Vec<SeriesSnapshot>,
}

impl UmbralSeries {
    /// The closed-form example at the given times.
    pub fn example(basis: Basis, truncation: usize, taus: &[f64]) -> Self {
        let samples = taus
            .iter()
            .map(|&tau| SeriesSnapshot {
                tau,
                coeffs: example_series(tau, truncation),
                rates: example_rates(tau, truncation),
            })
            .collect();
        UmbralSeries { basis, truncation, samples }
    }

    pub fn from_snapshots(basis: Basis, truncation: usize, samples: Vec<SeriesSnapshot>) -> Result<Self> {
        for s in &samples {
            if s.coeffs.len() != truncation + 1 || s.rates.len() != truncation + 1 {
                return Err(Error::InvalidParameter(format!(
                    "snapshot at tau = {} has the wrong length for N = {truncation}",
                    s.tau
                )));
            }
        }
        Ok(UmbralSeries { basis, truncation, samples })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn samples(&self) -> &[SeriesSnapshot] {
        &self.samples
    }

    pub fn last(&self) -> Option<&SeriesSnapshot> {
        self.samples.last()
    }

    /// Snapshot at `tau` (to within 1e−12).
    pub fn at(&self, tau: f64) -> Option<&SeriesSnapshot> {
        self.samples.iter().find(|s| (s.tau - tau).abs() <= 1e-12 * tau.abs().max(1.0))
    }

    /// `max_τ |c_N(τ)|`.
    pub fn tail(&self) -> f64 {
        self.samples.iter().map(|s| s.coeffs[self.truncation].abs()).fold(0.0, f64::max)
    }

    /// Fails with a truncation error when the tail exceeds `tolerance`.
    pub fn check_tail(&self, tolerance: f64) -> Result<()> {
        let tail = self.tail();
        if tail > tolerance {
            return Err(Error::TruncationTail { tail, tolerance });
        }
        Ok(())
    }
}

/// `f = Σ c_k u_k` on the grid.
pub fn lift_and_sample(basis: &Basis, coeffs: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
    let state = basis.combine(coeffs)?;
    xs.iter()
        .map(|&x| Ok(evaluate_state_derivatives(&state, basis.profile(), basis.flavor(), x)?.0))
        .collect()
}

/// `ċ − F·c`; vanishes (up to the last index) for an exact solution.
pub fn residual_coeffs<T: Scalar>(coeffs: &[T], rates: &[T], word: &OperatorWord) -> Vec<T> {
    let image = word.apply(coeffs);
    rates.iter().zip(image).map(|(r, v)| r.clone() - v).collect()
}

/// [`residual_coeffs`] of a snapshot.
pub fn snapshot_residual(snapshot: &SeriesSnapshot, word: &OperatorWord) -> Vec<f64> {
    residual_coeffs(&snapshot.coeffs, &snapshot.rates, word)
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| yi + a * xi).collect()
}

fn rk4(m: &[Vec<f64>], c0: &[f64], tau_end: f64, steps: usize) -> Vec<Vec<f64>> {
    let h = tau_end / steps as f64;
    let mut path = Vec::with_capacity(steps + 1);
    let mut c = c0.to_vec();
    path.push(c.clone());
    for _ in 0..steps {
        let k1 = mat_vec(m, &c);
        let k2 = mat_vec(m, &axpy(0.5 * h, &k1, &c));
        let k3 = mat_vec(m, &axpy(0.5 * h, &k2, &c));
        let k4 = mat_vec(m, &axpy(h, &k3, &c));
        c = c
            .iter()
            .enumerate()
            .map(|(i, ci)| ci + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        path.push(c.clone());
    }
    path
}

/// Integrates the truncated system `ċ = F c` from `τ = 0` with classic RK4,
/// halving the step until the end state moves by less than
/// [`STEP_TOLERANCE`]`·max(1, |c|)`.
pub fn evolve_series(basis: Basis, word: &OperatorWord, c0: &[f64], tau_end: f64, n: usize) -> Result<UmbralSeries> {
    if !tau_end.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be finite, got {tau_end}")));
    }
    let mut c = c0.to_vec();
    c.resize(n + 1, 0.0);
    let m = word.matrix(n);
    let mut steps = 8;
    let mut coarse = rk4(&m, &c, tau_end, steps);
    loop {
        if steps * 2 > MAX_STEPS {
            return Err(Error::StepSizeUnderflow { steps });
        }
        let fine = rk4(&m, &c, tau_end, steps * 2);
        let (a, b) = (coarse.last().expect("path"), fine.last().expect("path"));
        let change = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let size = b.iter().map(|x| x.abs()).fold(1.0, f64::max);
        steps *= 2;
        coarse = fine;
        if change < STEP_TOLERANCE * size {
            break;
        }
    }
    let h = tau_end / steps as f64;
    let samples = coarse
        .into_iter()
        .enumerate()
        .map(|(i, coeffs)| SeriesSnapshot { tau: i as f64 * h, rates: mat_vec(&m, &coeffs), coeffs })
        .collect();
    UmbralSeries::from_snapshots(basis, n, samples)
}

/// Offset used for grid points on the left end of the domain, where the
/// coefficient functions are singular.
pub const ENDPOINT_OFFSET: f64 = 1e-6;

/// Residual of `f_τ = (P̂ + M̂) f` written as an integro-differential
/// equation, `|f_τ − [Φ₂f″ + Φ₁f′ + (Φ₀ + k0)f + Y′∫f]|`, at each grid
/// point, with the antiderivative by quadrature.
pub fn ide_residual_pointwise(basis: &Basis, snapshot: &SeriesSnapshot, xs: &[f64]) -> Result<Vec<f64>> {
    let ops = basis.operators()?;
    let f = basis.combine(&snapshot.coeffs)?;
    let ft = basis.combine(&snapshot.rates)?;
    let profile = basis.profile();
    let phi = ops.phi();
    let x0 = profile.x0();
    let eval = |s: f64| evaluate_state_derivatives(&f, profile, basis.flavor(), s).map(|r| r.0).unwrap_or(f64::NAN);
    xs.iter()
        .map(|&x| {
            let x = if x <= x0 { x0 + ENDPOINT_OFFSET } else { x };
            let (v, d1, d2) = evaluate_state_derivatives(&f, profile, basis.flavor(), x)?;
            let vt = evaluate_state_derivatives(&ft, profile, basis.flavor(), x)?.0;
            let integral = ops.antiderivative(eval, x)?;
            let rhs =
                phi.phi2(x)? * d2 + phi.phi1(x)? * d1 + (phi.phi0(x)? + basis.k0()) * v + profile.dy(x) * integral;
            let r = (vt - rhs).abs();
            if !r.is_finite() {
                return Err(Error::SingularPoint { x });
            }
            Ok(r)
        })
        .collect()
}

/// Maximum of [`ide_residual_pointwise`] over the grid.
pub fn ide_residual_numeric(basis: &Basis, snapshot: &SeriesSnapshot, xs: &[f64]) -> Result<f64> {
    Ok(ide_residual_pointwise(basis, snapshot, xs)?.into_iter().fold(0.0, f64::max))
}
