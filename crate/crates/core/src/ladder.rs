//! Ladder representation of the raising operator M̂, the lowering operator P̂
//! and the number operator L̂ = P̂M̂.
//!
//! A [`LadderState`] stores coefficients `c_j` of a function `Σ c_j e_j`
//! where `e_j = Y'·Y^(α+j)` (prefactored basis) or `e_j = Y^j` (bare basis,
//! power-law profile with `α = -q/(q+1)`). On this basis
//!
//! ```text
//! M̂ e_j = e_{j+1} / (α + j + 1) + k0·e_j
//! P̂ e_j = j·(α + j)·e_{j-1}
//! ```
//!
//! so both operators act on coefficient vectors without ever evaluating `Y`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficient vector of a function in the `e_j` basis, with parameters `(α, k0)`.
///
/// Coefficients are dense and trailing zeros are trimmed, so the zero
/// function has an empty vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderState<T> {
    alpha: T,
    k0: T,
    coeffs: Vec<T>,
}

impl<T: Scalar> LadderState<T> {
    /// Builds a state, checking `α > -1` and `k0 ≠ 0`.
    pub fn new(alpha: T, k0: T, coeffs: Vec<T>) -> Result<Self> {
        validate_params(&alpha, &k0)?;
        let mut state = LadderState { alpha, k0, coeffs };
        state.trim();
        Ok(state)
    }

    pub fn zero(alpha: T, k0: T) -> Result<Self> {
        Self::new(alpha, k0, Vec::new())
    }

    /// The seed `u_0 = e_0`.
    pub fn unit(alpha: T, k0: T) -> Result<Self> {
        Self::new(alpha, k0, vec![T::one()])
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    pub fn k0(&self) -> &T {
        &self.k0
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `e_j` (zero past the end).
    pub fn coeff(&self, j: usize) -> T {
        self.coeffs.get(j).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest index with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn with_coeffs(&self, coeffs: Vec<T>) -> Self {
        let mut out = LadderState { alpha: self.alpha.clone(), k0: self.k0.clone(), coeffs };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// `α + m` as a scalar.
    fn shifted_alpha(&self, m: usize) -> T {
        self.alpha.clone() + T::from_usize(m)
    }

    /// M̂: `c'_0 = k0·c_0`, `c'_j = k0·c_j + c_{j-1}/(α+j)`.
    pub fn apply_m(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut c = if j < n { self.k0.clone() * self.coeffs[j].clone() } else { T::zero() };
            if j >= 1 {
                c = c + self.coeffs[j - 1].clone() / self.shifted_alpha(j);
            }
            out.push(c);
        }
        self.with_coeffs(out)
    }

    /// P̂: `c'_j = (j+1)(α+j+1)·c_{j+1}`.
    pub fn apply_p(&self) -> Self {
        let out = (0..self.coeffs.len().saturating_sub(1))
            .map(|j| {
                T::from_usize(j + 1) * self.shifted_alpha(j + 1) * self.coeffs[j + 1].clone()
            })
            .collect();
        self.with_coeffs(out)
    }

    /// L̂ = P̂M̂.
    pub fn apply_number(&self) -> Self {
        self.apply_m().apply_p()
    }

    pub fn scale(&self, s: &T) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Coefficientwise `self - other`; parameters are taken from `self`.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        self.with_coeffs((0..n).map(|j| self.coeff(j) - other.coeff(j)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        self.with_coeffs((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    /// Largest `|c_j|`, as f64.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Converts every coefficient and parameter to f64.
    pub fn to_f64(&self) -> LadderState<f64> {
        LadderState {
            alpha: self.alpha.to_f64(),
            k0: self.k0.to_f64(),
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// One CSV row per stored coefficient: `j,numerator,denominator` in exact
    /// mode, `j,value` otherwise.
    pub fn to_csv(&self) -> String {
        let header = if T::is_exact() { "j,numerator,denominator" } else { "j,value" };
        let mut out = format!("{header}\n");
        for (j, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{j},{}\n", c.csv_fields()));
        }
        out
    }
}

fn validate_params<T: Scalar>(alpha: &T, k0: &T) -> Result<()> {
    if !(*alpha > -T::one()) {
        return Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha:?}")));
    }
    if k0.is_zero() {
        return Err(Error::InvalidParameter("k0 must be nonzero".into()));
    }
    Ok(())
}

/// `u_n = M̂ⁿ u_0`, by iterating the raising operator on the seed.
pub fn monomial<T: Scalar>(n: usize, alpha: T, k0: T) -> Result<LadderState<T>> {
    let mut state = LadderState::unit(alpha, k0)?;
    for _ in 0..n {
        state = state.apply_m();
    }
    Ok(state)
}

/// `Π_{m=from}^{to} (α + m)`, empty product = 1. Errors on a zero factor
/// (a Gamma pole in the equivalent ratio form).
fn rising_product<T: Scalar>(alpha: &T, from: usize, to: usize) -> Result<T> {
    let mut p = T::one();
    for m in from..=to {
        let f = alpha.clone() + T::from_usize(m);
        if f.is_zero() {
            return Err(Error::InvalidParameter(format!("Gamma pole at alpha + {m} = 0")));
        }
        p = p * f;
    }
    Ok(p)
}

fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, m| acc * T::from_usize(m))
}

/// Generalized binomial `C(n+α, n-j) = Π_{m=j+1}^{n}(α+m) / (n-j)!`.
pub fn generalized_binomial<T: Scalar>(n: usize, j: usize, alpha: &T) -> Result<T> {
    if j > n {
        return Ok(T::zero());
    }
    Ok(rising_product(alpha, j + 1, n)? / factorial::<T>(n - j))
}

/// Coefficients of `k0ⁿ·L_n^(α)(-Y/k0)` in powers of `Y`:
/// `c_j = C(n+α, n-j)·k0^(n-j)/j!`.
///
/// These differ from the ladder monomial by the constant
/// `C(n+α, n) = Γ(n+α+1)/(n!·Γ(α+1))`; see [`closed_form_coeffs`].
pub fn laguerre_coeffs<T: Scalar>(n: usize, alpha: T, k0: T) -> Result<LadderState<T>> {
    validate_params(&alpha, &k0)?;
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut k0_pow = T::one();
    let mut pows = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        pows.push(k0_pow.clone());
        k0_pow = k0_pow * k0.clone();
    }
    for j in 0..=n {
        let c = generalized_binomial(n, j, &alpha)? * pows[n - j].clone() / factorial::<T>(j);
        coeffs.push(c);
    }
    LadderState::new(alpha, k0, coeffs)
}

/// Closed-form coefficients of the ladder monomial `u_n`:
/// the Laguerre coefficients of [`laguerre_coeffs`] divided by `C(n+α, n)`,
/// i.e. `u_n = n!Γ(α+1)/Γ(n+α+1) · k0ⁿ · L_n^(α)(-Y/k0)` on the chosen basis.
pub fn closed_form_coeffs<T: Scalar>(n: usize, alpha: T, k0: T) -> Result<LadderState<T>> {
    let norm = generalized_binomial(n, 0, &alpha)?;
    let raw = laguerre_coeffs(n, alpha, k0)?;
    Ok(raw.scale(&(T::one() / norm)))
}
