//! Generalized Laguerre polynomials and the closed forms of the ladder
//! monomials built from them.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::profiles::YProfile;

/// `L_n^(α)(z)` by the three-term recurrence
/// `k·L_k = (2k − 1 + α − z)·L_{k−1} − (k − 1 + α)·L_{k−2}`.
pub fn laguerre_eval<F: Float>(n: usize, alpha: F, z: F) -> F {
    let one = F::one();
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = one + alpha - z;
    for k in 2..=n {
        let kf = F::from(k).expect("index fits in a float");
        let next = ((kf + kf - one + alpha - z) * cur - (kf - one + alpha) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// `d/dz L_n^(α)(z) = −L_{n−1}^(α+1)(z)`.
pub fn laguerre_derivative<F: Float>(n: usize, alpha: F, z: F) -> F {
    if n == 0 {
        F::zero()
    } else {
        -laguerre_eval(n - 1, alpha + F::one(), z)
    }
}

/// `d²/dz² L_n^(α)(z) = L_{n−2}^(α+2)(z)`.
pub fn laguerre_second_derivative<F: Float>(n: usize, alpha: F, z: F) -> F {
    if n < 2 {
        F::zero()
    } else {
        laguerre_eval(n - 2, alpha + F::one() + F::one(), z)
    }
}

/// `z·L'' + (α + 1 − z)·L' + n·L`, zero for the Laguerre polynomial.
pub fn laguerre_ode_residual(n: usize, alpha: f64, z: f64) -> f64 {
    z * laguerre_second_derivative(n, alpha, z)
        + (alpha + 1.0 - z) * laguerre_derivative(n, alpha, z)
        + n as f64 * laguerre_eval(n, alpha, z)
}

/// `n!·Γ(α+1)/Γ(n+α+1) = Π_{m=1}^{n} m/(α+m)`.
pub fn ladder_normalization(n: usize, alpha: f64) -> f64 {
    (1..=n).map(|m| m as f64 / (alpha + m as f64)).product()
}

/// Bare power-law eigenfunction with `x0 = 0`:
/// `u_n = [Γ(1/(q+1))·n!/Γ(n + 1/(q+1))]·k0ⁿ·L_n^(α)(z)`,
/// `α = −q/(q+1)`, `z = −A·x^(q+1)/(k0·(q+1))`.
pub fn closed_form_u_powerlaw(n: usize, q: f64, a: f64, k0: f64, x: f64) -> Result<f64> {
    if !(q > -1.0) {
        return Err(Error::InvalidParameter(format!("q must exceed -1, got {q}")));
    }
    if k0 == 0.0 {
        return Err(Error::InvalidParameter("k0 must be nonzero".into()));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("x = {x} is negative")));
    }
    let alpha = -q / (q + 1.0);
    let z = -a * x.powf(q + 1.0) / (k0 * (q + 1.0));
    Ok(ladder_normalization(n, alpha) * k0.powi(n as i32) * laguerre_eval(n, alpha, z))
}

/// Prefactored eigenfunction `Y'·Y^α·n!Γ(α+1)/Γ(n+α+1)·k0ⁿ·L_n^(α)(−Y/k0)`,
/// the value of `M̂ⁿ(Y'Y^α)`.
pub fn closed_form_u_prefactored(n: usize, alpha: f64, k0: f64, profile: &YProfile, x: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")));
    }
    if k0 == 0.0 {
        return Err(Error::InvalidParameter("k0 must be nonzero".into()));
    }
    if x < profile.x0() {
        return Err(Error::Domain(format!("x = {x} lies below x0 = {}", profile.x0())));
    }
    let y = profile.y(x);
    if alpha < 0.0 && y == 0.0 {
        return Err(Error::SingularPoint { x });
    }
    let power = if alpha == 0.0 { 1.0 } else { y.powf(alpha) };
    Ok(profile.dy(x) * power * ladder_normalization(n, alpha) * k0.powi(n as i32) * laguerre_eval(n, alpha, -y / k0))
}
