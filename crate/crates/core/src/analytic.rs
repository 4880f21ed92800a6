//! Closed-form amplitudes and probabilities of the degenerate system, plus
//! the special-case formulas for two-state transfer, flat tops, leakage and kicks.

use std::f64::consts::PI;

use crate::{CouplingModel, DressedBasis, Error, Result, Trajectory, C64};

/// `a_k = Σ_j M⁻¹_kj exp(−i z_j A)`.
pub fn amplitudes_at(basis: &DressedBasis, action: f64) -> Vec<C64> {
    let inv = basis.transfer_inverse();
    let phases: Vec<C64> = basis.z().iter().map(|z| C64::from_polar(1.0, -z * action)).collect();
    (0..basis.n())
        .map(|k| (0..basis.n()).map(|j| phases[j] * inv[(k, j)]).sum())
        .collect()
}

/// `P_k = Σ_i Σ_j M⁻¹_ki M⁻¹_kj cos((z_i − z_j) A)`.
pub fn probabilities_at(basis: &DressedBasis, action: f64) -> Vec<f64> {
    let inv = basis.transfer_inverse();
    let z = basis.z();
    let n = basis.n();
    (0..n)
        .map(|k| {
            let mut p = 0.0;
            for i in 0..n {
                p += inv[(k, i)] * inv[(k, i)];
                for j in (i + 1)..n {
                    p += 2.0 * inv[(k, i)] * inv[(k, j)] * ((z[i] - z[j]) * action).cos();
                }
            }
            p
        })
        .collect()
}

/// `Σ_j w_j P_j`.
pub fn closure(probabilities: &[f64], weights: &[f64]) -> f64 {
    probabilities.iter().zip(weights).map(|(p, w)| p * w).sum()
}

/// `(cos²A, sin²A)` for two states with equal diagonals; `ε` only adds a global phase.
pub fn probabilities_2state(_eps: f64, action: f64) -> (f64, f64) {
    let (s, c) = action.sin_cos();
    (c * c, s * s)
}

/// Reduced `n`-state probabilities at `θ = 2π A / A(t₀)` for the designs of
/// [`crate::control::design_nstate`]:
///
/// ```text
/// P₁ = (3 + cos θ + 4 cos(θ/2)) / 8
/// P₂ = (3 + cos θ − 4 cos(θ/2)) / 8
/// P₃ = sin²(θ/2) / (2(n−2))        (each of the n−2 equivalent states)
/// ```
pub fn probabilities_nstate_sym(n: usize, theta: f64) -> Result<(f64, f64, f64)> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let c = theta.cos();
    let h = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    Ok((
        (3.0 + c + 4.0 * h) / 8.0,
        (3.0 + c - 4.0 * h) / 8.0,
        s * s / (2.0 * (n as f64 - 2.0)),
    ))
}

/// Samples [`amplitudes_at`] along `A(t)` of the model's pulse.
pub fn trajectory(model: &CouplingModel, basis: &DressedBasis, times: &[f64]) -> Result<Trajectory> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::DomainError("sample times must be ordered".into()));
    }
    let mut out = Trajectory::empty(model.weights());
    for &t in times {
        let action = model.pulse().action(t)?;
        out.push(t, amplitudes_at(basis, action));
    }
    Ok(out)
}

/// `1 − (π²/16)(ωτ)⁴`, the quartic shape of `P₂` around `t₀ = T/4`.
pub fn flat_top_quartic(omega: f64, tau: f64) -> f64 {
    1.0 - PI * PI / 16.0 * (omega * tau).powi(4)
}

/// `¼(π/2)⁶(ω₂₁/ω)²`, the first-maximum leakage of a two-state system with splitting `ω₂₁`.
pub fn leakage_estimate(omega21: f64, omega: f64) -> f64 {
    0.25 * (0.5 * PI).powi(6) * (omega21 / omega).powi(2)
}

/// Field frequency keeping `P₂ ≥ 1 − p_cr` for a time `t_s` around the maximum:
/// `ω = √(4/π) p_cr^{1/4} / t_s`.
pub fn flatness_frequency(p_cr: f64, t_s: f64) -> Result<f64> {
    if !(p_cr > 0.0 && p_cr <= 1.0) {
        return Err(Error::DomainError(format!("p_cr must lie in (0, 1], got {p_cr}")));
    }
    if !(t_s > 0.0 && t_s.is_finite()) {
        return Err(Error::DomainError(format!("t_s must be positive, got {t_s}")));
    }
    Ok((4.0 / PI).sqrt() * p_cr.powf(0.25) / t_s)
}

/// `(P₁, P₂)` of a two-state system kicked by `(π/2) δ(t − t₀)`.
pub fn delta_kick_response(t: f64, t0: f64) -> (f64, f64) {
    if t >= t0 {
        (0.0, 1.0)
    } else {
        (1.0, 0.0)
    }
}

/// First three derivatives of `f` at `t` by central differences with step `h`.
pub fn central_derivatives<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> [f64; 3] {
    let f2 = f(t + 2.0 * h);
    let f1 = f(t + h);
    let f0 = f(t);
    let m1 = f(t - h);
    let m2 = f(t - 2.0 * h);
    [
        (f1 - m1) / (2.0 * h),
        (f1 - 2.0 * f0 + m1) / (h * h),
        (f2 - 2.0 * f1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
    ]
}
