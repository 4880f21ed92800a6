//! Complete-transfer designs: allowed action areas and coupling ratios.
//!
//! Three states with `β = 1` transfer fully from state 1 to state 2 at
//! `A(t₀) = ±√(n₁n₂/2) π/3` when `α = ±√(2/(n₁n₂)) (n₁ − n₂)`, where
//! `n₁ = 2n_o + n_o′` and `n₂ = n_o + 2n_o′` for odd `n_o, n_o′`.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::{CouplingModel, Error, Pulse, Result};

/// Which transfer family a design belongs to, with its quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Two states reaching `P₂ = v²`.
    TwoState { v: f64 },
    /// Three states; `n_o`, `n_o_prime` are `(2n₁ − n₂)/3` and `(2n₂ − n₁)/3`.
    ThreeState { n1: i64, n2: i64, n_o: i64, n_o_prime: i64 },
    /// Reduced symmetric `n`-state system with odd `n0`.
    NStateSym { n: usize, n0: i64 },
}

/// Action area `A(t₀)` and coupling ratios realizing a transfer.
///
/// For two-state designs `alpha` and `beta` are unused and set to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlDesign {
    pub family: Family,
    pub action_area: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sign: i8,
}

impl ControlDesign {
    /// `n_e = n_o + n_o′` for three-state designs.
    pub fn n_e(&self) -> Option<i64> {
        match self.family {
            Family::ThreeState { n_o, n_o_prime, .. } => Some(n_o + n_o_prime),
            _ => None,
        }
    }

    /// The three `(k, k′)` pairings listed alongside each three-state design:
    /// `(n_e, −n_o′)`, `(n_o, n_o′)`, `(−n_o, n_e)`.
    pub fn k_cases(&self) -> Option<[(i64, i64); 3]> {
        match self.family {
            Family::ThreeState { n_o, n_o_prime, .. } => {
                let n_e = n_o + n_o_prime;
                Some([(n_e, -n_o_prime), (n_o, n_o_prime), (-n_o, n_e)])
            }
            _ => None,
        }
    }

    /// Degenerate model realizing the design (all `ε = 0`).
    pub fn model(&self, pulse: Pulse) -> Result<CouplingModel> {
        match self.family {
            Family::TwoState { .. } => Ok(CouplingModel::standard_2state(0.0, 0.0, pulse)),
            Family::ThreeState { .. } => Ok(CouplingModel::standard_3state(self.alpha, self.beta, [0.0; 3], pulse)),
            Family::NStateSym { n, .. } => CouplingModel::symmetric_nstate(n, self.alpha, 0.0, pulse),
        }
    }
}

fn check_sign(sign: i8) -> Result<f64> {
    match sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        s => Err(Error::DomainError(format!("sign must be +1 or -1, got {s}"))),
    }
}

fn invalid(n1: i64, n2: i64, reason: impl Into<String>) -> Error {
    Error::InvalidQuantumNumbers { n1, n2, reason: reason.into() }
}

/// `(n_o, n_o′)` for a valid pair.
fn split_quantum_numbers(n1: i64, n2: i64) -> Result<(i64, i64)> {
    if n1 <= 0 || n2 <= 0 {
        return Err(invalid(n1, n2, "n1 and n2 must be positive"));
    }
    if n1 % 2 == 0 || n2 % 2 == 0 {
        return Err(invalid(n1, n2, "n1 and n2 must be odd"));
    }
    let (a, b) = (2 * n1 - n2, 2 * n2 - n1);
    if a % 3 != 0 || b % 3 != 0 {
        return Err(invalid(n1, n2, format!("(2n1 - n2)/3 = {a}/3 is not an integer")));
    }
    let (n_o, n_o_prime) = (a / 3, b / 3);
    if n_o % 2 == 0 || n_o_prime % 2 == 0 {
        return Err(invalid(n1, n2, format!("n_o = {n_o} and n_o' = {n_o_prime} must be odd")));
    }
    Ok((n_o, n_o_prime))
}

/// Three-state design for quantum numbers `(n₁, n₂)` on the `sign` branch, with `β = 1`.
pub fn design_3state(n1: i64, n2: i64, sign: i8) -> Result<ControlDesign> {
    let s = check_sign(sign)?;
    let (n_o, n_o_prime) = split_quantum_numbers(n1, n2)?;
    let product = (n1 * n2) as f64;
    Ok(ControlDesign {
        family: Family::ThreeState { n1, n2, n_o, n_o_prime },
        action_area: s * (product / 2.0).sqrt() * PI / 3.0,
        alpha: s * (2.0 / product).sqrt() * (n1 - n2) as f64,
        beta: 1.0,
        sign,
    })
}

/// Every positive-branch three-state design with `n₁n₂ ≤ max_product`,
/// sorted by `(n₁n₂, n₁)`.
pub fn enumerate_designs(max_product: i64) -> Vec<ControlDesign> {
    let mut out = Vec::new();
    for n1 in (1..=max_product).step_by(2) {
        for n2 in (1..=max_product / n1).step_by(2) {
            if let Ok(d) = design_3state(n1, n2, 1) {
                out.push(d);
            }
        }
    }
    out.sort_by_key(|d| match d.family {
        Family::ThreeState { n1, n2, .. } => (n1 * n2, n1),
        _ => unreachable!(),
    });
    out
}

/// Reduced `n`-state design: `A(t₀)/π = n₀ √(9 / (18(n−2) + 4(n−3)/(n−2)))`,
/// `α = −(n−3)/3`, `β = 1`.
pub fn design_nstate(n: usize, n0: i64) -> Result<ControlDesign> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if n0 % 2 == 0 {
        return Err(invalid(n as i64, n0, "n0 must be odd"));
    }
    let m = n as f64 - 2.0;
    let q = (n as f64 - 3.0) / m;
    Ok(ControlDesign {
        family: Family::NStateSym { n, n0 },
        action_area: n0 as f64 * PI * (9.0 / (18.0 * m + 4.0 * q)).sqrt(),
        alpha: -(n as f64 - 3.0) / 3.0,
        beta: 1.0,
        sign: if n0 > 0 { 1 } else { -1 },
    })
}

/// Action `asin(v)` at which a two-state system reaches `P₂ = v²`.
pub fn target_2state(v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::DomainError(format!("v must lie in [0, 1], got {v}")));
    }
    Ok(v.asin())
}

/// Two-state design reaching `P₂ = v²`.
pub fn design_2state(v: f64) -> Result<ControlDesign> {
    Ok(ControlDesign {
        family: Family::TwoState { v },
        action_area: target_2state(v)?,
        alpha: 0.0,
        beta: 0.0,
        sign: 1,
    })
}

/// Upper bound `1 / (1 + ((ε₂ − ε₁)/2)²)` on `P₂` for two states.
pub fn max_transfer_bound_2state(eps1: f64, eps2: f64) -> f64 {
    let d = 0.5 * (eps2 - eps1);
    1.0 / (1.0 + d * d)
}

/// Harmonic pulse of frequency `omega` whose action at `T/4` is `A(t₀)`,
/// i.e. `χ = A(t₀) ω`.
pub fn pulse_for_design(design: &ControlDesign, omega: f64) -> Result<Pulse> {
    Pulse::harmonic(design.action_area * omega, omega)
}

/// Three decimals, with negative zero printed as `0.000`.
pub fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Writes `n1n2,n1,n2,ne,no,noprime,A_t0,alpha` rows for three-state designs.
pub fn write_table_csv<W: Write>(designs: &[ControlDesign], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n1n2", "n1", "n2", "ne", "no", "noprime", "A_t0", "alpha"])?;
    for d in designs {
        if let Family::ThreeState { n1, n2, n_o, n_o_prime } = d.family {
            w.write_record([
                (n1 * n2).to_string(),
                n1.to_string(),
                n2.to_string(),
                (n_o + n_o_prime).to_string(),
                n_o.to_string(),
                n_o_prime.to_string(),
                fmt3(d.action_area),
                fmt3(d.alpha),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
