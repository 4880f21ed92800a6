//! Interaction structure `V_jk(t) = r_jk V(t)` with bare energies `E_j`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Pulse, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Relative coupling strengths, diagonals, bare energies and the shared pulse.
///
/// A model is either a plain real-symmetric `n × n` system, or the reduced
/// three-row representation of an `n`-state system whose states `3..n`
/// couple identically. The reduced form carries its multiplicity `m = n - 2`;
/// state 3 then stands for each of the `m` equivalent states and the
/// conserved norm is `|a₁|² + |a₂|² + m|a₃|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct CouplingModel {
    r: DMatrix<f64>,
    energies: Vec<f64>,
    pulse: Pulse,
    reduced_multiplicity: Option<usize>,
}

impl CouplingModel {
    /// General constructor; validates shape, symmetry and the reduced layout.
    pub fn new(
        r: DMatrix<f64>,
        energies: Vec<f64>,
        pulse: Pulse,
        reduced_multiplicity: Option<usize>,
    ) -> Result<Self> {
        let n = r.nrows();
        if n < 2 || r.ncols() != n {
            return Err(Error::InvalidModel(format!("r must be square with n >= 2, got {}x{}", r.nrows(), r.ncols())));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("r must be finite".into()));
        }
        if energies.len() != n || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidModel(format!("expected {n} finite energies, got {}", energies.len())));
        }
        let close = |a: f64, b: f64| (a - b).abs() <= SYMMETRY_TOL * (1.0 + a.abs().max(b.abs()));
        match reduced_multiplicity {
            None => {
                for j in 0..n {
                    for k in (j + 1)..n {
                        if !close(r[(j, k)], r[(k, j)]) {
                            return Err(Error::InvalidModel(format!("r is not symmetric at ({j}, {k})")));
                        }
                    }
                }
            }
            Some(m) => {
                if n != 3 || m < 1 {
                    return Err(Error::InvalidModel(format!("reduced representation needs n = 3 and multiplicity >= 1 (n = {n}, m = {m})")));
                }
                let mf = m as f64;
                if !close(r[(0, 1)], r[(1, 0)]) || !close(r[(0, 2)], mf * r[(2, 0)]) || !close(r[(1, 2)], mf * r[(2, 1)]) {
                    return Err(Error::InvalidModel(format!("r does not have the reduced layout for multiplicity {m}")));
                }
            }
        }
        Ok(Self { r, energies, pulse, reduced_multiplicity })
    }

    /// Two states with `V₁₂ = V₂₁ = V` and `V_jj = ε_j V`.
    pub fn standard_2state(eps1: f64, eps2: f64, pulse: Pulse) -> Self {
        let r = DMatrix::from_row_slice(2, 2, &[eps1, 1.0, 1.0, eps2]);
        Self { r, energies: vec![0.0; 2], pulse, reduced_multiplicity: None }
    }

    /// Three states with `V₁₂ = αV`, `V₁₃ = βV`, `V₂₃ = V`, `V_jj = ε_j V`.
    pub fn standard_3state(alpha: f64, beta: f64, eps: [f64; 3], pulse: Pulse) -> Self {
        #[rustfmt::skip]
        let r = DMatrix::from_row_slice(3, 3, &[
            eps[0], alpha, beta,
            alpha, eps[1], 1.0,
            beta, 1.0, eps[2],
        ]);
        Self { r, energies: vec![0.0; 3], pulse, reduced_multiplicity: None }
    }

    /// Reduced three-row form of an `n`-state system with `β = γ = 1`:
    ///
    /// ```text
    /// ( ε  α  (n-2)           )
    /// ( α  ε  (n-2)           )
    /// ( 1  1  ε + (n-3)/(n-2) )
    /// ```
    pub fn symmetric_nstate(n: usize, alpha: f64, eps: f64, pulse: Pulse) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        let m = (n - 2) as f64;
        let q = (n as f64 - 3.0) / m;
        #[rustfmt::skip]
        let r = DMatrix::from_row_slice(3, 3, &[
            eps, alpha, m,
            alpha, eps, m,
            1.0, 1.0, eps + q,
        ]);
        Ok(Self { r, energies: vec![0.0; 3], pulse, reduced_multiplicity: Some(n - 2) })
    }

    /// Replaces the bare energies (honoured only by the numeric integrator).
    pub fn with_energies(mut self, energies: Vec<f64>) -> Result<Self> {
        if energies.len() != self.n() || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidModel(format!("expected {} finite energies", self.n())));
        }
        self.energies = energies;
        Ok(self)
    }

    pub fn with_pulse(mut self, pulse: Pulse) -> Self {
        self.pulse = pulse;
        self
    }

    pub fn n(&self) -> usize {
        self.r.nrows()
    }

    /// Relative strength matrix `r` (the `W` of `i ȧ = V(t) W a`).
    pub fn strength(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Diagonal `ε_j = r_jj`.
    pub fn eps(&self) -> Vec<f64> {
        self.r.diagonal().iter().copied().collect()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn is_degenerate(&self) -> bool {
        self.energies.iter().all(|&e| e == self.energies[0])
    }

    pub fn pulse(&self) -> &Pulse {
        &self.pulse
    }

    pub fn reduced_multiplicity(&self) -> Option<usize> {
        self.reduced_multiplicity
    }

    /// Weights of `|a_j|²` in the conserved norm.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![1.0; self.n()];
        if let Some(m) = self.reduced_multiplicity {
            w[2] = m as f64;
        }
        w
    }

    /// Instantaneous coupling matrix `V_jk(t) = r_jk V(t)`.
    pub fn coupling_at(&self, t: f64) -> Result<DMatrix<f64>> {
        let v = self.pulse.envelope_value(t)?;
        Ok(&self.r * v)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    n: usize,
    r: Vec<Vec<f64>>,
    eps: Vec<f64>,
    energies: Vec<f64>,
    pulse: Pulse,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reduced_multiplicity: Option<usize>,
}

impl TryFrom<ModelDoc> for CouplingModel {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        let n = doc.n;
        if doc.r.len() != n || doc.r.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidModel(format!("r must have {n} rows of {n} entries")));
        }
        let flat: Vec<f64> = doc.r.into_iter().flatten().collect();
        let model = CouplingModel::new(DMatrix::from_row_slice(n, n, &flat), doc.energies, doc.pulse, doc.reduced_multiplicity)?;
        let eps = model.eps();
        if doc.eps.len() != n || doc.eps.iter().zip(&eps).any(|(a, b)| (a - b).abs() > SYMMETRY_TOL * (1.0 + b.abs())) {
            return Err(Error::InvalidModel("eps must equal the diagonal of r".into()));
        }
        Ok(model)
    }
}

impl From<CouplingModel> for ModelDoc {
    fn from(m: CouplingModel) -> Self {
        let n = m.n();
        let r = (0..n).map(|j| (0..n).map(|k| m.r[(j, k)]).collect()).collect();
        ModelDoc {
            n,
            r,
            eps: m.eps(),
            energies: m.energies,
            pulse: m.pulse,
            reduced_multiplicity: m.reduced_multiplicity,
        }
    }
}
