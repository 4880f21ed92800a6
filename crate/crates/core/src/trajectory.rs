//! Sampled amplitudes and probabilities along a time grid.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Amplitudes `a_j(t)` and probabilities `P_j(t)` at each sample time.
///
/// `closure[i] = Σ_j weights[j] P_j(t_i)`; the weights are 1 except for the
/// third state of a reduced model, which counts `m` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub amplitudes: Vec<Vec<C64>>,
    pub probabilities: Vec<Vec<f64>>,
    pub closure: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Trajectory {
    pub fn empty(weights: Vec<f64>) -> Self {
        Self {
            times: Vec::new(),
            amplitudes: Vec::new(),
            probabilities: Vec::new(),
            closure: Vec::new(),
            weights,
        }
    }

    /// Appends a sample; probabilities and closure are derived from `a`.
    pub fn push(&mut self, t: f64, a: Vec<C64>) {
        let p: Vec<f64> = a.iter().map(|c| c.norm_sqr()).collect();
        self.closure.push(p.iter().zip(&self.weights).map(|(p, w)| p * w).sum());
        self.times.push(t);
        self.amplitudes.push(a);
        self.probabilities.push(p);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of states per sample.
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// `max_i |closure_i − 1|`, or 0 for an empty trajectory.
    pub fn closure_max_err(&self) -> f64 {
        self.closure.iter().fold(0.0_f64, |m, c| m.max((c - 1.0).abs()))
    }

    /// Probabilities of state `j` (zero-based) over time.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.probabilities.iter().map(|p| p[j]).collect()
    }

    /// Index of the sample nearest to `t`.
    pub fn nearest(&self, t: f64) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| {
            (self.times[a] - t).abs().partial_cmp(&(self.times[b] - t).abs()).unwrap()
        })
    }

    /// Writes `t,P1,…,Pn[,closure]` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W, with_closure: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.n()).map(|j| format!("P{j}")));
        if with_closure {
            header.push("closure".into());
        }
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![fmt17(self.times[i])];
            row.extend(self.probabilities[i].iter().map(|&p| fmt17(p)));
            if with_closure {
                row.push(fmt17(self.closure[i]));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(Error::from)
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
