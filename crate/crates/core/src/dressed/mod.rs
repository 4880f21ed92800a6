//! Dressed-state decomposition.
//!
//! A dressed combination `c = Σ_j x_j a_j` obeys `i ċ = z V(t) c` exactly when
//! `xᵀ W = z xᵀ`, i.e. `x` is a left eigenvector of the strength matrix `W`.
//! Rows are normalized so `x_1 = 1` (the initial state is `a = e₁`, hence
//! `c_i(0) = 1` and `c_i(t) = exp(-i z_i A(t))`). Stacking the rows gives the
//! transfer matrix `M`; amplitudes follow from `a = M⁻¹ c`.
//!
//! Every basis is ordered by descending `z`.

pub mod cubic;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{CouplingModel, Error, Result};

/// Minimum spacing between dressed eigenvalues.
pub const SPECTRUM_GAP_TOL: f64 = 1e-9;
/// `|det M|` at or below this is singular.
pub const SINGULAR_DET_TOL: f64 = 1e-12;
/// A leading eigen-row component at or below this (relative) cannot be scaled to 1.
pub const FIRST_COMPONENT_TOL: f64 = 1e-12;
/// Largest dimension handled.
pub const MAX_DIMENSION: usize = 64;

/// Eigen-rows `x_ij`, eigenvalues `z_i`, the transfer matrix and its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedBasis {
    m: DMatrix<f64>,
    z: Vec<f64>,
    m_inv: DMatrix<f64>,
    det: f64,
}

impl DressedBasis {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Eigen-rows; row `i` is `(1, x_i2, …, x_in)`. Same as [`transfer`](Self::transfer).
    pub fn x(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// `M` with `c_i = Σ_j M_ij a_j`.
    pub fn transfer(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn transfer_inverse(&self) -> &DMatrix<f64> {
        &self.m_inv
    }

    /// `Δ = det M`.
    pub fn det(&self) -> f64 {
        self.det
    }

    /// Largest `|xᵢᵀW − zᵢxᵢᵀ|` entry.
    pub fn eigen_residual(&self, w: &DMatrix<f64>) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n() {
            let row = self.m.row(i);
            let lhs = &row * w;
            for k in 0..self.n() {
                worst = worst.max((lhs[k] - self.z[i] * row[k]).abs());
            }
        }
        worst
    }

    /// Largest `|(M M⁻¹ − I)_jk|`.
    pub fn inverse_residual(&self) -> f64 {
        let prod = &self.m * &self.m_inv;
        let n = self.n();
        (&prod - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// Sorts rows by descending `z`, checks the spectrum gap and finishes the
    /// inverse. `inverse` and `det`, when supplied, belong to the unsorted order.
    fn assemble(rows: Vec<Vec<f64>>, z: Vec<f64>, inverse: Option<(DMatrix<f64>, f64)>) -> Result<Self> {
        let n = z.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| z[b].partial_cmp(&z[a]).expect("finite eigenvalues"));

        let gap = order.windows(2).map(|w| z[w[0]] - z[w[1]]).fold(f64::INFINITY, f64::min);
        if gap <= SPECTRUM_GAP_TOL {
            return Err(Error::DegenerateSpectrum(gap));
        }

        let m = DMatrix::from_fn(n, n, |i, j| rows[order[i]][j]);
        let z_sorted: Vec<f64> = order.iter().map(|&i| z[i]).collect();

        let (m_inv, det) = match inverse {
            Some((inv, det)) => {
                // M' = P M  ⇒  M'⁻¹ = M⁻¹ Pᵀ
                let inv_sorted = DMatrix::from_fn(n, n, |r, c| inv[(r, order[c])]);
                (inv_sorted, det * permutation_sign(&order))
            }
            None => {
                let lu = m.clone().lu();
                let det = lu.determinant();
                if !(det.abs() > SINGULAR_DET_TOL) {
                    return Err(Error::SingularTransfer(det));
                }
                let inv = lu.try_inverse().ok_or(Error::SingularTransfer(det))?;
                (inv, det)
            }
        };
        if !(det.abs() > SINGULAR_DET_TOL) {
            return Err(Error::SingularTransfer(det));
        }
        Ok(Self { m, z: z_sorted, m_inv, det })
    }
}

fn permutation_sign(order: &[usize]) -> f64 {
    let mut seen = vec![false; order.len()];
    let mut sign = 1.0;
    for start in 0..order.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = order[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Closed form for two states with diagonals `ε₁, ε₂`.
pub fn decompose_2state(eps1: f64, eps2: f64) -> Result<DressedBasis> {
    let half_split = 0.5 * (eps2 - eps1);
    let root = (1.0 + half_split * half_split).sqrt();
    let mean = 0.5 * (eps1 + eps2);
    let (x1, x2) = (half_split + root, half_split - root);
    let rows = vec![vec![1.0, x1], vec![1.0, x2]];
    let z = vec![mean + root, mean - root];
    let det = x2 - x1;
    let inv = DMatrix::from_row_slice(2, 2, &[x2 / det, -x1 / det, -1.0 / det, 1.0 / det]);
    DressedBasis::assemble(rows, z, Some((inv, det)))
}

/// Coefficients `[c₃, c₂, c₁, c₀]` of the three-state cubic in `x = x₂`.
pub fn cubic_coefficients(alpha: f64, beta: f64, eps: [f64; 3]) -> [f64; 4] {
    let [e1, e2, e3] = eps;
    let (a, b) = (alpha, beta);
    [
        (a * a - b * b) + a * b * (e3 - e2),
        b * (2.0 - a * a - b * b) + a * (2.0 * e1 - e2 - e3) + b * (e1 - e2) * (e3 - e2),
        (2.0 * b * b - a * a - 1.0) + a * b * (2.0 * e2 - e1 - e3) + (e1 - e2) * (e1 - e3),
        b * (a * a - 1.0) - a * (e1 - e3),
    ]
}

/// Relative residual of `x` in the three-state cubic.
pub fn cubic_residual(alpha: f64, beta: f64, eps: [f64; 3], x: f64) -> f64 {
    cubic::relative_residual(&cubic_coefficients(alpha, beta, eps), x)
}

/// Closed form for the three-state model of [`CouplingModel::standard_3state`].
///
/// The `x` roots come from the cubic; `y = (α(x²−1) + (ε₁−ε₂)x)/(1−βx)`.
/// Where `1 − βx` vanishes the formula is `0/0` (two rows share `x`) and
/// `y` is taken from the matching left eigenvector instead.
pub fn decompose_3state(alpha: f64, beta: f64, eps: [f64; 3]) -> Result<DressedBasis> {
    let c = cubic_coefficients(alpha, beta, eps);
    let scale = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(c[0].abs() > FIRST_COMPONENT_TOL * scale) {
        return Err(Error::FirstComponentZero);
    }
    let roots = cubic::real_roots(c);
    let [e1, e2, _] = eps;

    let mut matrix_rows: Option<Vec<(f64, Vec<f64>)>> = None;
    let mut used = [false; 3];
    let mut rows = Vec::with_capacity(3);
    let mut z = Vec::with_capacity(3);
    for &x in &roots {
        let denom = 1.0 - beta * x;
        let y = if denom.abs() > 1e-6 * (1.0 + (beta * x).abs()) {
            (alpha * (x * x - 1.0) + (e1 - e2) * x) / denom
        } else {
            let candidates = match &mut matrix_rows {
                Some(c) => c,
                slot @ None => {
                    let w = standard_3state_matrix(alpha, beta, eps);
                    slot.insert(normalized_left_rows(&w, None)?)
                }
            };
            let (idx, _) = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, (_, row))| (i, (row[1] - x).abs()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .expect("three candidate rows");
            used[idx] = true;
            candidates[idx].1[2]
        };
        z.push(e1 + alpha * x + beta * y);
        rows.push(vec![1.0, x, y]);
    }

    let (x1, x2, x3) = (rows[0][1], rows[1][1], rows[2][1]);
    let (y1, y2, y3) = (rows[0][2], rows[1][2], rows[2][2]);
    let det = x1 * y2 + x2 * y3 + x3 * y1 - x1 * y3 - x2 * y1 - x3 * y2;
    if !(det.abs() > SINGULAR_DET_TOL) {
        // Check the gap first so coincident eigenvalues report as such.
        let mut zs = z.clone();
        zs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let gap = zs.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        if gap <= SPECTRUM_GAP_TOL {
            return Err(Error::DegenerateSpectrum(gap));
        }
        return Err(Error::SingularTransfer(det));
    }
    #[rustfmt::skip]
    let adj = DMatrix::from_row_slice(3, 3, &[
        x2 * y3 - x3 * y2, x3 * y1 - x1 * y3, x1 * y2 - x2 * y1,
        y2 - y3,           y3 - y1,           y1 - y2,
        x3 - x2,           x1 - x3,           x2 - x1,
    ]);
    DressedBasis::assemble(rows, z, Some((adj / det, det)))
}

fn standard_3state_matrix(alpha: f64, beta: f64, eps: [f64; 3]) -> DMatrix<f64> {
    #[rustfmt::skip]
    let w = DMatrix::from_row_slice(3, 3, &[
        eps[0], alpha, beta,
        alpha, eps[1], 1.0,
        beta, 1.0, eps[2],
    ]);
    w
}

/// Closed form for the reduced symmetric `n`-state model of
/// [`CouplingModel::symmetric_nstate`].
///
/// Rows are `(1, 1, y₊)`, `(1, 1, y₋)`, `(1, −1, 0)` with
/// `y± = ½(q − α ± √((α − q)² + 8(n−2)))`, `q = (n−3)/(n−2)`, and
/// `z = (ε + α + y₊, ε + α + y₋, ε − α)`.
pub fn decompose_symmetric_nstate(n: usize, alpha: f64, eps: f64) -> Result<DressedBasis> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let (yp, ym) = symmetric_nstate_y(n, alpha);
    let rows = vec![vec![1.0, 1.0, yp], vec![1.0, 1.0, ym], vec![1.0, -1.0, 0.0]];
    let z = vec![eps + alpha + yp, eps + alpha + ym, eps - alpha];
    let d = yp - ym;
    let s = 1.0 / (2.0 * d);
    #[rustfmt::skip]
    let inv = DMatrix::from_row_slice(3, 3, &[
        -ym * s, yp * s,  0.5,
        -ym * s, yp * s, -0.5,
        2.0 * s, -2.0 * s, 0.0,
    ]);
    // det of the rows above: -2 (y₊ - y₋)
    DressedBasis::assemble(rows, z, Some((inv, -2.0 * d)))
}

/// `(y₊, y₋)` for the reduced symmetric model.
pub fn symmetric_nstate_y(n: usize, alpha: f64) -> (f64, f64) {
    let m = n as f64 - 2.0;
    let q = (n as f64 - 3.0) / m;
    let b = alpha - q;
    let root = (b * b + 8.0 * m).sqrt();
    (0.5 * (-b + root), 0.5 * (-b - root))
}

/// Matrix path for any model: left eigenpairs of `W`, rows scaled to `x₁ = 1`,
/// each eigenvalue refined by Newton iteration on `det(W − zI)`.
pub fn decompose_general(model: &CouplingModel) -> Result<DressedBasis> {
    let w = model.strength();
    if w.nrows() > MAX_DIMENSION {
        return Err(Error::DomainError(format!("dimension {} exceeds {MAX_DIMENSION}", w.nrows())));
    }
    let pairs = normalized_left_rows(w, model.reduced_multiplicity())?;
    let (z, rows): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().map(|(z, row)| (refine_eigenvalue(w, z), row)).unzip();
    DressedBasis::assemble(rows, z, None)
}

/// Left eigenpairs `(z, x)` of `W`, unnormalized.
///
/// The reduced model is similar to a symmetric matrix through
/// `S = diag(1, 1, √m)`: `Ŵ = S W S⁻¹` is symmetric and `x = S u` for each
/// eigenvector `u` of `Ŵ`.
pub(crate) fn left_eigenpairs(w: &DMatrix<f64>, multiplicity: Option<usize>) -> Vec<(f64, DVector<f64>)> {
    let n = w.nrows();
    let mut s = vec![1.0; n];
    if let Some(m) = multiplicity {
        s[2] = (m as f64).sqrt();
    }
    let sym = DMatrix::from_fn(n, n, |j, k| {
        let a = s[j] * w[(j, k)] / s[k];
        let b = s[k] * w[(k, j)] / s[j];
        0.5 * (a + b)
    });
    let eig = SymmetricEigen::new(sym);
    (0..n)
        .map(|i| {
            let u = eig.eigenvectors.column(i);
            let x = DVector::from_fn(n, |j, _| s[j] * u[j]);
            (eig.eigenvalues[i], x)
        })
        .collect()
}

fn normalized_left_rows(w: &DMatrix<f64>, multiplicity: Option<usize>) -> Result<Vec<(f64, Vec<f64>)>> {
    left_eigenpairs(w, multiplicity)
        .into_iter()
        .map(|(z, x)| {
            let lead = x[0];
            if !(lead.abs() > FIRST_COMPONENT_TOL * x.amax()) {
                return Err(Error::FirstComponentZero);
            }
            Ok((z, x.iter().map(|v| v / lead).collect()))
        })
        .collect()
}

/// Newton iteration `z ← z + 1/tr((W − zI)⁻¹)` on the characteristic polynomial.
fn refine_eigenvalue(w: &DMatrix<f64>, z0: f64) -> f64 {
    let n = w.nrows();
    let scale = w.amax().max(1.0);
    let mut z = z0;
    for _ in 0..6 {
        let shifted = w - DMatrix::<f64>::identity(n, n) * z;
        let Some(inv) = shifted.lu().try_inverse() else { break };
        let trace = inv.trace();
        if !trace.is_finite() || trace == 0.0 {
            break;
        }
        let step = 1.0 / trace;
        // stay on the root we started from
        if (z + step - z0).abs() > 1e-8 * scale {
            break;
        }
        z += step;
        if step.abs() <= 1e-12 * scale {
            break;
        }
    }
    z
}

/// Picks the closed form matching the model's layout, else the matrix path.
///
/// Two states use [`decompose_2state`]; three plain states with `r₂₃ = 1`
/// use [`decompose_3state`]; a reduced model with a uniform diagonal uses
/// [`decompose_symmetric_nstate`].
pub fn decompose(model: &CouplingModel) -> Result<DressedBasis> {
    let r = model.strength();
    let eps = model.eps();
    match (model.n(), model.reduced_multiplicity()) {
        (2, None) => decompose_2state(eps[0], eps[1]),
        (3, None) if r[(1, 2)] == 1.0 => decompose_3state(r[(0, 1)], r[(0, 2)], [eps[0], eps[1], eps[2]]),
        (3, Some(m)) => {
            let n = m + 2;
            let q = (n as f64 - 3.0) / m as f64;
            let uniform = eps[0] == eps[1] && (eps[2] - q - eps[0]).abs() <= 1e-12 * (1.0 + eps[0].abs());
            if uniform && r[(2, 0)] == 1.0 && r[(2, 1)] == 1.0 {
                decompose_symmetric_nstate(n, r[(0, 1)], eps[0])
            } else {
                decompose_general(model)
            }
        }
        _ => decompose_general(model),
    }
}

/// Largest `|z|` of a model's strength matrix.
pub fn spectral_radius(model: &CouplingModel) -> f64 {
    left_eigenpairs(model.strength(), model.reduced_multiplicity())
        .iter()
        .fold(0.0_f64, |m, (z, _)| m.max(z.abs()))
}
