//! Fixed-step RK4 integration of `i ȧ_j = E_j a_j + Σ_k r_jk V(t) a_k`,
//! used as a reference for the closed forms and to measure leakage when the
//! bare energies differ.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{amplitudes_at, leakage_estimate, probabilities_at};
use crate::dressed::{decompose, left_eigenpairs};
use crate::{CouplingModel, Error, Pulse, Result, Trajectory, C64};

/// Samples per fastest period required by [`max_stable_dt`].
pub const SAMPLES_PER_PERIOD: f64 = 200.0;

/// Step size, end time and output options for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Rescale to unit (weighted) norm after every step.
    pub renormalize: bool,
    /// Keep every `stride`-th step (the final step is always kept).
    pub stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, t_end, renormalize: false, stride: 1 }
    }

    /// Largest step whose grid lands exactly on `t_end`.
    pub fn fitted(max_dt: f64, t_end: f64) -> Self {
        let steps = (t_end / max_dt).ceil().max(1.0);
        Self::new(t_end / steps, t_end)
    }
}

/// Largest allowed step: `1/200` of the shorter of the carrier period and
/// `2π/(ρ max|V| + max|E_j|)`, where `ρ` is the spectral radius of `r`.
pub fn max_stable_dt(model: &CouplingModel) -> f64 {
    let mut shortest = f64::INFINITY;
    if let Some(omega) = model.pulse().omega() {
        shortest = shortest.min(2.0 * PI / omega);
    }
    let rho = left_eigenpairs(model.strength(), model.reduced_multiplicity())
        .iter()
        .fold(0.0_f64, |m, (z, _)| m.max(z.abs()));
    let e_max = model.energies().iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let rate = rho * model.pulse().peak_magnitude() + e_max;
    if rate > 0.0 {
        shortest = shortest.min(2.0 * PI / rate);
    }
    shortest / SAMPLES_PER_PERIOD
}

struct System<'a> {
    r: Vec<f64>,
    energies: &'a [f64],
    pulse: &'a Pulse,
    n: usize,
}

impl System<'_> {
    /// `ȧ = −i (E a + V r a)` with `V` taken from the piece containing `mid`.
    fn rhs(&self, t: f64, mid: f64, a: &[C64], out: &mut [C64]) {
        let v = self.pulse.piece_value(t, mid);
        for j in 0..self.n {
            let mut acc = a[j] * self.energies[j];
            let row = &self.r[j * self.n..(j + 1) * self.n];
            for k in 0..self.n {
                acc += a[k] * (row[k] * v);
            }
            out[j] = C64::new(acc.im, -acc.re);
        }
    }

    fn rk4(&self, t: f64, h: f64, a: &mut [C64], work: &mut [Vec<C64>; 5]) {
        let mid = t + 0.5 * h;
        let [k1, k2, k3, k4, tmp] = work;
        self.rhs(t, mid, a, k1);
        for j in 0..self.n {
            tmp[j] = a[j] + k1[j] * (0.5 * h);
        }
        self.rhs(mid, mid, tmp, k2);
        for j in 0..self.n {
            tmp[j] = a[j] + k2[j] * (0.5 * h);
        }
        self.rhs(mid, mid, tmp, k3);
        for j in 0..self.n {
            tmp[j] = a[j] + k3[j] * h;
        }
        self.rhs(t + h, mid, tmp, k4);
        for j in 0..self.n {
            a[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
        }
    }
}

/// Integrates from `a(0) = e₁` on the grid `t_i = min(i dt, t_end)`.
///
/// A step that straddles a pulse breakpoint is split there so each RK4
/// sub-step sees one smooth piece of the envelope.
pub fn integrate(model: &CouplingModel, config: &IntegratorConfig) -> Result<Trajectory> {
    let pulse = model.pulse();
    if matches!(pulse, Pulse::DeltaKick { .. }) {
        return Err(Error::PointwiseUndefined);
    }
    let IntegratorConfig { dt, t_end, renormalize, stride } = *config;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::DomainError(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::DomainError(format!("t_end must be >= 0, got {t_end}")));
    }
    if stride == 0 {
        return Err(Error::DomainError("stride must be at least 1".into()));
    }
    let max_dt = max_stable_dt(model);
    // allow for rounding when dt was computed as t_end / steps
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::UnresolvedTimescale { dt, max_dt });
    }

    let n = model.n();
    let w = model.strength();
    let system = System {
        r: (0..n * n).map(|i| w[(i / n, i % n)]).collect(),
        energies: model.energies(),
        pulse,
        n,
    };
    let weights = model.weights();
    let breakpoints = pulse.breakpoints();

    let mut a = vec![C64::new(0.0, 0.0); n];
    a[0] = C64::new(1.0, 0.0);
    let mut work: [Vec<C64>; 5] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n]);
    let mut out = Trajectory::empty(weights.clone());
    out.push(0.0, a.clone());

    let steps = if t_end == 0.0 { 0 } else { (t_end / dt * (1.0 - 1e-12)).ceil() as usize };
    let mut t = 0.0;
    for i in 1..=steps {
        let t_next = (i as f64 * dt).min(t_end);
        let mut s = t;
        for &b in breakpoints.iter().filter(|&&b| b > t && b < t_next) {
            system.rk4(s, b - s, &mut a, &mut work);
            s = b;
        }
        system.rk4(s, t_next - s, &mut a, &mut work);
        if renormalize {
            let norm: f64 = a.iter().zip(&weights).map(|(c, w)| c.norm_sqr() * w).sum();
            let scale = norm.sqrt().recip();
            a.iter_mut().for_each(|c| *c *= scale);
        }
        t = t_next;
        if i % stride == 0 || i == steps {
            out.push(t, a.clone());
        }
    }
    Ok(out)
}

/// Largest `|P_j^a − P_j^b|` over samples and states of two trajectories on one grid.
pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.len() != b.len() || a.n() != b.n() {
        return Err(Error::GridMismatch);
    }
    let same_grid = a
        .times
        .iter()
        .zip(&b.times)
        .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0));
    if !same_grid {
        return Err(Error::GridMismatch);
    }
    let mut worst = 0.0_f64;
    for (pa, pb) in a.probabilities.iter().zip(&b.probabilities) {
        for (x, y) in pa.iter().zip(pb) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

/// Numeric trajectory and the degenerate closed form sampled on the same grid.
pub fn numeric_and_analytic(model: &CouplingModel, config: &IntegratorConfig) -> Result<(Trajectory, Trajectory)> {
    let numeric = integrate(model, config)?;
    let basis = decompose(model)?;
    let analytic = crate::analytic::trajectory(model, &basis, &numeric.times)?;
    Ok((numeric, analytic))
}

/// One row of a leakage scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakagePoint {
    /// `ω / ω₂₁` (infinite for `ω₂₁ = 0`).
    pub ratio: f64,
    pub omega21: f64,
    /// `1 − P₂(t₀)` from the integrator.
    pub deficit: f64,
    /// `|a₂(t₀) − a₂^{deg}(t₀)|²` against the degenerate closed form.
    pub delta_a2_sq: f64,
    /// `¼(π/2)⁶(ω₂₁/ω)²`.
    pub estimate: f64,
}

/// Two-state models with `ε = 0`, `χ = (π/2) ω` and energies `(0, ω₂₁)`.
pub fn two_state_leakage_family(omega: f64) -> impl Fn(f64) -> Result<CouplingModel> + Sync {
    move |omega21| {
        let pulse = Pulse::harmonic(FRAC_PI_2 * omega, omega)?;
        CouplingModel::standard_2state(0.0, 0.0, pulse).with_energies(vec![0.0, omega21])
    }
}

/// For each `ω/ω₂₁` in `ratios`, integrates `family(ω₂₁)` to `t₀ = π/(2ω)` and
/// measures the shortfall of `P₂`. Points come back in input order.
///
/// `steps` is the number of RK4 steps up to `t₀`.
pub fn leakage_scan<F>(family: F, omega: f64, ratios: &[f64], steps: usize) -> Result<Vec<LeakagePoint>>
where
    F: Fn(f64) -> Result<CouplingModel> + Sync,
{
    if !(omega > 0.0) {
        return Err(Error::DomainError(format!("omega must be positive, got {omega}")));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::DomainError(format!("ratios must be positive, got {r}")));
    }
    let t0 = FRAC_PI_2 / omega;
    ratios
        .par_iter()
        .map(|&ratio| {
            let omega21 = if ratio.is_infinite() { 0.0 } else { omega / ratio };
            let model = family(omega21)?;
            let config = IntegratorConfig::new(t0 / steps.max(1) as f64, t0);
            let traj = integrate(&model, &config)?;
            let a_num = traj.amplitudes.last().expect("at least one sample");
            let p2 = traj.probabilities.last().expect("at least one sample")[1];
            let basis = decompose(&model)?;
            let a_deg = amplitudes_at(&basis, model.pulse().action(t0)?);
            Ok(LeakagePoint {
                ratio,
                omega21,
                deficit: 1.0 - p2,
                delta_a2_sq: (a_num[1] - a_deg[1]).norm_sqr(),
                estimate: leakage_estimate(omega21, omega),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// One row of a kick scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KickPoint {
    pub width: f64,
    /// `P₂` just after the rectangle ends.
    pub p2_final: f64,
    /// `P₂` of the ideal kick, from the closed form at action `A₀`.
    pub p2_ideal: f64,
}

/// Replaces the model's pulse by rectangles of area `a0` centred on `t0` and
/// integrates past each one with step `dt`.
pub fn kick_convergence(model: &CouplingModel, a0: f64, t0: f64, widths: &[f64], dt: f64) -> Result<Vec<KickPoint>> {
    let p2_ideal = probabilities_at(&decompose(model)?, a0)[1];
    widths
        .par_iter()
        .map(|&width| {
            if dt > width / 50.0 {
                return Err(Error::UnresolvedTimescale { dt, max_dt: width / 50.0 });
            }
            if t0 - 0.5 * width < 0.0 {
                return Err(Error::DomainError(format!("kick of width {width} at t0 = {t0} starts before t = 0")));
            }
            let kicked = model.clone().with_pulse(Pulse::rect_kick(a0, t0, width)?);
            let t_end = t0 + width;
            let config = IntegratorConfig { stride: usize::MAX, ..IntegratorConfig::fitted(dt, t_end) };
            let traj = integrate(&kicked, &config)?;
            Ok(KickPoint {
                width,
                p2_final: traj.probabilities.last().expect("final sample")[1],
                p2_ideal,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn fig1(omega: f64) -> CouplingModel {
        CouplingModel::standard_2state(0.0, 0.0, Pulse::harmonic(FRAC_PI_2 * omega, omega).unwrap())
    }

    #[test]
    fn zero_length_run() {
        let t = integrate(&fig1(1.0), &IntegratorConfig::new(1e-3, 0.0)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.probabilities[0], vec![1.0, 0.0]);
    }

    #[test]
    fn grid_ends_on_t_end() {
        let t = integrate(&fig1(1.0), &IntegratorConfig::new(0.003, 0.01)).unwrap();
        assert_eq!(t.times.len(), 5);
        assert_eq!(*t.times.last().unwrap(), 0.01);
        let fitted = IntegratorConfig::fitted(0.003, 0.01);
        assert_eq!(integrate(&fig1(1.0), &fitted).unwrap().len(), 5);
    }

    #[test]
    fn two_state_complete_transfer() {
        let omega = 1.0;
        let period = 2.0 * PI / omega;
        let config = IntegratorConfig::new(period / 2000.0, period);
        let (num, ana) = numeric_and_analytic(&fig1(omega), &config).unwrap();
        assert!(compare(&num, &ana).unwrap() <= 1e-6);
        let i = num.nearest(0.25 * period).unwrap();
        assert!((num.times[i] - 0.25 * period).abs() < 1e-12);
        assert!((num.probabilities[i][1] - 1.0).abs() <= 1e-6);
        assert!(num.closure_max_err() <= 1e-8);
    }

    #[test]
    fn delta_kick_is_refused() {
        let m = CouplingModel::standard_2state(0.0, 0.0, Pulse::delta_kick(1.0, 1.0).unwrap());
        assert!(matches!(integrate(&m, &IntegratorConfig::new(1e-3, 2.0)), Err(Error::PointwiseUndefined)));
    }

    #[test]
    fn coarse_step_is_refused() {
        let m = fig1(1.0);
        let max_dt = max_stable_dt(&m);
        assert!((max_dt - 4.0 / 200.0).abs() < 1e-15);
        assert!(matches!(
            integrate(&m, &IntegratorConfig::new(2.0 * max_dt, 1.0)),
            Err(Error::UnresolvedTimescale { .. })
        ));
        let energetic = m.with_energies(vec![0.0, 1e4]).unwrap();
        assert!((max_stable_dt(&energetic) - 2.0 * PI / (1e4 + FRAC_PI_2) / 200.0).abs() < 1e-18);
    }

    #[test]
    fn renormalization_pins_the_norm() {
        let mut config = IntegratorConfig::new(0.01, 20.0);
        config.renormalize = true;
        let t = integrate(&fig1(1.0), &config).unwrap();
        assert!(t.closure_max_err() <= 1e-14);
    }

    #[test]
    fn stride_thins_output() {
        let config = IntegratorConfig { stride: 10, ..IntegratorConfig::new(0.01, 1.0) };
        let t = integrate(&fig1(1.0), &config).unwrap();
        assert_eq!(t.len(), 11);
        assert!((t.times[5] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let period = 2.0 * PI;
        let dev = |steps: f64| {
            let (n, a) = numeric_and_analytic(&fig1(1.0), &IntegratorConfig::new(period / steps, period)).unwrap();
            compare(&n, &a).unwrap()
        };
        let ratio = dev(400.0) / dev(800.0);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn compare_checks_grids() {
        let a = integrate(&fig1(1.0), &IntegratorConfig::new(0.01, 1.0)).unwrap();
        let b = integrate(&fig1(1.0), &IntegratorConfig::new(0.01, 0.5)).unwrap();
        assert_eq!(compare(&a, &a).unwrap(), 0.0);
        assert!(matches!(compare(&a, &b), Err(Error::GridMismatch)));
        let mut c = a.clone();
        c.times[3] += 1e-6;
        assert!(matches!(compare(&a, &c), Err(Error::GridMismatch)));
    }

    #[test]
    fn reduced_model_conserves_weighted_norm() {
        let pulse = Pulse::harmonic(2.0, 1.0).unwrap();
        let m = CouplingModel::symmetric_nstate(6, -1.0, 0.0, pulse).unwrap();
        let config = IntegratorConfig::fitted(max_stable_dt(&m), 2.0 * PI);
        let (n, a) = numeric_and_analytic(&m, &config).unwrap();
        assert!(n.closure_max_err() <= 1e-8);
        assert!(compare(&n, &a).unwrap() <= 1e-6);
    }

    #[test]
    fn leakage_falls_with_ratio() {
        let pts = leakage_scan(two_state_leakage_family(1.0), 1.0, &[10.0, 30.0, 100.0, f64::INFINITY], 4000).unwrap();
        assert_eq!(pts[0].ratio, 10.0);
        assert!(pts[0].deficit < 1e-2);
        assert!(pts[2].deficit < 1e-4);
        assert!(pts[3].deficit.abs() <= 1e-6);
        assert_eq!(pts[3].omega21, 0.0);
        let slope = log_log_slope(&pts[..3].iter().map(|p| (p.ratio, p.deficit)).collect::<Vec<_>>());
        assert!((slope + 2.0).abs() <= 0.3, "slope {slope}");
        for p in &pts[..3] {
            let r = p.delta_a2_sq / p.estimate;
            assert!((0.1..=10.0).contains(&r), "ratio {r} at {}", p.ratio);
        }
    }

    #[test]
    fn leakage_grows_quartically_at_early_times() {
        let omega = 1.0;
        let omega21 = 0.05;
        let model = two_state_leakage_family(omega)(omega21).unwrap();
        let basis = decompose(&model).unwrap();
        let probe = [0.02, 0.04, 0.08];
        let pts: Vec<(f64, f64)> = probe
            .iter()
            .map(|&t| {
                let traj = integrate(&model, &IntegratorConfig::fitted(t / 2000.0, t)).unwrap();
                let a_num = traj.amplitudes.last().unwrap()[1];
                let a_deg = amplitudes_at(&basis, model.pulse().action(t).unwrap())[1];
                (t, (a_num - a_deg).norm_sqr())
            })
            .collect();
        let slope = log_log_slope(&pts);
        assert!((slope - 4.0).abs() <= 0.3, "slope {slope}");
        // ¼ ω₂₁² χ² t⁴ at the smallest probe
        let chi = FRAC_PI_2 * omega;
        let est = 0.25 * omega21 * omega21 * chi * chi * probe[0].powi(4);
        let r = pts[0].1 / est;
        assert!((0.1..=10.0).contains(&r), "{r}");
    }

    #[test]
    fn kicks_converge() {
        let m = CouplingModel::standard_2state(0.0, 0.0, Pulse::harmonic(1.0, 1.0).unwrap());
        let widths = [0.1, 0.05, 0.025];
        let pts = kick_convergence(&m, FRAC_PI_2, 1.0, &widths, 0.025 / 200.0).unwrap();
        assert!((pts[2].p2_final - 1.0).abs() <= 1e-4);
        assert!((pts[0].p2_ideal - 1.0).abs() < 1e-15);

        let m3 = CouplingModel::standard_3state(0.0, 1.0, [0.0; 3], Pulse::harmonic(1.0, 1.0).unwrap());
        let pts = kick_convergence(&m3, PI / SQRT_2, 1.0, &widths, 0.025 / 200.0).unwrap();
        assert!(pts.iter().all(|p| p.p2_final >= 1.0 - 1e-4));

        let pts = kick_convergence(&m, 0.0, 1.0, &widths, 1e-4).unwrap();
        assert!(pts.iter().all(|p| p.p2_final == 0.0));
    }

    #[test]
    fn kick_convergence_is_monotone_with_splitting() {
        // bare splitting makes the finite width matter
        let m = CouplingModel::standard_2state(0.0, 0.0, Pulse::harmonic(1.0, 1.0).unwrap())
            .with_energies(vec![0.0, 2.0])
            .unwrap();
        let widths = [0.4, 0.2, 0.1, 0.05];
        let pts = kick_convergence(&m, FRAC_PI_2, 1.0, &widths, 0.05 / 200.0).unwrap();
        let gaps: Vec<f64> = pts.iter().map(|p| (p.p2_final - p.p2_ideal).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn kick_needs_resolved_width() {
        let m = fig1(1.0);
        assert!(matches!(
            kick_convergence(&m, FRAC_PI_2, 1.0, &[0.01], 1e-3),
            Err(Error::UnresolvedTimescale { .. })
        ));
    }

    #[test]
    fn sampled_pulse_matches_closed_form() {
        // a trapezoid: the action is piecewise quadratic
        let pulse = Pulse::custom(vec![(0.0, 0.0), (0.5, 2.0), (1.5, 2.0), (2.0, 0.0)]).unwrap();
        let m = CouplingModel::standard_3state(0.7, 1.0, [0.0; 3], pulse);
        let config = IntegratorConfig::fitted(max_stable_dt(&m), 3.0);
        let (n, a) = numeric_and_analytic(&m, &config).unwrap();
        assert!(compare(&n, &a).unwrap() <= 1e-6);
    }
}
