//! External-field envelopes `V(t)` and the action integral `A(t) = ∫₀ᵗ V(t′) dt′`.
//!
//! Every coupling in a model shares one of these envelopes; the degenerate
//! dynamics depend on time only through [`Pulse::action`].

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::quadrature::{adaptive_simpson, ACTION_TOLERANCE};
use crate::{Error, Result};

// half the 1e-12 action tolerance, leaving room for rounding in A(t)
const ACTION_SOLVE_MARGIN: f64 = 0.5e-12;

/// A shared time dependence for all couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PulseDoc", into = "PulseDoc")]
pub enum Pulse {
    /// `V(t) = chi cos(omega t)`.
    Harmonic { chi: f64, omega: f64 },
    /// `V(t) = area δ(t - t0)`; analytic use only.
    DeltaKick { area: f64, t0: f64 },
    /// Rectangle of height `area / width` centred on `t0`.
    RectKick { area: f64, t0: f64, width: f64 },
    /// Piecewise-linear interpolation of `(t, V)` samples, zero outside.
    CustomSampled(SampledEnvelope),
}

/// Strictly increasing `(t, V)` samples with cumulative trapezoid integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledEnvelope {
    times: Vec<f64>,
    values: Vec<f64>,
    // cumulative[k] = ∫_{times[0]}^{times[k]} V
    cumulative: Vec<f64>,
}

impl SampledEnvelope {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidPulse("a sampled envelope needs at least two samples".into()));
        }
        if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidPulse("samples must be finite".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidPulse("sample times must be strictly increasing".into()));
        }
        let (times, values): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        let mut cumulative = Vec::with_capacity(times.len());
        let mut acc = 0.0;
        cumulative.push(acc);
        for k in 1..times.len() {
            acc += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
            cumulative.push(acc);
        }
        Ok(Self { times, values, cumulative })
    }

    /// Reads a two-column CSV with header `t,V`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "V" {
            return Err(Error::InvalidPulse(format!(
                "expected CSV header `t,V`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for record in rdr.deserialize::<(f64, f64)>() {
            samples.push(record?);
        }
        Self::new(samples)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    fn first(&self) -> f64 {
        self.times[0]
    }

    fn last(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index `k` of the segment `[times[k], times[k+1]]` containing `t`.
    fn segment(&self, t: f64) -> Option<usize> {
        if t < self.first() || t > self.last() {
            return None;
        }
        let k = self.times.partition_point(|&s| s <= t);
        Some(k.saturating_sub(1).min(self.times.len() - 2))
    }

    fn segment_value(&self, k: usize, t: f64) -> f64 {
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn value(&self, t: f64) -> f64 {
        self.segment(t).map_or(0.0, |k| self.segment_value(k, t))
    }

    /// `∫_{times[0]}^{t} V` for `t` inside the sampled range.
    fn integral_to(&self, t: f64) -> f64 {
        let t = t.clamp(self.first(), self.last());
        let k = self.segment(t).unwrap();
        let vt = self.segment_value(k, t);
        self.cumulative[k] + 0.5 * (self.values[k] + vt) * (t - self.times[k])
    }

    fn action(&self, t: f64) -> f64 {
        let lo = self.first().max(0.0);
        let hi = t.min(self.last());
        if hi <= lo {
            return 0.0;
        }
        self.integral_to(hi) - self.integral_to(lo)
    }

    fn peak_magnitude(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Pulse {
    pub fn harmonic(chi: f64, omega: f64) -> Result<Self> {
        Self::Harmonic { chi, omega }.validated()
    }

    pub fn delta_kick(area: f64, t0: f64) -> Result<Self> {
        Self::DeltaKick { area, t0 }.validated()
    }

    pub fn rect_kick(area: f64, t0: f64, width: f64) -> Result<Self> {
        Self::RectKick { area, t0, width }.validated()
    }

    pub fn custom(samples: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self::CustomSampled(SampledEnvelope::new(samples)?))
    }

    fn validated(self) -> Result<Self> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match &self {
            Pulse::Harmonic { chi, omega } => {
                if !finite(&[*chi, *omega]) || *omega <= 0.0 {
                    return Err(Error::InvalidPulse(format!("harmonic pulse needs finite chi and omega > 0 (omega = {omega})")));
                }
            }
            Pulse::DeltaKick { area, t0 } => {
                if !finite(&[*area, *t0]) || *t0 <= 0.0 {
                    return Err(Error::InvalidPulse(format!("delta kick needs finite area and t0 > 0 (t0 = {t0})")));
                }
            }
            Pulse::RectKick { area, t0, width } => {
                if !finite(&[*area, *t0, *width]) || *width <= 0.0 {
                    return Err(Error::InvalidPulse(format!("rect kick needs finite parameters and width > 0 (width = {width})")));
                }
            }
            Pulse::CustomSampled(_) => {}
        }
        Ok(self)
    }

    fn check_time(t: f64) -> Result<()> {
        if t >= 0.0 {
            Ok(())
        } else {
            Err(Error::OutOfDomain(t))
        }
    }

    /// Pointwise envelope `V(t)`.
    pub fn envelope_value(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        match self {
            Pulse::Harmonic { chi, omega } => Ok(chi * (omega * t).cos()),
            Pulse::DeltaKick { .. } => Err(Error::PointwiseUndefined),
            Pulse::RectKick { area, t0, width } => {
                let half = 0.5 * width;
                Ok(if t >= t0 - half && t <= t0 + half { area / width } else { 0.0 })
            }
            Pulse::CustomSampled(s) => Ok(s.value(t)),
        }
    }

    /// The action `A(t) = ∫₀ᵗ V(t′) dt′`, in closed form for every kind.
    pub fn action(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(match self {
            Pulse::Harmonic { chi, omega } => chi / omega * (omega * t).sin(),
            // right-continuous step: fully kicked at t = t0
            Pulse::DeltaKick { area, t0 } => {
                if t >= *t0 {
                    *area
                } else {
                    0.0
                }
            }
            Pulse::RectKick { area, t0, width } => {
                let lo = (t0 - 0.5 * width).max(0.0);
                let hi = (t0 + 0.5 * width).min(t);
                if t >= t0 + 0.5 * width && t0 - 0.5 * width >= 0.0 {
                    *area
                } else if hi <= lo {
                    0.0
                } else {
                    area / width * (hi - lo)
                }
            }
            Pulse::CustomSampled(s) => s.action(t),
        })
    }

    /// The action computed by adaptive Simpson quadrature of
    /// [`envelope_value`](Self::envelope_value), split at breakpoints.
    pub fn action_by_quadrature(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        if matches!(self, Pulse::DeltaKick { .. }) {
            return Err(Error::PointwiseUndefined);
        }
        let mut knots = vec![0.0];
        knots.extend(self.breakpoints().into_iter().filter(|&b| b > 0.0 && b < t));
        if let Pulse::Harmonic { omega, .. } = self {
            // Simpson's first estimate can be fooled by whole periods
            let quarter = 0.5 * std::f64::consts::PI / omega;
            knots.extend((1..).map(|k| k as f64 * quarter).take_while(|&s| s < t));
        }
        knots.push(t);
        let mut total = 0.0;
        for w in knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            total += adaptive_simpson(|s| self.piece_value(s, mid), w[0], w[1], ACTION_TOLERANCE);
        }
        Ok(total)
    }

    /// Smallest `t ≥ 0` with `A(t) = target` (to 1e-12 in action).
    ///
    /// Harmonic pulses are searched on the first quarter period, where the
    /// action is monotone.
    pub fn solve_time_for_action(&self, target: f64) -> Result<f64> {
        if !(target >= 0.0) {
            return Err(Error::DomainError(format!("target action must be >= 0, got {target}")));
        }
        if target == 0.0 {
            return Ok(0.0);
        }
        let horizon = match self {
            Pulse::Harmonic { chi, omega } => {
                let max = chi / omega;
                if target > max {
                    return Err(Error::Unattainable { target, max: max.max(0.0) });
                }
                0.5 * std::f64::consts::PI / omega
            }
            Pulse::DeltaKick { area, t0 } => {
                return if target <= *area {
                    Ok(*t0)
                } else {
                    Err(Error::Unattainable { target, max: area.max(0.0) })
                };
            }
            Pulse::RectKick { t0, width, .. } => t0 + 0.5 * width,
            Pulse::CustomSampled(s) => s.last().max(0.0),
        };

        // First breakpoint-delimited interval where the action reaches the target.
        let mut knots = vec![0.0];
        knots.extend(self.breakpoints().into_iter().filter(|&b| b > 0.0 && b < horizon));
        knots.push(horizon);
        let mut best = f64::NEG_INFINITY;
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let a_hi = self.action(hi)?;
            best = best.max(a_hi);
            if a_hi >= target - 1e-12 {
                return self.bisect(lo, hi, target);
            }
        }
        Err(Error::Unattainable { target, max: best.max(0.0) })
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, target: f64) -> Result<f64> {
        if self.action(lo)? >= target - ACTION_SOLVE_MARGIN {
            return Ok(lo);
        }
        // invariant: A(lo) < target - margin <= A(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.action(mid)? >= target - ACTION_SOLVE_MARGIN {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Times where the envelope is discontinuous or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Pulse::Harmonic { .. } => Vec::new(),
            Pulse::DeltaKick { t0, .. } => vec![*t0],
            Pulse::RectKick { t0, width, .. } => vec![t0 - 0.5 * width, t0 + 0.5 * width],
            Pulse::CustomSampled(s) => s.times.clone(),
        }
    }

    /// Envelope at `t` using the smooth piece that contains `mid`.
    ///
    /// Integrators use this so that a step lying between two breakpoints
    /// sees one analytic piece even at its endpoints.
    pub(crate) fn piece_value(&self, t: f64, mid: f64) -> f64 {
        match self {
            Pulse::Harmonic { chi, omega } => chi * (omega * t).cos(),
            Pulse::DeltaKick { .. } => 0.0,
            Pulse::RectKick { area, t0, width } => {
                let half = 0.5 * width;
                if mid > t0 - half && mid < t0 + half {
                    area / width
                } else {
                    0.0
                }
            }
            Pulse::CustomSampled(s) => match s.segment(mid) {
                Some(k) if mid > s.first() && mid < s.last() => s.segment_value(k, t),
                _ => 0.0,
            },
        }
    }

    /// Largest `|V(t)|`; infinite for a delta kick.
    pub fn peak_magnitude(&self) -> f64 {
        match self {
            Pulse::Harmonic { chi, .. } => chi.abs(),
            Pulse::DeltaKick { .. } => f64::INFINITY,
            Pulse::RectKick { area, width, .. } => (area / width).abs(),
            Pulse::CustomSampled(s) => s.peak_magnitude(),
        }
    }

    /// Carrier angular frequency for harmonic pulses.
    pub fn omega(&self) -> Option<f64> {
        match self {
            Pulse::Harmonic { omega, .. } => Some(*omega),
            _ => None,
        }
    }
}

/// Wire form: `{"kind": "harmonic", "chi": .., "omega": ..}` and friends.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PulseDoc {
    Harmonic {
        chi: f64,
        omega: f64,
    },
    DeltaKick {
        #[serde(rename = "A0")]
        area: f64,
        t0: f64,
    },
    RectKick {
        #[serde(rename = "A0")]
        area: f64,
        t0: f64,
        width: f64,
    },
    CustomSampled {
        samples: Vec<(f64, f64)>,
    },
}

impl TryFrom<PulseDoc> for Pulse {
    type Error = Error;

    fn try_from(doc: PulseDoc) -> Result<Self> {
        match doc {
            PulseDoc::Harmonic { chi, omega } => Pulse::harmonic(chi, omega),
            PulseDoc::DeltaKick { area, t0 } => Pulse::delta_kick(area, t0),
            PulseDoc::RectKick { area, t0, width } => Pulse::rect_kick(area, t0, width),
            PulseDoc::CustomSampled { samples } => Pulse::custom(samples),
        }
    }
}

impl From<Pulse> for PulseDoc {
    fn from(p: Pulse) -> Self {
        match p {
            Pulse::Harmonic { chi, omega } => PulseDoc::Harmonic { chi, omega },
            Pulse::DeltaKick { area, t0 } => PulseDoc::DeltaKick { area, t0 },
            Pulse::RectKick { area, t0, width } => PulseDoc::RectKick { area, t0, width },
            Pulse::CustomSampled(s) => PulseDoc::CustomSampled { samples: s.samples().collect() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    #[test]
    fn harmonic_envelope_examples() {
        let p = Pulse::harmonic(1.0, 1.0).unwrap();
        assert_eq!(p.envelope_value(0.0).unwrap(), 1.0);

        let omega = 1.7;
        let p = Pulse::harmonic(FRAC_PI_2 * omega, omega).unwrap();
        let v = p.envelope_value(PI / omega).unwrap();
        assert!((v + FRAC_PI_2 * omega).abs() < 1e-12);
    }

    #[test]
    fn rect_envelope_is_area_over_width() {
        let p = Pulse::rect_kick(PI / SQRT_2, 5.0, 0.1).unwrap();
        let v = p.envelope_value(5.0).unwrap();
        assert!((v - 22.214_414_690_791_83).abs() < 1e-9);
        assert_eq!(p.envelope_value(5.2).unwrap(), 0.0);
    }

    #[test]
    fn delta_kick_has_no_pointwise_value() {
        let p = Pulse::delta_kick(1.0, 1.0).unwrap();
        assert!(matches!(p.envelope_value(0.5), Err(Error::PointwiseUndefined)));
    }

    #[test]
    fn negative_time_rejected() {
        let p = Pulse::harmonic(1.0, 1.0).unwrap();
        assert!(matches!(p.envelope_value(-1.0), Err(Error::OutOfDomain(_))));
        assert!(matches!(p.action(-1e-9), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Pulse::harmonic(1.0, 0.0).is_err());
        assert!(Pulse::rect_kick(1.0, 1.0, 0.0).is_err());
        assert!(Pulse::custom(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Pulse::custom(vec![(1.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(Pulse::delta_kick(1.0, 0.0).is_err());
    }

    #[test]
    fn harmonic_quarter_period_action() {
        let omega = 2.0;
        let p = Pulse::harmonic(FRAC_PI_2 * omega, omega).unwrap();
        let a = p.action(PI / (2.0 * omega)).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn action_at_zero_vanishes() {
        let pulses = [
            Pulse::harmonic(3.0, 0.7).unwrap(),
            Pulse::delta_kick(2.0, 0.5).unwrap(),
            Pulse::rect_kick(2.0, 0.01, 0.1).unwrap(),
            Pulse::custom(vec![(-1.0, 2.0), (1.0, 3.0)]).unwrap(),
        ];
        for p in &pulses {
            assert_eq!(p.action(0.0).unwrap(), 0.0, "{p:?}");
        }
    }

    #[test]
    fn delta_kick_step_is_right_continuous() {
        let p = Pulse::delta_kick(2.221, 1.0).unwrap();
        assert_eq!(p.action(0.999).unwrap(), 0.0);
        assert_eq!(p.action(1.0).unwrap(), 2.221);
        assert_eq!(p.action(3.0).unwrap(), 2.221);
    }

    #[test]
    fn rect_action_is_exact() {
        let p = Pulse::rect_kick(1.5, 2.0, 0.5).unwrap();
        assert_eq!(p.action(1.75).unwrap(), 0.0);
        assert!((p.action(2.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((p.action(9.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn rect_support_clipped_at_origin() {
        // Half of the rectangle lies before t = 0.
        let p = Pulse::rect_kick(1.0, 0.0, 1.0).unwrap();
        assert!((p.action(10.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn custom_action_piecewise_linear() {
        let p = Pulse::custom(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 2.0)]).unwrap();
        assert!((p.action(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.action(0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((p.action(2.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((p.action(10.0).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(p.envelope_value(4.0).unwrap(), 0.0);
        assert_eq!(p.envelope_value(0.5).unwrap(), 1.0);
    }

    #[test]
    fn custom_samples_before_origin_are_ignored_by_action() {
        let p = Pulse::custom(vec![(-1.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!((p.action(0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn custom_csv_round() {
        let csv = "t,V\n0,0\n1,2\n3,2\n";
        let s = SampledEnvelope::from_csv_reader(csv.as_bytes()).unwrap();
        let p = Pulse::CustomSampled(s);
        assert!((p.action(3.0).unwrap() - 5.0).abs() < 1e-15);

        let bad = "time,V\n0,0\n1,1\n";
        assert!(SampledEnvelope::from_csv_reader(bad.as_bytes()).is_err());
        let unordered = "t,V\n0,0\n0,1\n";
        assert!(SampledEnvelope::from_csv_reader(unordered.as_bytes()).is_err());
    }

    #[test]
    fn solve_time_examples() {
        let p = Pulse::harmonic(FRAC_PI_2, 1.0).unwrap();
        let t = p.solve_time_for_action(FRAC_PI_2).unwrap();
        // A is flat at its maximum, so t is only determined to ~sqrt(1e-12)
        assert!((t - FRAC_PI_2).abs() < 1e-5);
        assert!((p.action(t).unwrap() - FRAC_PI_2).abs() <= 1e-12);

        let p = Pulse::harmonic(1.0, 1.0).unwrap();
        assert_eq!(p.solve_time_for_action(0.0).unwrap(), 0.0);
        assert!(matches!(p.solve_time_for_action(2.0), Err(Error::Unattainable { .. })));

        let t = p.solve_time_for_action(0.5).unwrap();
        assert!((t - 0.5_f64.asin()).abs() < 1e-11);
    }

    #[test]
    fn solve_time_custom_and_rect() {
        let p = Pulse::custom(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 2.0)]).unwrap();
        let t = p.solve_time_for_action(3.0).unwrap();
        assert!((t - 2.0).abs() < 1e-11);
        assert!(matches!(p.solve_time_for_action(6.0), Err(Error::Unattainable { .. })));

        let p = Pulse::rect_kick(1.0, 1.0, 0.2).unwrap();
        let t = p.solve_time_for_action(0.5).unwrap();
        assert!((t - 1.0).abs() < 1e-11);
    }

    #[test]
    fn json_shape() {
        let p = Pulse::rect_kick(1.0, 2.0, 0.1).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"kind":"rect_kick","A0":1.0,"t0":2.0,"width":0.1}"#);
        let back: Pulse = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);

        assert!(serde_json::from_str::<Pulse>(r#"{"kind":"harmonic","chi":1,"omega":-1}"#).is_err());
        assert!(serde_json::from_str::<Pulse>(r#"{"kind":"harmonic","chi":1,"omega":1,"x":2}"#).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form_harmonic() {
        let p = Pulse::harmonic(1.3, 0.9).unwrap();
        for k in 0..=200 {
            let t = 20.0 * PI / 0.9 * k as f64 / 200.0;
            let exact = p.action(t).unwrap();
            let quad = p.action_by_quadrature(t).unwrap();
            assert!((exact - quad).abs() < 1e-9, "t = {t}: {exact} vs {quad}");
        }
    }

    #[test]
    fn quadrature_handles_rect_edges() {
        let p = Pulse::rect_kick(2.0, 1.0, 0.3).unwrap();
        for t in [0.5, 0.9, 1.0, 1.1, 1.15, 2.0] {
            let a = p.action(t).unwrap();
            let q = p.action_by_quadrature(t).unwrap();
            assert!((a - q).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn rect_converges_to_delta_outside_support() {
        let delta = Pulse::delta_kick(1.2, 1.0).unwrap();
        for w in [0.4, 0.1, 0.01, 0.001] {
            let rect = Pulse::rect_kick(1.2, 1.0, w).unwrap();
            for t in [0.0, 0.5, 1.0 - 0.51 * w, 1.0 + 0.51 * w, 3.0] {
                let d = (rect.action(t).unwrap() - delta.action(t).unwrap()).abs();
                assert!(d < 1e-15, "w = {w}, t = {t}: {d}");
            }
        }
    }

    proptest! {
        #[test]
        fn harmonic_action_is_periodic(chi in -5.0..5.0f64, omega in 0.1..5.0f64, t in 0.0..50.0f64) {
            let p = Pulse::harmonic(chi, omega).unwrap();
            let period = 2.0 * PI / omega;
            let d = p.action(t + period).unwrap() - p.action(t).unwrap();
            prop_assert!(d.abs() < 1e-9);
        }

        #[test]
        fn action_monotone_where_envelope_nonnegative(
            vals in proptest::collection::vec(0.0..3.0f64, 2..12),
            a in 0.0..1.0f64,
            b in 0.0..1.0f64,
        ) {
            let n = vals.len();
            let samples: Vec<(f64, f64)> =
                vals.iter().enumerate().map(|(k, v)| (k as f64 / (n - 1) as f64, *v)).collect();
            let p = Pulse::custom(samples).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(p.action(hi).unwrap() >= p.action(lo).unwrap() - 1e-15);
        }
    }
}
