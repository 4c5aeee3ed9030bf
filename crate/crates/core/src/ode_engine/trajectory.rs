use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::rk::{self, State};
use crate::bubble::Dimension;
use crate::error::{Error, Result};
use crate::modes::{self, OdeCoefficients};
use crate::testfn::RadialJet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub psi: f64,
    pub dpsi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaunchType {
    RegularAtZero,
    PrescribedAtR,
    ReductionOfOrder,
    ClosedForm,
}

/// Samples `(r, ψ, ψ')` of one solution of the mode-`k` equation, with `r`
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionTrajectory {
    k: usize,
    n: Dimension,
    launch: LaunchType,
    samples: Vec<Sample>,
}

impl SolutionTrajectory {
    pub(crate) fn new(k: usize, n: Dimension, launch: LaunchType, samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Precondition("a trajectory needs at least two samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].r > w[0].r)) {
            return Err(Error::Precondition("trajectory radii must be strictly increasing".into()));
        }
        if let Some(bad) = samples.iter().find(|s| !(s.psi.is_finite() && s.dpsi.is_finite())) {
            return Err(Error::NonFinite { r: bad.r });
        }
        Ok(Self { k, n, launch, samples })
    }

    /// Samples a closed-form solution on the given radii.
    pub fn from_closed_form<F: Fn(f64) -> RadialJet>(k: usize, n: Dimension, radii: &[f64], f: F) -> Result<Self> {
        let samples = radii
            .iter()
            .map(|&r| {
                let j = f(r);
                Sample {
                    r,
                    psi: j.value,
                    dpsi: j.d1,
                }
            })
            .collect();
        Self::new(k, n, LaunchType::ClosedForm, samples)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn launch(&self) -> LaunchType {
        self.launch
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.r).collect()
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.samples[0].r, self.samples[self.samples.len() - 1].r)
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let (a, b) = self.r_range();
        a <= lo && hi <= b
    }

    /// `ψ''` at a sample, from the mode equation itself.
    fn second_derivative(&self, s: &Sample) -> f64 {
        let c = OdeCoefficients::new(self.k, self.n);
        let rho = self.n.rho(s.r);
        -(c.p_from_rho(rho) * s.dpsi / s.r + (c.q_centrifugal() + c.q_potential_from_rho(rho)) * s.psi / (s.r * s.r))
    }

    /// `(ψ, ψ')` at `r` by quintic Hermite interpolation in `log r`, using
    /// `ψ''` from the mode equation at the bracketing samples. Exact at
    /// sample radii; `None` outside the sampled range.
    pub fn interpolate(&self, r: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.r_range();
        if !(lo..=hi).contains(&r) {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.r < r);
        if idx < self.samples.len() && self.samples[idx].r == r {
            let s = self.samples[idx];
            return Some((s.psi, s.dpsi));
        }
        let (a, b) = (self.samples[idx - 1], self.samples[idx]);
        // derivatives in t = log r: ψ_t = r ψ',  ψ_tt = r² ψ'' + r ψ'
        let jet_t = |s: &Sample| (s.psi, s.r * s.dpsi, s.r * s.r * self.second_derivative(s) + s.r * s.dpsi);
        let (p0, d0, dd0) = jet_t(&a);
        let (p1, d1, dd1) = jet_t(&b);
        let h = b.r.ln() - a.r.ln();
        let s = (r.ln() - a.r.ln()) / h;
        let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));
        let value = (1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5) * p0
            + (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5) * h * d0
            + 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5) * h * h * dd0
            + (10.0 * s3 - 15.0 * s4 + 6.0 * s5) * p1
            + (-4.0 * s3 + 7.0 * s4 - 3.0 * s5) * h * d1
            + 0.5 * (s3 - 2.0 * s4 + s5) * h * h * dd1;
        let slope = (-30.0 * s2 + 60.0 * s3 - 30.0 * s4) * p0
            + (1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4) * h * d0
            + 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4) * h * h * dd0
            + (30.0 * s2 - 60.0 * s3 + 30.0 * s4) * p1
            + (-12.0 * s2 + 28.0 * s3 - 15.0 * s4) * h * d1
            + 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4) * h * h * dd1;
        // slope is dψ/ds; ψ' = (dψ/ds) / (h r)
        Some((value, slope / (h * r)))
    }

    /// Writes `r,psi,dpsi` with 17 significant digits and LF line endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "r,psi,dpsi")?;
        for s in &self.samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", s.r, s.psi, s.dpsi)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Every `stride`-th sample, always keeping the last one.
    pub fn thinned(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let last = self.samples.len() - 1;
        let samples = self
            .samples
            .iter()
            .enumerate()
            .filter(|(i, _)| i % stride == 0 || *i == last)
            .map(|(_, s)| *s)
            .collect();
        Self { samples, ..self.clone() }
    }
}

/// Step control for mode integration. The state is renormalized to unit
/// max-norm after every accepted step, so `atol` acts relative to the size of
/// the solution rather than in absolute units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step in `log r`; `None` picks one from the mode's exponents.
    pub max_dt: Option<f64>,
    pub max_steps: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_dt: None,
            max_steps: 2_000_000,
        }
    }
}

impl TrajectoryOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-2,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.rtol) || !ok(self.atol) || self.max_dt.is_some_and(|h| !ok(h)) {
            return Err(Error::InvalidParameter {
                name: "tolerances",
                reason: format!("tolerances and max_dt must be positive and finite, got {self:?}"),
            });
        }
        Ok(())
    }

    /// Step cap in `log r`: dense enough that cubic interpolation between
    /// every other sample stays well below 1e-8 relative.
    pub(crate) fn step_cap(&self, k: usize, n: Dimension) -> f64 {
        self.max_dt.unwrap_or_else(|| {
            let spec = modes::mode_spec(k, n);
            let rate = 1f64.max(spec.beta_plus).max(-spec.beta_minus).max(spec.exponent_at_infinity());
            0.01 / rate
        })
    }
}

pub const K_MAX_SUPPORTED: usize = 64;

pub(crate) fn check_mode(k: usize) -> Result<()> {
    if k > K_MAX_SUPPORTED {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("mode index {k} exceeds the supported maximum {K_MAX_SUPPORTED}"),
        });
    }
    Ok(())
}

/// The mode equation as a first-order system in `t = log r` for `(ψ, rψ')`:
/// `ψ_t = D`, `D_t = (1 - p) D - (q_c + q_pot) ψ`.
pub(crate) fn mode_rhs(k: usize, n: Dimension) -> impl Fn(f64, &State) -> State {
    let c = OdeCoefficients::new(k, n);
    let m = n.rho_exponent();
    move |t: f64, y: &State| {
        let rho = (m * t).exp();
        [y[1], (1.0 - c.p_from_rho(rho)) * y[1] - (c.q_centrifugal() + c.q_potential_from_rho(rho)) * y[0]]
    }
}

/// A normalized state together with its accumulated `log` scale.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledState {
    pub y: State,
    pub log_scale: f64,
}

impl ScaledState {
    pub fn from_values(psi: f64, dpsi_dt: f64) -> Self {
        let s = psi.abs().max(dpsi_dt.abs());
        assert!(s > 0.0, "the zero solution has no trajectory");
        Self {
            y: [psi / s, dpsi_dt / s],
            log_scale: s.ln(),
        }
    }

    fn to_sample(self, r: f64) -> Sample {
        let scale = self.log_scale.exp();
        Sample {
            r,
            psi: self.y[0] * scale,
            dpsi: self.y[1] * scale / r,
        }
    }
}

/// Integrates the linear mode system from `r0` to `r1` (either direction),
/// returning one sample per accepted step, including both endpoints exactly.
pub(crate) fn integrate_span(k: usize, n: Dimension, r0: f64, start: ScaledState, r1: f64, opts: &TrajectoryOptions) -> Result<Vec<Sample>> {
    opts.validate()?;
    let (t0, t1) = (r0.ln(), r1.ln());
    let rhs = mode_rhs(k, n);
    let cap = opts.step_cap(k, n);
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut state = start;
    let mut f = rhs(t, &state.y);
    let mut h = cap.min(1e-2) * dir;
    let mut out = vec![state.to_sample(r0)];
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow { last_r: t.exp() });
        }
        steps += 1;
        let remaining = t1 - t;
        let mut last = false;
        if (h * dir) >= remaining * dir {
            h = remaining;
            last = true;
        }
        let trial = rk::step(&rhs, t, &state.y, f, h);
        let norm_old = state.y[0].abs().max(state.y[1].abs());
        let norm_new = trial.y[0].abs().max(trial.y[1].abs());
        let scale = opts.atol + opts.rtol * norm_old.max(norm_new);
        let err = (trial.error[0].abs().max(trial.error[1].abs())) / scale;
        if !err.is_finite() || !norm_new.is_finite() {
            return Err(Error::NonFinite { r: t.exp() });
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            let s = norm_new;
            state = ScaledState {
                y: [trial.y[0] / s, trial.y[1] / s],
                log_scale: state.log_scale + s.ln(),
            };
            f = [trial.f_new[0] / s, trial.f_new[1] / s];
            let sample = state.to_sample(if last { r1 } else { t.exp() });
            if !(sample.psi.is_finite() && sample.dpsi.is_finite()) {
                return Err(Error::NonFinite { r: sample.r });
            }
            out.push(sample);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        let magnitude = (h.abs() * factor).min(cap);
        if magnitude < 1e-13 * (1.0 + t.abs()) {
            return Err(Error::StepUnderflow { last_r: t.exp() });
        }
        h = magnitude * dir;
    }
    Ok(out)
}
