use serde::{Deserialize, Serialize};

use super::frobenius::FrobeniusSeries;
use super::trajectory::{check_mode, integrate_span, LaunchType, Sample, ScaledState, SolutionTrajectory, TrajectoryOptions};
use crate::bubble::Dimension;
use crate::error::{Error, Result};
use crate::modes::{self, divergence_weight};
use crate::quadrature::{self, QuadOptions};
use crate::testfn::RadialJet;

pub const DEFAULT_R_START: f64 = 1e-5;
pub const DEFAULT_R_END: f64 = 1e5;

/// Integration range for mode `k`: `[1e-5, 1e5]`, shrunk for very large `k`
/// so that `r^β` at the start and `r^γ` at the end both stay well inside the
/// floating-point range.
pub fn default_range(k: usize, n: Dimension) -> (f64, f64) {
    let spec = modes::mode_spec(k, n);
    let lo = -280.0 / spec.beta_plus.max(1.0);
    let hi = 280.0 / spec.exponent_at_infinity().max(1.0);
    (
        DEFAULT_R_START.max(10f64.powf(lo)),
        DEFAULT_R_END.min(10f64.powf(hi)),
    )
}

fn check_range(r_start: f64, r_end: f64) -> Result<()> {
    if !(r_start > 0.0 && r_start < r_end && r_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "range",
            reason: format!("need 0 < r_start < r_end < inf, got [{r_start}, {r_end}]"),
        });
    }
    Ok(())
}

fn samples_between(k: usize, n: Dimension, r0: f64, start: ScaledState, lo: f64, hi: f64, opts: &TrajectoryOptions) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    if lo < r0 {
        let mut back = integrate_span(k, n, r0, start, lo, opts)?;
        back.reverse();
        back.pop();
        out.extend(back);
    }
    if hi > r0 {
        out.extend(integrate_span(k, n, r0, start, hi, opts)?);
    } else {
        out.push(integrate_span(k, n, r0, start, r0, opts)?[0]);
    }
    Ok(out)
}

/// The solution regular at the origin, launched from the two-term Frobenius
/// series `r^β(1 + c₁ρ)` at `r_start` and normalized so `ψ(r_start) = r_start^β`.
pub fn integrate_regular(k: usize, n: Dimension, r_start: f64, r_end: f64, opts: &TrajectoryOptions) -> Result<SolutionTrajectory> {
    check_mode(k)?;
    check_range(r_start, r_end)?;
    let series = FrobeniusSeries::regular(k, n, 2);
    let (v, dv) = series.reduced(r_start);
    // ψ = r^β,  rψ' = r^β dv/v; keep r^β in the log scale to avoid underflow
    let slope = dv / v;
    let m = slope.abs().max(1.0);
    let start = ScaledState {
        y: [1.0 / m, slope / m],
        log_scale: series.beta() * r_start.ln() + m.ln(),
    };
    let samples = integrate_span(k, n, r_start, start, r_end, opts)?;
    SolutionTrajectory::new(k, n, LaunchType::RegularAtZero, samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondSolutionMethod {
    /// `ψ₂ = c ψ_base` with `c` from the reduction-of-order quadrature.
    Reduction,
    /// Direct integration from data making the divergence-form Wronskian 1.
    WronskianLaunch,
}

/// Closed-form bounded solution of mode 0 or 1.
pub fn base_solution(k: usize, n: Dimension, r: f64) -> RadialJet {
    match k {
        0 => modes::psi0(n, r),
        1 => modes::psi1(n, r),
        _ => panic!("closed-form base solutions exist only for k = 0, 1"),
    }
}

/// Zero of `ψ_0`, `r* = (N-1)^{(N-1)/N}`.
pub fn base_zero(n: Dimension) -> f64 {
    (n.as_f64() - 1.0).powf(1.0 / n.rho_exponent())
}

/// Interval around the zero of the base solution that the reduction
/// formula must avoid; `None` when the base only vanishes at the origin.
pub fn excluded_neighborhood(k: usize, n: Dimension) -> Option<(f64, f64)> {
    (k == 0).then(|| {
        let z = base_zero(n);
        (0.9 * z, 1.1 * z)
    })
}

/// Where the second solution is anchored: `ψ₂ = 0` with unit Wronskian.
pub fn anchor_radius(k: usize, n: Dimension) -> f64 {
    if k == 0 {
        base_zero(n) + 1.0
    } else {
        1.0
    }
}

/// A second, unbounded solution of mode `k ∈ {0, 1}` on `range`, normalized so
/// the divergence-form Wronskian against the closed-form base solution is 1
/// and vanishing at [`anchor_radius`] (clamped into the range).
pub fn second_solution(k: usize, n: Dimension, method: SecondSolutionMethod, range: (f64, f64), opts: &TrajectoryOptions) -> Result<SolutionTrajectory> {
    if k > 1 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("second solutions are constructed only for k = 0, 1, got {k}"),
        });
    }
    let (lo, hi) = range;
    check_range(lo, hi)?;
    let r0 = anchor_radius(k, n).clamp(lo, hi);
    match method {
        SecondSolutionMethod::WronskianLaunch => {
            let base = base_solution(k, n, r0);
            let (p, _) = divergence_weight(n, r0);
            let dpsi = 1.0 / (p * base.value);
            let start = ScaledState::from_values(0.0, r0 * dpsi);
            let samples = samples_between(k, n, r0, start, lo, hi, opts)?;
            SolutionTrajectory::new(k, n, LaunchType::PrescribedAtR, samples)
        }
        SecondSolutionMethod::Reduction => {
            if let Some((a, b)) = excluded_neighborhood(k, n) {
                if lo <= b && a <= hi {
                    return Err(Error::Precondition(format!(
                        "reduction of order is singular near r = {:.6}; range [{lo}, {hi}] meets the excluded interval [{a:.6}, {b:.6}]",
                        base_zero(n)
                    )));
                }
            }
            reduction_samples(k, n, r0, lo, hi, opts)
        }
    }
}

/// `c'(r) = (1+ρ)^{N-2} / (a^{N-2} ψ_base² r^{1+N(N-2)/(N-1)})`, normalized so
/// that `p (c ψ_base)' ψ_base - p ψ_base' (c ψ_base) = 1`.
fn reduction_rate(k: usize, n: Dimension, r: f64) -> f64 {
    let nf = n.as_f64();
    let s = nf * (nf - 2.0) / (nf - 1.0);
    let base = base_solution(k, n, r).value;
    let q = 1.0 + n.rho(r);
    (q / n.grad_scale()).powi(n.get() as i32 - 2) / (base * base * r.powf(1.0 + s))
}

fn reduction_samples(k: usize, n: Dimension, r0: f64, lo: f64, hi: f64, opts: &TrajectoryOptions) -> Result<SolutionTrajectory> {
    let h = opts.step_cap(k, n);
    let quad = QuadOptions {
        rel_tol: opts.rtol.min(1e-12),
        abs_tol: 0.0,
        ..QuadOptions::default()
    };
    let rate_t = |t: f64| {
        let r = t.exp();
        r * reduction_rate(k, n, r)
    };
    let t0 = r0.ln();
    // nodes t0 ± j h, clipped to the range ends
    let walk = |end: f64| -> Result<Vec<(f64, f64)>> {
        let mut nodes = vec![(t0, 0.0)];
        let dir = if end >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut c = 0.0;
        while (end - t) * dir > 0.0 {
            let next = if (end - t) * dir <= h * 1.000001 { end } else { t + dir * h };
            c += quadrature::integrate(rate_t, t, next, &quad)?.value;
            t = next;
            nodes.push((t, c));
        }
        Ok(nodes)
    };
    let mut nodes = walk(lo.ln())?;
    nodes.reverse();
    nodes.pop();
    nodes.extend(walk(hi.ln())?);
    let samples = nodes
        .into_iter()
        .map(|(t, c)| {
            let r = if t == lo.ln() {
                lo
            } else if t == hi.ln() {
                hi
            } else {
                t.exp()
            };
            let b = base_solution(k, n, r);
            Sample {
                r,
                psi: c * b.value,
                dpsi: reduction_rate(k, n, r) * b.value + c * b.d1,
            }
        })
        .collect();
    SolutionTrajectory::new(k, n, LaunchType::ReductionOfOrder, samples)
}
