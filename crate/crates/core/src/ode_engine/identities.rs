//! Exact integral identities of the mode equations, used as numerical checks.

use serde::{Deserialize, Serialize};

use super::trajectory::SolutionTrajectory;
use crate::error::{Error, Result};
use crate::modes::{self, centrifugal_weight, centrifugal_weight_derivative, divergence_weight};
use crate::testfn::RadialJet;

/// `W(r) = p(r)(ψ₂'ψ₁ - ψ₁'ψ₂)` at every sample of `traj`, with `ψ₁` given in
/// closed form and `p = r^{N-1}|U'|^{N-2}`.
pub fn wronskian_against<F: Fn(f64) -> RadialJet>(traj: &SolutionTrajectory, base: F) -> Vec<(f64, f64)> {
    let n = traj.dimension();
    traj.samples()
        .iter()
        .map(|s| {
            let b = base(s.r);
            (s.r, divergence_weight(n, s.r).0 * (s.dpsi * b.value - b.d1 * s.psi))
        })
        .collect()
}

/// The divergence-form Wronskian of two trajectories at the samples of `a`
/// that fall inside the range of `b`.
pub fn wronskian_between(a: &SolutionTrajectory, b: &SolutionTrajectory) -> Vec<(f64, f64)> {
    let n = a.dimension();
    a.samples()
        .iter()
        .filter_map(|s| {
            let (bv, bd) = b.interpolate(s.r)?;
            Some((s.r, divergence_weight(n, s.r).0 * (s.dpsi * bv - bd * s.psi)))
        })
        .collect()
}

/// `(max W - min W)/|mean W|`.
pub fn wronskian_drift(series: &[(f64, f64)]) -> f64 {
    if series.is_empty() {
        return f64::NAN;
    }
    let (lo, hi) = series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, w)| (lo.min(w), hi.max(w)));
    let mean = series.iter().map(|&(_, w)| w).sum::<f64>() / series.len() as f64;
    (hi - lo) / mean.abs()
}

/// Both sides of the Lagrange identity
/// `[p(ψ_k'ψ_j - ψ_j'ψ_k)]_{r_lo}^{r_hi} = (λ_k - λ_j)/(N-1) ∫ r^{N-3}|U'|^{N-2} ψ_k ψ_j dr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangeResidual {
    pub boundary: f64,
    pub integral: f64,
    /// `|boundary - integral|`.
    pub residual: f64,
    /// `residual` over the larger of `|integral|` and the summed magnitudes
    /// of the two boundary fluxes.
    pub relative: f64,
}

/// Evaluates the Lagrange identity between modes `k` and `j` on
/// `[r_lo, r_hi]`. The integral is a trapezoid rule in `log r` on the sample
/// grid of `traj_k`, with the endpoint-derivative correction that makes it
/// fourth order.
pub fn lagrange_identity_residual(
    k: usize,
    j: usize,
    traj_k: &SolutionTrajectory,
    traj_j: &SolutionTrajectory,
    r_lo: f64,
    r_hi: f64,
) -> Result<LagrangeResidual> {
    if k == j {
        return Err(Error::Precondition("the Lagrange identity needs two distinct modes".into()));
    }
    if traj_k.k() != k || traj_j.k() != j || traj_k.dimension() != traj_j.dimension() {
        return Err(Error::Precondition("trajectories do not match the requested modes".into()));
    }
    if !(r_lo > 0.0 && r_lo < r_hi && traj_k.covers(r_lo, r_hi) && traj_j.covers(r_lo, r_hi)) {
        return Err(Error::Precondition(format!("both trajectories must cover [{r_lo}, {r_hi}]")));
    }
    let n = traj_k.dimension();
    let at = |traj: &SolutionTrajectory, r: f64| traj.interpolate(r).expect("coverage checked");

    let mut grid = vec![(r_lo, at(traj_k, r_lo))];
    grid.extend(
        traj_k
            .samples()
            .iter()
            .filter(|s| s.r > r_lo && s.r < r_hi)
            .map(|s| (s.r, (s.psi, s.dpsi))),
    );
    grid.push((r_hi, at(traj_k, r_hi)));

    // G(t) = r w(r) ψ_k ψ_j and dG/dt, t = log r
    let node = |&(r, (pk, dk)): &(f64, (f64, f64))| {
        let (pj, dj) = at(traj_j, r);
        let w = centrifugal_weight(n, r);
        let dw = centrifugal_weight_derivative(n, r);
        let prod = pk * pj;
        let g = r * w * prod;
        let dg = r * (w * prod + r * dw * prod + r * w * (dk * pj + pk * dj));
        (r.ln(), g, dg)
    };
    let values: Vec<(f64, f64, f64)> = grid.iter().map(node).collect();
    let mut integral = 0.0;
    for pair in values.windows(2) {
        let ((ta, ga, da), (tb, gb, db)) = (pair[0], pair[1]);
        let h = tb - ta;
        integral += 0.5 * h * (ga + gb) + h * h / 12.0 * (da - db);
    }
    let scale = (modes::eigenvalue(k, n) - modes::eigenvalue(j, n)) / (n.as_f64() - 1.0);
    let integral = scale * integral;

    let flux = |r: f64| {
        let (pk, dk) = at(traj_k, r);
        let (pj, dj) = at(traj_j, r);
        divergence_weight(n, r).0 * (dk * pj - dj * pk)
    };
    let (f_hi, f_lo) = (flux(r_hi), flux(r_lo));
    let boundary = f_hi - f_lo;
    let residual = (boundary - integral).abs();
    // both sides can vanish by symmetry, so measure against the flux itself
    let denom = (f_hi.abs() + f_lo.abs()).max(integral.abs());
    Ok(LagrangeResidual {
        boundary,
        integral,
        residual,
        relative: if denom > 0.0 { residual / denom } else { 0.0 },
    })
}
